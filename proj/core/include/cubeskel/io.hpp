#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cubeskel {

/// Fixed 12-significant-digit rendering used by every CSV/JSON artifact.
std::string format_double(double x);

/// Rounds to 12 significant digits so JSON output matches the CSV precision.
double round_sig(double x);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers_only = false;
};

struct SvgCircle {
    double cx, cy, r;
};

/// Standalone line/scatter plot; the plotted data are repeated in an XML comment.
std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series);

/// Circles in a square viewport, e.g. the balls of a 2-D trajectory at several times.
std::string svg_circles(const std::string& title, const std::vector<std::vector<SvgCircle>>& frames);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

} // namespace cubeskel

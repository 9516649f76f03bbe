#include "cubeskel/io.hpp"

#include "cubeskel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace cubeskel {

std::string format_double(double x)
{
    if (x == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double round_sig(double x)
{
    if (!std::isfinite(x) || x == 0.0) return x;
    return std::strtod(format_double(x).c_str(), nullptr);
}

namespace {

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

} // namespace

std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series)
{
    constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
        for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
    if (!(x1 > x0)) x0 -= 1, x1 += 1;
    if (!(y1 > y0)) y0 -= 1, y1 += 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<!-- data\n";
    for (const auto& s : series) {
        os << escape(s.label) << '\n';
        for (std::size_t i = 0; i < s.x.size(); ++i) os << format_double(s.x[i]) << ' ' << format_double(s.y[i]) << '\n';
    }
    os << "-->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape(title) << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
        os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
           << format_double(round_sig(xv)) << "</text>\n";
        os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
           << format_double(std::round(yv * 1000) / 1000) << "</text>\n";
    }
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(x_label)
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " << H / 2
       << ")\">" << escape(y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        if (!s.markers_only && s.x.size() > 1) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) os << (i ? " " : "") << px(s.x[i]) << ',' << py(s.y[i]);
            os << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        os << "<text x=\"" << L + 10 << "\" y=\"" << T + 14 * (k + 1) << "\" font-size=\"12\" fill=\"" << color << "\">"
           << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_circles(const std::string& title, const std::vector<std::vector<SvgCircle>>& frames)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& f : frames)
        for (const auto& c : f) {
            lo = std::min({lo, c.cx - c.r, c.cy - c.r});
            hi = std::max({hi, c.cx + c.r, c.cy + c.r});
        }
    if (!(hi > lo)) lo = -1, hi = 1;
    constexpr double S = 600;
    auto sc = [&](double v) { return (v - lo) / (hi - lo) * (S - 40) + 20; };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << S << "\" height=\"" << S + 30 << "\">\n";
    os << "<!-- data: frame cx cy r\n";
    for (std::size_t k = 0; k < frames.size(); ++k)
        for (const auto& c : frames[k])
            os << k << ' ' << format_double(c.cx) << ' ' << format_double(c.cy) << ' ' << format_double(c.r) << '\n';
    os << "-->\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << S / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const char* color = kPalette[k % std::size(kPalette)];
        for (const auto& c : frames[k])
            os << "<circle cx=\"" << sc(c.cx) << "\" cy=\"" << S + 30 - sc(c.cy) << "\" r=\"" << c.r / (hi - lo) * (S - 40)
               << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << contents;
    if (!f) throw Error("cannot write " + path.string());
}

} // namespace cubeskel

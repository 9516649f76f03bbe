#pragma once

#include "cubeskel/maps.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <vector>

namespace cubeskel {

struct Segment3 {
    Eigen::Vector3d a, b;
};

/// Linking number of two closed oriented polygon systems in R^3: the Gauss integral
/// evaluated exactly as a sum of signed solid angles of segment pairs, divided by 4 pi.
double linking_number(const std::vector<Segment3>& first, const std::vector<Segment3>& second);

struct HopfOptions {
    /// Cells per edge of every facet of the box boundary.
    int resolution = 16;
    /// Independent regular-value pairs tried by hopf_invariant_pairs.
    int pairs = 3;
    std::uint64_t seed = 1;
    int attempts_per_resolution = 12;
    int max_refinements = 2;
    /// A vertex value this close to a candidate regular value makes it singular.
    double vertex_tolerance = 1e-6;
    /// Candidate rejected when at least `plateau_fraction` of the vertices map within `plateau_radius`.
    double plateau_radius = 0.05;
    double plateau_fraction = 0.01;
    /// Minimum angle between the two regular values.
    double min_separation = 0.5;
};

struct HopfReport {
    int invariant = 0;
    double raw = 0.0;
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    Eigen::Vector3d q = Eigen::Vector3d::Zero();
    std::size_t segments_p = 0;
    std::size_t segments_q = 0;
    std::size_t components_p = 0;
    std::size_t components_q = 0;
    int resolution = 0;
    int attempts = 0;

    nlohmann::json to_json() const;
};

/// Preimage curves of p under the piecewise-linear interpolant of f on the Kuhn triangulation
/// of the boundary of the box [lo, hi] in R^4, oriented by the outward orientation.
struct PreimageCurves {
    std::vector<std::pair<Eigen::Vector4d, Eigen::Vector4d>> segments;
    std::size_t components = 0;
};

/// Hopf invariant of f on the boundary of a box in R^4 with values in S^2, as the linking number
/// of the preimages of two regular values (pair `pair_index` of the seeded sequence).
/// Only the case n = 1 (R^4 -> S^2) is supported.
HopfReport hopf_invariant(const EvaluableMap& f, const Vec& lo, const Vec& hi, std::uint64_t pair_index,
                          const HopfOptions& opts = {});

/// Runs opts.pairs independent regular-value pairs.
std::vector<HopfReport> hopf_invariant_pairs(const EvaluableMap& f, const Vec& lo, const Vec& hi,
                                             const HopfOptions& opts = {});

} // namespace cubeskel

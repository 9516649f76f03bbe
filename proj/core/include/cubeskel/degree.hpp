#pragma once

#include "cubeskel/maps.hpp"
#include "cubeskel/quadrature.hpp"
#include "cubeskel/rng.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace cubeskel {

/// Positive weight w(y) = 1 + a.y + y^T B y on the unit sphere.
struct SphereWeight {
    Vec a;
    Mat B;

    static SphereWeight uniform(int dimension);
    /// Random smooth weight with |a| + |B| <= 0.6, hence w >= 0.4.
    static SphereWeight random(int dimension, CounterRng& rng);
    double operator()(const Vec& y) const { return 1.0 + a.dot(y) + y.dot(B * y); }
    /// Integral of w over the unit sphere of the given dimension (as a subset of R^dimension).
    double sphere_integral() const;
};

/// Area of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);

struct DegreeEntry {
    Vec sigma;
    double raw = 0.0;
    int degree = 0;
    double residual = 0.0;
    double min_distance = 0.0;
};

struct DegreeReport {
    std::string method = "integral";
    std::vector<DegreeEntry> entries;

    double residual() const;
    long total_abs_degree() const;
    nlohmann::json to_json() const;
};

void write_degree_csv(std::ostream& os, const DegreeReport& report);

struct DegreeOptions {
    int base_depth = 3;
    int depth_cap = 10;
    /// Image closer than this to sigma: ill-conditioned.
    double min_clearance = 0.4;
    /// Residual above this triggers one refinement (base and cap + 1).
    double refine_residual = 0.3;
    /// Residual at or above this after refinement: non-integral.
    double reject_residual = 0.45;
    QuadratureOptions quadrature{};
};

/// deg(f - sigma) on a closed oriented hypersurface (shell or sphere), computed as
/// int det[g, Dg] w(g) / int w with g = (f - sigma)/|f - sigma|.
DegreeEntry degree_integral(const EvaluableMap& f, const Domain& surface, const Vec& sigma,
                            const SphereWeight& weight, const DegreeOptions& opts = {});

/// Degrees with respect to every sigma, sharing one pass over the surface.
DegreeReport joint_degrees(const EvaluableMap& f, const Domain& surface, const std::vector<Vec>& sigmas,
                           const SphereWeight& weight, const DegreeOptions& opts = {});

struct RearrangementResult {
    double sum = 0.0;
    double ratio = 0.0;
};

/// S = sum_sigma |y - sigma|^{-(N-1)} and S / (#Sigma)^{1/N}; requires dist(y, Sigma) >= 1/2.
RearrangementResult rearrangement_bound_check(const std::vector<Vec>& sigmas, const Vec& y);

/// Largest ratio over full k^N cubes, k = 1..k_max, with y ranging over the points of
/// ((1/2)Z)^N at distance >= 1/2 from the cube's lattice points in or near the cube.
double worst_full_cube_ratio(int dimension, int k_max);

/// Open polyhedral cone {y : nu_i . y > 0 for all i}.
struct PolyhedralCone {
    std::vector<Vec> normals;

    static PolyhedralCone orthant(const SignVector& gamma);
    /// The cone intersected with {y_i - y_j > 0}.
    PolyhedralCone halved(int i = 0, int j = 1) const;
    bool contains(const Vec& y) const;
    bool contains_translate(const Vec& y, const std::vector<Vec>& sigmas) const;
    /// H^{N-1}(C cap S^{N-1}) by quadrature over the sphere.
    double spherical_measure(int depth = 7) const;
};

struct ConicalEstimate {
    double lhs = 0.0;       ///< (sum |deg_sigma|)^{1 - 1/N}
    double integral = 0.0;  ///< int over f^{-1}(C + Sigma) of |Df|^{N-1}
    double measure = 0.0;   ///< spherical measure of the cone
    double rhs = 0.0;       ///< integral / measure
    double ratio = 0.0;     ///< lhs / rhs (0 when lhs = 0)
    bool violated = false;  ///< lhs > constant * rhs
    long total_degree = 0;
    nlohmann::json to_json() const;
};

ConicalEstimate conical_estimate_check(const EvaluableMap& f, const Domain& surface, const std::vector<Vec>& sigmas,
                                       const PolyhedralCone& cone, double constant = kInf,
                                       const DegreeOptions& opts = {});

} // namespace cubeskel

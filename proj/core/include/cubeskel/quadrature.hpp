#pragma once

#include "cubeskel/errors.hpp"
#include "cubeskel/maps.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cubeskel {

/// A parametrised piece of a domain, s in [0,1]^k.
/// Affine: x(s) = base + sum_j s_j axes.col(j).
/// Radial: the affine point is pushed onto the sphere of given center and radius.
struct Chart {
    enum class Kind { Affine, Radial };
    Kind kind = Kind::Affine;
    Vec base;
    Mat axes;
    Vec center;
    double radius = 0.0;

    int param_dim() const { return static_cast<int>(axes.cols()); }
    int ambient_dim() const { return static_cast<int>(axes.rows()); }
    Vec point(const Vec& s) const;
    /// Columns are dx/ds_j.
    Mat tangent(const Vec& s) const;
    /// Lower bound on the distance from y to the chart image.
    double distance_lower_bound(const Vec& y) const;
    /// The same chart with reversed orientation.
    Chart reversed() const;
};

/// Union of charts with disjoint interiors, each positively oriented
/// (for boundaries: outward normal first).
class Domain {
public:
    Domain(std::string kind, std::vector<Chart> charts, nlohmann::json parameters);

    const std::string& kind() const { return kind_; }
    const std::vector<Chart>& charts() const { return charts_; }
    int dimension() const { return charts_.front().param_dim(); }
    int ambient_dim() const { return charts_.front().ambient_dim(); }
    nlohmann::json descriptor() const;
    /// Short text used in CSV rows.
    std::string label() const;
    Domain reversed() const;

private:
    std::string kind_;
    std::vector<Chart> charts_;
    nlohmann::json parameters_;
};

Domain make_box(const Vec& lo, const Vec& hi);
/// Several boxes treated as one domain.
Domain make_boxes(const std::vector<std::pair<Vec, Vec>>& boxes);
/// Boundary of the box [lo, hi], outward oriented.
Domain make_box_boundary(const Vec& lo, const Vec& hi);
/// Boundary of the cube with the given center and edge length (the shell dQ^t).
Domain make_shell(const Vec& center, double edge);
/// Round sphere, charted by radially projecting the faces of a cube.
Domain make_sphere(const Vec& center, double radius);

struct QuadratureOptions {
    int base_depth = 3;
    int depth_cap = 14;
    /// A cell is split while dist(center, singular set) < grading * diameter.
    double grading = 1.0;
    /// Root cells have geometric edge at most this.
    double root_size = 1.0;
    /// Finite-difference step as a fraction of min(cell size, distance to singularity).
    /// Small enough that stencils around the Gauss nodes do not straddle the diagonal kinks
    /// of the skeleton retraction inside a dyadic cell.
    double fd_fraction = 1.0 / 32.0;
    std::size_t budget_cells = 40'000'000;
    unsigned threads = 1;
};

struct EnergyEstimate {
    double value = 0.0;
    double error_bound = 0.0;
    double p = 0.0;
    std::string domain;
    std::size_t sample_count = 0;

    nlohmann::json to_json() const;
};

void write_energy_csv_header(std::ostream& os);
void write_energy_csv_row(std::ostream& os, const EnergyEstimate& e);

class BudgetError : public Error {
public:
    BudgetError(const std::string& what, EnergyEstimate partial) : Error(what), partial_(std::move(partial)) {}
    const EnergyEstimate& partial() const { return partial_; }

private:
    EnergyEstimate partial_;
};

/// Data available to an integrand at one quadrature node.
struct Jet {
    const Vec& x;      ///< ambient point
    const Vec& value;  ///< f(x)
    const Mat& J;      ///< d(f o x)/ds, codomain x k
    const Mat& T;      ///< dx/ds, ambient x k
    const Mat& Ginv;   ///< inverse metric (T^T T)^{-1}
    double area;       ///< sqrt(det T^T T)
};

// Integrands return a density with respect to the area element; the engine multiplies by `area`.

using JetIntegrand = std::function<void(const Jet&, Eigen::VectorXd& out)>;

struct IntegralResult {
    Eigen::VectorXd value;
    std::size_t cells = 0;
    std::size_t samples = 0;
};

/// Integrates a functional of the tangential 1-jet of f over a domain with one refinement schedule.
IntegralResult integrate_jets(const EvaluableMap& f, const Domain& domain, int components, const JetIntegrand& integrand,
                              int base_depth, int depth_cap, const QuadratureOptions& opts = {});

/// Integrates a scalar function (times the area element) over a domain.
IntegralResult integrate_function(const std::function<double(const Vec&)>& g, const Domain& domain,
                                  const SingularSet& singular, int base_depth, int depth_cap,
                                  const QuadratureOptions& opts = {});

/// Squared Frobenius norm of the tangential derivative, tr(J G^{-1} J^T).
double tangential_norm2(const Jet& jet);

/// Energy of f over the domain: integral of |D_T f|^p, with a Richardson-style error bound
/// 2|E(base+1, cap) - E(base, cap-1)|.
EnergyEstimate energy(const EvaluableMap& f, const Domain& domain, double p, const QuadratureOptions& opts = {});

struct ShellSample {
    double t;
    EnergyEstimate energy;
};

struct ShellSliceResult {
    double t_star = 0.0;
    EnergyEstimate shell;
    std::vector<ShellSample> samples;
    double mean_energy = 0.0;
    /// Energy over 3ell < 2|x - c|_inf < 5ell, i.e. the union of the boundary blocks.
    EnergyEstimate annulus;
};

/// Sup-distance from the singular points of f to the shell with edge t centred at c.
double shell_clearance(const EvaluableMap& f, const Vec& center, double t);

/// Samples `count` equally spaced shells dQ^t (t in (3ell, 5ell), centred at (5ell/2,...)),
/// keeps those at sup-distance >= 1/4 from the singular set and returns the least energetic.
ShellSliceResult shell_slice_search(const EvaluableMap& f, std::int64_t ell, double p, int count = 64,
                                    const QuadratureOptions& opts = {}, bool with_annulus = true);

/// Admissible shell parameters among `count` equally spaced samples of (3ell, 5ell).
std::vector<double> admissible_shells(const EvaluableMap& f, std::int64_t ell, int count = 64);

} // namespace cubeskel

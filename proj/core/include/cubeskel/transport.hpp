#pragma once

#include "cubeskel/lattice.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cubeskel {

/// Integer flow through the (N-1)-faces of a cubical grid with per-cell supplies.
/// One value per unoriented face, stored in the canonical orientation (towards +axis);
/// reading it through the opposite orientation flips the sign.
struct FaceFlow {
    CubicalGrid grid;
    std::vector<std::int64_t> flow;      ///< indexed by facet id
    std::vector<std::int64_t> supplies;  ///< indexed by cell id
    double alpha = 1.0;

    FaceFlow(CubicalGrid grid, std::vector<std::int64_t> supplies, double alpha);

    /// d_sigma read through an oriented face.
    std::int64_t value(const OrientedFace& face) const;
    /// Adds `amount` leaving the owning cell through `face`.
    void push(const OrientedFace& face, std::int64_t amount);
    /// Outward flux sum over the faces of a cell.
    std::int64_t divergence(std::size_t cell_id) const;
    double cost() const;
};

/// |d|^alpha summed over faces in increasing order of magnitude, so the result does not
/// depend on face numbering.
double flow_cost(const std::vector<std::int64_t>& flow, double alpha);

struct KirchhoffViolation {
    std::size_t cell = 0;
    std::int64_t divergence = 0;
    std::int64_t supply = 0;
};

struct ValidationReport {
    bool valid = false;
    double cost = 0.0;
    std::vector<KirchhoffViolation> violations;
    std::string message;

    nlohmann::json to_json() const;
};

/// Never throws; malformed input is reported as invalid with a message.
ValidationReport validate(const FaceFlow& flow) noexcept;

struct ExactOptions {
    std::int64_t flow_cap = 8;
    /// Search nodes before giving up certification.
    std::uint64_t node_budget = 200'000'000;
};

struct ExactResult {
    FaceFlow flow;
    double cost = 0.0;
    bool certified = false;
    std::uint64_t nodes = 0;
};

/// Branch-and-bound over integer flows with |d| <= flow_cap. Faces are decided in cell-major
/// order (faces of cell 0, then the new faces of cell 1, ...); values are tried as
/// 0, +1, -1, +2, -2, ...; the first optimum found is kept. A face that is the last open
/// face of a cell is forced by Kirchhoff's law.
ExactResult exact_min(const CubicalGrid& grid, const std::vector<std::int64_t>& supplies, double alpha,
                      const ExactOptions& opts = {});

/// Every cell sends its own supply straight along one axis to the nearest boundary face
/// (smallest axis, then the minus side, on ties).
FaceFlow naive_plan(const CubicalGrid& grid, const std::vector<std::int64_t>& supplies, double alpha);

/// Hierarchical aggregation for ell = 2^k: at each scale the 2^N sub-blocks send their
/// collected mass from their min-corner cell to the parent's min-corner cell along
/// axis-ordered paths; the root exports through the minus face of axis 0.
/// Throws ParameterError when ell is not a power of two.
FaceFlow dyadic_plan(const CubicalGrid& grid, const std::vector<std::int64_t>& supplies, double alpha);

struct LocalSearchOptions {
    /// Maximum number of sweeps over all cycles.
    std::size_t max_sweeps = 1000;
    /// Maximum number of accepted moves.
    std::size_t max_moves = 100'000'000;
};

struct LocalSearchResult {
    FaceFlow flow;
    double initial_cost = 0.0;
    double cost = 0.0;
    std::size_t moves = 0;
    std::size_t sweeps = 0;
    bool converged = false;
};

/// Circulation moves around unit cycles of the dual graph (cells plus one exterior node):
/// squares around interior (N-2)-faces, squares through the exterior along the boundary and
/// two-face loops at cells with several boundary faces. Each cycle tries pushes of +1, -1 and
/// the pushes that zero one of its faces; a move is accepted only if it lowers the cost.
LocalSearchResult local_search(const FaceFlow& initial, const LocalSearchOptions& opts = {});

/// Per-cell degree table on a grid.
struct DegreeTable {
    CubicalGrid grid;
    std::vector<std::int64_t> degrees;  ///< indexed by cell id
};

/// b_Q = deg(u on dQ) - deg(u_k on dQ). Throws ShapeError when the tables differ in shape.
std::vector<std::int64_t> attribution_from_degrees(const DegreeTable& u, const DegreeTable& uk);

std::vector<std::int64_t> uniform_supplies(const CubicalGrid& grid, std::int64_t b);

struct ScalingSample {
    std::int64_t ell = 0;
    double cost = 0.0;
};

/// Least-squares fit of cost / ell^N = a + b ln ell.
struct ScalingFit {
    int dimension = 0;
    std::vector<ScalingSample> samples;
    double a = 0.0;
    double b = 0.0;
    double r2 = 0.0;
    double b_stderr = 0.0;
    /// Lower end of the two-sided 95% Student-t interval for b.
    double b_lower95 = 0.0;

    bool b_positive_95() const { return b_lower95 > 0.0; }
    nlohmann::json to_json() const;
};

/// Throws FitError with fewer than 3 samples or a degenerate design.
ScalingFit fit_log_scaling(int dimension, std::vector<ScalingSample> samples);

enum class Solver { Naive, Dyadic, DyadicLocal, Exact };

Solver solver_from_string(const std::string& name);
std::string to_string(Solver s);

/// Cost of the chosen plan for uniform supply b on [0, ell]^N.
double plan_cost(int dimension, std::int64_t ell, double alpha, std::int64_t b, Solver solver);

ScalingFit scaling_study(int dimension, double alpha, const std::vector<std::int64_t>& ells, Solver solver,
                         std::int64_t b = 2);

nlohmann::json instance_to_json(const CubicalGrid& grid, const std::vector<std::int64_t>& supplies, double alpha);
/// Returns the grid, supplies and alpha of an instance {N, ell, alpha, supplies}.
FaceFlow instance_from_json(const nlohmann::json& j);

/// CSV rows face_id,d for the nonzero faces.
void write_flow_csv(std::ostream& os, const FaceFlow& flow);
/// CSV rows ell,cost,cost_over_ellN.
void write_scaling_csv(std::ostream& os, const ScalingFit& fit);
/// Plot of cost / ell^N against ln ell with the fitted line.
std::string scaling_svg(const ScalingFit& fit, const std::string& title);

} // namespace cubeskel

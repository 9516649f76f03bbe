#pragma once

#include "cubeskel/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cubeskel {

/// Closed Euclidean ball. `id` is carried through trajectories; -1 means unassigned.
struct Ball {
    Vec center;
    double radius = 0.0;
    int id = -1;

    bool contains(const Ball& other, double rel_tol = 0.0) const;
    bool intersects(const Ball& other) const;
};

/// Smallest ball containing two intersecting closed balls. Nested inputs return the
/// larger ball unchanged; otherwise rho = (rho0 + d + rho1) / 2.
/// Throws PreconditionError when the closed balls are disjoint.
Ball merge_pair(const Ball& b0, const Ball& b1);

struct BallFamily {
    double time = 0.0;
    std::vector<Ball> balls;
    /// Sum of the radii of the initial family.
    double initial_radius_sum = 0.0;

    double radius_sum() const;
    int dimension() const { return balls.empty() ? 0 : static_cast<int>(balls.front().center.size()); }
};

/// Exponential growth rho_j(t) = e^{t - T_k} rho_j(T_k) between merge events T_k.
class BallTrajectory {
public:
    /// Families right after each event; segment k is valid on [time_k, time_{k+1}).
    const std::vector<BallFamily>& segments() const { return segments_; }
    const BallFamily& initial() const { return initial_; }
    /// Times at which at least one merge happened (t = 0 included if the input overlapped).
    const std::vector<double>& event_times() const { return events_; }
    std::size_t event_count() const { return events_.size(); }
    double first_merge_time() const { return events_.empty() ? kInf : events_.front(); }

    BallFamily state_at(double t) const;
    std::vector<BallFamily> sample(const std::vector<double>& times) const;

private:
    friend BallTrajectory grow(const std::vector<Ball>& initial, double t_max);
    BallFamily initial_;
    std::vector<BallFamily> segments_;
    std::vector<double> events_;
};

/// Runs the growth process until a single ball remains or t_max is passed.
/// Initial ids are the input positions; each merge gets a fresh id.
BallTrajectory grow(const std::vector<Ball>& initial, double t_max = kInf);

struct BallInvariantReport {
    bool disjoint = true;
    bool covers_initial = true;
    bool radius_sum_bound = true;
    /// Sum of radii equals e^t R0 (to rounding); expected exactly before the first merge.
    bool radius_sum_equal = false;

    bool ok() const { return disjoint && covers_initial && radius_sum_bound; }
};

/// Checks disjointness (strict, no tolerance), coverage of the initial balls and
/// sum rho <= e^t R0 (relative slack 1e-12 for rounding of the exponentials).
BallInvariantReport check_invariants(const BallTrajectory& trajectory, const BallFamily& state);

/// Nonnegative samples on a regular grid, extended multilinearly inside the box and by zero outside.
class GridFunction {
public:
    /// values are indexed with axis 0 fastest; nodes lo + h * k, k_i in [0, nodes[i]).
    GridFunction(Vec lo, double spacing, std::vector<int> nodes, std::vector<double> values);

    template <class F>
    static GridFunction sample(const Vec& lo, double spacing, const std::vector<int>& nodes, F&& fn);

    int dimension() const { return static_cast<int>(lo_.size()); }
    const Vec& lo() const { return lo_; }
    Vec hi() const;
    double spacing() const { return h_; }
    const std::vector<int>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    double min_value() const;

    double operator()(const Vec& x) const;
    /// Exact integral of the multilinear interpolant (tensor trapezoid rule).
    double integral() const;

private:
    Vec lo_;
    double h_;
    std::vector<int> nodes_;
    std::vector<double> values_;
};

struct CoareaOptions {
    /// Sphere quadrature depth; the error estimate compares with depth - 1.
    int sphere_depth = 4;
};

struct CoareaReport {
    double lhs = 0.0;
    double lhs_error = 0.0;
    double rhs = 0.0;
    double t_max = 0.0;
    std::size_t intervals = 0;

    bool holds() const { return lhs <= rhs + lhs_error; }
    nlohmann::json to_json() const;
};

/// lhs = int_0^{t_max} sum_j rho_j(t) int_{dB_j(t)} f dt (Gauss-Kronrod per event interval),
/// rhs = int f over the grid box. Throws DomainError on a negative sample and
/// PreconditionError when the balls at t_max leave the grid box.
CoareaReport coarea_account(const BallTrajectory& trajectory, const GridFunction& f, double t_max,
                            const CoareaOptions& opts = {});

/// CSV rows t,id,c_0..c_{N-1},radius for each sampled family.
void write_trajectory_csv(std::ostream& os, const std::vector<BallFamily>& states);
/// Circles of 2-D families, one frame per sampled time.
std::string trajectory_svg(const std::vector<BallFamily>& states);

template <class F>
GridFunction GridFunction::sample(const Vec& lo, double spacing, const std::vector<int>& nodes, F&& fn)
{
    std::size_t total = 1;
    for (int n : nodes) total *= static_cast<std::size_t>(n);
    std::vector<double> values(total);
    Vec x(lo.size());
    std::vector<int> k(nodes.size(), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        for (std::size_t a = 0; a < nodes.size(); ++a) x[static_cast<Eigen::Index>(a)] = lo[static_cast<Eigen::Index>(a)] + spacing * k[a];
        values[idx] = fn(x);
        for (std::size_t a = 0; a < nodes.size(); ++a) {
            if (++k[a] < nodes[a]) break;
            k[a] = 0;
        }
    }
    return GridFunction(lo, spacing, nodes, std::move(values));
}

} // namespace cubeskel

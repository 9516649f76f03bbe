#include "cubeskel/balls.hpp"

#include "cubeskel/errors.hpp"
#include "cubeskel/io.hpp"
#include "cubeskel/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cubeskel {

namespace {

// Pairs whose gap is within this relative amount of touching are merged in the cascade.
constexpr double kTouchTol = 1e-12;

bool lex_less(const Ball& a, const Ball& b)
{
    for (Eigen::Index i = 0; i < a.center.size(); ++i) {
        if (a.center[i] != b.center[i]) return a.center[i] < b.center[i];
    }
    return a.radius < b.radius;
}

// The merge formula without the intersection check; still encloses both balls when they
// are a rounding error apart.
Ball enclosing(const Ball& b0_in, const Ball& b1_in)
{
    const bool swap = lex_less(b1_in, b0_in);
    const Ball& b0 = swap ? b1_in : b0_in;
    const Ball& b1 = swap ? b0_in : b1_in;
    const double d = (b1.center - b0.center).norm();
    if (d + b1.radius <= b0.radius) return b0;
    if (d + b0.radius <= b1.radius) return b1;
    Ball out;
    out.radius = 0.5 * (b0.radius + d + b1.radius);
    out.center = b0.center + ((out.radius - b0.radius) / d) * (b1.center - b0.center);
    return out;
}

// Merges touching pairs, smallest (i, j) first, until the closed balls are pairwise disjoint.
// Returns the number of merges.
int cascade(std::vector<Ball>& balls, int& next_id)
{
    int merges = 0;
    for (;;) {
        bool merged = false;
        for (std::size_t i = 0; i < balls.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < balls.size(); ++j) {
                double d = (balls[i].center - balls[j].center).norm();
                if (d <= (balls[i].radius + balls[j].radius) * (1.0 + kTouchTol)) {
                    Ball m = enclosing(balls[i], balls[j]);
                    m.id = next_id++;
                    balls[i] = m;
                    balls.erase(balls.begin() + static_cast<std::ptrdiff_t>(j));
                    merged = true;
                    ++merges;
                    break;
                }
            }
        }
        if (!merged) return merges;
    }
}

} // namespace

bool Ball::contains(const Ball& other, double rel_tol) const
{
    return (center - other.center).norm() + other.radius <= radius * (1.0 + rel_tol);
}

bool Ball::intersects(const Ball& other) const
{
    return (center - other.center).norm() <= radius + other.radius;
}

Ball merge_pair(const Ball& b0_in, const Ball& b1_in)
{
    if (b0_in.center.size() != b1_in.center.size()) throw DimensionError("merge_pair: dimension mismatch");
    if (!(b0_in.radius > 0.0) || !(b1_in.radius > 0.0)) throw ParameterError("merge_pair: radii must be positive");
    if ((b1_in.center - b0_in.center).norm() > b0_in.radius + b1_in.radius) {
        throw PreconditionError("merge_pair: closed balls are disjoint");
    }
    // canonical argument order inside makes the result independent of it
    return enclosing(b0_in, b1_in);
}

double BallFamily::radius_sum() const
{
    double s = 0.0;
    for (const auto& b : balls) s += b.radius;
    return s;
}

BallTrajectory grow(const std::vector<Ball>& initial, double t_max)
{
    BallTrajectory traj;
    traj.initial_.time = 0.0;
    traj.initial_.balls = initial;
    for (std::size_t i = 0; i < initial.size(); ++i) {
        if (!(initial[i].radius > 0.0)) throw ParameterError("grow: radii must be positive");
        if (initial[i].center.size() != initial.front().center.size()) throw DimensionError("grow: dimension mismatch");
        traj.initial_.balls[i].id = static_cast<int>(i);
    }
    traj.initial_.initial_radius_sum = traj.initial_.radius_sum();

    int next_id = static_cast<int>(initial.size());
    BallFamily current = traj.initial_;
    if (cascade(current.balls, next_id) > 0) traj.events_.push_back(0.0);
    traj.segments_.push_back(current);

    while (current.balls.size() > 1) {
        double best = kInf;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < current.balls.size(); ++i) {
            for (std::size_t j = i + 1; j < current.balls.size(); ++j) {
                const auto& a = current.balls[i];
                const auto& b = current.balls[j];
                double t = current.time + std::log((a.center - b.center).norm() / (a.radius + b.radius));
                if (t < best) {
                    best = t;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best > t_max) break;
        const double scale = std::exp(best - current.time);
        for (auto& b : current.balls) b.radius *= scale;
        current.time = best;
        if (cascade(current.balls, next_id) == 0) {
            // rounding left the first-touch pair just apart; merge it as touching
            Ball m = enclosing(current.balls[bi], current.balls[bj]);
            m.id = next_id++;
            current.balls[bi] = m;
            current.balls.erase(current.balls.begin() + static_cast<std::ptrdiff_t>(bj));
            cascade(current.balls, next_id);
        }
        traj.events_.push_back(best);
        traj.segments_.push_back(current);
    }
    return traj;
}

BallFamily BallTrajectory::state_at(double t) const
{
    if (t < 0.0) throw ParameterError("state_at: negative time");
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const BallFamily& f) { return v < f.time; });
    BallFamily out = *std::prev(it);
    const double scale = std::exp(t - out.time);
    for (auto& b : out.balls) b.radius *= scale;
    out.time = t;
    return out;
}

std::vector<BallFamily> BallTrajectory::sample(const std::vector<double>& times) const
{
    std::vector<BallFamily> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(state_at(t));
    return out;
}

BallInvariantReport check_invariants(const BallTrajectory& trajectory, const BallFamily& state)
{
    BallInvariantReport r;
    const auto& balls = state.balls;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        for (std::size_t j = i + 1; j < balls.size(); ++j) {
            if ((balls[i].center - balls[j].center).norm() <= balls[i].radius + balls[j].radius) r.disjoint = false;
        }
    }
    for (const auto& b0 : trajectory.initial().balls) {
        bool covered = std::any_of(balls.begin(), balls.end(), [&](const Ball& b) { return b.contains(b0, 1e-12); });
        if (!covered) r.covers_initial = false;
    }
    const double bound = std::exp(state.time) * state.initial_radius_sum;
    const double sum = state.radius_sum();
    r.radius_sum_bound = sum <= bound * (1.0 + 1e-12);
    r.radius_sum_equal = std::abs(sum - bound) <= 1e-12 * bound;
    return r;
}

GridFunction::GridFunction(Vec lo, double spacing, std::vector<int> nodes, std::vector<double> values)
    : lo_(std::move(lo)), h_(spacing), nodes_(std::move(nodes)), values_(std::move(values))
{
    if (static_cast<std::size_t>(lo_.size()) != nodes_.size()) throw DimensionError("GridFunction: lo/nodes mismatch");
    if (!(h_ > 0.0)) throw ParameterError("GridFunction: spacing must be positive");
    std::size_t total = 1;
    for (int n : nodes_) {
        if (n < 2) throw ParameterError("GridFunction: need at least two nodes per axis");
        total *= static_cast<std::size_t>(n);
    }
    if (values_.size() != total) throw ShapeError("GridFunction: value count does not match the grid");
}

Vec GridFunction::hi() const
{
    Vec h = lo_;
    for (Eigen::Index a = 0; a < h.size(); ++a) h[a] += h_ * (nodes_[static_cast<std::size_t>(a)] - 1);
    return h;
}

double GridFunction::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

double GridFunction::operator()(const Vec& x) const
{
    const int n = dimension();
    std::size_t base = 0, stride = 1;
    std::vector<std::size_t> strides(static_cast<std::size_t>(n));
    std::vector<double> frac(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        double s = (x[a] - lo_[a]) / h_;
        if (s < 0.0 || s > nodes_[ua] - 1) return 0.0;
        int k = std::min(static_cast<int>(s), nodes_[ua] - 2);
        frac[ua] = s - k;
        strides[ua] = stride;
        base += static_cast<std::size_t>(k) * stride;
        stride *= static_cast<std::size_t>(nodes_[ua]);
    }
    double acc = 0.0;
    for (unsigned corner = 0; corner < (1u << n); ++corner) {
        double w = 1.0;
        std::size_t idx = base;
        for (int a = 0; a < n; ++a) {
            const auto ua = static_cast<std::size_t>(a);
            if (corner & (1u << a)) {
                w *= frac[ua];
                idx += strides[ua];
            } else {
                w *= 1.0 - frac[ua];
            }
        }
        if (w != 0.0) acc += w * values_[idx];
    }
    return acc;
}

double GridFunction::integral() const
{
    std::vector<int> k(nodes_.size(), 0);
    double acc = 0.0;
    for (double v : values_) {
        double w = 1.0;
        for (std::size_t a = 0; a < nodes_.size(); ++a) {
            if (k[a] == 0 || k[a] == nodes_[a] - 1) w *= 0.5;
        }
        acc += w * v;
        for (std::size_t a = 0; a < nodes_.size(); ++a) {
            if (++k[a] < nodes_[a]) break;
            k[a] = 0;
        }
    }
    return acc * std::pow(h_, dimension());
}

nlohmann::json CoareaReport::to_json() const
{
    return {{"lhs", round_sig(lhs)},
            {"lhs_error", round_sig(lhs_error)},
            {"rhs", round_sig(rhs)},
            {"t_max", round_sig(t_max)},
            {"intervals", intervals},
            {"holds", holds()}};
}

CoareaReport coarea_account(const BallTrajectory& trajectory, const GridFunction& f, double t_max,
                            const CoareaOptions& opts)
{
    if (!(t_max >= 0.0)) throw ParameterError("coarea_account: t_max must be nonnegative");
    if (f.min_value() < 0.0) throw DomainError("coarea_account: negative sample");
    if (opts.sphere_depth < 1) throw ParameterError("coarea_account: sphere_depth must be >= 1");
    const int n = f.dimension();
    if (trajectory.initial().dimension() != n) throw DimensionError("coarea_account: grid and balls differ in dimension");

    const Vec lo = f.lo(), hi = f.hi();
    for (const auto& b : trajectory.state_at(t_max).balls) {
        for (int a = 0; a < n; ++a) {
            if (b.center[a] - b.radius < lo[a] - 1e-9 || b.center[a] + b.radius > hi[a] + 1e-9) {
                throw PreconditionError("coarea_account: grid does not cover the balls at t_max");
            }
        }
    }

    CoareaReport report;
    report.t_max = t_max;
    report.rhs = f.integral();
    const auto g = [&f](const Vec& x) { return f(x); };
    const auto shell_sum = [&](double t, int depth) {
        double s = 0.0;
        for (const auto& b : trajectory.state_at(t).balls) {
            auto r = integrate_function(g, make_sphere(b.center, b.radius), SingularSet::none(), depth, depth);
            s += b.radius * r.value[0];
        }
        return s;
    };

    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    const auto& segs = trajectory.segments();
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const double a = segs[k].time;
        const double b = std::min(k + 1 < segs.size() ? segs[k + 1].time : kInf, t_max);
        if (!(b > a)) continue;
        // evaluate strictly inside the interval so state_at picks segment k
        double gk_error = 0.0;
        const double fine =
            GK::integrate([&](double t) { return shell_sum(t, opts.sphere_depth); }, a, b, 0, 0.0, &gk_error);
        const double coarse = GK::integrate([&](double t) { return shell_sum(t, opts.sphere_depth - 1); }, a, b, 0, 0.0);
        report.lhs += fine;
        report.lhs_error += gk_error + std::abs(fine - coarse);
        ++report.intervals;
    }
    return report;
}

void write_trajectory_csv(std::ostream& os, const std::vector<BallFamily>& states)
{
    const int n = states.empty() ? 0 : states.front().dimension();
    os << "t,id";
    for (int a = 0; a < n; ++a) os << ",c" << a;
    os << ",radius\n";
    for (const auto& s : states) {
        for (const auto& b : s.balls) {
            os << format_double(s.time) << ',' << b.id;
            for (int a = 0; a < n; ++a) os << ',' << format_double(b.center[a]);
            os << ',' << format_double(b.radius) << '\n';
        }
    }
}

std::string trajectory_svg(const std::vector<BallFamily>& states)
{
    std::vector<std::vector<SvgCircle>> frames;
    for (const auto& s : states) {
        if (s.dimension() != 2) throw DimensionError("trajectory_svg: 2-D families only");
        std::vector<SvgCircle> frame;
        for (const auto& b : s.balls) frame.push_back({b.center[0], b.center[1], b.radius});
        frames.push_back(std::move(frame));
    }
    return svg_circles("growing balls", frames);
}

} // namespace cubeskel

#include "cubeskel/maps.hpp"

#include "cubeskel/errors.hpp"
#include "cubeskel/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cubeskel {

SingularSet SingularSet::lattice(Vec offset)
{
    SingularSet s;
    s.kind = Kind::Lattice;
    s.offset = std::move(offset);
    return s;
}

SingularSet SingularSet::finite(std::vector<Vec> points)
{
    SingularSet s;
    s.kind = Kind::Points;
    s.points = std::move(points);
    return s;
}

double SingularSet::distance(const Vec& x) const
{
    switch (kind) {
    case Kind::None:
        return kInf;
    case Kind::Lattice: {
        Vec y = x - offset;
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] -= std::round(y[i]);
        return y.norm();
    }
    case Kind::Points: {
        double d = kInf;
        for (const auto& p : points) d = std::min(d, (x - p).norm());
        return d;
    }
    }
    return kInf;
}

std::vector<Vec> SingularSet::points_in_box(const Vec& lo, const Vec& hi) const
{
    std::vector<Vec> out;
    auto inside = [&](const Vec& p) {
        for (Eigen::Index i = 0; i < p.size(); ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    };
    if (kind == Kind::Points) {
        for (const auto& p : points)
            if (inside(p)) out.push_back(p);
    } else if (kind == Kind::Lattice) {
        const auto n = lo.size();
        std::vector<std::int64_t> first(static_cast<std::size_t>(n)), last(first), k(first);
        for (Eigen::Index i = 0; i < n; ++i) {
            first[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::ceil(lo[i] - offset[i]));
            last[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(hi[i] - offset[i]));
            if (first[static_cast<std::size_t>(i)] > last[static_cast<std::size_t>(i)]) return out;
        }
        k = first;
        while (true) {
            Vec p(n);
            for (Eigen::Index i = 0; i < n; ++i) p[i] = offset[i] + static_cast<double>(k[static_cast<std::size_t>(i)]);
            out.push_back(p);
            Eigen::Index i = 0;
            for (; i < n; ++i) {
                auto& ki = k[static_cast<std::size_t>(i)];
                if (ki < last[static_cast<std::size_t>(i)]) {
                    ++ki;
                    break;
                }
                ki = first[static_cast<std::size_t>(i)];
            }
            if (i == n) break;
        }
    }
    return out;
}

const SingularSet& EvaluableMap::singular_set() const
{
    static const SingularSet empty;
    return empty;
}

void EvaluableMap::check_input(const Vec& x) const
{
    if (x.size() != domain_dim()) throw DimensionError("input has wrong dimension");
}

Mat finite_difference_jacobian(const EvaluableMap& f, const Vec& x, double h)
{
    const int n = f.domain_dim();
    Mat J(f.codomain_dim(), n);
    Vec xp = x, xm = x;
    for (int j = 0; j < n; ++j) {
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        J.col(j) = (f.evaluate(xp) - f.evaluate(xm)) / (2.0 * h);
        xp[j] = xm[j] = x[j];
    }
    return J;
}

void write_samples_csv(std::ostream& os, const EvaluableMap& f, const std::vector<Vec>& points)
{
    for (int i = 0; i < f.domain_dim(); ++i) os << (i ? "," : "") << 'x' << i;
    for (int i = 0; i < f.codomain_dim(); ++i) os << ",y" << i;
    os << '\n';
    for (const auto& p : points) {
        const Vec y = f.evaluate(p);
        for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? "," : "") << format_double(p[i]);
        for (Eigen::Index i = 0; i < y.size(); ++i) os << ',' << format_double(y[i]);
        os << '\n';
    }
}

namespace {

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

} // namespace

ConstantMap::ConstantMap(int domain_dim, Vec value) : n_(domain_dim), value_(std::move(value))
{
    if (n_ < 1 || n_ > kMaxDim) throw DimensionError("bad domain dimension");
}

Vec ConstantMap::evaluate(const Vec& x) const
{
    check_input(x);
    return value_;
}

nlohmann::json ConstantMap::descriptor() const
{
    return {{"kind", "constant"}, {"parameters", {{"domain_dim", n_}, {"value", to_std(value_)}}}};
}

AffineMap::AffineMap(Mat a, Vec b) : a_(std::move(a)), b_(std::move(b))
{
    if (b_.size() != a_.rows()) throw DimensionError("affine offset has wrong dimension");
}

Vec AffineMap::evaluate(const Vec& x) const
{
    check_input(x);
    return a_ * x + b_;
}

nlohmann::json AffineMap::descriptor() const
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a_.rows(); ++i) rows.push_back(to_std(a_.row(i).transpose()));
    return {{"kind", "affine"}, {"parameters", {{"A", rows}, {"b", to_std(b_)}}}};
}

ShiftedMap::ShiftedMap(MapPtr f, Vec shift) : f_(std::move(f)), shift_(std::move(shift))
{
    if (shift_.size() != f_->codomain_dim()) throw DimensionError("shift has wrong dimension");
}

nlohmann::json ShiftedMap::descriptor() const
{
    return {{"kind", "shifted"}, {"parameters", {{"map", f_->descriptor()}, {"shift", to_std(shift_)}}}};
}

ComposedMap::ComposedMap(MapPtr outer, MapPtr inner) : outer_(std::move(outer)), inner_(std::move(inner))
{
    if (outer_->domain_dim() != inner_->codomain_dim()) throw DimensionError("composition dimensions do not match");
}

DerivativeBound ComposedMap::derivative_bound() const
{
    const auto a = outer_->derivative_bound();
    const auto b = inner_->derivative_bound();
    return {a.constant * b.constant, b.singular_profile};
}

nlohmann::json ComposedMap::descriptor() const
{
    return {{"kind", "composed"}, {"parameters", {{"outer", outer_->descriptor()}, {"inner", inner_->descriptor()}}}};
}

HopfFibration::HopfFibration() : sing_(SingularSet::finite({Vec::Zero(4)})) {}

Vec HopfFibration::evaluate(const Vec& x) const
{
    check_input(x);
    const double r = x.norm();
    if (r == 0.0) throw SingularityError("Hopf fibration evaluated at the origin");
    const Vec z = x / r;
    // z1 = z0 + i z1, z2 = z2 + i z3; output (2 z1 conj(z2), |z1|^2 - |z2|^2)
    Vec out(3);
    out[0] = 2.0 * (z[0] * z[2] + z[1] * z[3]);
    out[1] = 2.0 * (z[1] * z[2] - z[0] * z[3]);
    out[2] = z[0] * z[0] + z[1] * z[1] - z[2] * z[2] - z[3] * z[3];
    return out;
}

SkeletonRetraction::SkeletonRetraction(int dimension)
    : n_(dimension), sing_(SingularSet::lattice(Vec::Constant(dimension, 0.5)))
{
    if (n_ < 2 || n_ > kMaxDim) throw DimensionError("skeleton retraction needs 2 <= N <= 16");
}

Vec SkeletonRetraction::evaluate(const Vec& x) const
{
    check_input(x);
    Vec sigma(n_);
    for (int i = 0; i < n_; ++i) sigma[i] = std::floor(x[i]) + 0.5;
    const Vec d = x - sigma;
    const double m = sup_norm(d);
    if (m == 0.0) throw SingularityError("skeleton retraction evaluated at a cell center");
    return sigma + d / (2.0 * m);
}

nlohmann::json SkeletonRetraction::descriptor() const
{
    return {{"kind", "skeleton_retraction"}, {"parameters", {{"N", n_}}}};
}

double SkeletonRetraction::sharp_constant() const
{
    return std::sqrt(0.5 * n_ * (n_ - 1));
}

double SkeletonRetraction::skeleton_distance(const Vec& x)
{
    double d = kInf;
    for (Eigen::Index i = 0; i < x.size(); ++i) d = std::min(d, std::abs(x[i] - std::round(x[i])));
    return d;
}

CubeProjection::CubeProjection(std::int64_t edge_count, BlockIndex alpha) : ell_(edge_count), alpha_(std::move(alpha))
{
    if (ell_ < 1) throw ParameterError("edge count must be positive");
    const int n = static_cast<int>(alpha_.size());
    if (n < 1 || n > kMaxDim) throw DimensionError("bad block dimension");
    c_ = BlockDecomposition(n, ell_).center(alpha_);
}

Vec CubeProjection::lower() const { return c_.array() - 0.5 * static_cast<double>(ell_); }
Vec CubeProjection::upper() const { return c_.array() + 0.5 * static_cast<double>(ell_); }

Vec CubeProjection::evaluate(const Vec& x) const
{
    check_input(x);
    const Vec y = x - c_;
    const double m = sup_norm(y);
    const double half = 0.5 * static_cast<double>(ell_);
    if (m <= half) return x;
    return c_ + y * (half / m);
}

DerivativeBound CubeProjection::derivative_bound() const
{
    const double n = static_cast<double>(domain_dim());
    return {std::max(std::sqrt(n), std::sqrt(2.0 * (n - 1.0))), false};
}

double CubeProjection::damping_factor(const Vec& y) const
{
    const Vec d = y - c_;
    const double m = sup_norm(d);
    const double half = 0.5 * static_cast<double>(ell_);
    if (m <= half) return 1.0;
    return (d.norm() / m) * (half / m);
}

nlohmann::json CubeProjection::descriptor() const
{
    return {{"kind", "cube_projection"}, {"parameters", {{"ell", ell_}, {"alpha", alpha_}}}};
}

TorusQuotient::TorusQuotient(int dimension, double radius) : n_(dimension), radius_(radius)
{
    if (n_ < 1 || 2 * n_ > kMaxDim) throw DimensionError("torus quotient needs 1 <= N <= 8");
    if (!(radius_ > 0.0)) throw ParameterError("radius must be positive");
}

Vec TorusQuotient::evaluate(const Vec& x) const
{
    check_input(x);
    if (SkeletonRetraction::skeleton_distance(x) > kTargetTol) throw DomainError("torus quotient input is off the skeleton");
    Vec out(2 * n_);
    for (int j = 0; j < n_; ++j) {
        // reduce first so that integer translates give bit-identical angles
        const double frac = x[j] - std::floor(x[j]);
        const double theta = 2.0 * kPi * frac + kPi;
        out[2 * j] = radius_ * std::cos(theta);
        out[2 * j + 1] = radius_ * std::sin(theta);
    }
    return out;
}

DerivativeBound TorusQuotient::derivative_bound() const
{
    return {2.0 * kPi * radius_ * std::sqrt(static_cast<double>(n_)), false};
}

nlohmann::json TorusQuotient::descriptor() const
{
    return {{"kind", "torus_quotient"}, {"parameters", {{"N", n_}, {"radius", radius_}}}};
}

BumpMap::BumpMap(int dimension) : k_(dimension)
{
    if (k_ < 2 || k_ % 2 != 0 || k_ + 1 > kMaxDim) throw DimensionError("bump map needs an even dimension 2 <= 2n <= 14");
}

Vec BumpMap::south_pole() const
{
    Vec b = Vec::Zero(k_ + 1);
    b[k_] = -1.0;
    return b;
}

Vec BumpMap::north_pole() const
{
    Vec b = Vec::Zero(k_ + 1);
    b[k_] = 1.0;
    return b;
}

Vec BumpMap::evaluate(const Vec& x) const
{
    check_input(x);
    const double r = x.norm();
    if (r >= 0.5) return south_pole();
    const Vec y = x / (1.0 - 2.0 * r);
    const double q = y.squaredNorm();
    Vec out(k_ + 1);
    out.head(k_) = 2.0 * y / (1.0 + q);
    out[k_] = (1.0 - q) / (1.0 + q);
    return out;
}

double BumpMap::lipschitz() { return 10.0; }

DerivativeBound BumpMap::derivative_bound() const
{
    // radial stretch peaks at 10 (|x| = 2/5), tangential at 1 + sqrt(5)
    const double t = 1.0 + std::sqrt(5.0);
    return {std::sqrt(100.0 + (k_ - 1) * t * t), false};
}

nlohmann::json BumpMap::descriptor() const
{
    return {{"kind", "bump"}, {"parameters", {{"dimension", k_}}}};
}

WhiteheadBoundaryMap::WhiteheadBoundaryMap(int n) : n_(n), f_(2 * n)
{
    if (n < 1 || 4 * n > kMaxDim) throw DimensionError("Whitehead map needs 1 <= n <= 4");
}

WhiteheadBoundaryMap::Branch WhiteheadBoundaryMap::branch(const Vec& x) const
{
    check_input(x);
    if (std::abs(sup_norm(x) - 0.5) > kTargetTol) throw DomainError("input is off the cube boundary");
    const int k = 2 * n_;
    if (sup_norm(x.head(k)) < 0.5) return Branch::First;
    if (sup_norm(x.tail(k)) < 0.5) return Branch::Second;
    return Branch::Constant;
}

Vec WhiteheadBoundaryMap::evaluate(const Vec& x) const
{
    const int k = 2 * n_;
    switch (branch(x)) {
    case Branch::First:
        return f_.evaluate(x.head(k));
    case Branch::Second:
        return f_.evaluate(x.tail(k));
    case Branch::Constant:
        break;
    }
    return f_.south_pole();
}

DerivativeBound WhiteheadBoundaryMap::derivative_bound() const { return f_.derivative_bound(); }

nlohmann::json WhiteheadBoundaryMap::descriptor() const
{
    return {{"kind", "whitehead_boundary"}, {"parameters", {{"n", n_}}}};
}

PeriodicSingularExtension::PeriodicSingularExtension(MapPtr boundary_map)
    : v_(std::move(boundary_map)), d_(v_->domain_dim()), sing_(SingularSet::lattice(Vec::Zero(d_)))
{
}

Vec PeriodicSingularExtension::evaluate(const Vec& x) const
{
    check_input(x);
    Vec y(d_);
    for (int i = 0; i < d_; ++i) y[i] = x[i] - std::round(x[i]);
    const double m = sup_norm(y);
    if (m == 0.0) throw SingularityError("periodic extension evaluated at a lattice point");
    return v_->evaluate(y / (2.0 * m));
}

DerivativeBound PeriodicSingularExtension::derivative_bound() const
{
    const double d = d_;
    return {v_->derivative_bound().constant * std::sqrt(0.5 * d * (d - 1.0)), true};
}

nlohmann::json PeriodicSingularExtension::descriptor() const
{
    return {{"kind", "periodic_singular_extension"}, {"parameters", {{"boundary", v_->descriptor()}}}};
}

Vec SphereProjection::project(const Vec& y) const
{
    const double r = y.norm();
    if (r < 0.5) throw ProjectionError("point left the neighbourhood of the sphere");
    return y / r;
}

double SphereProjection::lipschitz(double delta) const
{
    // a chord of length delta between unit vectors stays at norm >= sqrt(1 - delta^2/4)
    return 1.0 / std::sqrt(1.0 - 0.25 * delta * delta);
}

SkeletonProjection::SkeletonProjection(int dimension) : retraction_(dimension) {}

Vec SkeletonProjection::project(const Vec& y) const
{
    if (SkeletonRetraction::skeleton_distance(y) >= 0.5 - 1e-12) throw ProjectionError("point reached a cell center");
    return retraction_.evaluate(y);
}

double SkeletonProjection::lipschitz(double delta) const
{
    // segments between skeleton points stay within delta/2 of the skeleton
    return std::sqrt(static_cast<double>(retraction_.domain_dim())) / (1.0 - delta);
}

double boundary_sup_distance(const EvaluableMap& u, const EvaluableMap& v, int per_edge)
{
    const int k = u.domain_dim();
    if (v.domain_dim() != k) throw DimensionError("maps have different domains");
    double best = 0.0;
    Vec x(k);
    const int grid = std::max(per_edge, 1);
    for (int a = 0; a < k; ++a) {
        for (int side = 0; side < 2; ++side) {
            std::vector<int> idx(static_cast<std::size_t>(k), 0);
            while (true) {
                for (int i = 0; i < k; ++i)
                    x[i] = i == a ? side : static_cast<double>(idx[static_cast<std::size_t>(i)]) / grid;
                best = std::max(best, (u.evaluate(x) - v.evaluate(x)).norm());
                int i = 0;
                for (; i < k; ++i) {
                    if (i == a) continue;
                    if (idx[static_cast<std::size_t>(i)] < grid) {
                        ++idx[static_cast<std::size_t>(i)];
                        break;
                    }
                    idx[static_cast<std::size_t>(i)] = 0;
                }
                if (i == k) break;
            }
        }
    }
    return best;
}

CylinderGlue::CylinderGlue(MapPtr u, MapPtr v, double delta, ProjectionPtr projection, int boundary_samples)
    : u_(std::move(u)), v_(std::move(v)), delta_(delta), proj_(std::move(projection)), m_(u_->domain_dim() + 1)
{
    if (v_->domain_dim() != u_->domain_dim() || v_->codomain_dim() != u_->codomain_dim())
        throw DimensionError("glued maps must have equal dimensions");
    if (m_ > kMaxDim) throw DimensionError("cylinder dimension too large");
    if (!(delta_ >= 0.0) || delta_ >= proj_->max_delta()) throw ParameterError("delta must lie below the retraction radius");
    measured_ = boundary_sup_distance(*u_, *v_, boundary_samples);
    if (measured_ > delta_) throw PreconditionError("boundary sup-distance exceeds delta");
}

Vec CylinderGlue::evaluate(const Vec& x) const
{
    check_input(x);
    constexpr double tol = kTargetTol;
    const Vec xp = x.head(m_ - 1);
    const double t = x[m_ - 1];
    if (std::abs(t) <= tol) return u_->evaluate(xp);
    if (std::abs(t - 1.0) <= tol) return v_->evaluate(xp);
    bool on_side = false;
    for (int i = 0; i < m_ - 1; ++i) {
        if (xp[i] < -tol || xp[i] > 1.0 + tol || t < 0.0 || t > 1.0) throw DomainError("input is off the cube boundary");
        on_side = on_side || std::abs(xp[i]) <= tol || std::abs(xp[i] - 1.0) <= tol;
    }
    if (!on_side) throw DomainError("input is off the cube boundary");
    return proj_->project((1.0 - t) * u_->evaluate(xp) + t * v_->evaluate(xp));
}

DerivativeBound CylinderGlue::derivative_bound() const
{
    const auto a = u_->derivative_bound();
    const auto b = v_->derivative_bound();
    const double k = std::max(a.constant, b.constant);
    const double side = proj_->lipschitz(delta_) * std::sqrt(k * k + delta_ * delta_);
    return {std::max(k, side), a.singular_profile || b.singular_profile};
}

double CylinderGlue::estimate_constant(double p) const
{
    const double lp = std::pow(proj_->lipschitz(delta_), p);
    const double split = std::max(1.0, std::pow(2.0, 0.5 * p - 1.0));
    return lp * split * std::max(0.5, 2.0 * (m_ - 1));
}

nlohmann::json CylinderGlue::descriptor() const
{
    return {{"kind", "cylinder_glue"},
            {"parameters",
             {{"u", u_->descriptor()}, {"v", v_->descriptor()}, {"delta", delta_}, {"projection", proj_->descriptor()}}}};
}

} // namespace cubeskel

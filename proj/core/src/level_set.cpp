#include "cubeskel/level_set.hpp"

#include "cubeskel/errors.hpp"

#include <cmath>

namespace cubeskel {

LevelSetManifold::LevelSetManifold(int n, int m, double lambda) : n_(n), m_(m), lambda_(lambda)
{
    if (n_ < 1 || m_ < 0 || 2 * n_ + m_ > kMaxDim) throw DimensionError("bad torus or fiber dimension");
    if (!(lambda_ > 0.0 && lambda_ < 1.0)) throw ParameterError("lambda must lie in (0, 1)");
}

double LevelSetManifold::potential(int n, const Vec& point)
{
    double prod = 1.0;
    for (int j = 0; j < n; ++j) {
        const double c = std::cos(0.5 * point[j]);
        prod *= c * c;
    }
    return prod + point.tail(point.size() - n).squaredNorm();
}

double LevelSetManifold::potential_ambient(const Vec& x) const
{
    if (x.size() != 2 * n_ + m_) throw DimensionError("ambient point has wrong dimension");
    double prod = 1.0;
    for (int j = 0; j < n_; ++j) prod *= 0.5 * (1.0 + x[2 * j]);
    return prod + x.tail(m_).squaredNorm();
}

Vec LevelSetManifold::embed(const Vec& point) const
{
    Vec x(2 * n_ + m_);
    for (int j = 0; j < n_; ++j) {
        x[2 * j] = std::cos(point[j]);
        x[2 * j + 1] = std::sin(point[j]);
    }
    x.tail(m_) = point.tail(m_);
    return x;
}

Vec LevelSetManifold::gradient(const Vec& point) const
{
    Vec g(n_ + m_);
    for (int j = 0; j < n_; ++j) {
        double rest = 1.0;
        for (int i = 0; i < n_; ++i) {
            if (i == j) continue;
            const double c = std::cos(0.5 * point[i]);
            rest *= c * c;
        }
        g[j] = -0.5 * std::sin(point[j]) * rest;
    }
    g.tail(m_) = 2.0 * point.tail(m_);
    return g;
}

double LevelSetManifold::gradient_norm_formula(const Vec& point) const
{
    double tan2 = 0.0, cos4 = 1.0;
    for (int j = 0; j < n_; ++j) {
        const double c = std::cos(0.5 * point[j]);
        if (c == 0.0) return gradient(point).norm();
        const double t = std::tan(0.5 * point[j]);
        tan2 += t * t;
        cos4 *= c * c * c * c;
    }
    return std::sqrt(tan2 * cos4 + 4.0 * point.tail(m_).squaredNorm());
}

std::vector<Vec> LevelSetManifold::sample(std::size_t count, CounterRng& rng, std::size_t max_attempts) const
{
    if (max_attempts == 0) max_attempts = 1000 * count + 1000;
    std::vector<Vec> out;
    out.reserve(count);
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (attempts++ >= max_attempts) throw SearchError("level-set sampling exhausted its attempt budget");
        Vec p(n_ + m_);
        for (int j = 0; j < n_; ++j) p[j] = rng.uniform(-kPi, kPi);
        double prod = 1.0;
        for (int j = 0; j < n_; ++j) {
            const double c = std::cos(0.5 * p[j]);
            prod *= c * c;
        }
        if (m_ == 0) {
            const double s = sup_norm(p.head(n_));
            if (s == 0.0) continue;
            // V(t theta) decreases from 1 at t = 0 to 0 at t = pi/|theta|_inf
            double lo = 0.0, hi = kPi / s;
            for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                Vec q = p * mid;
                if (potential(n_, q) > lambda_)
                    lo = mid;
                else
                    hi = mid;
            }
            out.push_back(p * lo);
            continue;
        }
        const double rhs = lambda_ - prod;
        if (rhs <= 0.0) continue;
        Vec dir(m_);
        double norm = 0.0;
        while (norm < 1e-3) {
            for (int i = 0; i < m_; ++i) dir[i] = rng.normal();
            norm = dir.norm();
        }
        p.tail(m_) = std::sqrt(rhs) * dir / norm;
        out.push_back(p);
    }
    return out;
}

bool LevelSetManifold::on_skeleton(const Vec& point, double tol) const
{
    return std::abs(sup_norm(point.head(n_)) - kPi) <= tol && point.tail(m_).norm() <= tol;
}

Vec level_deformation(int n, double t, const Vec& point)
{
    const double s = sup_norm(point.head(n));
    if (s == 0.0) throw SingularityError("deformation undefined at theta = 0");
    Vec out = point;
    out.head(n) *= 1.0 + t * (kPi / s - 1.0);
    out.tail(point.size() - n) *= 1.0 - t;
    return out;
}

LambdaRetraction::LambdaRetraction(int n, int m) : n_(n), m_(m)
{
    if (n_ < 1 || m_ < 0 || n_ + m_ > kMaxDim) throw DimensionError("bad torus or fiber dimension");
}

Vec LambdaRetraction::evaluate(const Vec& point) const
{
    check_input(point);
    const double s = sup_norm(point.head(n_));
    if (s == 0.0) throw SingularityError("retraction undefined at theta = 0");
    Vec out = Vec::Zero(n_ + m_);
    out.head(n_) = point.head(n_) * (kPi / s);
    return out;
}

DerivativeBound LambdaRetraction::derivative_bound() const
{
    return {kPi * std::sqrt(2.0 * n_ * (n_ - 1)) + (n_ == 1 ? kPi : 0.0), true};
}

nlohmann::json LambdaRetraction::descriptor() const
{
    return {{"kind", "lambda_retraction"}, {"parameters", {{"n", n_}, {"m", m_}}}};
}

} // namespace cubeskel

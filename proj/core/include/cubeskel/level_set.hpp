#pragma once

#include "cubeskel/maps.hpp"
#include "cubeskel/rng.hpp"

#include <vector>

namespace cubeskel {

/// The level set N_lambda = {V = lambda} in T^n x R^m with
/// V(theta, z) = prod_j cos^2(theta_j / 2) + |z|^2.
/// Points are stored in angular coordinates (theta_1..theta_n, z_1..z_m), theta in (-pi, pi].
class LevelSetManifold {
public:
    LevelSetManifold(int n, int m, double lambda);

    int n() const { return n_; }
    int m() const { return m_; }
    double lambda() const { return lambda_; }

    static double potential(int n, const Vec& point);
    double potential(const Vec& point) const { return potential(n_, point); }
    /// V in the ambient chart x in R^{2n+m}: prod (1 + x_{2j-1})/2 + |z|^2.
    double potential_ambient(const Vec& x) const;
    /// (cos theta_1, sin theta_1, ..., z) in R^{2n+m}.
    Vec embed(const Vec& point) const;

    /// Gradient with respect to (theta, z).
    Vec gradient(const Vec& point) const;
    /// |grad V| from the closed form (sum tan^2(theta_j/2)) prod cos^4(theta_j/2) + 4|z|^2.
    double gradient_norm_formula(const Vec& point) const;

    /// Rejection sampling: random theta, then |z|^2 = lambda - prod cos^2 on a random fiber direction.
    /// For m = 0 the angles are rescaled along a ray by bisection instead.
    std::vector<Vec> sample(std::size_t count, CounterRng& rng, std::size_t max_attempts = 0) const;

    /// On N_0: |theta|_inf = pi and z = 0.
    bool on_skeleton(const Vec& point, double tol = kTargetTol) const;

private:
    int n_, m_;
    double lambda_;
};

/// Theta(t, theta, z) = ((1 + t(pi/|theta|_inf - 1)) theta, (1 - t) z).
Vec level_deformation(int n, double t, const Vec& point);

/// Theta(1, .): the retraction of N_lambda onto N_0. Singular where theta = 0.
class LambdaRetraction final : public EvaluableMap {
public:
    LambdaRetraction(int n, int m);
    int domain_dim() const override { return n_ + m_; }
    int codomain_dim() const override { return n_ + m_; }
    Vec evaluate(const Vec& point) const override;
    double singular_distance(const Vec& point) const override { return point.head(n_).norm(); }
    DerivativeBound derivative_bound() const override;
    nlohmann::json descriptor() const override;

private:
    int n_, m_;
};

} // namespace cubeskel

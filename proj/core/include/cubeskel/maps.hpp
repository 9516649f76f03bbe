#pragma once

#include "cubeskel/lattice.hpp"
#include "cubeskel/types.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <memory>
#include <vector>

namespace cubeskel {

/// Point singularities of a map: either a finite set or a translated lattice offset + Z^N.
struct SingularSet {
    enum class Kind { None, Points, Lattice };
    Kind kind = Kind::None;
    std::vector<Vec> points;
    Vec offset;

    static SingularSet none() { return {}; }
    static SingularSet lattice(Vec offset);
    static SingularSet finite(std::vector<Vec> points);

    bool empty() const { return kind == Kind::None || (kind == Kind::Points && points.empty()); }
    /// Euclidean distance to the set (infinity when empty).
    double distance(const Vec& x) const;
    /// Singular points inside the closed box [lo, hi].
    std::vector<Vec> points_in_box(const Vec& lo, const Vec& hi) const;
};

/// |Du(x)| (Frobenius norm) is at most `constant / dist(x, S)` when `singular_profile`
/// is set, and at most `constant` everywhere otherwise.
struct DerivativeBound {
    double constant = 0.0;
    bool singular_profile = false;
};

class EvaluableMap {
public:
    virtual ~EvaluableMap() = default;

    virtual int domain_dim() const = 0;
    virtual int codomain_dim() const = 0;
    /// Throws SingularityError at singular points and DomainError off the domain.
    virtual Vec evaluate(const Vec& x) const = 0;
    virtual const SingularSet& singular_set() const;
    virtual double singular_distance(const Vec& x) const { return singular_set().distance(x); }
    virtual DerivativeBound derivative_bound() const = 0;
    virtual nlohmann::json descriptor() const = 0;

    Vec operator()(const Vec& x) const { return evaluate(x); }

protected:
    void check_input(const Vec& x) const;
};

using MapPtr = std::shared_ptr<const EvaluableMap>;

/// Central finite-difference Jacobian (codomain x domain).
Mat finite_difference_jacobian(const EvaluableMap& f, const Vec& x, double h);

/// CSV dump of sampled values: x_0..x_{N-1}, y_0..y_{M-1}.
void write_samples_csv(std::ostream& os, const EvaluableMap& f, const std::vector<Vec>& points);

// Elementary maps used as controls and building blocks.

class ConstantMap final : public EvaluableMap {
public:
    ConstantMap(int domain_dim, Vec value);
    int domain_dim() const override { return n_; }
    int codomain_dim() const override { return static_cast<int>(value_.size()); }
    Vec evaluate(const Vec& x) const override;
    DerivativeBound derivative_bound() const override { return {0.0, false}; }
    nlohmann::json descriptor() const override;

private:
    int n_;
    Vec value_;
};

class AffineMap final : public EvaluableMap {
public:
    AffineMap(Mat a, Vec b);
    int domain_dim() const override { return static_cast<int>(a_.cols()); }
    int codomain_dim() const override { return static_cast<int>(a_.rows()); }
    Vec evaluate(const Vec& x) const override;
    DerivativeBound derivative_bound() const override { return {a_.norm(), false}; }
    nlohmann::json descriptor() const override;

private:
    Mat a_;
    Vec b_;
};

/// x -> f(x) + shift.
class ShiftedMap final : public EvaluableMap {
public:
    ShiftedMap(MapPtr f, Vec shift);
    int domain_dim() const override { return f_->domain_dim(); }
    int codomain_dim() const override { return f_->codomain_dim(); }
    Vec evaluate(const Vec& x) const override { return f_->evaluate(x) + shift_; }
    const SingularSet& singular_set() const override { return f_->singular_set(); }
    double singular_distance(const Vec& x) const override { return f_->singular_distance(x); }
    DerivativeBound derivative_bound() const override { return f_->derivative_bound(); }
    nlohmann::json descriptor() const override;

private:
    MapPtr f_;
    Vec shift_;
};

/// outer(inner(x)); the singular set is that of `inner`.
class ComposedMap final : public EvaluableMap {
public:
    ComposedMap(MapPtr outer, MapPtr inner);
    int domain_dim() const override { return inner_->domain_dim(); }
    int codomain_dim() const override { return outer_->codomain_dim(); }
    Vec evaluate(const Vec& x) const override { return outer_->evaluate(inner_->evaluate(x)); }
    const SingularSet& singular_set() const override { return inner_->singular_set(); }
    double singular_distance(const Vec& x) const override { return inner_->singular_distance(x); }
    DerivativeBound derivative_bound() const override;
    nlohmann::json descriptor() const override;

private:
    MapPtr outer_;
    MapPtr inner_;
};

/// The Hopf fibration R^4 \ {0} -> S^2, precomposed with radial normalisation.
class HopfFibration final : public EvaluableMap {
public:
    HopfFibration();
    int domain_dim() const override { return 4; }
    int codomain_dim() const override { return 3; }
    Vec evaluate(const Vec& x) const override;
    const SingularSet& singular_set() const override { return sing_; }
    DerivativeBound derivative_bound() const override { return {4.0, true}; }
    nlohmann::json descriptor() const override { return {{"kind", "hopf_fibration"}, {"parameters", nlohmann::json::object()}}; }

private:
    SingularSet sing_;
};

// Skeleton constructions.

/// u(x) = sigma + (x - sigma) / (2 |x - sigma|_inf), sigma the center of the unit cell of x.
/// Z^N-periodic retraction of R^N minus the cell centers onto the (N-1)-skeleton.
class SkeletonRetraction final : public EvaluableMap {
public:
    explicit SkeletonRetraction(int dimension);
    int domain_dim() const override { return n_; }
    int codomain_dim() const override { return n_; }
    Vec evaluate(const Vec& x) const override;
    const SingularSet& singular_set() const override { return sing_; }
    DerivativeBound derivative_bound() const override { return {static_cast<double>(n_), true}; }
    nlohmann::json descriptor() const override;

    /// Largest Frobenius norm of Du times the distance to the center, sqrt(N(N-1)/2).
    double sharp_constant() const;
    /// Sup-norm distance from x to the (N-1)-skeleton.
    static double skeleton_distance(const Vec& x);

private:
    int n_;
    SingularSet sing_;
};

/// Radial projection onto the block Q_{ell,alpha}; identity on the block.
class CubeProjection final : public EvaluableMap {
public:
    CubeProjection(std::int64_t edge_count, BlockIndex alpha);
    int domain_dim() const override { return static_cast<int>(alpha_.size()); }
    int codomain_dim() const override { return domain_dim(); }
    Vec evaluate(const Vec& x) const override;
    DerivativeBound derivative_bound() const override;
    nlohmann::json descriptor() const override;

    const Vec& center() const { return c_; }
    Vec lower() const;
    Vec upper() const;
    /// Bound on the operator norm of the derivative at a point y outside the block:
    /// (|y-c|_2 / |y-c|_inf) / (1 + 2 dist_inf(y, Q) / ell); 1 inside.
    double damping_factor(const Vec& y) const;

private:
    std::int64_t ell_;
    BlockIndex alpha_;
    Vec c_;
};

/// Z^N-periodic map from the skeleton to the torus T^N in R^{2N}:
/// theta_j = 2 pi x_j + pi on a circle of the given radius.
/// Integer coordinates go to angle pi.
class TorusQuotient final : public EvaluableMap {
public:
    explicit TorusQuotient(int dimension, double radius = 1.0);
    int domain_dim() const override { return n_; }
    int codomain_dim() const override { return 2 * n_; }
    Vec evaluate(const Vec& x) const override;
    DerivativeBound derivative_bound() const override;
    nlohmann::json descriptor() const override;

    double radius() const { return radius_; }
    static constexpr double isometric_radius() { return 1.0 / (2.0 * kPi); }

private:
    int n_;
    double radius_;
};

/// f: R^{2n} -> S^{2n}: f(x) = S(x / (1 - 2|x|_2)) for |x|_2 < 1/2, south pole otherwise,
/// S the inverse stereographic projection sending 0 to the north pole.
class BumpMap final : public EvaluableMap {
public:
    explicit BumpMap(int dimension);
    int domain_dim() const override { return k_; }
    int codomain_dim() const override { return k_ + 1; }
    Vec evaluate(const Vec& x) const override;
    DerivativeBound derivative_bound() const override;
    nlohmann::json descriptor() const override;

    Vec south_pole() const;
    Vec north_pole() const;
    /// Operator-norm Lipschitz bound.
    static double lipschitz();

private:
    int k_;
};

/// The map on the boundary of [-1/2,1/2]^{4n} built from two copies of the bump map.
class WhiteheadBoundaryMap final : public EvaluableMap {
public:
    enum class Branch { First, Second, Constant };

    explicit WhiteheadBoundaryMap(int n);
    int domain_dim() const override { return 4 * n_; }
    int codomain_dim() const override { return 2 * n_ + 1; }
    Vec evaluate(const Vec& x) const override;
    DerivativeBound derivative_bound() const override;
    nlohmann::json descriptor() const override;

    /// Which case of the definition applies; DomainError off the boundary.
    Branch branch(const Vec& x) const;
    int n() const { return n_; }

private:
    int n_;
    BumpMap f_;
};

/// u(x) = v(y / (2|y|_inf)), y = x - round(x): the 0-homogeneous extension of a map on the
/// boundary of [-1/2,1/2]^d, extended Z^d-periodically. Singular on Z^d.
class PeriodicSingularExtension final : public EvaluableMap {
public:
    explicit PeriodicSingularExtension(MapPtr boundary_map);
    int domain_dim() const override { return d_; }
    int codomain_dim() const override { return v_->codomain_dim(); }
    Vec evaluate(const Vec& x) const override;
    const SingularSet& singular_set() const override { return sing_; }
    DerivativeBound derivative_bound() const override;
    nlohmann::json descriptor() const override;

private:
    MapPtr v_;
    int d_;
    SingularSet sing_;
};

/// Nearest-point style retraction onto a target, defined on a neighbourhood.
class TargetProjection {
public:
    virtual ~TargetProjection() = default;
    virtual Vec project(const Vec& y) const = 0;
    /// Largest admissible sup-distance between the two glued maps.
    virtual double max_delta() const = 0;
    /// Operator-norm bound of the derivative of the projection along segments between
    /// target points at distance at most delta.
    virtual double lipschitz(double delta) const = 0;
    virtual nlohmann::json descriptor() const = 0;
};

using ProjectionPtr = std::shared_ptr<const TargetProjection>;

/// y -> y/|y| on the unit sphere; neighbourhood |y| >= 1/2.
class SphereProjection final : public TargetProjection {
public:
    Vec project(const Vec& y) const override;
    double max_delta() const override { return 1.0; }
    double lipschitz(double delta) const override;
    nlohmann::json descriptor() const override { return {{"kind", "sphere"}}; }
};

/// Projection onto the (N-1)-skeleton by the periodic retraction.
class SkeletonProjection final : public TargetProjection {
public:
    explicit SkeletonProjection(int dimension);
    Vec project(const Vec& y) const override;
    double max_delta() const override { return 0.5; }
    double lipschitz(double delta) const override;
    nlohmann::json descriptor() const override { return {{"kind", "skeleton"}, {"N", retraction_.domain_dim()}}; }

private:
    SkeletonRetraction retraction_;
};

/// The map w on the boundary of [0,1]^m equal to u on the bottom face, v on the top face,
/// and the projected linear interpolation on the side faces.
class CylinderGlue final : public EvaluableMap {
public:
    /// Checks sup |u - v| <= delta on a sampled boundary of [0,1]^{m-1}.
    CylinderGlue(MapPtr u, MapPtr v, double delta, ProjectionPtr projection, int boundary_samples = 64);
    int domain_dim() const override { return m_; }
    int codomain_dim() const override { return u_->codomain_dim(); }
    Vec evaluate(const Vec& x) const override;
    DerivativeBound derivative_bound() const override;
    nlohmann::json descriptor() const override;

    double delta() const { return delta_; }
    double measured_delta() const { return measured_; }
    /// Constant C of the cylinder estimate for exponent p.
    double estimate_constant(double p) const;

private:
    MapPtr u_, v_;
    double delta_;
    ProjectionPtr proj_;
    int m_;
    double measured_ = 0.0;
};

/// Largest sup-distance |u - v| over a regular sample of the boundary of [0,1]^k
/// with `per_edge` points per unit length.
double boundary_sup_distance(const EvaluableMap& u, const EvaluableMap& v, int per_edge);

} // namespace cubeskel

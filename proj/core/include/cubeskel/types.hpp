#pragma once

#include <Eigen/Dense>

#include <limits>

namespace cubeskel {

/// Largest ambient dimension handled without heap allocation.
inline constexpr int kMaxDim = 16;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Tolerance for "lies on the target set" checks of closed-form maps.
inline constexpr double kTargetTol = 1e-9;
/// Tolerance for level-set membership |V - lambda|.
inline constexpr double kLevelTol = 1e-9;

inline double sup_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

inline Vec make_vec(std::initializer_list<double> values)
{
    Vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

} // namespace cubeskel

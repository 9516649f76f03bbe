#pragma once

// Independent reference computations used by the unit and acceptance tests. Nothing here calls
// into the library's numerics.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Frozen energies of the skeleton retraction on one unit cell, p = N - 1.
/// N = 2: sqrt(2) + asinh(1); N = 3: 8.
inline constexpr double kUnitCellEnergy2 = 2.2955871493926380;
inline constexpr double kUnitCellEnergy3 = 8.0;

/// Energy of the retraction on a unit cell from its pyramid decomposition. On the pyramid where
/// x_1 - 1/2 is the largest offset, |Du|^2 = (|s|^2 + N - 1) / (4 r^2) with s = x'/r, r = x_1 - 1/2,
/// so for p = N - 1 the radial integral is 1/2 and only a midpoint rule over s in [-1,1]^{N-1}
/// remains. Valid for N in {2, 3}.
inline double unit_cell_energy(int n, int m = 2000)
{
    const double p = n - 1;
    const double h = 2.0 / m;
    double acc = 0.0;
    if (n == 2) {
        for (int i = 0; i < m; ++i) {
            const double s = -1.0 + (i + 0.5) * h;
            acc += std::pow((s * s + 1.0) / 4.0, 0.5 * p) * h;
        }
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const double s = -1.0 + (i + 0.5) * h, t = -1.0 + (j + 0.5) * h;
                acc += std::pow((s * s + t * t + 2.0) / 4.0, 0.5 * p) * h * h;
            }
    }
    return 2.0 * n * 0.5 * acc;
}

/// Cost with the same summation order the library promises: |d|^alpha ascending in |d|.
inline double sorted_cost(std::vector<std::int64_t> d, double alpha)
{
    for (auto& x : d) x = x < 0 ? -x : x;
    std::sort(d.begin(), d.end());
    double c = 0.0;
    for (auto x : d)
        if (x != 0) c += std::pow(static_cast<double>(x), alpha);
    return c;
}

/// Minimum over all integer flows with |d| <= cap on the 2x2 grid in the plane with uniform
/// supply b. Interior faces are enumerated, each cell then splits its remaining export over
/// its two boundary faces.
inline double transport_2x2(double alpha, std::int64_t b, std::int64_t cap)
{
    // cells: 0=(0,0) 1=(1,0) 2=(0,1) 3=(1,1); interior faces h0: 0->1, h1: 2->3, v0: 0->2, v1: 1->3
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t h0 = -cap; h0 <= cap; ++h0)
        for (std::int64_t h1 = -cap; h1 <= cap; ++h1)
            for (std::int64_t v0 = -cap; v0 <= cap; ++v0)
                for (std::int64_t v1 = -cap; v1 <= cap; ++v1) {
                    const std::array<std::int64_t, 4> exports = {b - h0 - v0, b + h0 - v1, b - h1 + v0, b + h1 + v1};
                    std::vector<std::int64_t> d = {h0, h1, v0, v1, 0, 0, 0, 0, 0, 0, 0, 0};
                    std::function<void(int)> split = [&](int cell) {
                        if (cell == 4) {
                            best = std::min(best, sorted_cost(d, alpha));
                            return;
                        }
                        const auto s = exports[static_cast<std::size_t>(cell)];
                        for (std::int64_t x = -cap; x <= cap; ++x) {
                            const auto y = s - x;
                            if (y < -cap || y > cap) continue;
                            d[static_cast<std::size_t>(4 + 2 * cell)] = x;
                            d[static_cast<std::size_t>(5 + 2 * cell)] = y;
                            split(cell + 1);
                        }
                    };
                    split(0);
                }
    return best;
}

/// Minimum over flows on the 2N faces of a single cell with |d| <= cap summing to b.
inline double transport_single_cell(int n, double alpha, std::int64_t b, std::int64_t cap)
{
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::int64_t> d(static_cast<std::size_t>(2 * n), 0);
    std::function<void(int, std::int64_t)> rec = [&](int k, std::int64_t rest) {
        if (k == 2 * n - 1) {
            if (rest < -cap || rest > cap) return;
            d[static_cast<std::size_t>(k)] = rest;
            best = std::min(best, sorted_cost(d, alpha));
            return;
        }
        for (std::int64_t x = -cap; x <= cap; ++x) {
            d[static_cast<std::size_t>(k)] = x;
            rec(k + 1, rest - x);
        }
    };
    rec(0, b);
    return best;
}

/// Gauss linking integral of two closed polygons by a midpoint rule on every segment pair.
inline double gauss_linking(const std::vector<Eigen::Vector3d>& a, const std::vector<Eigen::Vector3d>& b, int sub = 64)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Eigen::Vector3d a0 = a[i], a1 = a[(i + 1) % a.size()];
        for (std::size_t j = 0; j < b.size(); ++j) {
            const Eigen::Vector3d b0 = b[j], b1 = b[(j + 1) % b.size()];
            const Eigen::Vector3d da = (a1 - a0) / sub, db = (b1 - b0) / sub;
            for (int s = 0; s < sub; ++s)
                for (int t = 0; t < sub; ++t) {
                    const Eigen::Vector3d r = (a0 + (s + 0.5) * da) - (b0 + (t + 0.5) * db);
                    acc += r.dot(da.cross(db)) / std::pow(r.norm(), 3);
                }
        }
    }
    return acc / (4.0 * kPi);
}

/// Winding number of a planar curve sampled densely along the unit circle.
inline int winding_number(const std::function<Eigen::Vector2d(double)>& curve, int samples = 4096)
{
    double total = 0.0;
    Eigen::Vector2d prev = curve(0.0);
    for (int k = 1; k <= samples; ++k) {
        const Eigen::Vector2d cur = curve(2.0 * kPi * k / samples);
        total += std::atan2(prev.x() * cur.y() - prev.y() * cur.x(), prev.dot(cur));
        prev = cur;
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

} // namespace oracle

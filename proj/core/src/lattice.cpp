#include "cubeskel/lattice.hpp"

#include "cubeskel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <ostream>

namespace cubeskel {

namespace {

std::uint64_t ipow(std::uint64_t base, int e)
{
    std::uint64_t r = 1;
    while (e-- > 0) r *= base;
    return r;
}

std::uint64_t binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

void check_dimension(int n)
{
    if (n < 1 || n > kMaxDim) throw DimensionError("dimension must be in [1, 16]");
}

} // namespace

OrientedFace OrientedFace::flipped() const
{
    OrientedFace f = *this;
    f.cell[static_cast<std::size_t>(axis)] += sign_of(side);
    f.side = opposite(side);
    return f;
}

OrientedFace OrientedFace::canonical() const
{
    return side == Side::Plus ? *this : flipped();
}

int Face::dimension() const { return std::popcount(free_axes); }

CubicalGrid::CubicalGrid(int dimension, std::int64_t edge_count, MultiIndex origin)
    : n_(dimension), ell_(edge_count), origin_(std::move(origin))
{
    check_dimension(n_);
    if (ell_ < 1) throw ParameterError("edge count must be positive");
    if (origin_.empty()) origin_.assign(static_cast<std::size_t>(n_), 0);
    if (static_cast<int>(origin_.size()) != n_) throw DimensionError("origin has wrong dimension");
    cells_ = ipow(static_cast<std::uint64_t>(ell_), n_);
    facets_per_axis_ = static_cast<std::size_t>(ell_ + 1) * ipow(static_cast<std::uint64_t>(ell_), n_ - 1);
    facets_ = facets_per_axis_ * static_cast<std::size_t>(n_);
}

std::size_t CubicalGrid::cell_id(const MultiIndex& cell) const
{
    std::size_t id = 0;
    for (int i = n_ - 1; i >= 0; --i) id = id * static_cast<std::size_t>(ell_) + static_cast<std::size_t>(cell[static_cast<std::size_t>(i)]);
    return id;
}

MultiIndex CubicalGrid::cell_at(std::size_t id) const
{
    MultiIndex c(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        c[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(id % static_cast<std::size_t>(ell_));
        id /= static_cast<std::size_t>(ell_);
    }
    return c;
}

bool CubicalGrid::contains_cell(const MultiIndex& cell) const
{
    if (static_cast<int>(cell.size()) != n_) return false;
    return std::all_of(cell.begin(), cell.end(), [&](std::int64_t c) { return c >= 0 && c < ell_; });
}

std::uint64_t CubicalGrid::face_count(int dimension, std::int64_t edge_count, int j)
{
    if (j < 0 || j > dimension) throw DimensionError("face dimension out of range");
    const auto l = static_cast<std::uint64_t>(edge_count);
    return binomial(dimension, j) * ipow(l, j) * ipow(l + 1, dimension - j);
}

std::vector<Face> CubicalGrid::enumerate_faces(int j) const
{
    if (j < 0 || j > n_) throw DimensionError("face dimension out of range");
    std::vector<Face> out;
    out.reserve(face_count(n_, ell_, j));
    for (std::uint32_t mask = 0; mask < (1u << n_); ++mask) {
        if (std::popcount(mask) != j) continue;
        // free axes range over [0, ell), fixed axes over [0, ell]
        MultiIndex v(static_cast<std::size_t>(n_), 0);
        while (true) {
            Face f{v, mask};
            for (int i = 0; i < n_; ++i) f.vertex[static_cast<std::size_t>(i)] += origin_[static_cast<std::size_t>(i)];
            out.push_back(std::move(f));
            int i = 0;
            for (; i < n_; ++i) {
                const std::int64_t limit = (mask >> i & 1u) ? ell_ - 1 : ell_;
                if (v[static_cast<std::size_t>(i)] < limit) {
                    ++v[static_cast<std::size_t>(i)];
                    break;
                }
                v[static_cast<std::size_t>(i)] = 0;
            }
            if (i == n_) break;
        }
    }
    return out;
}

std::vector<OrientedFace> CubicalGrid::faces_of(const MultiIndex& cell) const
{
    std::vector<OrientedFace> out;
    out.reserve(static_cast<std::size_t>(2 * n_));
    for (int a = 0; a < n_; ++a) {
        out.push_back({cell, a, Side::Minus});
        out.push_back({cell, a, Side::Plus});
    }
    return out;
}

std::vector<OrientedFace> CubicalGrid::enumerate_oriented_faces() const
{
    std::vector<OrientedFace> out;
    out.reserve(cells_ * static_cast<std::size_t>(2 * n_));
    for (std::size_t id = 0; id < cells_; ++id) {
        auto f = faces_of(cell_at(id));
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

bool CubicalGrid::is_boundary(const OrientedFace& face) const
{
    const auto c = face.cell[static_cast<std::size_t>(face.axis)];
    return face.side == Side::Plus ? c == ell_ - 1 : c == 0;
}

std::size_t CubicalGrid::facet_id(const OrientedFace& face) const
{
    const OrientedFace c = face.canonical();
    const auto a = static_cast<std::size_t>(c.axis);
    std::size_t id = 0;
    for (int i = n_ - 1; i >= 0; --i) {
        const auto ui = static_cast<std::size_t>(i);
        if (ui == a) {
            const std::int64_t k = c.cell[ui] + 1;
            if (k < 0 || k > ell_) throw DomainError("face outside the grid");
            id = id * static_cast<std::size_t>(ell_ + 1) + static_cast<std::size_t>(k);
        } else {
            if (c.cell[ui] < 0 || c.cell[ui] >= ell_) throw DomainError("face outside the grid");
            id = id * static_cast<std::size_t>(ell_) + static_cast<std::size_t>(c.cell[ui]);
        }
    }
    return a * facets_per_axis_ + id;
}

OrientedFace CubicalGrid::facet_at(std::size_t id) const
{
    if (id >= facets_) throw DomainError("face id out of range");
    OrientedFace f;
    f.axis = static_cast<int>(id / facets_per_axis_);
    f.side = Side::Plus;
    id %= facets_per_axis_;
    f.cell.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (i == f.axis) {
            f.cell[ui] = static_cast<std::int64_t>(id % static_cast<std::size_t>(ell_ + 1)) - 1;
            id /= static_cast<std::size_t>(ell_ + 1);
        } else {
            f.cell[ui] = static_cast<std::int64_t>(id % static_cast<std::size_t>(ell_));
            id /= static_cast<std::size_t>(ell_);
        }
    }
    return f;
}

Vec CubicalGrid::cell_center(const MultiIndex& cell) const
{
    Vec c(n_);
    for (int i = 0; i < n_; ++i)
        c[i] = static_cast<double>(origin_[static_cast<std::size_t>(i)] + cell[static_cast<std::size_t>(i)]) + 0.5;
    return c;
}

std::vector<Vec> CubicalGrid::dual_centers() const
{
    std::vector<Vec> out;
    out.reserve(cells_);
    for (std::size_t id = 0; id < cells_; ++id) out.push_back(cell_center(cell_at(id)));
    return out;
}

nlohmann::json CubicalGrid::to_json() const
{
    return {{"N", n_}, {"ell", ell_}, {"origin", origin_}};
}

CubicalGrid CubicalGrid::from_json(const nlohmann::json& j)
{
    MultiIndex origin;
    if (j.contains("origin")) origin = j.at("origin").get<MultiIndex>();
    return CubicalGrid(j.at("N").get<int>(), j.at("ell").get<std::int64_t>(), std::move(origin));
}

void write_faces_csv(std::ostream& os, const std::vector<OrientedFace>& faces)
{
    os << "cell,axis,side\n";
    for (const auto& f : faces) {
        for (std::size_t i = 0; i < f.cell.size(); ++i) os << (i ? ";" : "") << f.cell[i];
        os << ',' << f.axis + 1 << ',' << (f.side == Side::Plus ? '+' : '-') << '\n';
    }
}

BlockDecomposition::BlockDecomposition(int dimension, std::int64_t edge_count) : n_(dimension), ell_(edge_count)
{
    check_dimension(n_);
    if (ell_ < 1) throw ParameterError("edge count must be positive");
}

std::vector<BlockIndex> BlockDecomposition::all_indices() const
{
    std::vector<BlockIndex> out;
    BlockIndex a(static_cast<std::size_t>(n_), -2);
    while (true) {
        out.push_back(a);
        int i = 0;
        for (; i < n_; ++i) {
            auto& ai = a[static_cast<std::size_t>(i)];
            if (ai < 2) {
                ++ai;
                break;
            }
            ai = -2;
        }
        if (i == n_) break;
    }
    return out;
}

std::vector<BlockIndex> BlockDecomposition::boundary_indices() const
{
    std::vector<BlockIndex> out;
    for (auto& a : all_indices())
        if (in_boundary_set(a)) out.push_back(std::move(a));
    return out;
}

std::vector<BlockIndex> BlockDecomposition::gamma_indices(const SignVector& gamma) const
{
    std::vector<BlockIndex> out;
    for (auto& a : all_indices())
        if (in_gamma_set(a, gamma)) out.push_back(std::move(a));
    return out;
}

bool BlockDecomposition::in_boundary_set(const BlockIndex& alpha)
{
    return std::any_of(alpha.begin(), alpha.end(), [](int a) { return a == 2 || a == -2; });
}

bool BlockDecomposition::in_gamma_set(const BlockIndex& alpha, const SignVector& gamma)
{
    if (alpha.size() != gamma.size()) throw DimensionError("sign vector has wrong dimension");
    int m = 3;
    for (std::size_t i = 0; i < alpha.size(); ++i) m = std::min(m, alpha[i] * gamma[i]);
    return m == -2;
}

Vec BlockDecomposition::lower(const BlockIndex& alpha) const
{
    Vec v(n_);
    for (int i = 0; i < n_; ++i) v[i] = static_cast<double>(ell_ * (alpha[static_cast<std::size_t>(i)] + 2));
    return v;
}

Vec BlockDecomposition::upper(const BlockIndex& alpha) const
{
    return lower(alpha).array() + static_cast<double>(ell_);
}

Vec BlockDecomposition::center(const BlockIndex& alpha) const
{
    return lower(alpha).array() + 0.5 * static_cast<double>(ell_);
}

double BlockDecomposition::volume() const
{
    return std::pow(static_cast<double>(ell_), n_);
}

template <class Pred>
bool BlockDecomposition::in_interior_union(const Vec& x, Pred pred) const
{
    if (x.size() != n_) throw DimensionError("point has wrong dimension");
    const double L = 5.0 * static_cast<double>(ell_);
    for (int i = 0; i < n_; ++i)
        if (!(x[i] > 0.0 && x[i] < L)) return false;
    // every closed block containing x must belong to the set
    std::vector<std::vector<int>> choices(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        const double s = x[i] / static_cast<double>(ell_);
        const double f = std::floor(s);
        auto& c = choices[static_cast<std::size_t>(i)];
        c.push_back(std::min(static_cast<int>(f), 4) - 2);
        if (s == f && f > 0) c.push_back(static_cast<int>(f) - 1 - 2);
    }
    BlockIndex a(static_cast<std::size_t>(n_));
    std::vector<std::size_t> pick(static_cast<std::size_t>(n_), 0);
    while (true) {
        for (int i = 0; i < n_; ++i) a[static_cast<std::size_t>(i)] = choices[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
        if (!pred(a)) return false;
        int i = 0;
        for (; i < n_; ++i) {
            auto& p = pick[static_cast<std::size_t>(i)];
            if (p + 1 < choices[static_cast<std::size_t>(i)].size()) {
                ++p;
                break;
            }
            p = 0;
        }
        if (i == n_) break;
    }
    return true;
}

bool BlockDecomposition::in_G_boundary(const Vec& x) const
{
    return in_interior_union(x, [](const BlockIndex& a) { return in_boundary_set(a); });
}

bool BlockDecomposition::in_G_gamma(const Vec& x, const SignVector& gamma) const
{
    return in_interior_union(x, [&](const BlockIndex& a) { return in_gamma_set(a, gamma); });
}

std::vector<Vec> BlockDecomposition::centers() const
{
    MultiIndex origin(static_cast<std::size_t>(n_), 2 * ell_);
    return CubicalGrid(n_, ell_, origin).dual_centers();
}

std::vector<SignVector> all_sign_vectors(int dimension)
{
    check_dimension(dimension);
    std::vector<SignVector> out;
    for (std::uint32_t m = 0; m < (1u << dimension); ++m) {
        SignVector g(static_cast<std::size_t>(dimension));
        for (int i = 0; i < dimension; ++i) g[static_cast<std::size_t>(i)] = (m >> i & 1u) ? 1 : -1;
        out.push_back(std::move(g));
    }
    return out;
}

bool cone_membership(const Vec& y, const SignVector& gamma, const std::vector<Vec>& sigmas)
{
    if (static_cast<Eigen::Index>(gamma.size()) != y.size()) throw DimensionError("sign vector has wrong dimension");
    for (const auto& s : sigmas) {
        bool inside = true;
        for (Eigen::Index i = 0; i < y.size() && inside; ++i) inside = gamma[static_cast<std::size_t>(i)] * (y[i] - s[i]) > 0.0;
        if (inside) return true;
    }
    return false;
}

double dist_inf_to_box(const Vec& y, const Vec& lo, const Vec& hi)
{
    double d = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) d = std::max({d, lo[i] - y[i], y[i] - hi[i]});
    return d;
}

} // namespace cubeskel

#pragma once

#include "cubeskel/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cubeskel {

using MultiIndex = std::vector<std::int64_t>;

enum class Side : int { Minus = -1, Plus = 1 };

inline int sign_of(Side s) { return static_cast<int>(s); }
inline Side opposite(Side s) { return s == Side::Plus ? Side::Minus : Side::Plus; }

/// A codimension-one face owned by a cell; `axis` is 0-based.
/// The orientation is the outward normal of the owning cell.
struct OrientedFace {
    MultiIndex cell;
    int axis = 0;
    Side side = Side::Plus;

    /// Same unoriented face seen from the neighbouring cell.
    OrientedFace flipped() const;
    /// Lexicographically smaller of the two representations, always of the form (c, axis, +).
    OrientedFace canonical() const;
    /// +1 if this orientation agrees with the canonical one.
    int orientation_sign() const { return sign_of(side); }

    friend bool operator==(const OrientedFace&, const OrientedFace&) = default;
    friend auto operator<=>(const OrientedFace&, const OrientedFace&) = default;
};

/// A j-face of the unit-cube decomposition: min-corner vertex plus the set of free axes.
struct Face {
    MultiIndex vertex;
    std::uint32_t free_axes = 0;

    int dimension() const;
    friend bool operator==(const Face&, const Face&) = default;
};

/// The cube [0, ell]^N (shifted by an integer origin) cut into unit cells.
class CubicalGrid {
public:
    CubicalGrid(int dimension, std::int64_t edge_count, MultiIndex origin = {});

    int dimension() const { return n_; }
    std::int64_t edge_count() const { return ell_; }
    const MultiIndex& origin() const { return origin_; }

    std::size_t cell_count() const { return cells_; }
    std::size_t cell_id(const MultiIndex& cell) const;
    MultiIndex cell_at(std::size_t id) const;
    bool contains_cell(const MultiIndex& cell) const;

    /// Number of j-faces of the grid: C(N,j) ell^j (ell+1)^(N-j).
    static std::uint64_t face_count(int dimension, std::int64_t edge_count, int j);
    std::vector<Face> enumerate_faces(int j) const;
    /// Every (N-1)-face once per owning cell of the grid.
    std::vector<OrientedFace> enumerate_oriented_faces() const;
    /// All 2N oriented faces of one cell.
    std::vector<OrientedFace> faces_of(const MultiIndex& cell) const;
    bool is_boundary(const OrientedFace& face) const;

    /// Dense numbering of unoriented (N-1)-faces.
    std::size_t facet_count() const { return facets_; }
    std::size_t facet_id(const OrientedFace& face) const;
    OrientedFace facet_at(std::size_t id) const;

    /// Geometric center of a cell, in absolute coordinates.
    Vec cell_center(const MultiIndex& cell) const;
    /// The dual centers (cell centers), in cell-id order.
    std::vector<Vec> dual_centers() const;

    nlohmann::json to_json() const;
    static CubicalGrid from_json(const nlohmann::json& j);

    friend bool operator==(const CubicalGrid&, const CubicalGrid&) = default;

private:
    int n_;
    std::int64_t ell_;
    MultiIndex origin_;
    std::size_t cells_;
    std::size_t facets_per_axis_;
    std::size_t facets_;
};

/// CSV rows "cell_0;...;cell_{N-1},axis,side" with 1-based axis and side as +/-.
void write_faces_csv(std::ostream& os, const std::vector<OrientedFace>& faces);

using SignVector = std::vector<int>;
using BlockIndex = std::vector<int>;

/// The 5^N blocks Q_{ell,alpha} = [0,ell]^N + ell*alpha + (2ell,...,2ell) tiling [0,5ell]^N.
class BlockDecomposition {
public:
    BlockDecomposition(int dimension, std::int64_t edge_count);

    int dimension() const { return n_; }
    std::int64_t edge_count() const { return ell_; }

    std::vector<BlockIndex> all_indices() const;
    std::vector<BlockIndex> boundary_indices() const;
    std::vector<BlockIndex> gamma_indices(const SignVector& gamma) const;

    static bool in_boundary_set(const BlockIndex& alpha);
    static bool in_gamma_set(const BlockIndex& alpha, const SignVector& gamma);

    Vec lower(const BlockIndex& alpha) const;
    Vec upper(const BlockIndex& alpha) const;
    Vec center(const BlockIndex& alpha) const;
    double volume() const;

    /// Interior of the union of the boundary blocks.
    bool in_G_boundary(const Vec& x) const;
    /// Interior of the union of the blocks with alpha in A_gamma.
    bool in_G_gamma(const Vec& x, const SignVector& gamma) const;

    /// Centers of the unit cells of the middle block Q_{ell,0}.
    std::vector<Vec> centers() const;

private:
    template <class Pred>
    bool in_interior_union(const Vec& x, Pred pred) const;

    int n_;
    std::int64_t ell_;
};

std::vector<SignVector> all_sign_vectors(int dimension);

/// True iff y lies in the open orthant cone gamma translated by some sigma in sigmas.
bool cone_membership(const Vec& y, const SignVector& gamma, const std::vector<Vec>& sigmas);

/// Sup-norm distance from y to the box [lo, hi].
double dist_inf_to_box(const Vec& y, const Vec& lo, const Vec& hi);

} // namespace cubeskel

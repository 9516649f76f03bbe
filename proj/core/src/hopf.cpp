#include "cubeskel/hopf.hpp"

#include "cubeskel/errors.hpp"
#include "cubeskel/io.hpp"
#include "cubeskel/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

namespace cubeskel {

namespace {

double solid_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c, const Eigen::Vector3d& d)
{
    const Eigen::Vector3d r13 = c - a, r14 = d - a, r23 = c - b, r24 = d - b;
    Eigen::Vector3d n[4] = {r13.cross(r14), r14.cross(r24), r24.cross(r23), r23.cross(r13)};
    for (auto& v : n) {
        const double len = v.norm();
        if (len < 1e-300) return 0.0;
        v /= len;
    }
    double omega = 0.0;
    for (int i = 0; i < 4; ++i) omega += std::asin(std::clamp(n[i].dot(n[(i + 1) % 4]), -1.0, 1.0));
    const double s = (d - c).cross(b - a).dot(r13);
    return s > 0 ? omega : (s < 0 ? -omega : 0.0);
}

} // namespace

double linking_number(const std::vector<Segment3>& first, const std::vector<Segment3>& second)
{
    double total = 0.0;
    for (const auto& s : first)
        for (const auto& t : second) total += solid_angle(s.a, s.b, t.a, t.b);
    return total / (4.0 * kPi);
}

nlohmann::json HopfReport::to_json() const
{
    auto v = [](const Eigen::Vector3d& x) { return std::vector<double>{round_sig(x[0]), round_sig(x[1]), round_sig(x[2])}; };
    return {{"invariant", invariant},       {"raw", round_sig(raw)},         {"p", v(p)},
            {"q", v(q)},                    {"segments_p", segments_p},      {"segments_q", segments_q},
            {"components_p", components_p}, {"components_q", components_q}, {"resolution", resolution},
            {"attempts", attempts}};
}

namespace {

struct Degenerate {};

using Key = std::array<std::uint32_t, 3>;

struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept
    {
        std::uint64_t h = k[0];
        h = h * 0x9e3779b97f4a7c15ULL ^ k[1];
        h = h * 0x9e3779b97f4a7c15ULL ^ k[2];
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

struct Tet {
    std::array<std::uint32_t, 4> v;
    std::int8_t sign;      // outward orientation of the facet chart
    std::uint8_t fixed;    // fixed axis of the facet
};

class BoundaryMesh {
public:
    BoundaryMesh(const EvaluableMap& f, const Vec& lo, const Vec& hi, int k) : k_(k), lo_(lo), hi_(hi)
    {
        const std::size_t side = static_cast<std::size_t>(k + 1);
        values_.assign(side * side * side * side, Eigen::Vector3d::Zero());
        on_boundary_.assign(values_.size(), 0);
        for (std::uint32_t id = 0; id < values_.size(); ++id) {
            const auto idx = index(id);
            bool boundary = false;
            for (int a = 0; a < 4; ++a) boundary = boundary || idx[static_cast<std::size_t>(a)] == 0 || idx[static_cast<std::size_t>(a)] == k;
            if (!boundary) continue;
            const Vec y = f.evaluate(position(idx));
            if (y.size() != 3) throw DimensionError("Hopf invariant needs values in S^2");
            values_[id] = Eigen::Vector3d(y[0], y[1], y[2]);
            const double r = values_[id].norm();
            if (!(r > 0)) throw DomainError("map value is not on the sphere");
            unit_.push_back(values_[id] / r);
            on_boundary_[id] = 1;
        }
        build_tets();
    }

    std::array<int, 4> index(std::uint32_t id) const
    {
        std::array<int, 4> idx{};
        for (int a = 0; a < 4; ++a) {
            idx[static_cast<std::size_t>(a)] = static_cast<int>(id % static_cast<std::uint32_t>(k_ + 1));
            id /= static_cast<std::uint32_t>(k_ + 1);
        }
        return idx;
    }

    std::uint32_t id(const std::array<int, 4>& idx) const
    {
        std::uint32_t r = 0;
        for (int a = 3; a >= 0; --a) r = r * static_cast<std::uint32_t>(k_ + 1) + static_cast<std::uint32_t>(idx[static_cast<std::size_t>(a)]);
        return r;
    }

    Vec position(const std::array<int, 4>& idx) const
    {
        Vec x(4);
        for (int a = 0; a < 4; ++a) x[a] = lo_[a] + (hi_[a] - lo_[a]) * idx[static_cast<std::size_t>(a)] / k_;
        return x;
    }

    Eigen::Vector4d to_ambient(const Eigen::Vector4d& index_coords) const
    {
        Eigen::Vector4d x;
        for (int a = 0; a < 4; ++a) x[a] = lo_[a] + (hi_[a] - lo_[a]) * index_coords[a] / k_;
        return x;
    }

    Eigen::Vector4d index_coords(std::uint32_t id) const
    {
        const auto idx = index(id);
        return {static_cast<double>(idx[0]), static_cast<double>(idx[1]), static_cast<double>(idx[2]), static_cast<double>(idx[3])};
    }

    const std::vector<Tet>& tets() const { return tets_; }
    const Eigen::Vector3d& value(std::uint32_t id) const { return values_[id]; }
    const std::vector<Eigen::Vector3d>& unit_values() const { return unit_; }
    int resolution() const { return k_; }

private:
    void build_tets()
    {
        static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (int a = 0; a < 4; ++a) {
            int free[3], n = 0;
            for (int b = 0; b < 4; ++b)
                if (b != a) free[n++] = b;
            for (int s : {-1, 1}) {
                // outward orientation of the facet relative to the ascending free axes: s * (-1)^a
                const int facet_sign = s * (a % 2 == 0 ? 1 : -1);
                std::array<int, 4> base{};
                base[static_cast<std::size_t>(a)] = s > 0 ? k_ : 0;
                for (int c0 = 0; c0 < k_; ++c0)
                    for (int c1 = 0; c1 < k_; ++c1)
                        for (int c2 = 0; c2 < k_; ++c2) {
                            std::array<int, 4> v = base;
                            v[static_cast<std::size_t>(free[0])] = c0;
                            v[static_cast<std::size_t>(free[1])] = c1;
                            v[static_cast<std::size_t>(free[2])] = c2;
                            for (int p = 0; p < 6; ++p) {
                                Tet t;
                                std::array<int, 4> w = v;
                                t.v[0] = id(w);
                                for (int step = 0; step < 3; ++step) {
                                    ++w[static_cast<std::size_t>(free[perms[p][step]])];
                                    t.v[static_cast<std::size_t>(step + 1)] = id(w);
                                }
                                t.sign = static_cast<std::int8_t>(facet_sign);
                                t.fixed = static_cast<std::uint8_t>(a);
                                tets_.push_back(t);
                            }
                        }
            }
        }
    }

    int k_;
    Vec lo_, hi_;
    std::vector<Eigen::Vector3d> values_;
    std::vector<char> on_boundary_;
    std::vector<Eigen::Vector3d> unit_;
    std::vector<Tet> tets_;
};

struct Crossing {
    bool hit = false;
    Eigen::Vector4d point;  // index coordinates
};

class PreimageExtractor {
public:
    PreimageExtractor(const BoundaryMesh& mesh, const Eigen::Vector3d& p) : mesh_(mesh), p_(p)
    {
        // (e1, e2, p) positively oriented
        const Eigen::Vector3d helper = std::abs(p[0]) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
        e1_ = (helper - helper.dot(p) * p).normalized();
        e2_ = p.cross(e1_);
    }

    PreimageCurves run()
    {
        PreimageCurves out;
        std::unordered_map<Key, Key, KeyHash> next;
        std::unordered_map<Key, int, KeyHash> incoming;
        std::unordered_map<Key, Eigen::Vector4d, KeyHash> points;
        for (const auto& t : mesh_.tets()) {
            Eigen::Vector2d g[4];
            bool pos1 = false, neg1 = false, pos2 = false, neg2 = false, front = false;
            for (int i = 0; i < 4; ++i) {
                g[i] = G(t.v[static_cast<std::size_t>(i)]);
                pos1 |= g[i][0] >= 0;
                neg1 |= g[i][0] <= 0;
                pos2 |= g[i][1] >= 0;
                neg2 |= g[i][1] <= 0;
                front |= mesh_.value(t.v[static_cast<std::size_t>(i)]).dot(p_) > 0;
            }
            if (!(pos1 && neg1 && pos2 && neg2 && front)) continue;
            static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
            Key keys[2];
            Eigen::Vector4d pts[2];
            int hits = 0;
            for (const auto& face : faces) {
                Key key{t.v[static_cast<std::size_t>(face[0])], t.v[static_cast<std::size_t>(face[1])],
                        t.v[static_cast<std::size_t>(face[2])]};
                std::sort(key.begin(), key.end());
                const Crossing c = crossing(key);
                if (!c.hit) continue;
                if (hits == 2) throw Degenerate{};
                keys[hits] = key;
                pts[hits] = c.point;
                ++hits;
            }
            if (hits == 0) continue;
            if (hits != 2) throw Degenerate{};
            // orientation: T = grad G1 x grad G2 in the facet coordinates, times the tet sign
            Eigen::Matrix3d E;
            Eigen::Matrix<double, 3, 2> dG;
            const Eigen::Vector4d x0 = mesh_.index_coords(t.v[0]);
            for (int i = 1; i < 4; ++i) {
                const Eigen::Vector4d d = mesh_.index_coords(t.v[static_cast<std::size_t>(i)]) - x0;
                E.col(i - 1) = drop(d, t.fixed);
                dG.row(i - 1) = (g[i] - g[0]).transpose();
            }
            // grad G_j solves E^T grad = dG_j
            const Eigen::Matrix<double, 3, 2> grads = E.transpose().inverse() * dG;
            const Eigen::Vector3d T = grads.col(0).cross(grads.col(1)) * static_cast<double>(t.sign);
            const double dir = T.dot(drop(pts[1] - pts[0], t.fixed));
            if (std::abs(dir) < 1e-14 * T.norm()) throw Degenerate{};
            const int from = dir > 0 ? 0 : 1, to = 1 - from;
            if (next.count(keys[from])) throw Degenerate{};
            next[keys[from]] = keys[to];
            ++incoming[keys[to]];
            points[keys[0]] = pts[0];
            points[keys[1]] = pts[1];
            out.segments.emplace_back(mesh_.to_ambient(pts[from]), mesh_.to_ambient(pts[to]));
        }
        // every crossing point must have exactly one incoming and one outgoing segment
        for (const auto& [key, pt] : points) {
            auto it = incoming.find(key);
            if (!next.count(key) || it == incoming.end() || it->second != 1) throw Degenerate{};
        }
        std::unordered_map<Key, char, KeyHash> seen;
        for (const auto& [start, unused] : next) {
            if (seen.count(start)) continue;
            ++out.components;
            Key cur = start;
            while (!seen.count(cur)) {
                seen[cur] = 1;
                cur = next.at(cur);
            }
        }
        return out;
    }

private:
    static Eigen::Vector3d drop(const Eigen::Vector4d& v, int fixed)
    {
        Eigen::Vector3d r;
        int n = 0;
        for (int a = 0; a < 4; ++a)
            if (a != fixed) r[n++] = v[a];
        return r;
    }

    Eigen::Vector2d G(std::uint32_t id) const
    {
        const auto& F = mesh_.value(id);
        return {e1_.dot(F), e2_.dot(F)};
    }

    Crossing crossing(const Key& key) const
    {
        constexpr double eps = 1e-11;
        const Eigen::Vector2d g0 = G(key[0]), g1 = G(key[1]), g2 = G(key[2]);
        Eigen::Matrix2d M;
        M.col(0) = g1 - g0;
        M.col(1) = g2 - g0;
        const double det = M.determinant();
        const double scale = std::max({g0.norm(), g1.norm(), g2.norm()});
        if (std::abs(det) <= 1e-14 * scale * scale) {
            if (g0.norm() <= 1e-12 * scale || scale == 0.0) throw Degenerate{};
            return {};
        }
        const Eigen::Vector2d lam = -M.inverse() * g0;
        const double l0 = 1.0 - lam[0] - lam[1];
        const double mn = std::min({l0, lam[0], lam[1]});
        if (mn < -eps) return {};
        if (mn <= eps) throw Degenerate{};
        const Eigen::Vector3d F = l0 * mesh_.value(key[0]) + lam[0] * mesh_.value(key[1]) + lam[1] * mesh_.value(key[2]);
        const double front = F.dot(p_);
        if (std::abs(front) < 1e-9) throw Degenerate{};
        if (front < 0) return {};
        Crossing c;
        c.hit = true;
        c.point = l0 * mesh_.index_coords(key[0]) + lam[0] * mesh_.index_coords(key[1]) + lam[1] * mesh_.index_coords(key[2]);
        return c;
    }

    const BoundaryMesh& mesh_;
    Eigen::Vector3d p_, e1_, e2_;
};

Eigen::Vector3d random_unit(CounterRng& rng)
{
    Eigen::Vector3d v;
    do {
        v = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    } while (v.norm() < 1e-3);
    return v.normalized();
}

bool acceptable_value(const BoundaryMesh& mesh, const Eigen::Vector3d& p, const HopfOptions& opts)
{
    std::size_t close = 0;
    for (const auto& u : mesh.unit_values()) {
        const double d = (u - p).norm();
        if (d < opts.vertex_tolerance) return false;
        if (d < opts.plateau_radius) ++close;
    }
    return static_cast<double>(close) < opts.plateau_fraction * static_cast<double>(mesh.unit_values().size());
}

std::vector<Segment3> project_to_r3(const PreimageCurves& curves, const Eigen::Vector4d& center, const Eigen::Vector4d& pole,
                                    const Eigen::Matrix<double, 4, 3>& basis)
{
    std::vector<Segment3> out;
    auto map = [&](const Eigen::Vector4d& x) {
        const Eigen::Vector4d s = (x - center).normalized();
        const double denom = 1.0 - s.dot(pole);
        return Eigen::Vector3d(basis.transpose() * s / denom);
    };
    for (const auto& [a, b] : curves.segments) out.push_back({map(a), map(b)});
    return out;
}

} // namespace

HopfReport hopf_invariant(const EvaluableMap& f, const Vec& lo, const Vec& hi, std::uint64_t pair_index,
                          const HopfOptions& opts)
{
    if (f.domain_dim() != 4 || f.codomain_dim() != 3)
        throw UnsupportedError("Hopf invariant is implemented for maps from the boundary of a 4-box to S^2 only");
    if (lo.size() != 4 || hi.size() != 4) throw DimensionError("box must live in R^4");
    CounterRng rng(opts.seed, 0x486f7066ULL + pair_index);
    int resolution = opts.resolution;
    int attempts = 0;
    for (int refine = 0; refine <= opts.max_refinements; ++refine) {
        BoundaryMesh mesh(f, lo, hi, resolution);
        for (int attempt = 0; attempt < opts.attempts_per_resolution; ++attempt) {
            ++attempts;
            const Eigen::Vector3d p = random_unit(rng);
            const Eigen::Vector3d q = random_unit(rng);
            if (std::acos(std::clamp(p.dot(q), -1.0, 1.0)) < opts.min_separation) continue;
            if (!acceptable_value(mesh, p, opts) || !acceptable_value(mesh, q, opts)) continue;
            PreimageCurves cp, cq;
            try {
                cp = PreimageExtractor(mesh, p).run();
                cq = PreimageExtractor(mesh, q).run();
            } catch (const Degenerate&) {
                continue;
            }
            Eigen::Vector4d center;
            for (int a = 0; a < 4; ++a) center[a] = 0.5 * (lo[a] + hi[a]);
            // pole: the candidate direction farthest from both curve systems
            std::vector<Eigen::Vector4d> candidates;
            for (int a = 0; a < 4; ++a)
                for (int s : {-1, 1}) {
                    Eigen::Vector4d e = Eigen::Vector4d::Zero();
                    e[a] = s;
                    candidates.push_back(e);
                }
            for (int m = 0; m < 16; ++m) {
                Eigen::Vector4d e;
                for (int a = 0; a < 4; ++a) e[a] = (m >> a & 1) ? 0.5 : -0.5;
                candidates.push_back(e);
            }
            Eigen::Vector4d pole = candidates.front();
            double best = -1.0;
            for (const auto& c : candidates) {
                double mind = 2.0;
                for (const auto* curves : {&cp, &cq})
                    for (const auto& [a, b] : curves->segments) mind = std::min(mind, ((a - center).normalized() - c).norm());
                if (mind > best) {
                    best = mind;
                    pole = c;
                }
            }
            if (best < 1e-3) continue;
            // orthonormal basis of the complement with det[pole, e1, e2, e3] = -1 (orientation preserving)
            Eigen::Matrix4d Q = Eigen::HouseholderQR<Eigen::Matrix4d>(Eigen::Matrix4d(pole * Eigen::RowVector4d::Unit(0) +
                                                                                       Eigen::Matrix4d::Zero()))
                                    .householderQ();
            Eigen::Matrix4d frame;
            frame.col(0) = pole;
            frame.rightCols(3) = Q.rightCols(3);
            Eigen::Matrix<double, 4, 3> basis = Q.rightCols(3);
            if (frame.determinant() > 0) basis.col(2) = -basis.col(2);
            const double raw = linking_number(project_to_r3(cp, center, pole, basis), project_to_r3(cq, center, pole, basis));
            const int inv = static_cast<int>(std::lround(raw));
            if (std::abs(raw - inv) > 0.25) continue;
            HopfReport r;
            r.invariant = inv;
            r.raw = raw;
            r.p = p;
            r.q = q;
            r.segments_p = cp.segments.size();
            r.segments_q = cq.segments.size();
            r.components_p = cp.components;
            r.components_q = cq.components;
            r.resolution = resolution;
            r.attempts = attempts;
            return r;
        }
        resolution = resolution * 3 / 2;
    }
    throw RegularValueError("no usable pair of regular values found after " + std::to_string(attempts) + " attempts");
}

std::vector<HopfReport> hopf_invariant_pairs(const EvaluableMap& f, const Vec& lo, const Vec& hi, const HopfOptions& opts)
{
    std::vector<HopfReport> out;
    for (int i = 0; i < opts.pairs; ++i) out.push_back(hopf_invariant(f, lo, hi, static_cast<std::uint64_t>(i), opts));
    return out;
}

} // namespace cubeskel

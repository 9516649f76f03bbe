#include "cubeskel/degree.hpp"

#include "cubeskel/errors.hpp"
#include "cubeskel/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cubeskel {

double unit_sphere_area(int n)
{
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

SphereWeight SphereWeight::uniform(int dimension)
{
    return {Vec::Zero(dimension), Mat::Zero(dimension, dimension)};
}

SphereWeight SphereWeight::random(int dimension, CounterRng& rng)
{
    SphereWeight w = uniform(dimension);
    for (int i = 0; i < dimension; ++i) w.a[i] = rng.normal();
    w.a *= 0.3 / w.a.norm();
    Mat B(dimension, dimension);
    for (int i = 0; i < dimension; ++i)
        for (int j = 0; j < dimension; ++j) B(i, j) = rng.normal();
    B = 0.5 * (B + B.transpose()).eval();
    const double spec = Eigen::SelfAdjointEigenSolver<Mat>(B).eigenvalues().cwiseAbs().maxCoeff();
    w.B = spec > 0 ? Mat(B * (0.3 / spec)) : B;
    return w;
}

double SphereWeight::sphere_integral() const
{
    const int n = static_cast<int>(a.size());
    return unit_sphere_area(n) * (1.0 + B.trace() / n);
}

double DegreeReport::residual() const
{
    double r = 0.0;
    for (const auto& e : entries) r = std::max(r, e.residual);
    return r;
}

long DegreeReport::total_abs_degree() const
{
    long t = 0;
    for (const auto& e : entries) t += std::abs(e.degree);
    return t;
}

nlohmann::json DegreeReport::to_json() const
{
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : entries)
        list.push_back({{"sigma", std::vector<double>(e.sigma.data(), e.sigma.data() + e.sigma.size())},
                        {"raw", round_sig(e.raw)},
                        {"degree", e.degree},
                        {"residual", round_sig(e.residual)}});
    return {{"method", method}, {"entries", list}, {"residual", round_sig(residual())}, {"total", total_abs_degree()}};
}

void write_degree_csv(std::ostream& os, const DegreeReport& report)
{
    if (report.entries.empty()) {
        os << "raw,degree\n";
        return;
    }
    const auto n = report.entries.front().sigma.size();
    for (Eigen::Index i = 0; i < n; ++i) os << "sigma" << i << ',';
    os << "raw,degree\n";
    for (const auto& e : report.entries) {
        for (Eigen::Index i = 0; i < n; ++i) os << format_double(e.sigma[i]) << ',';
        os << format_double(e.raw) << ',' << e.degree << '\n';
    }
}

namespace {

void check_surface(const EvaluableMap& f, const Domain& surface)
{
    if (surface.ambient_dim() != f.domain_dim()) throw DimensionError("surface and map dimensions differ");
    if (surface.dimension() != f.codomain_dim() - 1) throw DimensionError("degree needs a hypersurface mapped to R^{k+1}");
}

DegreeReport joint_pass(const EvaluableMap& f, const Domain& surface, const std::vector<Vec>& sigmas,
                        const SphereWeight& weight, int base, int cap, const QuadratureOptions& qopts)
{
    const auto count = sigmas.size();
    std::vector<double> min_dist(count, kInf);
    auto integrand = [&](const Jet& jet, Eigen::VectorXd& out) {
        const int n = static_cast<int>(jet.value.size());
        Mat M(n, n);
        for (std::size_t i = 0; i < count; ++i) {
            const Vec d = jet.value - sigmas[i];
            const double r = d.norm();
            min_dist[i] = std::min(min_dist[i], r);
            if (r == 0.0) throw IllConditionedError("image hits sigma");
            const Vec g = d / r;
            M.col(0) = g;
            M.rightCols(n - 1) = (jet.J - g * (g.transpose() * jet.J)) / r;
            out[static_cast<Eigen::Index>(i)] = M.determinant() * weight(g) / jet.area;
        }
    };
    QuadratureOptions q = qopts;
    q.threads = 1;  // min_dist is accumulated without synchronisation
    const auto res = integrate_jets(f, surface, static_cast<int>(count), integrand, base, cap, q);
    const double wsum = weight.sphere_integral();
    DegreeReport report;
    for (std::size_t i = 0; i < count; ++i) {
        DegreeEntry e;
        e.sigma = sigmas[i];
        e.raw = res.value[static_cast<Eigen::Index>(i)] / wsum;
        e.degree = static_cast<int>(std::lround(e.raw));
        e.residual = std::abs(e.raw - e.degree);
        e.min_distance = min_dist[i];
        report.entries.push_back(std::move(e));
    }
    return report;
}

} // namespace

DegreeReport joint_degrees(const EvaluableMap& f, const Domain& surface, const std::vector<Vec>& sigmas,
                           const SphereWeight& weight, const DegreeOptions& opts)
{
    check_surface(f, surface);
    if (weight.a.size() != f.codomain_dim()) throw DimensionError("weight has wrong dimension");
    if (sigmas.empty()) return {};
    auto report = joint_pass(f, surface, sigmas, weight, opts.base_depth, opts.depth_cap, opts.quadrature);
    for (const auto& e : report.entries)
        if (e.min_distance < opts.min_clearance) throw IllConditionedError("image comes within the clearance of sigma");
    if (report.residual() > opts.refine_residual)
        report = joint_pass(f, surface, sigmas, weight, opts.base_depth + 1, opts.depth_cap + 1, opts.quadrature);
    if (report.residual() >= opts.reject_residual)
        throw NonIntegralError("degree integral is not close to an integer (residual " + format_double(report.residual()) + ")");
    return report;
}

DegreeEntry degree_integral(const EvaluableMap& f, const Domain& surface, const Vec& sigma, const SphereWeight& weight,
                            const DegreeOptions& opts)
{
    return joint_degrees(f, surface, {sigma}, weight, opts).entries.front();
}

RearrangementResult rearrangement_bound_check(const std::vector<Vec>& sigmas, const Vec& y)
{
    if (sigmas.empty()) throw ParameterError("empty point set");
    const auto n = y.size();
    RearrangementResult r;
    for (const auto& s : sigmas) {
        if (s.size() != n) throw DimensionError("point has wrong dimension");
        const double d = (y - s).norm();
        if (d < 0.5) throw DomainError("y is closer than 1/2 to the point set");
        r.sum += std::pow(d, -static_cast<double>(n - 1));
    }
    r.ratio = r.sum / std::pow(static_cast<double>(sigmas.size()), 1.0 / static_cast<double>(n));
    return r;
}

double worst_full_cube_ratio(int dimension, int k_max)
{
    if (dimension < 1 || dimension > kMaxDim) throw DimensionError("bad dimension");
    double worst = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        std::vector<Vec> cube;
        CubicalGrid grid(dimension, k);
        for (std::size_t id = 0; id < grid.cell_count(); ++id) {
            const auto c = grid.cell_at(id);
            Vec p(dimension);
            for (int i = 0; i < dimension; ++i) p[i] = static_cast<double>(c[static_cast<std::size_t>(i)]);
            cube.push_back(p);
        }
        // candidate y on the half-integer grid of [-1/2, k - 1/2]^N, by symmetry only the lower half
        const int steps = k;  // y_i = -1/2 + j/2, j = 0..steps
        std::vector<int> j(static_cast<std::size_t>(dimension), 0);
        while (true) {
            Vec y(dimension);
            for (int i = 0; i < dimension; ++i) y[i] = -0.5 + 0.5 * j[static_cast<std::size_t>(i)];
            bool ok = true;
            for (const auto& s : cube)
                if ((y - s).norm() < 0.5) {
                    ok = false;
                    break;
                }
            if (ok) worst = std::max(worst, rearrangement_bound_check(cube, y).ratio);
            int i = 0;
            for (; i < dimension; ++i) {
                auto& ji = j[static_cast<std::size_t>(i)];
                if (ji < steps) {
                    ++ji;
                    break;
                }
                ji = 0;
            }
            if (i == dimension) break;
        }
    }
    return worst;
}

PolyhedralCone PolyhedralCone::orthant(const SignVector& gamma)
{
    PolyhedralCone c;
    const int n = static_cast<int>(gamma.size());
    for (int i = 0; i < n; ++i) {
        Vec v = Vec::Zero(n);
        v[i] = gamma[static_cast<std::size_t>(i)];
        c.normals.push_back(v);
    }
    return c;
}

PolyhedralCone PolyhedralCone::halved(int i, int j) const
{
    if (normals.empty()) throw ParameterError("cone without normals");
    PolyhedralCone c = *this;
    Vec v = Vec::Zero(normals.front().size());
    v[i] = 1.0;
    v[j] = -1.0;
    c.normals.push_back(v);
    return c;
}

bool PolyhedralCone::contains(const Vec& y) const
{
    for (const auto& nu : normals)
        if (!(nu.dot(y) > 0.0)) return false;
    return true;
}

bool PolyhedralCone::contains_translate(const Vec& y, const std::vector<Vec>& sigmas) const
{
    for (const auto& s : sigmas)
        if (contains(y - s)) return true;
    return false;
}

double PolyhedralCone::spherical_measure(int depth) const
{
    if (normals.empty()) throw ParameterError("cone without normals");
    const auto n = normals.front().size();
    QuadratureOptions q;
    q.root_size = 2.0;
    const auto res = integrate_function([this](const Vec& y) { return contains(y) ? 1.0 : 0.0; },
                                        make_sphere(Vec::Zero(n), 1.0), SingularSet::none(), depth, depth, q);
    return res.value[0];
}

nlohmann::json ConicalEstimate::to_json() const
{
    return {{"lhs", round_sig(lhs)},         {"integral", round_sig(integral)}, {"measure", round_sig(measure)},
            {"rhs", round_sig(rhs)},         {"ratio", round_sig(ratio)},       {"violated", violated},
            {"total_degree", total_degree}};
}

ConicalEstimate conical_estimate_check(const EvaluableMap& f, const Domain& surface, const std::vector<Vec>& sigmas,
                                       const PolyhedralCone& cone, double constant, const DegreeOptions& opts)
{
    check_surface(f, surface);
    ConicalEstimate out;
    out.measure = cone.spherical_measure();
    if (!(out.measure > 1e-12)) throw ParameterError("cone has zero spherical measure");
    const auto report = joint_degrees(f, surface, sigmas, SphereWeight::uniform(f.codomain_dim()), opts);
    out.total_degree = report.total_abs_degree();
    const int n = f.codomain_dim();
    out.lhs = std::pow(static_cast<double>(out.total_degree), 1.0 - 1.0 / n);
    const double p = n - 1;
    auto integrand = [&](const Jet& jet, Eigen::VectorXd& o) {
        o[0] = cone.contains_translate(jet.value, sigmas) ? std::pow(tangential_norm2(jet), 0.5 * p) : 0.0;
    };
    out.integral = integrate_jets(f, surface, 1, integrand, opts.base_depth, opts.depth_cap, opts.quadrature).value[0];
    out.rhs = out.integral / out.measure;
    out.ratio = out.lhs > 0 ? (out.rhs > 0 ? out.lhs / out.rhs : kInf) : 0.0;
    out.violated = out.lhs > constant * out.rhs;
    return out;
}

} // namespace cubeskel

#include "cubeskel/quadrature.hpp"

#include "cubeskel/io.hpp"
#include "cubeskel/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>

namespace cubeskel {

// ---------------------------------------------------------------- charts

Vec Chart::point(const Vec& s) const
{
    const Vec q = base + axes * s;
    if (kind == Kind::Affine) return q;
    return center + q * (radius / q.norm());
}

Mat Chart::tangent(const Vec& s) const
{
    if (kind == Kind::Affine) return axes;
    const Vec q = base + axes * s;
    const double r = q.norm();
    const Vec u = q / r;
    Mat P = Mat::Identity(q.size(), q.size()) - u * u.transpose();
    return (radius / r) * P * axes;
}

double Chart::distance_lower_bound(const Vec& y) const
{
    if (kind == Kind::Radial) return std::abs((y - center).norm() - radius);
    Vec s(param_dim());
    const Vec d = y - base;
    for (int j = 0; j < param_dim(); ++j) {
        const double n2 = axes.col(j).squaredNorm();
        s[j] = n2 > 0 ? std::clamp(d.dot(axes.col(j)) / n2, 0.0, 1.0) : 0.0;
    }
    return (point(s) - y).norm();
}

Chart Chart::reversed() const
{
    Chart c = *this;
    c.base += c.axes.col(0);
    c.axes.col(0) = -c.axes.col(0);
    return c;
}

Domain::Domain(std::string kind, std::vector<Chart> charts, nlohmann::json parameters)
    : kind_(std::move(kind)), charts_(std::move(charts)), parameters_(std::move(parameters))
{
    if (charts_.empty()) throw ParameterError("domain without charts");
}

nlohmann::json Domain::descriptor() const { return {{"kind", kind_}, {"parameters", parameters_}}; }

std::string Domain::label() const
{
    std::string s = kind_ + ":" + parameters_.dump();
    std::replace(s.begin(), s.end(), ',', ';');
    s.erase(std::remove(s.begin(), s.end(), '"'), s.end());
    return s;
}

Domain Domain::reversed() const
{
    std::vector<Chart> charts;
    for (const auto& c : charts_) charts.push_back(c.reversed());
    auto params = parameters_;
    params["reversed"] = !parameters_.value("reversed", false);
    return Domain(kind_, std::move(charts), std::move(params));
}

namespace {

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

void check_box(const Vec& lo, const Vec& hi)
{
    if (lo.size() != hi.size() || lo.size() < 1 || lo.size() > kMaxDim) throw DimensionError("bad box dimension");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (!(hi[i] > lo[i])) throw ParameterError("empty box");
}

Chart box_chart(const Vec& lo, const Vec& hi)
{
    Chart c;
    c.base = lo;
    c.axes = Mat::Zero(lo.size(), lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) c.axes(i, i) = hi[i] - lo[i];
    return c;
}

std::vector<Chart> boundary_charts(const Vec& lo, const Vec& hi)
{
    const auto n = lo.size();
    if (n < 2) throw DimensionError("boundary charts need N >= 2");
    std::vector<Chart> out;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (int s : {-1, 1}) {
            Chart c;
            c.base = lo;
            if (s > 0) c.base[k] = hi[k];
            c.axes = Mat::Zero(n, n - 1);
            Eigen::Index col = 0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != k) c.axes(j, col++) = hi[j] - lo[j];
            // det[normal, axes] has sign s * (-1)^k
            const bool positive = (s > 0) == (k % 2 == 0);
            out.push_back(positive ? c : c.reversed());
        }
    }
    return out;
}

} // namespace

Domain make_box(const Vec& lo, const Vec& hi)
{
    check_box(lo, hi);
    return Domain("box", {box_chart(lo, hi)}, {{"lo", to_std(lo)}, {"hi", to_std(hi)}});
}

Domain make_boxes(const std::vector<std::pair<Vec, Vec>>& boxes)
{
    std::vector<Chart> charts;
    for (const auto& [lo, hi] : boxes) {
        check_box(lo, hi);
        charts.push_back(box_chart(lo, hi));
    }
    return Domain("boxes", std::move(charts), {{"count", boxes.size()}});
}

Domain make_box_boundary(const Vec& lo, const Vec& hi)
{
    check_box(lo, hi);
    return Domain("box_boundary", boundary_charts(lo, hi), {{"lo", to_std(lo)}, {"hi", to_std(hi)}});
}

Domain make_shell(const Vec& center, double edge)
{
    if (!(edge > 0)) throw ParameterError("shell edge must be positive");
    const Vec lo = center.array() - 0.5 * edge;
    const Vec hi = center.array() + 0.5 * edge;
    return Domain("shell", boundary_charts(lo, hi), {{"center", to_std(center)}, {"t", edge}});
}

Domain make_sphere(const Vec& center, double radius)
{
    if (!(radius > 0)) throw ParameterError("sphere radius must be positive");
    const auto n = center.size();
    auto charts = boundary_charts(Vec::Constant(n, -1.0), Vec::Constant(n, 1.0));
    for (auto& c : charts) {
        c.kind = Chart::Kind::Radial;
        c.center = center;
        c.radius = radius;
    }
    return Domain("sphere", std::move(charts), {{"center", to_std(center)}, {"radius", radius}});
}

// ---------------------------------------------------------------- rules

namespace {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Different Gauss-Legendre orders per axis: no tensor node lies on a diagonal x_i = +-x_j
// of the reference cell, where piecewise-smooth maps such as the skeleton retraction kink.
const Rule1D& rule_for_axis(int axis)
{
    static const Rule1D rules[4] = {
        {{-0.5773502691896257, 0.5773502691896257}, {1.0, 1.0}},
        {{-0.7745966692414834, 0.0, 0.7745966692414834}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}},
        {{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526},
         {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538}},
        {{-0.9324695142031521, -0.6612093864662645, -0.2386191860831969, 0.2386191860831969, 0.6612093864662645,
          0.9324695142031521},
         {0.1713244923791704, 0.3607615730481386, 0.4679139345726910, 0.4679139345726910, 0.3607615730481386,
          0.1713244923791704}},
    };
    return rules[axis % 4];
}

struct TensorNode {
    Vec xi;  // in [0,1]^k
    double weight;  // sums to 1
};

std::vector<TensorNode> tensor_rule(int k)
{
    std::vector<TensorNode> out{{Vec::Zero(k), 1.0}};
    for (int j = 0; j < k; ++j) {
        const auto& r = rule_for_axis(j);
        std::vector<TensorNode> next;
        for (const auto& t : out)
            for (std::size_t i = 0; i < r.nodes.size(); ++i) {
                TensorNode n = t;
                n.xi[j] = 0.5 * (r.nodes[i] + 1.0);
                n.weight *= 0.5 * r.weights[i];
                next.push_back(n);
            }
        out = std::move(next);
    }
    return out;
}

void pairwise_sum(std::vector<Eigen::VectorXd>& parts, Eigen::VectorXd& out)
{
    std::size_t n = parts.size();
    while (n > 1) {
        const std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i) parts[i] += parts[i + half];
        n = half;
    }
    out = parts.front();
}

struct BudgetExceeded {};

class Engine {
public:
    using Evaluate = std::function<Vec(const Vec&)>;
    using Distance = std::function<double(const Vec&)>;
    using Leaf = std::function<void(const Vec& x, const Vec& value, const Mat& J, const Mat& T, double area,
                                    const Mat& Ginv, Eigen::VectorXd& out)>;

    Engine(Evaluate eval, Distance dist, bool needs_jacobian, Leaf leaf, int components, int base, int cap,
           const QuadratureOptions& opts)
        : eval_(std::move(eval)), dist_(std::move(dist)), jac_(needs_jacobian), leaf_(std::move(leaf)),
          q_(components), base_(base), cap_(cap), opts_(opts)
    {
    }

    IntegralResult run(const Domain& domain)
    {
        struct Root {
            const Chart* chart;
            Vec lo, w;
        };
        std::vector<Root> roots;
        for (const auto& c : domain.charts()) {
            const int k = c.param_dim();
            std::vector<int> m(static_cast<std::size_t>(k));
            for (int j = 0; j < k; ++j) {
                const double len = c.kind == Chart::Kind::Affine ? c.axes.col(j).norm() : c.radius * c.axes.col(j).norm();
                m[static_cast<std::size_t>(j)] = std::max(1, static_cast<int>(std::ceil(len / opts_.root_size - 1e-9)));
            }
            std::vector<int> idx(static_cast<std::size_t>(k), 0);
            while (true) {
                Root r{&c, Vec(k), Vec(k)};
                for (int j = 0; j < k; ++j) {
                    const auto uj = static_cast<std::size_t>(j);
                    r.w[j] = 1.0 / m[uj];
                    r.lo[j] = idx[uj] * r.w[j];
                }
                roots.push_back(std::move(r));
                int j = 0;
                for (; j < k; ++j) {
                    const auto uj = static_cast<std::size_t>(j);
                    if (++idx[uj] < m[uj]) break;
                    idx[uj] = 0;
                }
                if (j == k) break;
            }
        }
        std::vector<Eigen::VectorXd> parts(roots.size(), Eigen::VectorXd::Zero(q_));
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        auto work = [&] {
            try {
                for (std::size_t i = next++; i < roots.size() && !failed; i = next++) {
                    rules_for(roots[i].chart->param_dim());
                    cell(*roots[i].chart, roots[i].lo, roots[i].w, 0, parts[i]);
                }
            } catch (...) {
                failed = true;
                std::lock_guard lock(mutex_);
                if (!error_) error_ = std::current_exception();
            }
        };
        const unsigned threads = std::max(1u, opts_.threads);
        if (threads == 1) {
            work();
        } else {
            for (const auto& r : roots) rules_for(r.chart->param_dim());
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }
        if (error_) std::rethrow_exception(error_);
        IntegralResult res;
        if (parts.empty()) {
            res.value = Eigen::VectorXd::Zero(q_);
        } else {
            pairwise_sum(parts, res.value);
        }
        res.cells = cells_;
        res.samples = samples_;
        return res;
    }

private:
    const std::vector<TensorNode>& rules_for(int k)
    {
        std::lock_guard lock(mutex_);
        auto& r = rules_[static_cast<std::size_t>(k)];
        if (r.empty()) r = tensor_rule(k);
        return r;
    }

    void cell(const Chart& chart, const Vec& lo, const Vec& w, int depth, Eigen::VectorXd& out)
    {
        const int k = chart.param_dim();
        bool split = depth < base_;
        if (!split && depth < cap_) {
            const Vec xc = chart.point(lo + 0.5 * w);
            const double diam = (chart.point(lo + w) - chart.point(lo)).norm();
            split = dist_(xc) < opts_.grading * diam;
        }
        if (split) {
            const int nchild = 1 << k;
            std::vector<Eigen::VectorXd> parts(static_cast<std::size_t>(nchild), Eigen::VectorXd::Zero(q_));
            const Vec hw = 0.5 * w;
            for (int c = 0; c < nchild; ++c) {
                Vec clo = lo;
                for (int j = 0; j < k; ++j)
                    if (c >> j & 1) clo[j] += hw[j];
                cell(chart, clo, hw, depth + 1, parts[static_cast<std::size_t>(c)]);
            }
            pairwise_sum(parts, out);
            return;
        }
        if (++cells_ > opts_.budget_cells) throw BudgetExceeded{};
        leaf(chart, lo, w, out);
    }

    void leaf(const Chart& chart, const Vec& lo, const Vec& w, Eigen::VectorXd& out)
    {
        const int k = chart.param_dim();
        const auto& rule = rules_[static_cast<std::size_t>(k)];
        out.setZero(q_);
        Eigen::VectorXd tmp(q_);
        double volume = 1.0;
        for (int j = 0; j < k; ++j) volume *= w[j];
        Mat J, Ginv;
        for (const auto& node : rule) {
            const Vec s = lo + node.xi.cwiseProduct(w);
            const Vec x = chart.point(s);
            const Mat T = chart.tangent(s);
            const Mat G = T.transpose() * T;
            const double det = G.determinant();
            const double area = std::sqrt(std::max(det, 0.0));
            Ginv = G.inverse();
            const Vec value = eval_(x);
            if (jac_) {
                const double d = dist_(x);
                J.resize(value.size(), k);
                for (int j = 0; j < k; ++j) {
                    const double tj = T.col(j).norm();
                    double h = w[j];
                    if (std::isfinite(d)) h = std::min(h, d / tj);
                    h *= opts_.fd_fraction;
                    Vec sp = s, sm = s;
                    sp[j] += h;
                    sm[j] -= h;
                    J.col(j) = (eval_(chart.point(sp)) - eval_(chart.point(sm))) / (2.0 * h);
                }
                samples_ += static_cast<std::size_t>(2 * k);
            }
            ++samples_;
            tmp.setZero();
            leaf_(x, value, J, T, area, Ginv, tmp);
            out += (node.weight * volume * area) * tmp;
        }
    }

    Evaluate eval_;
    Distance dist_;
    bool jac_;
    Leaf leaf_;
    int q_;
    int base_, cap_;
    QuadratureOptions opts_;
    std::vector<TensorNode> rules_[kMaxDim + 1];
    std::atomic<std::size_t> cells_{0};
    std::atomic<std::size_t> samples_{0};
    std::mutex mutex_;
    std::exception_ptr error_;
};

} // namespace

double tangential_norm2(const Jet& jet)
{
    return (jet.J * jet.Ginv * jet.J.transpose()).trace();
}

IntegralResult integrate_jets(const EvaluableMap& f, const Domain& domain, int components, const JetIntegrand& integrand,
                              int base_depth, int depth_cap, const QuadratureOptions& opts)
{
    if (domain.ambient_dim() != f.domain_dim()) throw DimensionError("domain and map dimensions differ");
    Engine engine([&](const Vec& x) { return f.evaluate(x); }, [&](const Vec& x) { return f.singular_distance(x); }, true,
                  [&](const Vec& x, const Vec& value, const Mat& J, const Mat& T, double area, const Mat& Ginv,
                      Eigen::VectorXd& out) { integrand(Jet{x, value, J, T, Ginv, area}, out); },
                  components, base_depth, depth_cap, opts);
    try {
        return engine.run(domain);
    } catch (const BudgetExceeded&) {
        throw BudgetError("quadrature cell budget exceeded", {});
    }
}

IntegralResult integrate_function(const std::function<double(const Vec&)>& g, const Domain& domain,
                                  const SingularSet& singular, int base_depth, int depth_cap, const QuadratureOptions& opts)
{
    Engine engine([&](const Vec& x) { return make_vec({g(x)}); }, [&](const Vec& x) { return singular.distance(x); },
                  false,
                  [](const Vec&, const Vec& value, const Mat&, const Mat&, double, const Mat&, Eigen::VectorXd& out) {
                      out[0] = value[0];
                  },
                  1, base_depth, depth_cap, opts);
    try {
        return engine.run(domain);
    } catch (const BudgetExceeded&) {
        throw BudgetError("quadrature cell budget exceeded", {});
    }
}

nlohmann::json EnergyEstimate::to_json() const
{
    return {{"value", round_sig(value)},
            {"error_bound", round_sig(error_bound)},
            {"p", p},
            {"domain", domain},
            {"samples", sample_count}};
}

void write_energy_csv_header(std::ostream& os) { os << "domain,p,value,error,samples\n"; }

void write_energy_csv_row(std::ostream& os, const EnergyEstimate& e)
{
    os << e.domain << ',' << format_double(e.p) << ',' << format_double(e.value) << ',' << format_double(e.error_bound)
       << ',' << e.sample_count << '\n';
}

namespace {

void check_integrable(const EvaluableMap& f, const Domain& domain, double p)
{
    const auto& sing = f.singular_set();
    if (sing.empty()) return;
    for (const auto& c : domain.charts()) {
        if (p < c.param_dim()) continue;
        // bounding box of the chart image
        Vec lo = Vec::Constant(c.ambient_dim(), kInf), hi = Vec::Constant(c.ambient_dim(), -kInf);
        if (c.kind == Chart::Kind::Radial) {
            lo = c.center.array() - c.radius;
            hi = c.center.array() + c.radius;
        } else {
            for (int corner = 0; corner < (1 << c.param_dim()); ++corner) {
                Vec s(c.param_dim());
                for (int j = 0; j < c.param_dim(); ++j) s[j] = corner >> j & 1;
                const Vec x = c.point(s);
                lo = lo.cwiseMin(x);
                hi = hi.cwiseMax(x);
            }
        }
        for (const auto& y : sing.points_in_box(lo.array() - 1e-9, hi.array() + 1e-9))
            if (c.distance_lower_bound(y) <= 1e-9)
                throw NonIntegrableError("|Du|^p is not integrable: p >= dimension with a singularity in the domain");
    }
}

} // namespace

EnergyEstimate energy(const EvaluableMap& f, const Domain& domain, double p, const QuadratureOptions& opts)
{
    if (!(p >= 1.0)) throw ParameterError("energy exponent must be >= 1");
    check_integrable(f, domain, p);
    auto density = [p](const Jet& jet, Eigen::VectorXd& out) {
        const double n2 = tangential_norm2(jet);
        out[0] = p == 2.0 ? n2 : std::pow(n2, 0.5 * p);
    };
    EnergyEstimate est;
    est.p = p;
    est.domain = domain.label();
    const int base = opts.base_depth;
    const int cap = std::max(opts.depth_cap, base + 1);
    IntegralResult coarse, fine;
    try {
        coarse = integrate_jets(f, domain, 1, density, base, cap - 1, opts);
    } catch (const BudgetError&) {
        est.error_bound = kInf;
        throw BudgetError("quadrature cell budget exceeded", est);
    }
    QuadratureOptions rest = opts;
    rest.budget_cells = opts.budget_cells > coarse.cells ? opts.budget_cells - coarse.cells : 0;
    try {
        fine = integrate_jets(f, domain, 1, density, base + 1, cap, rest);
    } catch (const BudgetError&) {
        est.value = coarse.value[0];
        est.error_bound = kInf;
        est.sample_count = coarse.samples;
        throw BudgetError("quadrature cell budget exceeded", est);
    }
    est.value = std::max(fine.value[0], 0.0);
    est.error_bound = 2.0 * std::abs(fine.value[0] - coarse.value[0]);
    est.sample_count = coarse.samples + fine.samples;
    return est;
}

double shell_clearance(const EvaluableMap& f, const Vec& center, double t)
{
    const Vec lo = center.array() - (0.5 * t + 1.0);
    const Vec hi = center.array() + (0.5 * t + 1.0);
    double best = kInf;
    for (const auto& s : f.singular_set().points_in_box(lo, hi)) best = std::min(best, std::abs(sup_norm(s - center) - 0.5 * t));
    return best;
}

std::vector<double> admissible_shells(const EvaluableMap& f, std::int64_t ell, int count)
{
    if (ell < 1 || count < 1) throw ParameterError("need ell >= 1 and a positive shell count");
    const double l = static_cast<double>(ell);
    const Vec c = Vec::Constant(f.domain_dim(), 2.5 * l);
    std::vector<double> out;
    for (int k = 0; k < count; ++k) {
        const double t = 3.0 * l + 2.0 * l * (k + 0.5) / count;
        if (shell_clearance(f, c, t) >= 0.25) out.push_back(t);
    }
    return out;
}

ShellSliceResult shell_slice_search(const EvaluableMap& f, std::int64_t ell, double p, int count,
                                    const QuadratureOptions& opts, bool with_annulus)
{
    const auto ts = admissible_shells(f, ell, count);
    if (ts.empty()) throw SearchError("no admissible shell found");
    const double l = static_cast<double>(ell);
    const Vec c = Vec::Constant(f.domain_dim(), 2.5 * l);
    ShellSliceResult res;
    double best = kInf;
    for (double t : ts) {
        auto e = energy(f, make_shell(c, t), p, opts);
        res.mean_energy += e.value;
        if (e.value < best) {
            best = e.value;
            res.t_star = t;
            res.shell = e;
        }
        res.samples.push_back({t, std::move(e)});
    }
    res.mean_energy /= static_cast<double>(ts.size());
    if (with_annulus) {
        BlockDecomposition blocks(f.domain_dim(), ell);
        std::vector<std::pair<Vec, Vec>> boxes;
        for (const auto& a : blocks.boundary_indices()) boxes.emplace_back(blocks.lower(a), blocks.upper(a));
        res.annulus = energy(f, make_boxes(boxes), p, opts);
    }
    return res;
}

} // namespace cubeskel

#include "cubeskel/transport.hpp"

#include "cubeskel/errors.hpp"
#include "cubeskel/io.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>

namespace cubeskel {

namespace {

MultiIndex shifted(MultiIndex c, int axis, std::int64_t by)
{
    c[static_cast<std::size_t>(axis)] += by;
    return c;
}

bool is_power_of_two(std::int64_t x) { return x > 0 && (x & (x - 1)) == 0; }

// Cells adjacent to a facet with the sign of the canonical flow in their outward flux.
struct Incidence {
    std::size_t cell[2];
    int sign[2];
    int count = 0;
};

std::vector<Incidence> incidences(const CubicalGrid& grid)
{
    std::vector<Incidence> out(grid.facet_count());
    for (std::size_t f = 0; f < grid.facet_count(); ++f) {
        const OrientedFace face = grid.facet_at(f);
        Incidence inc;
        if (grid.contains_cell(face.cell)) {
            inc.cell[inc.count] = grid.cell_id(face.cell);
            inc.sign[inc.count++] = +1;
        }
        const MultiIndex next = shifted(face.cell, face.axis, 1);
        if (grid.contains_cell(next)) {
            inc.cell[inc.count] = grid.cell_id(next);
            inc.sign[inc.count++] = -1;
        }
        out[f] = inc;
    }
    return out;
}

// |d|^alpha with a table for small magnitudes.
class PowTable {
public:
    PowTable(double alpha, std::int64_t size) : alpha_(alpha), table_(static_cast<std::size_t>(size) + 1)
    {
        for (std::size_t k = 0; k < table_.size(); ++k) table_[k] = std::pow(static_cast<double>(k), alpha);
    }
    double operator()(std::int64_t d) const
    {
        const auto m = static_cast<std::uint64_t>(d < 0 ? -d : d);
        return m < table_.size() ? table_[m] : std::pow(static_cast<double>(m), alpha_);
    }

private:
    double alpha_;
    std::vector<double> table_;
};

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("transport: alpha must lie in (0, 1]");
}

void check_supplies(const CubicalGrid& grid, const std::vector<std::int64_t>& supplies)
{
    if (supplies.size() != grid.cell_count()) throw ShapeError("transport: one supply per cell expected");
}

} // namespace

FaceFlow::FaceFlow(CubicalGrid g, std::vector<std::int64_t> s, double a)
    : grid(std::move(g)), flow(grid.facet_count(), 0), supplies(std::move(s)), alpha(a)
{
}

std::int64_t FaceFlow::value(const OrientedFace& face) const
{
    return face.orientation_sign() * flow[grid.facet_id(face)];
}

void FaceFlow::push(const OrientedFace& face, std::int64_t amount)
{
    flow[grid.facet_id(face)] += face.orientation_sign() * amount;
}

std::int64_t FaceFlow::divergence(std::size_t cell_id) const
{
    std::int64_t s = 0;
    for (const auto& face : grid.faces_of(grid.cell_at(cell_id))) s += value(face);
    return s;
}

double FaceFlow::cost() const { return flow_cost(flow, alpha); }

double flow_cost(const std::vector<std::int64_t>& flow, double alpha)
{
    std::vector<std::uint64_t> mags;
    mags.reserve(flow.size());
    for (auto d : flow) {
        if (d != 0) mags.push_back(static_cast<std::uint64_t>(d < 0 ? -d : d));
    }
    std::sort(mags.begin(), mags.end());
    double s = 0.0;
    for (auto m : mags) s += std::pow(static_cast<double>(m), alpha);
    return s;
}

nlohmann::json ValidationReport::to_json() const
{
    nlohmann::json v = nlohmann::json::array();
    for (const auto& x : violations) v.push_back({{"cell", x.cell}, {"divergence", x.divergence}, {"supply", x.supply}});
    return {{"valid", valid}, {"cost", round_sig(cost)}, {"violations", v}, {"message", message}};
}

ValidationReport validate(const FaceFlow& f) noexcept
{
    ValidationReport r;
    try {
        if (f.flow.size() != f.grid.facet_count()) {
            r.message = "flow size does not match the facet count";
            return r;
        }
        if (f.supplies.size() != f.grid.cell_count()) {
            r.message = "supply size does not match the cell count";
            return r;
        }
        if (!(f.alpha > 0.0 && f.alpha <= 1.0)) {
            r.message = "alpha outside (0, 1]";
            return r;
        }
        for (std::size_t c = 0; c < f.grid.cell_count(); ++c) {
            const auto div = f.divergence(c);
            if (div != f.supplies[c]) r.violations.push_back({c, div, f.supplies[c]});
        }
        r.cost = f.cost();
        r.valid = r.violations.empty();
        if (!r.valid) r.message = std::to_string(r.violations.size()) + " cells violate Kirchhoff's law";
    } catch (const std::exception& e) {
        r.valid = false;
        r.message = e.what();
    }
    return r;
}

namespace {

class ExactSearch {
public:
    ExactSearch(const CubicalGrid& grid, const std::vector<std::int64_t>& supplies, double alpha, const ExactOptions& opts)
        : grid_(grid), alpha_(alpha), opts_(opts), inc_(incidences(grid)), pow_(alpha, opts.flow_cap),
          residual_(supplies), open_(grid.cell_count(), 0), value_(grid.facet_count(), 0)
    {
        std::vector<bool> seen(grid.facet_count(), false);
        for (std::size_t c = 0; c < grid.cell_count(); ++c) {
            for (const auto& face : grid.faces_of(grid.cell_at(c))) {
                const auto f = grid.facet_id(face);
                if (!seen[f]) {
                    seen[f] = true;
                    order_.push_back(f);
                }
            }
        }
        for (std::size_t f = 0; f < inc_.size(); ++f) {
            for (int k = 0; k < inc_[f].count; ++k) ++open_[inc_[f].cell[k]];
        }
        for (std::int64_t v = 1; v <= opts.flow_cap; ++v) {
            candidates_.push_back(v);
            candidates_.push_back(-v);
        }
    }

    void run()
    {
        aborted_ = false;
        dfs(0, 0.0);
    }

    bool found() const { return !best_flow_.empty(); }
    bool aborted() const { return aborted_; }
    std::uint64_t nodes() const { return nodes_; }
    const std::vector<std::int64_t>& best_flow() const { return best_flow_; }
    double best_cost() const { return best_cost_; }

private:
    // Adds v on facet f; returns false (leaving the state applied) if a cell becomes infeasible.
    bool apply(std::size_t f, std::int64_t v)
    {
        value_[f] = v;
        bool ok = true;
        const auto& inc = inc_[f];
        for (int k = 0; k < inc.count; ++k) {
            const auto c = inc.cell[k];
            residual_[c] -= inc.sign[k] * v;
            --open_[c];
            if (std::abs(residual_[c]) > open_[c] * opts_.flow_cap) ok = false;
        }
        return ok;
    }

    void undo(std::size_t f)
    {
        const auto v = value_[f];
        const auto& inc = inc_[f];
        for (int k = 0; k < inc.count; ++k) {
            residual_[inc.cell[k]] += inc.sign[k] * v;
            ++open_[inc.cell[k]];
        }
        value_[f] = 0;
    }

    double lower_bound() const
    {
        // each open face serves at most two cells, and by concavity a cell with residual r
        // needs at least |r|^alpha on its open faces
        double lb = 0.0;
        for (auto r : residual_) {
            if (r != 0) lb += pow_(r);
        }
        return 0.5 * lb;
    }

    void dfs(std::size_t pos, double cost)
    {
        if (aborted_) return;
        if (++nodes_ > opts_.node_budget) {
            aborted_ = true;
            return;
        }
        if (cost + lower_bound() >= best_cost_) return;
        if (pos == order_.size()) {
            const double exact = flow_cost(value_, alpha_);
            if (exact < best_cost_) {
                best_cost_ = exact;
                best_flow_ = value_;
            }
            return;
        }
        const auto f = order_[pos];
        const auto& inc = inc_[f];
        for (int k = 0; k < inc.count; ++k) {
            const auto c = inc.cell[k];
            if (open_[c] == 1) {
                const std::int64_t v = inc.sign[k] * residual_[c];
                if (std::abs(v) > opts_.flow_cap) return;
                if (apply(f, v)) dfs(pos + 1, cost + pow_(v));
                undo(f);
                return;
            }
        }
        if (apply(f, 0)) dfs(pos + 1, cost);
        undo(f);
        for (auto v : candidates_) {
            if (cost + pow_(v) >= best_cost_) break;
            if (apply(f, v)) dfs(pos + 1, cost + pow_(v));
            undo(f);
            if (aborted_) return;
        }
    }

    const CubicalGrid& grid_;
    double alpha_;
    ExactOptions opts_;
    std::vector<Incidence> inc_;
    PowTable pow_;
    std::vector<std::int64_t> residual_;
    std::vector<std::int64_t> open_;
    std::vector<std::int64_t> value_;
    std::vector<std::size_t> order_;
    std::vector<std::int64_t> candidates_;
    std::vector<std::int64_t> best_flow_;
    double best_cost_ = kInf;
    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
};

} // namespace

ExactResult exact_min(const CubicalGrid& grid, const std::vector<std::int64_t>& supplies, double alpha,
                      const ExactOptions& opts)
{
    check_alpha(alpha);
    check_supplies(grid, supplies);
    if (opts.flow_cap < 0) throw ParameterError("exact_min: flow_cap must be nonnegative");
    ExactSearch search(grid, supplies, alpha, opts);
    search.run();
    if (!search.found()) {
        throw SearchError(search.aborted() ? "exact_min: budget exhausted before any feasible flow"
                                           : "exact_min: no feasible flow within the flow cap");
    }
    ExactResult r{FaceFlow(grid, supplies, alpha), search.best_cost(), !search.aborted(), search.nodes()};
    r.flow.flow = search.best_flow();
    return r;
}

FaceFlow naive_plan(const CubicalGrid& grid, const std::vector<std::int64_t>& supplies, double alpha)
{
    check_alpha(alpha);
    check_supplies(grid, supplies);
    FaceFlow out(grid, supplies, alpha);
    const auto ell = grid.edge_count();
    for (std::size_t id = 0; id < grid.cell_count(); ++id) {
        const auto s = supplies[id];
        if (s == 0) continue;
        const MultiIndex c = grid.cell_at(id);
        int axis = 0;
        Side side = Side::Minus;
        std::int64_t best = ell;
        for (int a = 0; a < grid.dimension(); ++a) {
            const auto ca = c[static_cast<std::size_t>(a)];
            if (ca < best) {
                best = ca;
                axis = a;
                side = Side::Minus;
            }
            if (ell - 1 - ca < best) {
                best = ell - 1 - ca;
                axis = a;
                side = Side::Plus;
            }
        }
        MultiIndex cur = c;
        for (std::int64_t k = 0; k <= best; ++k) {
            out.push({cur, axis, side}, s);
            cur = shifted(cur, axis, sign_of(side));
        }
    }
    return out;
}

FaceFlow dyadic_plan(const CubicalGrid& grid, const std::vector<std::int64_t>& supplies, double alpha)
{
    check_alpha(alpha);
    check_supplies(grid, supplies);
    const auto ell = grid.edge_count();
    if (!is_power_of_two(ell)) throw ParameterError("dyadic_plan: ell must be a power of two");
    const int n = grid.dimension();
    FaceFlow out(grid, supplies, alpha);
    std::vector<std::int64_t> held = supplies;

    for (std::int64_t block = 2; block <= ell; block *= 2) {
        const std::int64_t half = block / 2;
        for (std::size_t id = 0; id < grid.cell_count(); ++id) {
            const MultiIndex c = grid.cell_at(id);
            bool corner = true;
            for (auto x : c) corner = corner && (x % half == 0);
            if (!corner) continue;
            MultiIndex parent = c;
            for (auto& x : parent) x -= x % block;
            if (parent == c) continue;
            const auto mass = held[id];
            held[id] = 0;
            held[grid.cell_id(parent)] += mass;
            if (mass == 0) continue;
            MultiIndex cur = c;
            for (int a = 0; a < n; ++a) {
                const auto ua = static_cast<std::size_t>(a);
                while (cur[ua] > parent[ua]) {
                    out.push({cur, a, Side::Minus}, mass);
                    cur[ua] -= 1;
                }
            }
        }
    }
    const MultiIndex root(static_cast<std::size_t>(n), 0);
    const auto total = held[grid.cell_id(root)];
    if (total != 0) out.push({root, 0, Side::Minus}, total);
    return out;
}

namespace {

// A unit cycle of the dual graph (cells plus one exterior node); pushing t around it adds
// sign * t to the canonical flow of each of its facets.
struct Cycle {
    std::size_t facet[4];
    int sign[4];
    int length = 0;

    void add(const CubicalGrid& g, const OrientedFace& face, int along)
    {
        facet[length] = g.facet_id(face);
        sign[length++] = face.orientation_sign() * along;
    }
};

std::vector<Cycle> unit_cycles(const CubicalGrid& g)
{
    std::vector<Cycle> out;
    const int n = g.dimension();
    for (std::size_t id = 0; id < g.cell_count(); ++id) {
        const MultiIndex c = g.cell_at(id);
        for (int i = 0; i < n; ++i) {
            const MultiIndex ci = shifted(c, i, 1);
            if (!g.contains_cell(ci)) continue;
            // squares around interior (N-2)-faces
            for (int j = i + 1; j < n; ++j) {
                const MultiIndex cj = shifted(c, j, 1);
                if (!g.contains_cell(cj)) continue;
                Cycle cy;
                cy.add(g, {c, i, Side::Plus}, +1);
                cy.add(g, {ci, j, Side::Plus}, +1);
                cy.add(g, {cj, i, Side::Plus}, -1);
                cy.add(g, {c, j, Side::Plus}, -1);
                out.push_back(cy);
            }
            // squares through the exterior: c -> c + e_i -> outside -> c
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                for (Side s : {Side::Minus, Side::Plus}) {
                    if (!g.is_boundary({c, j, s})) continue;
                    Cycle cy;
                    cy.add(g, {c, i, Side::Plus}, +1);
                    cy.add(g, {ci, j, s}, +1);
                    cy.add(g, {c, j, s}, -1);
                    out.push_back(cy);
                }
            }
        }
        // two boundary faces of the same cell
        std::vector<OrientedFace> bnd;
        for (const auto& face : g.faces_of(c)) {
            if (g.is_boundary(face)) bnd.push_back(face);
        }
        for (std::size_t a = 0; a < bnd.size(); ++a) {
            for (std::size_t b = a + 1; b < bnd.size(); ++b) {
                Cycle cy;
                cy.add(g, bnd[a], +1);
                cy.add(g, bnd[b], -1);
                out.push_back(cy);
            }
        }
    }
    return out;
}

} // namespace

LocalSearchResult local_search(const FaceFlow& initial, const LocalSearchOptions& opts)
{
    const auto report = validate(initial);
    if (!report.valid) throw PreconditionError("local_search: initial flow is not valid: " + report.message);
    LocalSearchResult r{initial, report.cost, report.cost, 0, 0, false};
    auto& flow = r.flow.flow;

    std::int64_t total = 0;
    for (auto s : initial.supplies) total += std::abs(s);
    for (auto d : flow) total = std::max(total, std::abs(d));
    const PowTable pw(initial.alpha, 2 * total + 1);
    const auto cycles = unit_cycles(initial.grid);

    // accept only clear decreases so rounding cannot cycle
    constexpr double kMinGain = 1e-9;
    std::vector<std::int64_t> trial;
    while (r.sweeps < opts.max_sweeps && r.moves < opts.max_moves) {
        ++r.sweeps;
        bool improved = false;
        for (const auto& cy : cycles) {
            trial.assign({1, -1});
            for (int k = 0; k < cy.length; ++k) {
                const auto d = flow[cy.facet[k]];
                if (d != 0) trial.push_back(-d * cy.sign[k]);
            }
            double old_cost = 0.0;
            for (int k = 0; k < cy.length; ++k) old_cost += pw(flow[cy.facet[k]]);
            double best_delta = -kMinGain;
            std::int64_t best_t = 0;
            for (auto t : trial) {
                double c = 0.0;
                for (int k = 0; k < cy.length; ++k) c += pw(flow[cy.facet[k]] + cy.sign[k] * t);
                if (c - old_cost < best_delta) {
                    best_delta = c - old_cost;
                    best_t = t;
                }
            }
            if (best_t != 0) {
                for (int k = 0; k < cy.length; ++k) flow[cy.facet[k]] += cy.sign[k] * best_t;
                improved = true;
                if (++r.moves >= opts.max_moves) break;
            }
        }
        if (!improved) {
            r.converged = true;
            break;
        }
    }
    r.cost = r.flow.cost();
    return r;
}

std::vector<std::int64_t> attribution_from_degrees(const DegreeTable& u, const DegreeTable& uk)
{
    if (!(u.grid == uk.grid)) throw ShapeError("attribution_from_degrees: tables live on different grids");
    if (u.degrees.size() != u.grid.cell_count() || uk.degrees.size() != uk.grid.cell_count()) {
        throw ShapeError("attribution_from_degrees: one degree per cell expected");
    }
    std::vector<std::int64_t> b(u.degrees.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = u.degrees[i] - uk.degrees[i];
    return b;
}

std::vector<std::int64_t> uniform_supplies(const CubicalGrid& grid, std::int64_t b)
{
    return std::vector<std::int64_t>(grid.cell_count(), b);
}

nlohmann::json ScalingFit::to_json() const
{
    nlohmann::json s = nlohmann::json::array();
    for (const auto& x : samples) s.push_back({{"ell", x.ell}, {"cost", round_sig(x.cost)}});
    return {{"N", dimension},
            {"samples", s},
            {"a", round_sig(a)},
            {"b", round_sig(b)},
            {"r2", round_sig(r2)},
            {"b_stderr", round_sig(b_stderr)},
            {"b_lower95", round_sig(b_lower95)},
            {"b_positive_95", b_positive_95()}};
}

ScalingFit fit_log_scaling(int dimension, std::vector<ScalingSample> samples)
{
    if (samples.size() < 3) throw FitError("fit_log_scaling: at least 3 samples required");
    ScalingFit fit;
    fit.dimension = dimension;
    fit.samples = std::move(samples);
    const auto n = static_cast<double>(fit.samples.size());
    std::vector<double> x, y;
    for (const auto& s : fit.samples) {
        if (s.ell < 1) throw FitError("fit_log_scaling: ell must be positive");
        x.push_back(std::log(static_cast<double>(s.ell)));
        y.push_back(s.cost / std::pow(static_cast<double>(s.ell), dimension));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("fit_log_scaling: samples need at least two distinct ell");
    fit.b = sxy / sxx;
    fit.a = my - fit.b * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.a + fit.b * x[i]);
        ss_res += e * e;
    }
    // constant data is explained perfectly by b = 0
    fit.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.b_stderr = std::sqrt(ss_res / (n - 2.0) / sxx);
    const boost::math::students_t dist(n - 2.0);
    fit.b_lower95 = fit.b - boost::math::quantile(dist, 0.975) * fit.b_stderr;
    return fit;
}

Solver solver_from_string(const std::string& name)
{
    if (name == "naive") return Solver::Naive;
    if (name == "dyadic") return Solver::Dyadic;
    if (name == "dyadic+local" || name == "best") return Solver::DyadicLocal;
    if (name == "exact") return Solver::Exact;
    throw ParameterError("unknown solver: " + name);
}

std::string to_string(Solver s)
{
    switch (s) {
    case Solver::Naive: return "naive";
    case Solver::Dyadic: return "dyadic";
    case Solver::DyadicLocal: return "dyadic+local";
    case Solver::Exact: return "exact";
    }
    return "unknown";
}

double plan_cost(int dimension, std::int64_t ell, double alpha, std::int64_t b, Solver solver)
{
    const CubicalGrid grid(dimension, ell);
    const auto supplies = uniform_supplies(grid, b);
    switch (solver) {
    case Solver::Naive: return naive_plan(grid, supplies, alpha).cost();
    case Solver::Dyadic: return dyadic_plan(grid, supplies, alpha).cost();
    case Solver::DyadicLocal: return local_search(dyadic_plan(grid, supplies, alpha)).cost;
    case Solver::Exact: {
        auto r = exact_min(grid, supplies, alpha);
        if (!r.certified) throw SearchError("plan_cost: exact search not certified");
        return r.cost;
    }
    }
    throw ParameterError("plan_cost: unknown solver");
}

ScalingFit scaling_study(int dimension, double alpha, const std::vector<std::int64_t>& ells, Solver solver,
                         std::int64_t b)
{
    check_alpha(alpha);
    std::vector<ScalingSample> samples;
    for (auto ell : ells) samples.push_back({ell, plan_cost(dimension, ell, alpha, b, solver)});
    return fit_log_scaling(dimension, std::move(samples));
}

nlohmann::json instance_to_json(const CubicalGrid& grid, const std::vector<std::int64_t>& supplies, double alpha)
{
    return {{"N", grid.dimension()}, {"ell", grid.edge_count()}, {"alpha", alpha}, {"supplies", supplies}};
}

FaceFlow instance_from_json(const nlohmann::json& j)
{
    const CubicalGrid grid(j.at("N").get<int>(), j.at("ell").get<std::int64_t>());
    const double alpha = j.at("alpha").get<double>();
    check_alpha(alpha);
    std::vector<std::int64_t> supplies;
    const auto& s = j.at("supplies");
    if (s.is_number_integer()) {
        supplies = uniform_supplies(grid, s.get<std::int64_t>());
    } else {
        supplies = s.get<std::vector<std::int64_t>>();
    }
    check_supplies(grid, supplies);
    return FaceFlow(grid, std::move(supplies), alpha);
}

void write_flow_csv(std::ostream& os, const FaceFlow& flow)
{
    os << "face_id,d\n";
    for (std::size_t f = 0; f < flow.flow.size(); ++f) {
        if (flow.flow[f] != 0) os << f << ',' << flow.flow[f] << '\n';
    }
}

void write_scaling_csv(std::ostream& os, const ScalingFit& fit)
{
    os << "ell,cost,cost_over_ellN\n";
    for (const auto& s : fit.samples) {
        os << s.ell << ',' << format_double(s.cost) << ','
           << format_double(s.cost / std::pow(static_cast<double>(s.ell), fit.dimension)) << '\n';
    }
}

std::string scaling_svg(const ScalingFit& fit, const std::string& title)
{
    SvgSeries data{"cost / ell^N", {}, {}, true};
    SvgSeries line{"a + b ln ell", {}, {}, false};
    for (const auto& s : fit.samples) {
        const double x = std::log(static_cast<double>(s.ell));
        data.x.push_back(x);
        data.y.push_back(s.cost / std::pow(static_cast<double>(s.ell), fit.dimension));
        line.x.push_back(x);
        line.y.push_back(fit.a + fit.b * x);
    }
    return svg_plot(title, "ln ell", "cost / ell^N", {data, line});
}

} // namespace cubeskel

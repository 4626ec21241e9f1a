#include "kvstar/envelope.hpp"
#include "kvstar/freelie.hpp"
#include "kvstar/graphs.hpp"
#include "kvstar/kv.hpp"
#include "kvstar/liealg.hpp"
#include "kvstar/polynomial.hpp"
#include "kvstar/weights.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

using namespace kvstar;
using nlohmann::ordered_json;

namespace {

class OrderCap : public Error
{
  public:
    using Error::Error;
};

class BudgetCap : public Error
{
  public:
    using Error::Error;
};

constexpr int bch_cap = 8;
constexpr int kv_cap = 5;
constexpr int graph_order_cap = 3;
constexpr unsigned wheel_cap = 4;
constexpr std::uint64_t samples_cap = 100'000'000;

struct RunConfig
{
    std::string lie = "builtin:sl2";
    int order = 0;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string format = "text";
    int tolerance_k = 4;
    int max_degree = 2;
    std::string graph;
    unsigned k = 2;
    std::vector<std::string> polys;
};

struct Report
{
    ordered_json json;
    std::ostringstream text;
    bool pass = true;
};

void check_order(int order, int lo, int hi, char const* what)
{
    if (order < lo || order > hi)
        throw OrderCap(std::string(what) + ": order must lie in [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "], got " + std::to_string(order));
}

McOptions mc_options(RunConfig const& cfg)
{
    if (cfg.samples == 0 || cfg.samples > samples_cap)
        throw BudgetCap("samples must lie in [1, " + std::to_string(samples_cap) + "]");
    if (cfg.workers == 0)
        throw BudgetCap("workers must be positive");
    return {cfg.samples, cfg.seed, cfg.workers};
}

ordered_json estimate_json(WeightEstimate const& w, std::size_t n)
{
    return {{"graph", w.graph}, {"n", n},           {"samples", w.samples},
            {"seed", w.seed},   {"workers", w.workers}, {"mean", w.mean},
            {"stderr", w.std_error}, {"elapsed_ms", w.elapsed_ms}};
}

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Polynomial parse_arg(RunConfig const& cfg, std::size_t i, std::size_t d)
{
    if (cfg.polys.size() != 2)
        throw Error("expected two polynomial arguments f1 f2");
    return parse_polynomial(cfg.polys[i], d);
}

void cmd_bch(RunConfig const& cfg, Report& r)
{
    check_order(cfg.order, 1, bch_cap, "bch");
    auto z = freelie::log_exp_product(freelie::FreeLieSeries::generator(0, cfg.order),
                                      freelie::FreeLieSeries::generator(1, cfg.order), cfg.order);
    auto s = freelie::to_string(z);
    r.json["order"] = cfg.order;
    r.json["series"] = s;
    r.text << "Z = " << s << "\n";
}

void cmd_star(RunConfig const& cfg, Report& r)
{
    auto g = resolve_lie_algebra(cfg.lie);
    auto f1 = parse_arg(cfg, 0, g.dim());
    auto f2 = parse_arg(cfg, 1, g.dim());
    auto p = star(g, f1, f2);
    r.json["lie"] = g.name();
    r.json["f1"] = to_string(f1);
    r.json["f2"] = to_string(f2);
    r.json["star"] = to_string(p);
    r.text << to_string(p) << "\n";
}

void cmd_assoc(RunConfig const& cfg, Report& r)
{
    auto g = resolve_lie_algebra(cfg.lie);
    if (cfg.max_degree < 0 || cfg.max_degree > 6)
        throw OrderCap("assoc: max degree must lie in [0, 6]");
    Envelope env(g);
    std::size_t const d = g.dim();
    auto exps = exponents_up_to(d, cfg.max_degree);
    std::size_t triples = 0;
    ordered_json failures = ordered_json::array();
    for (auto const& a : exps)
        for (auto const& b : exps)
        {
            int ab = exponent_degree(a) + exponent_degree(b);
            if (ab > cfg.max_degree)
                continue;
            auto fa = Polynomial::monomial(a, 1);
            auto fb = Polynomial::monomial(b, 1);
            auto left_inner = env.star(fa, fb);
            for (auto const& c : exps)
            {
                if (ab + exponent_degree(c) > cfg.max_degree)
                    continue;
                auto fc = Polynomial::monomial(c, 1);
                ++triples;
                auto diff = env.star(left_inner, fc) - env.star(fa, env.star(fb, fc));
                if (!diff.is_zero())
                    failures.push_back({{"f", to_string(fa)}, {"g", to_string(fb)}, {"h", to_string(fc)},
                                        {"difference", to_string(diff)}});
            }
        }
    std::size_t commutators = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
        {
            auto xi = Polynomial::variable(d, i);
            auto xj = Polynomial::variable(d, j);
            Polynomial expected(d);
            for (std::size_t k = 0; k < d; ++k)
                expected += g.structure(i, j, k) * Polynomial::variable(d, k);
            ++commutators;
            auto diff = env.star(xi, xj) - env.star(xj, xi) - expected;
            if (!diff.is_zero())
                failures.push_back({{"commutator", {i, j}}, {"difference", to_string(diff)}});
        }
    r.pass = failures.empty();
    r.json["lie"] = g.name();
    r.json["max_degree"] = cfg.max_degree;
    r.json["triples"] = triples;
    r.json["commutators"] = commutators;
    r.json["failures"] = failures;
    if (r.pass)
        r.text << "PASS (" << triples << " triples, " << commutators << " commutators)\n";
    else
        for (auto const& f : failures)
            r.text << "FAIL " << f.dump() << "\n";
}

void cmd_expcheck(RunConfig const& cfg, Report& r)
{
    auto g = resolve_lie_algebra(cfg.lie);
    check_order(cfg.order, 1, 5, "expcheck");
    std::size_t const d = g.dim();
    auto lhs = exp_star_expand(g, cfg.order);
    auto rhs = duflo_density(g, cfg.order);
    auto diff = lhs.series - rhs.series;

    Polynomial D(3 * d);
    for (auto const& [e, c] : rhs.series.terms())
        if (exponent_degree(e, 0, d) == 0)
            D.add_term(e, c);
    VariableNamer namer = [d](std::size_t v) {
        if (v < d)
            return "x" + std::to_string(v);
        if (v < 2 * d)
            return "y1_" + std::to_string(v - d);
        return "y2_" + std::to_string(v - 2 * d);
    };
    r.pass = diff.is_zero();
    r.json["lie"] = g.name();
    r.json["order"] = cfg.order;
    r.json["D"] = to_string(D, namer);
    r.json["terms_compared"] = lhs.series.size();
    r.json["difference"] = to_string(diff, namer);
    if (r.pass)
        r.text << "PASS, D = " << to_string(D, namer) << "\n";
    else
        r.text << "FAIL, difference = " << to_string(diff, namer) << "\n";
}

void cmd_weights(RunConfig const& cfg, Report& r)
{
    auto opts = mc_options(cfg);
    std::vector<AdmissibleGraph> graphs;
    if (!cfg.graph.empty())
        graphs.push_back(parse_graph(cfg.graph));
    else
    {
        check_order(cfg.order, 0, graph_order_cap, "weights");
        std::map<AdmissibleGraph, bool> seen;
        for (auto const& gr : enumerate_graphs(cfg.order, 2, {2, 1}))
            seen[canonical_form(gr)] = true;
        for (auto const& [gr, unused] : seen)
            graphs.push_back(gr);
    }
    ordered_json records = ordered_json::array();
    for (auto const& gr : graphs)
    {
        if (gr.n > graph_order_cap)
            throw BudgetCap("weights: at most " + std::to_string(graph_order_cap) + " aerial vertices");
        auto w = mc_weight(gr, opts);
        records.push_back(estimate_json(w, gr.n));
        r.text << w.graph << "  mean " << format_double(w.mean) << "  stderr " << format_double(w.std_error)
               << "  (samples " << w.samples << ", seed " << w.seed << ")\n";
    }
    r.json["estimates"] = records;
}

void cmd_wheels(RunConfig const& cfg, Report& r)
{
    if (cfg.k < 2 || cfg.k > wheel_cap)
        throw BudgetCap("wheels: k must lie in [2, " + std::to_string(wheel_cap) + "]");
    auto opts = mc_options(cfg);
    auto w = wheel_weight_check(cfg.k, opts);
    auto sanity = wheel_weight_check(cfg.k, opts, WheelIntegrand::absolute_density);
    double band = std::max(0.01, cfg.tolerance_k * w.std_error);
    bool vanishes = std::abs(w.mean) < band;
    bool alive = sanity.mean > cfg.tolerance_k * sanity.std_error;
    r.pass = vanishes && alive;
    r.json["k"] = cfg.k;
    r.json["estimate"] = estimate_json(w, cfg.k);
    r.json["band"] = band;
    r.json["absolute_density"] = estimate_json(sanity, cfg.k);
    r.json["vanishes"] = vanishes;
    r.json["integrator_alive"] = alive;
    r.text << "wheel k=" << cfg.k << ": mean " << format_double(w.mean) << " stderr "
           << format_double(w.std_error) << " band " << format_double(band) << "  "
           << (vanishes ? "PASS" : "FAIL") << "\n";
    r.text << "|density| sanity: mean " << format_double(sanity.mean) << " stderr "
           << format_double(sanity.std_error) << "  " << (alive ? "PASS" : "FAIL") << "\n";
}

void cmd_graphstar(RunConfig const& cfg, Report& r)
{
    auto g = resolve_lie_algebra(cfg.lie);
    check_order(cfg.order, 0, graph_order_cap, "graphstar");
    auto opts = mc_options(cfg);
    std::size_t const d = g.dim();
    std::vector<std::pair<Polynomial, Polynomial>> pairs;
    if (!cfg.polys.empty())
        pairs.emplace_back(parse_arg(cfg, 0, d), parse_arg(cfg, 1, d));
    else
    {
        if (cfg.max_degree < 0 || cfg.max_degree > 3)
            throw OrderCap("graphstar: max degree must lie in [0, 3]");
        auto exps = exponents_up_to(d, cfg.max_degree);
        for (auto const& a : exps)
            for (auto const& b : exps)
                pairs.emplace_back(Polynomial::monomial(a, 1), Polynomial::monomial(b, 1));
    }
    WeightTable table(opts);
    ordered_json rows = ordered_json::array();
    std::size_t failures = 0;
    r.text << "f1 | f2 | monomial | exact | estimate | stderr | ok\n";
    for (auto const& [f1, f2] : pairs)
    {
        auto est = graph_star(g, f1, f2, cfg.order, table);
        auto exact = star_up_to_order(g, f1, f2, cfg.order);
        std::map<Exponent, bool> support;
        for (auto const& [e, c] : est.terms)
            support[e] = true;
        for (auto const& [e, c] : exact.terms())
            support[e] = true;
        for (auto const& [e, unused] : support)
        {
            double x = exact.coefficient(e).get_d();
            FloatCoefficient c;
            if (auto it = est.terms.find(e); it != est.terms.end())
                c = it->second;
            double floor = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
            bool ok = std::abs(c.value - x) <= cfg.tolerance_k * c.std_error + floor;
            failures += ok ? 0 : 1;
            auto mono = to_string(Polynomial::monomial(e, 1));
            rows.push_back({{"f1", to_string(f1)},
                            {"f2", to_string(f2)},
                            {"monomial", mono},
                            {"exact", to_string(exact.coefficient(e))},
                            {"estimate", c.value},
                            {"stderr", c.std_error},
                            {"ok", ok}});
            r.text << to_string(f1) << " | " << to_string(f2) << " | " << mono << " | "
                   << to_string(exact.coefficient(e)) << " | " << format_double(c.value) << " | "
                   << format_double(c.std_error) << " | " << (ok ? "ok" : "FAIL") << "\n";
        }
    }
    ordered_json weights = ordered_json::array();
    for (auto const& [gr, w] : table.entries())
        weights.push_back(estimate_json(w, gr.n));
    r.pass = failures == 0;
    r.json["lie"] = g.name();
    r.json["order"] = cfg.order;
    r.json["tolerance_k"] = cfg.tolerance_k;
    r.json["rows"] = rows;
    r.json["weights"] = weights;
    r.json["failures"] = failures;
    r.text << (r.pass ? "PASS" : "FAIL") << " (" << rows.size() << " coefficients, " << failures
           << " outside " << cfg.tolerance_k << " stderr)\n";
}

ordered_json pair_json(KVPair const& p)
{
    ordered_json sym = ordered_json::array();
    for (int j = 1; j < p.order; ++j)
        sym.push_back(p.symmetric[j]);
    return {{"F", freelie::to_string(p.F)}, {"G", freelie::to_string(p.G)}, {"order", p.order},
            {"symmetric_by_degree", sym}};
}

void cmd_kv(RunConfig const& cfg, Report& r)
{
    check_order(cfg.order, 2, kv_cap, "kv");
    auto p = solve_kv1(cfg.order);
    auto res = kv1_residual(p.F, p.G, cfg.order);
    auto dzt = dzt_residual(p, cfg.order);
    r.pass = res.is_zero() && dzt.is_zero();
    r.json["pair"] = pair_json(p);
    r.json["kv1_residual"] = freelie::to_string(res);
    r.json["dzt_residual_zero"] = dzt.is_zero();
    r.text << "F = " << freelie::to_string(p.F) << "\n";
    r.text << "G = " << freelie::to_string(p.G) << "\n";
    r.text << "KV1 residual = " << freelie::to_string(res) << "\n";
    r.text << "d/dt Z_t residual " << (dzt.is_zero() ? "= 0" : "nonzero") << "\n";
    r.text << (r.pass ? "PASS" : "FAIL") << "\n";
}

void cmd_kv2(RunConfig const& cfg, Report& r)
{
    auto g = resolve_lie_algebra(cfg.lie);
    check_order(cfg.order, 1, kv_cap - 1, "kv2");
    auto plain = solve_kv1(cfg.order + 1);
    auto before = kv2_residual(g, plain, cfg.order);
    std::vector<LieAlgebra> algebras{g};
    auto p = solve_kv(cfg.order + 1, algebras, cfg.order);
    auto after = kv2_residual(g, p, cfg.order);
    auto kv1 = kv1_residual(p.F, p.G, p.order);
    r.pass = after.series.is_zero() && kv1.is_zero();
    r.json["lie"] = g.name();
    r.json["order"] = cfg.order;
    r.json["pair"] = pair_json(p);
    r.json["kv2_residual_before_search"] = to_string(before.series);
    r.json["kv2_residual"] = to_string(after.series);
    r.json["kv1_residual"] = freelie::to_string(kv1);
    r.text << "F = " << freelie::to_string(p.F) << "\n";
    r.text << "G = " << freelie::to_string(p.G) << "\n";
    r.text << "KV2 residual before kernel search = " << to_string(before.series) << "\n";
    r.text << "KV2 residual = " << to_string(after.series) << "\n";
    r.text << (r.pass ? "PASS" : "FAIL") << "\n";
}

void cmd_homotopy(RunConfig const& cfg, Report& r)
{
    auto g = resolve_lie_algebra(cfg.lie);
    check_order(cfg.order, 1, kv_cap - 1, "homotopy");
    auto f1 = parse_arg(cfg, 0, g.dim());
    auto f2 = parse_arg(cfg, 1, g.dim());
    std::vector<LieAlgebra> algebras{g};
    auto p = solve_kv(cfg.order + 1, algebras, cfg.order);
    auto h = homotopy_check(g, p, f1, f2, cfg.order);
    r.pass = h.difference.is_zero();
    r.json["lie"] = g.name();
    r.json["order"] = cfg.order;
    r.json["f1"] = to_string(f1);
    r.json["f2"] = to_string(f2);
    r.json["lhs"] = to_string(h.lhs);
    r.json["rhs"] = to_string(h.rhs);
    r.json["difference"] = to_string(h.difference);
    r.text << "LHS = " << to_string(h.lhs) << ", RHS = " << to_string(h.rhs)
           << ", diff = " << to_string(h.difference) << "\n";
}

std::string error_type(std::exception const& e)
{
    if (dynamic_cast<OrderCap const*>(&e))
        return "OrderCap";
    if (dynamic_cast<BudgetCap const*>(&e))
        return "BudgetCap";
    if (dynamic_cast<ParseError const*>(&e))
        return "ParseError";
    if (dynamic_cast<UnknownAlgebra const*>(&e))
        return "UnknownAlgebra";
    if (dynamic_cast<InvalidGraph const*>(&e))
        return "InvalidGraph";
    if (dynamic_cast<InfeasibleDegree const*>(&e))
        return "InfeasibleDegree";
    return "Error";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"kvstar: star products, Kontsevich weights and Kashiwara-Vergne checks"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
        return sub;
    };
    auto lie = [&](CLI::App* sub) { sub->add_option("--lie", cfg.lie, "builtin:NAME or path.json"); };
    auto order = [&](CLI::App* sub, int def) {
        cfg.order = def;
        sub->add_option("--order", cfg.order, "truncation order");
    };
    auto mc = [&](CLI::App* sub) {
        sub->add_option("--samples", cfg.samples, "Monte-Carlo samples");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--workers", cfg.workers, "OpenMP workers");
        sub->add_option("--tolerance-k", cfg.tolerance_k, "band width in standard errors");
    };
    auto polys = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("polys", cfg.polys, "f1 f2")->expected(2);
        if (required)
            o->required();
    };

    using Handler = void (*)(RunConfig const&, Report&);
    std::vector<std::pair<CLI::App*, Handler>> commands;

    auto* bch = common(app.add_subcommand("bch", "BCH series log(e^y1 e^y2)"));
    bch->add_option("--order", cfg.order, "degree (<= 8)")->required();
    commands.emplace_back(bch, cmd_bch);

    auto* st = common(app.add_subcommand("star", "exact star product"));
    lie(st);
    polys(st, true);
    commands.emplace_back(st, cmd_star);

    auto* as = common(app.add_subcommand("assoc", "associativity and commutator sweep"));
    lie(as);
    as->add_option("--max-degree", cfg.max_degree, "total degree of triples");
    commands.emplace_back(as, cmd_assoc);

    auto* ex = common(app.add_subcommand("expcheck", "e^y1 * e^y2 = D e^Z"));
    lie(ex);
    ex->add_option("--order", cfg.order, "joint degree")->required();
    commands.emplace_back(ex, cmd_expcheck);

    auto* we = common(app.add_subcommand("weights", "Monte-Carlo graph weights"));
    we->add_option("--graph", cfg.graph, "graph text form, e.g. \"1 2 ; 0:(g0,g1)\"");
    we->add_option("--order", cfg.order, "all graphs with this many aerial vertices");
    mc(we);
    commands.emplace_back(we, cmd_weights);

    auto* gs = common(app.add_subcommand("graphstar", "graph expansion vs exact star"));
    lie(gs);
    gs->add_option("--order", cfg.order, "hbar order (<= 3)")->required();
    gs->add_option("--max-degree", cfg.max_degree, "monomial degree for the sweep");
    polys(gs, false);
    mc(gs);
    commands.emplace_back(gs, cmd_graphstar);

    auto* wh = common(app.add_subcommand("wheels", "wheel weight vanishing"));
    wh->add_option("--k", cfg.k, "spokes (2..4)");
    mc(wh);
    commands.emplace_back(wh, cmd_wheels);

    auto* kv = common(app.add_subcommand("kv", "solve KV1"));
    kv->add_option("--order", cfg.order, "degree (<= 5)")->required();
    commands.emplace_back(kv, cmd_kv);

    auto* kv2 = common(app.add_subcommand("kv2", "KV2 after kernel search"));
    lie(kv2);
    kv2->add_option("--order", cfg.order, "degree (<= 4)")->required();
    commands.emplace_back(kv2, cmd_kv2);

    auto* ho = common(app.add_subcommand("homotopy", "homotopy formula check"));
    lie(ho);
    order(ho, 3);
    polys(ho, true);
    commands.emplace_back(ho, cmd_homotopy);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        return app.exit(e) == 0 ? 0 : 2;
    }

    Report report;
    std::string name;
    int code = 0;
    auto start = std::chrono::steady_clock::now();
    for (auto const& [sub, handler] : commands)
    {
        if (!sub->parsed())
            continue;
        name = sub->get_name();
        report.json["schema"] = 1;
        report.json["command"] = name;
        try
        {
            handler(cfg, report);
            code = report.pass ? 0 : 1;
        }
        catch (std::exception const& e)
        {
            report.pass = false;
            report.json["error"] = {{"type", error_type(e)}, {"message", e.what()}};
            report.text << "error (" << error_type(e) << "): " << e.what() << "\n";
            code = 2;
        }
    }
    report.json["pass"] = report.pass;
    report.json["elapsed_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (cfg.format == "json")
        std::cout << report.json.dump(2) << "\n";
    else
        std::cout << report.text.str();
    return code;
}

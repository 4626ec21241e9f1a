#include "kvstar/graphs.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <omp.h>

namespace kvstar {

std::size_t AdmissibleGraph::edge_count() const
{
    std::size_t total = 0;
    for (auto const& out : edges)
        total += out.size();
    return total;
}

std::vector<std::size_t> AdmissibleGraph::in_degrees() const
{
    std::vector<std::size_t> in(vertex_count(), 0);
    for (auto const& out : edges)
        for (auto t : out)
            ++in[t];
    return in;
}

void validate(AdmissibleGraph const& graph)
{
    if (graph.edges.size() != graph.n)
        throw InvalidGraph("edge lists must be given for every aerial vertex");
    for (std::size_t v = 0; v < graph.n; ++v)
    {
        auto const& out = graph.edges[v];
        for (std::size_t a = 0; a < out.size(); ++a)
        {
            if (out[a] >= graph.vertex_count())
                throw InvalidGraph("edge target out of range at vertex " + std::to_string(v));
            if (out[a] == v)
                throw InvalidGraph("short loop at vertex " + std::to_string(v));
            for (std::size_t b = 0; b < a; ++b)
                if (out[b] == out[a])
                    throw InvalidGraph("multiple edge from vertex " + std::to_string(v));
        }
    }
}

// ---------------------------------------------------------------------------
// Text form

AdmissibleGraph parse_graph(std::string_view text)
{
    std::size_t pos = 0;
    auto fail = [&](std::string const& what) -> void {
        throw ParseError("graph parse error at " + std::to_string(pos) + ": " + what);
    };
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    auto number = [&]() -> std::size_t {
        skip();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            ++pos;
        if (start == pos)
            fail("expected a number");
        return std::stoul(std::string(text.substr(start, pos - start)));
    };
    auto expect = [&](char c) {
        skip();
        if (pos >= text.size() || text[pos] != c)
            fail(std::string("expected '") + c + "'");
        ++pos;
    };

    AdmissibleGraph graph;
    graph.n = number();
    graph.m = number();
    if (graph.n > 64 || graph.m > 64)
        fail("graph too large");
    graph.edges.assign(graph.n, {});
    std::vector<bool> seen(graph.n, false);
    skip();
    if (pos < text.size() && text[pos] == ';')
        ++pos;
    for (;;)
    {
        skip();
        if (pos >= text.size())
            break;
        if (text[pos] == ';')
        {
            ++pos;
            continue;
        }
        std::size_t v = number();
        if (v >= graph.n)
            fail("aerial vertex " + std::to_string(v) + " out of range");
        if (seen[v])
            fail("vertex " + std::to_string(v) + " listed twice");
        seen[v] = true;
        expect(':');
        expect('(');
        skip();
        if (pos < text.size() && text[pos] == ')')
        {
            ++pos;
            continue;
        }
        for (;;)
        {
            skip();
            std::size_t target;
            if (pos < text.size() && text[pos] == 'g')
            {
                ++pos;
                std::size_t k = number();
                if (k >= graph.m)
                    fail("ground vertex g" + std::to_string(k) + " out of range");
                target = graph.n + k;
            }
            else
                target = number();
            graph.edges[v].push_back(target);
            skip();
            if (pos < text.size() && text[pos] == ',')
            {
                ++pos;
                continue;
            }
            expect(')');
            break;
        }
    }
    try
    {
        validate(graph);
    }
    catch (InvalidGraph const& e)
    {
        throw ParseError(e.what());
    }
    return graph;
}

std::string to_string(AdmissibleGraph const& graph)
{
    std::ostringstream out;
    out << graph.n << " " << graph.m << " ;";
    for (std::size_t v = 0; v < graph.n; ++v)
    {
        out << " " << v << ":(";
        for (std::size_t a = 0; a < graph.edges[v].size(); ++a)
        {
            auto t = graph.edges[v][a];
            if (a > 0)
                out << ",";
            if (graph.is_ground(t))
                out << "g" << t - graph.n;
            else
                out << t;
        }
        out << ")";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

// Ordered tuples of distinct targets for vertex v.
std::vector<std::vector<std::size_t>> edge_choices(std::size_t v, std::size_t vertex_count, std::size_t k)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> current;
    std::vector<bool> used(vertex_count, false);
    used[v] = true;
    auto rec = [&](auto&& self) -> void {
        if (current.size() == k)
        {
            out.push_back(current);
            return;
        }
        for (std::size_t t = 0; t < vertex_count; ++t)
        {
            if (used[t])
                continue;
            used[t] = true;
            current.push_back(t);
            self(self);
            current.pop_back();
            used[t] = false;
        }
    };
    rec(rec);
    return out;
}

class Enumerator
{
  public:
    Enumerator(std::size_t n, std::size_t m, EnumerationOptions options)
        : n_(n), m_(m), options_(options), in_(n + m, 0)
    {
        for (std::size_t v = 0; v < n; ++v)
            choices_.push_back(edge_choices(v, n + m, options.out_degree));
        graph_.n = n;
        graph_.m = m;
        graph_.edges.assign(n, {});
    }

    std::size_t first_choice_count() const { return n_ == 0 ? 1 : choices_[0].size(); }

    // All graphs whose vertex 0 takes its `first`-th choice.
    std::vector<AdmissibleGraph> run(std::size_t first)
    {
        out_.clear();
        if (n_ == 0)
        {
            out_.push_back(graph_);
            return out_;
        }
        if (place(0, first))
            extend(1);
        unplace(0, first);
        return std::move(out_);
    }

  private:
    bool place(std::size_t v, std::size_t c)
    {
        graph_.edges[v] = choices_[v][c];
        bool ok = true;
        for (auto t : graph_.edges[v])
        {
            ++in_[t];
            if (t < n_ && options_.max_in_degree_aerial && in_[t] > *options_.max_in_degree_aerial)
                ok = false;
        }
        return ok;
    }

    void unplace(std::size_t v, std::size_t)
    {
        for (auto t : graph_.edges[v])
            --in_[t];
        graph_.edges[v].clear();
    }

    void extend(std::size_t v)
    {
        if (v == n_)
        {
            out_.push_back(graph_);
            return;
        }
        for (std::size_t c = 0; c < choices_[v].size(); ++c)
        {
            if (place(v, c))
                extend(v + 1);
            unplace(v, c);
        }
    }

    std::size_t n_, m_;
    EnumerationOptions options_;
    std::vector<std::vector<std::vector<std::size_t>>> choices_;
    std::vector<std::size_t> in_;
    AdmissibleGraph graph_;
    std::vector<AdmissibleGraph> out_;
};

void check_enumeration_args(std::size_t n, std::size_t m, EnumerationOptions const& options)
{
    if (2 * n + m < 2)
        throw Error("enumerate_graphs: requires 2n + m - 2 >= 0");
    if (options.out_degree + 1 > n + m && n > 0)
        throw Error("enumerate_graphs: out-degree exceeds available targets");
    if (n > 6)
        throw Error("enumerate_graphs: n above 6 is out of budget");
}

} // namespace

std::vector<AdmissibleGraph> enumerate_graphs_serial(std::size_t n, std::size_t m, EnumerationOptions options)
{
    check_enumeration_args(n, m, options);
    Enumerator e(n, m, options);
    std::vector<AdmissibleGraph> all;
    for (std::size_t c = 0; c < e.first_choice_count(); ++c)
    {
        auto part = e.run(c);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

std::vector<AdmissibleGraph> enumerate_graphs(std::size_t n, std::size_t m, EnumerationOptions options)
{
    check_enumeration_args(n, m, options);
    std::size_t count = Enumerator(n, m, options).first_choice_count();
    std::vector<std::vector<AdmissibleGraph>> parts(count);
    std::ptrdiff_t total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel
    {
        Enumerator local(n, m, options);
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t c = 0; c < total; ++c)
            parts[static_cast<std::size_t>(c)] = local.run(static_cast<std::size_t>(c));
    }
    std::vector<AdmissibleGraph> all;
    for (auto& part : parts)
        all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    return all;
}

// ---------------------------------------------------------------------------

AdmissibleGraph relabel(AdmissibleGraph const& graph, std::vector<std::size_t> const& perm)
{
    assert(perm.size() == graph.n);
    AdmissibleGraph out;
    out.n = graph.n;
    out.m = graph.m;
    out.edges.assign(graph.n, {});
    for (std::size_t v = 0; v < graph.n; ++v)
    {
        auto& targets = out.edges[perm[v]];
        for (auto t : graph.edges[v])
            targets.push_back(t < graph.n ? perm[t] : t);
    }
    return out;
}

AdmissibleGraph canonical_form(AdmissibleGraph const& graph)
{
    std::vector<std::size_t> perm(graph.n);
    std::iota(perm.begin(), perm.end(), 0);
    AdmissibleGraph best = graph;
    do
    {
        auto candidate = relabel(graph, perm);
        if (candidate.edges < best.edges)
            best = std::move(candidate);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// ---------------------------------------------------------------------------

Polynomial bidiff_apply(LieAlgebra const& g, AdmissibleGraph const& graph, Polynomial const& f1,
                        Polynomial const& f2, bool strict)
{
    std::size_t d = g.dim();
    if (graph.m != 2)
        throw InvalidGraph("bidiff_apply: needs exactly two ground vertices");
    if (f1.nvars() != d || f2.nvars() != d)
        throw Error("bidiff_apply: polynomials must live in dim(g) variables");
    for (auto const& out : graph.edges)
        if (out.size() != 2)
            throw InvalidGraph("bidiff_apply: every aerial vertex needs out-degree 2");
    validate(graph);

    std::size_t n = graph.n;
    auto in = graph.in_degrees();
    for (std::size_t v = 0; v < n; ++v)
        if (in[v] >= 2)
        {
            if (strict)
                throw InDegreeTooHigh("aerial vertex " + std::to_string(v) + " has in-degree " +
                                      std::to_string(in[v]));
            return Polynomial(d);
        }

    // incoming[v] = (source, slot) of the unique edge into aerial v, if any
    std::vector<std::optional<std::pair<std::size_t, std::size_t>>> incoming(n);
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> ground_in(2);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t s = 0; s < 2; ++s)
        {
            auto t = graph.edges[v][s];
            if (t < n)
                incoming[t] = std::make_pair(v, s);
            else
                ground_in[t - n].emplace_back(v, s);
        }

    std::vector<Polynomial> coordinate;
    for (std::size_t k = 0; k < d; ++k)
        coordinate.push_back(Polynomial::variable(d, k));

    Polynomial result(d);
    std::vector<std::size_t> label(2 * n, 0); // label[2v + s]
    std::size_t total = 1;
    for (std::size_t e = 0; e < 2 * n; ++e)
        total *= d;
    for (std::size_t code = 0; code < total; ++code)
    {
        std::size_t rest = code;
        for (std::size_t e = 0; e < 2 * n; ++e)
        {
            label[e] = rest % d;
            rest /= d;
        }
        Rational scalar = 1;
        Polynomial linear = Polynomial::constant(d, Rational(1));
        bool dead = false;
        for (std::size_t v = 0; v < n && !dead; ++v)
        {
            std::size_t i = label[2 * v], j = label[2 * v + 1];
            if (i == j)
            {
                dead = true;
                break;
            }
            if (incoming[v])
            {
                auto [src, slot] = *incoming[v];
                scalar *= g.structure(i, j, label[2 * src + slot]);
                if (scalar == 0)
                    dead = true;
            }
            else
            {
                Polynomial factor(d);
                for (std::size_t k = 0; k < d; ++k)
                    if (auto c = g.structure(i, j, k); c != 0)
                        factor += c * coordinate[k];
                if (factor.is_zero())
                    dead = true;
                else
                    linear = linear * factor;
            }
        }
        if (dead)
            continue;
        Exponent a1(d, 0), a2(d, 0);
        for (auto [v, s] : ground_in[0])
            ++a1[label[2 * v + s]];
        for (auto [v, s] : ground_in[1])
            ++a2[label[2 * v + s]];
        auto d1 = f1.derivative(a1);
        if (d1.is_zero())
            continue;
        auto d2 = f2.derivative(a2);
        if (d2.is_zero())
            continue;
        result += scalar * (linear * d1 * d2);
    }
    return result;
}

// ---------------------------------------------------------------------------

QuotientResult quotient_graph(AdmissibleGraph const& graph, std::vector<std::size_t> const& subset)
{
    if (subset.empty())
        throw Error("quotient_graph: subset must be non-empty");
    std::size_t total = graph.vertex_count();
    std::vector<bool> in_a(total, false);
    for (auto v : subset)
    {
        if (v >= total)
            throw Error("quotient_graph: vertex out of range");
        in_a[v] = true;
    }
    QuotientResult out;
    std::size_t rep = total;
    for (std::size_t v = 0; v < total; ++v)
        if (in_a[v] && (rep == total || (graph.is_ground(v) && !graph.is_ground(rep))))
            rep = v;
    bool ground_rep = graph.is_ground(rep);

    std::vector<std::size_t> new_id(total, total);
    std::size_t next = 0, aerial_count = 0;
    for (std::size_t v = 0; v < total; ++v)
        if (!in_a[v] || v == rep)
        {
            new_id[v] = next++;
            if (!graph.is_ground(v))
                ++aerial_count;
        }
    for (std::size_t v = 0; v < total; ++v)
        if (in_a[v])
            new_id[v] = new_id[rep];

    // a directed 2-cycle inside A collapses to a short loop
    for (std::size_t v = 0; v < graph.n; ++v)
        for (auto t : graph.edges[v])
            if (in_a[v] && in_a[t] && t < graph.n)
                for (auto back : graph.edges[t])
                    if (back == v)
                    {
                        out.degenerate = true;
                        out.reason = "2-cycle inside the collapsed subset";
                        return out;
                    }

    out.graph.n = aerial_count;
    out.graph.m = next - aerial_count;
    out.graph.edges.assign(aerial_count, {});
    for (std::size_t v = 0; v < graph.n; ++v)
        for (auto t : graph.edges[v])
        {
            if (in_a[v] && in_a[t])
                continue;
            std::size_t s = new_id[v];
            if (in_a[v] && ground_rep)
            {
                out.degenerate = true;
                out.reason = "edge departs from the merged ground vertex";
                return out;
            }
            auto& targets = out.graph.edges[s];
            if (std::find(targets.begin(), targets.end(), new_id[t]) != targets.end())
            {
                out.degenerate = true;
                out.reason = "multiple edge after collapse";
                return out;
            }
            targets.push_back(new_id[t]);
        }
    return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ComponentType type)
{
    switch (type)
    {
    case ComponentType::tree_i: return "tree_i";
    case ComponentType::wheel_ii: return "wheel_ii";
    case ComponentType::tree_with_return_iii: return "tree_with_return_iii";
    }
    return "?";
}

ComponentReport classify_components(AdmissibleGraph const& graph)
{
    if (graph.m != 0 || graph.n < 2)
        throw InvalidGraph("classify_components: expects G_{n+2,0}");
    validate(graph);
    std::size_t total = graph.n;
    std::size_t internal = total - 2;
    for (std::size_t x = internal; x < total; ++x)
        if (graph.edges[x].size() > 1)
            throw InvalidGraph("external vertices carry at most one outgoing edge");

    // union-find over internal vertices joined by internal edges
    std::vector<std::size_t> parent(internal);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
        while (parent[v] != v)
            v = parent[v] = parent[parent[v]];
        return v;
    };
    std::vector<std::size_t> internal_in(internal, 0);
    for (std::size_t v = 0; v < internal; ++v)
        for (auto t : graph.edges[v])
            if (t < internal)
            {
                parent[find(v)] = find(t);
                ++internal_in[t];
            }
    std::vector<std::size_t> external_in(internal, 0);
    for (std::size_t x = internal; x < total; ++x)
        for (auto t : graph.edges[x])
            if (t < internal)
                ++external_in[t];

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t v = 0; v < internal; ++v)
        groups[find(v)].push_back(v);

    ComponentReport report;
    for (auto& [root, vertices] : groups)
    {
        std::size_t edges = 0;
        bool bivalent = true;
        for (auto v : vertices)
        {
            if (graph.edges[v].size() != 2)
                bivalent = false;
            for (auto t : graph.edges[v])
                if (t < internal)
                    ++edges;
        }
        std::size_t size = vertices.size();
        std::optional<ComponentType> type;
        if (bivalent && edges + 1 == size)
        {
            std::vector<std::size_t> roots;
            bool in_ok = true;
            for (auto v : vertices)
            {
                if (internal_in[v] == 0)
                    roots.push_back(v);
                else if (internal_in[v] > 1)
                    in_ok = false;
            }
            std::size_t returns = 0;
            bool stray = false;
            for (auto v : vertices)
            {
                if (external_in[v] == 0)
                    continue;
                if (roots.size() == 1 && v == roots[0] && external_in[v] == 1)
                    ++returns;
                else
                    stray = true;
            }
            if (in_ok && roots.size() == 1 && !stray)
                type = returns == 0 ? ComponentType::tree_i : ComponentType::tree_with_return_iii;
        }
        else if (bivalent && edges == size)
        {
            bool all_one = true;
            for (auto v : vertices)
                if (internal_in[v] != 1 || external_in[v] != 0)
                    all_one = false;
            if (all_one)
                type = ComponentType::wheel_ii;
        }
        if (type)
            report.components.push_back({vertices, *type});
        else
            report.residue.insert(report.residue.end(), vertices.begin(), vertices.end());
    }
    return report;
}

} // namespace kvstar

#pragma once

// Admissible graphs G_{n,m}: n aerial vertices with ids 0..n-1, m ground vertices
// with ids n..n+m-1 (written g0, g1, ... in text form).

#include "kvstar/liealg.hpp"
#include "kvstar/polynomial.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kvstar {

class InvalidGraph : public Error
{
  public:
    using Error::Error;
};

class InDegreeTooHigh : public Error
{
  public:
    using Error::Error;
};

struct AdmissibleGraph
{
    std::size_t n = 0;
    std::size_t m = 0;
    /// edges[v] = ordered targets of aerial vertex v; size n.
    std::vector<std::vector<std::size_t>> edges;

    std::size_t vertex_count() const { return n + m; }
    bool is_ground(std::size_t v) const { return v >= n; }
    std::size_t edge_count() const;
    std::vector<std::size_t> in_degrees() const;

    friend auto operator<=>(AdmissibleGraph const&, AdmissibleGraph const&) = default;
};

/// Throws InvalidGraph on out-of-range targets, short loops or multiple edges.
void validate(AdmissibleGraph const& graph);

/// "n m ; v:(t1,t2) ..." with ground targets written g0, g1, ...
AdmissibleGraph parse_graph(std::string_view text);
std::string to_string(AdmissibleGraph const& graph);

struct EnumerationOptions
{
    std::size_t out_degree = 2;
    std::optional<std::size_t> max_in_degree_aerial;
};

/// All labeled graphs, in a fixed order. Parallel over the first vertex's edge choices.
std::vector<AdmissibleGraph> enumerate_graphs(std::size_t n, std::size_t m, EnumerationOptions options = {});
/// Single-threaded reference; returns the same list in the same order.
std::vector<AdmissibleGraph> enumerate_graphs_serial(std::size_t n, std::size_t m,
                                                     EnumerationOptions options = {});

/// Lexicographically minimal edge list over relabelings of the aerial vertices.
AdmissibleGraph canonical_form(AdmissibleGraph const& graph);

/// Applies a permutation of the aerial vertices (vertex v becomes perm[v]).
AdmissibleGraph relabel(AdmissibleGraph const& graph, std::vector<std::size_t> const& perm);

/// B_Gamma(pi, ..., pi; f1, f2) for the linear Poisson structure of g. Requires m = 2 and
/// out-degree 2 everywhere. An aerial vertex hit by two or more edges contributes 0, or
/// throws InDegreeTooHigh when strict.
Polynomial bidiff_apply(LieAlgebra const& g, AdmissibleGraph const& graph, Polynomial const& f1,
                        Polynomial const& f2, bool strict = false);

struct QuotientResult
{
    bool degenerate = false;
    std::string reason;
    AdmissibleGraph graph;
};

/// Shrinks the vertex subset A to one vertex (the smallest id of A, or its smallest ground
/// vertex if A meets the ground).
QuotientResult quotient_graph(AdmissibleGraph const& graph, std::vector<std::size_t> const& subset);

enum class ComponentType
{
    tree_i,
    wheel_ii,
    tree_with_return_iii,
};

std::string_view to_string(ComponentType type);

struct Component
{
    std::vector<std::size_t> vertices;
    ComponentType type;
};

struct ComponentReport
{
    std::vector<Component> components;
    std::vector<std::size_t> residue;
};

/// graph has m = 0 and its last two vertices are the externals; they may carry at most
/// one outgoing edge (the returning edge of a type iii component).
ComponentReport classify_components(AdmissibleGraph const& graph);

} // namespace kvstar

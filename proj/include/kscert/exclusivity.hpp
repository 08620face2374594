#pragma once

#include "kscert/ks_set.hpp"
#include "kscert/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kscert {

/// Orthogonality (exclusivity) graph of a KS set. Vertex i is the 0-based
/// index of vector id i+1; an edge joins exactly-orthogonal pairs. Limited to
/// 64 vertices so adjacency fits one bitmask word per vertex.
struct ExclusivityGraph {
    int n = 0;
    std::vector<std::uint64_t> adj;  ///< bit j of adj[i] set iff {i,j} is an edge
    std::vector<Rational> weight;    ///< per-vertex nonnegative weight

    bool edge(int i, int j) const {
        return (adj[static_cast<std::size_t>(i)] >> j) & 1u;
    }
    int degree(int i) const {
        return __builtin_popcountll(adj[static_cast<std::size_t>(i)]);
    }
    std::size_t edge_count() const;
};

/// Builds the exclusivity graph with the given uniform vertex weight.
/// The adjacency is symmetric with an empty diagonal by construction.
ExclusivityGraph build_graph(const KsSet& set, const Rational& uniform_weight = Rational(1));

struct IndependenceResult {
    int alpha = 0;
    std::vector<int> witness;  ///< 0-based vertices of one maximum independent set
    std::uint64_t nodes_explored = 0;
};

struct WeightedIndependenceResult {
    Rational value;
    std::vector<int> witness;
    std::uint64_t nodes_explored = 0;
};

/// Maximum independent set by branch and bound (greedy clique-cover bound,
/// branching on descending degree with ties broken by lowest index).
IndependenceResult independence_number(const ExclusivityGraph& g);

/// Exhaustive bitmask enumeration, usable up to 25 vertices. Kept free of any
/// code shared with the branch-and-bound path so the two can audit each other.
int independence_number_bruteforce(const ExclusivityGraph& g);

/// Weighted variants of the two routes above.
WeightedIndependenceResult max_weight_independent_set(const ExclusivityGraph& g);
Rational max_weight_independent_set_bruteforce(const ExclusivityGraph& g);

/// True iff `vertices` are pairwise non-adjacent.
bool is_independent_set(const ExclusivityGraph& g, const std::vector<int>& vertices);

/// Largest value of sum_i w_i x_i over independent {0,1} assignments: the
/// noncontextual ceiling for the weighted sum of detection probabilities.
Rational noncontextual_bound(const ExclusivityGraph& g);

struct ColorabilityVerdict {
    bool colorable = false;
    std::vector<int> witness;  ///< value per vertex (0/1), empty when uncolorable
    std::uint64_t nodes_explored = 0;
};

/// Searches for a {0,1} assignment with exactly one 1 in every complete
/// context, at most one 1 in every smaller context, and never two 1s on
/// orthogonal vectors. A found witness is re-checked before it is returned.
ColorabilityVerdict ks_colorability(const KsSet& set, const ExclusivityGraph& g);

/// Independent witness check built directly on exact inner products; shares
/// no code with the search in ks_colorability.
bool verify_ks_coloring(const KsSet& set, const std::vector<int>& assignment);

/// Plain-text edge list, one "i j" pair of 1-based ids per line, i < j.
std::string to_edge_list(const ExclusivityGraph& g);

}  // namespace kscert

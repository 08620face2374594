#include "kscert/exclusivity.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace kscert {

namespace {

constexpr int kBruteforceLimit = 25;

std::uint64_t bit(int i) { return std::uint64_t{1} << i; }

/// Branch-and-bound maximizer for weighted independent sets.
struct MisSolver {
    const ExclusivityGraph& g;
    std::vector<int> order;      // exploration order: descending degree, ties by index
    std::vector<int> rank;       // rank[v] = position of v in `order`
    Rational best_value;
    std::vector<int> best_set;
    std::vector<int> current;
    std::uint64_t nodes = 0;

    explicit MisSolver(const ExclusivityGraph& graph) : g(graph) {
        order.resize(static_cast<std::size_t>(g.n));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            const int dx = g.degree(x), dy = g.degree(y);
            return dx != dy ? dx > dy : x < y;
        });
        rank.resize(order.size());
        for (std::size_t r = 0; r < order.size(); ++r)
            rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
        best_value = Rational(-1);
    }

    int first_by_order(std::uint64_t mask) const {
        int best = -1, best_rank = g.n;
        while (mask) {
            const int v = __builtin_ctzll(mask);
            mask &= mask - 1;
            if (rank[static_cast<std::size_t>(v)] < best_rank) {
                best_rank = rank[static_cast<std::size_t>(v)];
                best = v;
            }
        }
        return best;
    }

    /// Greedy clique cover of `mask`; an independent set takes at most the
    /// heaviest vertex from each clique, so the sum of those maxima bounds
    /// every completion drawn from `mask`.
    Rational cover_bound(std::uint64_t mask) const {
        Rational total(0);
        while (mask) {
            int v = first_by_order(mask);
            std::uint64_t clique_cand = mask & g.adj[static_cast<std::size_t>(v)];
            Rational heaviest = g.weight[static_cast<std::size_t>(v)];
            mask &= ~bit(v);
            while (clique_cand) {
                const int u = first_by_order(clique_cand);
                if (g.weight[static_cast<std::size_t>(u)] > heaviest)
                    heaviest = g.weight[static_cast<std::size_t>(u)];
                mask &= ~bit(u);
                clique_cand &= g.adj[static_cast<std::size_t>(u)] & ~bit(u);
            }
            total = total + heaviest;
        }
        return total;
    }

    void search(std::uint64_t candidates, const Rational& current_value) {
        ++nodes;
        if (current_value > best_value) {
            best_value = current_value;
            best_set = current;
        }
        if (candidates == 0) return;
        if (current_value + cover_bound(candidates) <= best_value) return;

        const int v = first_by_order(candidates);
        // include v
        current.push_back(v);
        search(candidates & ~g.adj[static_cast<std::size_t>(v)] & ~bit(v),
               current_value + g.weight[static_cast<std::size_t>(v)]);
        current.pop_back();
        // exclude v
        search(candidates & ~bit(v), current_value);
    }
};

void require_small(const ExclusivityGraph& g, int limit, const char* what) {
    if (g.n < 1 || g.n > limit)
        throw std::invalid_argument(std::string(what) + ": vertex count " +
                                    std::to_string(g.n) + " outside 1.." + std::to_string(limit));
    if (g.adj.size() != static_cast<std::size_t>(g.n) ||
        g.weight.size() != static_cast<std::size_t>(g.n))
        throw std::invalid_argument(std::string(what) + ": inconsistent graph arrays");
}

}  // namespace

std::size_t ExclusivityGraph::edge_count() const {
    std::size_t twice = 0;
    for (std::uint64_t row : adj) twice += static_cast<std::size_t>(__builtin_popcountll(row));
    return twice / 2;
}

ExclusivityGraph build_graph(const KsSet& set, const Rational& uniform_weight) {
    const int n = static_cast<int>(set.vectors.size());
    if (n > 64)
        throw std::invalid_argument("build_graph: more than 64 vectors is not supported");
    if (uniform_weight < Rational(0))
        throw std::invalid_argument("build_graph: weights must be nonnegative");
    ExclusivityGraph g;
    g.n = n;
    g.adj.assign(static_cast<std::size_t>(n), 0);
    g.weight.assign(static_cast<std::size_t>(n), uniform_weight);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (inner_product_exact(set.vectors[static_cast<std::size_t>(i)],
                                    set.vectors[static_cast<std::size_t>(j)])
                    .is_zero()) {
                g.adj[static_cast<std::size_t>(i)] |= bit(j);
                g.adj[static_cast<std::size_t>(j)] |= bit(i);
            }
    return g;
}

bool is_independent_set(const ExclusivityGraph& g, const std::vector<int>& vertices) {
    std::uint64_t mask = 0;
    for (int v : vertices) {
        if (v < 0 || v >= g.n || (mask & bit(v))) return false;
        mask |= bit(v);
    }
    for (int v : vertices)
        if (mask & g.adj[static_cast<std::size_t>(v)]) return false;
    return true;
}

WeightedIndependenceResult max_weight_independent_set(const ExclusivityGraph& g) {
    require_small(g, 64, "max_weight_independent_set");
    MisSolver solver(g);
    const std::uint64_t all =
        g.n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g.n) - 1;
    solver.search(all, Rational(0));
    WeightedIndependenceResult r;
    r.value = solver.best_value;
    r.witness = solver.best_set;
    r.nodes_explored = solver.nodes;
    std::sort(r.witness.begin(), r.witness.end());
    if (!is_independent_set(g, r.witness))
        throw std::logic_error("max_weight_independent_set: witness failed self-check");
    return r;
}

IndependenceResult independence_number(const ExclusivityGraph& g) {
    ExclusivityGraph unit = g;
    unit.weight.assign(static_cast<std::size_t>(g.n), Rational(1));
    const WeightedIndependenceResult w = max_weight_independent_set(unit);
    IndependenceResult r;
    r.alpha = static_cast<int>(w.witness.size());
    r.witness = w.witness;
    r.nodes_explored = w.nodes_explored;
    return r;
}

int independence_number_bruteforce(const ExclusivityGraph& g) {
    require_small(g, kBruteforceLimit, "independence_number_bruteforce");
    int best = 0;
    const std::uint64_t end = std::uint64_t{1} << g.n;
    for (std::uint64_t mask = 0; mask < end; ++mask) {
        if (__builtin_popcountll(mask) <= best) continue;
        bool independent = true;
        for (std::uint64_t rest = mask; rest; rest &= rest - 1) {
            const int v = __builtin_ctzll(rest);
            if (mask & g.adj[static_cast<std::size_t>(v)]) {
                independent = false;
                break;
            }
        }
        if (independent) best = __builtin_popcountll(mask);
    }
    return best;
}

Rational max_weight_independent_set_bruteforce(const ExclusivityGraph& g) {
    require_small(g, kBruteforceLimit, "max_weight_independent_set_bruteforce");
    Rational best(0);
    const std::uint64_t end = std::uint64_t{1} << g.n;
    for (std::uint64_t mask = 0; mask < end; ++mask) {
        bool independent = true;
        Rational value(0);
        for (std::uint64_t rest = mask; rest; rest &= rest - 1) {
            const int v = __builtin_ctzll(rest);
            if (mask & g.adj[static_cast<std::size_t>(v)]) {
                independent = false;
                break;
            }
            value = value + g.weight[static_cast<std::size_t>(v)];
        }
        if (independent && value > best) best = value;
    }
    return best;
}

Rational noncontextual_bound(const ExclusivityGraph& g) {
    return max_weight_independent_set(g).value;
}

namespace {

/// Backtracking search for a KS coloring. Assigning 1 to a vertex zeroes all
/// of its graph neighbors, which covers both the in-context and the global
/// orthogonality rules (context members are mutually adjacent).
struct ColoringSolver {
    const KsSet& set;
    const ExclusivityGraph& g;
    std::vector<signed char> value;  // -1 unset, else 0/1
    std::vector<int> trail;
    std::uint64_t nodes = 0;

    ColoringSolver(const KsSet& s, const ExclusivityGraph& graph)
        : set(s), g(graph), value(static_cast<std::size_t>(graph.n), -1) {}

    bool assign(int v, signed char x) {
        signed char& slot = value[static_cast<std::size_t>(v)];
        if (slot == x) return true;
        if (slot != -1) return false;
        slot = x;
        trail.push_back(v);
        if (x == 1) {
            std::uint64_t nb = g.adj[static_cast<std::size_t>(v)];
            while (nb) {
                const int u = __builtin_ctzll(nb);
                nb &= nb - 1;
                if (!assign(u, 0)) return false;
            }
        }
        return true;
    }

    std::size_t mark() const { return trail.size(); }

    void undo(std::size_t m) {
        while (trail.size() > m) {
            value[static_cast<std::size_t>(trail.back())] = -1;
            trail.pop_back();
        }
    }

    bool solve(std::size_t ctx) {
        ++nodes;
        if (ctx == set.contexts.size()) return true;
        const Context& c = set.contexts[ctx];
        int ones = 0;
        for (int id : c.member_ids) ones += value[static_cast<std::size_t>(id - 1)] == 1;
        if (ones > 1) return false;
        if (ones == 1) {
            // The 1 already zeroed every other member (they are its neighbors).
            return solve(ctx + 1);
        }
        for (int id : c.member_ids) {
            const int v = id - 1;
            if (value[static_cast<std::size_t>(v)] != -1) continue;
            const std::size_t m = mark();
            if (assign(v, 1) && solve(ctx + 1)) return true;
            undo(m);
        }
        if (!set.context_is_complete(c)) {
            const std::size_t m = mark();
            bool ok = true;
            for (int id : c.member_ids)
                if (!assign(id - 1, 0)) {
                    ok = false;
                    break;
                }
            if (ok && solve(ctx + 1)) return true;
            undo(m);
        }
        return false;
    }
};

}  // namespace

ColorabilityVerdict ks_colorability(const KsSet& set, const ExclusivityGraph& g) {
    if (static_cast<int>(set.vectors.size()) != g.n)
        throw std::invalid_argument("ks_colorability: set and graph sizes disagree");
    ColoringSolver solver(set, g);
    ColorabilityVerdict verdict;
    verdict.colorable = solver.solve(0);
    verdict.nodes_explored = solver.nodes;
    if (verdict.colorable) {
        verdict.witness.resize(static_cast<std::size_t>(g.n), 0);
        for (int v = 0; v < g.n; ++v)
            verdict.witness[static_cast<std::size_t>(v)] =
                solver.value[static_cast<std::size_t>(v)] == 1 ? 1 : 0;
        if (!verify_ks_coloring(set, verdict.witness))
            throw std::logic_error("ks_colorability: witness failed independent re-check");
    }
    return verdict;
}

bool verify_ks_coloring(const KsSet& set, const std::vector<int>& assignment) {
    const std::size_t n = set.vectors.size();
    if (assignment.size() != n) return false;
    for (int x : assignment)
        if (x != 0 && x != 1) return false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (assignment[i] == 1 && assignment[j] == 1 &&
                inner_product_exact(set.vectors[i], set.vectors[j]).is_zero())
                return false;
    for (const Context& c : set.contexts) {
        int ones = 0;
        for (int id : c.member_ids) ones += assignment[static_cast<std::size_t>(id - 1)];
        if (set.context_is_complete(c) ? ones != 1 : ones > 1) return false;
    }
    return true;
}

std::string to_edge_list(const ExclusivityGraph& g) {
    std::ostringstream os;
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            if (g.edge(i, j)) os << i + 1 << " " << j + 1 << "\n";
    return os.str();
}

}  // namespace kscert

#include "kscert/exclusivity.hpp"

#include "test_helpers.hpp"

#include "doctest.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kscert;
using kscert_test::delete_vector;
using kscert_test::random_graph;
using kscert_test::shipped_set;

TEST_CASE("shipped set: the orthogonality graph is 10-regular with 105 edges") {
    const ExclusivityGraph g = build_graph(shipped_set());
    CHECK(g.n == 21);
    CHECK(g.edge_count() == 105);
    for (int i = 0; i < g.n; ++i) CHECK(g.degree(i) == 10);
    for (int i = 0; i < g.n; ++i) {
        CHECK_FALSE(g.edge(i, i));
        for (int j = 0; j < g.n; ++j) CHECK(g.edge(i, j) == g.edge(j, i));
    }
}

TEST_CASE("shipped set: independence number is 3, cross-checked two ways") {
    const ExclusivityGraph g = build_graph(shipped_set());
    const IndependenceResult r = independence_number(g);
    CHECK(r.alpha == 3);
    CHECK(r.witness.size() == 3);
    CHECK(is_independent_set(g, r.witness));
    CHECK(independence_number_bruteforce(g) == 3);
}

TEST_CASE("shipped set: weighted independence with weight 2 gives the ceiling 6") {
    const ExclusivityGraph g = build_graph(shipped_set(), Rational(2));
    CHECK(noncontextual_bound(g) == Rational(6));
    const WeightedIndependenceResult r = max_weight_independent_set(g);
    CHECK(r.value == Rational(6));
    CHECK(r.witness.size() == 3);
    CHECK(is_independent_set(g, r.witness));
    CHECK(max_weight_independent_set_bruteforce(g) == Rational(6));
}

TEST_CASE("branch-and-bound agrees with brute force on random graphs") {
    std::mt19937_64 rng(20260816);
    std::uniform_int_distribution<int> size(6, 18);
    const double densities[] = {0.2, 0.5, 0.8};
    for (int trial = 0; trial < 30; ++trial) {
        const int n = size(rng);
        const double p = densities[trial % 3];

        SUBCASE(("unweighted trial " + std::to_string(trial)).c_str()) {
            ExclusivityGraph g = random_graph(n, p, rng);
            const IndependenceResult r = independence_number(g);
            CHECK(r.alpha == independence_number_bruteforce(g));
            CHECK(is_independent_set(g, r.witness));
            CHECK(static_cast<int>(r.witness.size()) == r.alpha);
        }
        SUBCASE(("weighted trial " + std::to_string(trial)).c_str()) {
            ExclusivityGraph g = random_graph(n, p, rng, 5);
            const WeightedIndependenceResult r = max_weight_independent_set(g);
            CHECK(r.value == max_weight_independent_set_bruteforce(g));
            CHECK(is_independent_set(g, r.witness));
        }
    }
}

TEST_CASE("independence edge cases") {
    std::mt19937_64 rng(1);
    ExclusivityGraph empty = random_graph(5, 0.0, rng);
    CHECK(independence_number(empty).alpha == 5);
    ExclusivityGraph complete = random_graph(6, 1.1, rng);
    CHECK(independence_number(complete).alpha == 1);
    ExclusivityGraph one = random_graph(1, 0.0, rng);
    CHECK(independence_number(one).alpha == 1);
}

TEST_CASE("shipped set admits no {0,1} coloring") {
    const KsSet set = shipped_set();
    const ExclusivityGraph g = build_graph(set);
    const ColorabilityVerdict v = ks_colorability(set, g);
    CHECK_FALSE(v.colorable);
    CHECK(v.witness.empty());
    CHECK(v.nodes_explored > 0);
}

TEST_CASE("the shipped set is deletion-critical: every 20-vector subset is colorable") {
    const KsSet set = shipped_set();
    for (int removed = 1; removed <= 21; ++removed) {
        const KsSet smaller = delete_vector(set, removed);
        const ExclusivityGraph g = build_graph(smaller);
        const ColorabilityVerdict v = ks_colorability(smaller, g);
        CHECK_MESSAGE(v.colorable, "expected a coloring after removing id ", removed);
        CHECK(verify_ks_coloring(smaller, v.witness));
    }
}

TEST_CASE("verify_ks_coloring rejects ill-formed and inadmissible assignments") {
    const KsSet set = shipped_set();
    const std::size_t n = set.vectors.size();
    CHECK_FALSE(verify_ks_coloring(set, std::vector<int>(n - 1, 0)));  // wrong length
    CHECK_FALSE(verify_ks_coloring(set, std::vector<int>(n, 2)));      // out-of-domain value
    CHECK_FALSE(verify_ks_coloring(set, std::vector<int>(n, 0)));      // complete contexts need a 1
    std::vector<int> two_in_context(n, 0);
    two_in_context[0] = 1;  // ids 1 and 2 share a context
    two_in_context[1] = 1;
    CHECK_FALSE(verify_ks_coloring(set, two_in_context));
}

TEST_CASE("a complete-basis set is colorable and the witness is canonical") {
    // d=2: {e1, e2} with one complete context; picking either vector works.
    const char* text = R"({
      "dimension": 2,
      "vectors": [
        {"id": 1, "entries": [[1, 0], [0, 0]]},
        {"id": 2, "entries": [[0, 0], [1, 0]]}
      ],
      "contexts": [[1, 2]]
    })";
    const KsSet set = load_ks_set(text);
    const ColorabilityVerdict v = ks_colorability(set, build_graph(set));
    CHECK(v.colorable);
    CHECK(verify_ks_coloring(set, v.witness));
    CHECK(std::count(v.witness.begin(), v.witness.end(), 1) == 1);
}

TEST_CASE("edge list rendering is 1-based and sorted") {
    const ExclusivityGraph g = build_graph(shipped_set());
    const std::string text = to_edge_list(g);
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<int, int>> pairs;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        int a = 0, b = 0;
        row >> a >> b;
        pairs.emplace_back(a, b);
    }
    CHECK(pairs.size() == 105);
    CHECK(std::is_sorted(pairs.begin(), pairs.end()));
    CHECK(pairs.front() == std::pair<int, int>(1, 2));
    for (const auto& [a, b] : pairs) {
        CHECK(a < b);
        CHECK(g.edge(a - 1, b - 1));
    }
}

TEST_CASE("build_graph refuses more than 64 vertices") {
    KsSet big;
    big.dimension = 2;
    for (int i = 1; i <= 65; ++i) {
        KsVector v;
        v.id = i;
        v.entries = {{i, 0}, {1, 0}};
        big.vectors.push_back(v);
    }
    validate_ks_set(big);
    CHECK_THROWS_AS(build_graph(big), std::invalid_argument);
}

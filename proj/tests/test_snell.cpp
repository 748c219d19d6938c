#include <doctest.h>

#include <cmath>
#include <random>

#include "oswitch/generators.hpp"
#include "oswitch/snell.hpp"
#include "oswitch/tolerances.hpp"

using namespace oswitch;

namespace {

ProcessField field(TreePtr tree, std::vector<double> values) {
    return ProcessField{std::move(tree), std::move(values)};
}

ProcessField random_field(TreePtr tree, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    std::vector<double> values(static_cast<size_t>(tree->num_nodes()));
    for (double& v : values) v = dist(rng);
    return field(std::move(tree), std::move(values));
}

}  // namespace

TEST_CASE("envelope on a chain is the running max from the right") {
    TreePtr chain = make_chain(2);
    ProcessField u = field(chain, {0.0, 5.0, 3.0});
    ProcessField z = snell_envelope(u);
    CHECK(z.values == std::vector<double>{5.0, 5.0, 3.0});

    StoppingRule rule = optimal_stopping_time(u, z, 0);
    CHECK_FALSE(rule.stops_at(0));  // Z=5 > U=0: keep going
    CHECK(rule.stops_at(1));
    CHECK(stopped_expectation(u, rule) == 5.0);
    CHECK(check_stopped_martingale(u, z, 0));
}

TEST_CASE("envelope ties stop immediately") {
    // One-period binomial: stopping now pays 5, continuing pays E[10,0] = 5.
    TreePtr tree = make_uniform_tree(1, {2});
    ProcessField u = field(tree, {5.0, 10.0, 0.0});
    ProcessField z = snell_envelope(u);
    CHECK(z.at(0) == 5.0);

    StoppingRule rule = optimal_stopping_time(u, z, 0);
    CHECK(rule.stops_at(0));  // first hitting takes the tie
    CHECK(stopped_expectation(u, rule) == 5.0);
    CHECK(check_stopped_martingale(u, z, 0));
}

TEST_CASE("envelope equals u at every leaf and dominates everywhere") {
    std::mt19937_64 rng(2024);
    GeneratorSpec spec;
    spec.horizon = 3;
    spec.branching = {2, 3, 2};
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        spec.seed = seed;
        TreePtr tree = gen_instance(spec).tree;
        ProcessField u = random_field(tree, rng);
        ProcessField z = snell_envelope(u);
        for (int leaf : tree->leaves()) CHECK(z.at(leaf) == u.at(leaf));
        for (const Node& nd : tree->nodes()) {
            CHECK(z.at(nd.id) >= u.at(nd.id));
            if (!tree->is_leaf(nd.id))
                CHECK(z.at(nd.id) >=
                      conditional_expectation(*tree, z.values, nd.id) - kValueTol);
        }
    }
}

TEST_CASE("envelope is idempotent") {
    std::mt19937_64 rng(7);
    TreePtr tree = make_uniform_tree(3, {2, 2, 2});
    ProcessField u = random_field(tree, rng);
    ProcessField z = snell_envelope(u);
    ProcessField zz = snell_envelope(z);
    for (int id = 0; id < tree->num_nodes(); ++id)
        CHECK(std::abs(zz.at(id) - z.at(id)) <= kValueTol);
}

TEST_CASE("envelope is minimal among dominating supermartingales") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> slack(0.0, 2.0);
    TreePtr tree = make_uniform_tree(2, {2, 2});
    for (int round = 0; round < 50; ++round) {
        ProcessField u = random_field(tree, rng);
        ProcessField z = snell_envelope(u);
        // Any supermartingale w >= u built with nonnegative slack must
        // dominate z node by node.
        std::vector<double> w(static_cast<size_t>(tree->num_nodes()));
        for (int t = tree->max_time(); t >= 0; --t) {
            for (int id : tree->nodes_at_time(t)) {
                double floor = tree->is_leaf(id)
                                   ? u.at(id)
                                   : std::max(u.at(id), conditional_expectation(*tree, w, id));
                w[static_cast<size_t>(id)] = floor + slack(rng);
            }
        }
        for (int id = 0; id < tree->num_nodes(); ++id)
            CHECK(w[static_cast<size_t>(id)] >= z.at(id) - kValueTol);
    }
}

TEST_CASE("hitting rule attains the envelope from every anchor") {
    std::mt19937_64 rng(123);
    GeneratorSpec spec;
    spec.horizon = 3;
    spec.branching = {3, 2, 2};
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        spec.seed = seed + 100;
        TreePtr tree = gen_instance(spec).tree;
        ProcessField u = random_field(tree, rng);
        ProcessField z = snell_envelope(u);
        for (const Node& nd : tree->nodes()) {
            StoppingRule rule = optimal_stopping_time(u, z, nd.id);
            CHECK(validate_stopping_rule(*tree, rule).empty());
            CHECK(std::abs(stopped_expectation(u, rule) - z.at(nd.id)) <= kValueTol);
            CHECK(check_stopped_martingale(u, z, nd.id));
        }
    }
}

TEST_CASE("no adapted rule beats the envelope") {
    // Exhaustive over the 5 stopping rules of the two-period binomial: every
    // rule's value is at most Z(root), and the best rule attains it.
    TreePtr tree = make_uniform_tree(2, {2, 2});
    std::mt19937_64 rng(5);
    ProcessField u = random_field(tree, rng);
    ProcessField z = snell_envelope(u);

    // Enumerate stop-wish sets over the inner nodes {0, 1, 2} and canonicalize
    // each to its first-hit rule (stop at the first wished node, else at the
    // leaf); the 8 masks collapse onto the 5 distinct adapted rules.
    double best = -1e300;
    const int inner[] = {0, 1, 2};
    for (int mask = 0; mask < 8; ++mask) {
        auto wished = [&](int id) {
            for (int b = 0; b < 3; ++b)
                if ((mask & (1 << b)) && inner[b] == id) return true;
            return false;
        };
        StoppingRule rule;
        rule.anchor = 0;
        rule.stop.assign(static_cast<size_t>(tree->num_nodes()), 0);
        std::vector<int> stack{0};
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            if (wished(id) || tree->is_leaf(id)) {
                rule.stop[static_cast<size_t>(id)] = 1;
                continue;
            }
            for (int c : tree->children(id)) stack.push_back(c);
        }
        double value = stopped_expectation(u, rule);
        CHECK(value <= z.at(0) + kValueTol);
        best = std::max(best, value);
    }
    CHECK(std::abs(best - z.at(0)) <= kValueTol);
}

TEST_CASE("stopped_expectation rejects rules that miss a path") {
    TreePtr tree = make_uniform_tree(1, {2});
    ProcessField u = field(tree, {1.0, 2.0, 3.0});
    StoppingRule rule;
    rule.anchor = 0;
    rule.stop.assign(3, 0);
    rule.stop[1] = 1;  // path through node 2 never stops
    CHECK_THROWS_AS(stopped_expectation(u, rule), std::invalid_argument);
}

TEST_CASE("shape mismatches are rejected") {
    TreePtr chain = make_chain(1);
    CHECK_THROWS_AS(snell_envelope(field(chain, {1.0})), std::invalid_argument);
    CHECK_THROWS_AS(snell_envelope(ProcessField{nullptr, {}}), std::invalid_argument);
}

#include <doctest.h>

#include <cmath>

#include "oswitch/generators.hpp"
#include "oswitch/solver.hpp"
#include "oswitch/tolerances.hpp"

using namespace oswitch;

TEST_CASE("make_chain shape") {
    TreePtr chain = make_chain(3);
    CHECK(chain->num_nodes() == 4);
    CHECK(chain->horizon() == 3);
    CHECK(validate_tree(*chain).empty());
    for (int t = 0; t <= 3; ++t) {
        REQUIRE(chain->nodes_at_time(t).size() == 1);
        CHECK(chain->node(chain->nodes_at_time(t).front()).time == t);
    }
    CHECK(make_chain(0)->num_nodes() == 1);
}

TEST_CASE("make_uniform_tree shape and probabilities") {
    TreePtr tree = make_uniform_tree(2, {2, 2});
    CHECK(tree->num_nodes() == 7);
    CHECK(validate_tree(*tree).empty());
    for (const Node& nd : tree->nodes())
        if (nd.parent) CHECK(nd.branch_prob == 0.5);

    TreePtr mixed = make_uniform_tree(2, {3, 2});
    CHECK(mixed->num_nodes() == 1 + 3 + 6);
    CHECK(validate_tree(*mixed).empty());

    CHECK_THROWS_AS(make_uniform_tree(2, {2}), std::invalid_argument);
    CHECK_THROWS_AS(make_uniform_tree(1, {0}), std::invalid_argument);
}

TEST_CASE("gen_instance is a pure function of the seed") {
    GeneratorSpec spec;
    spec.horizon = 3;
    spec.branching = {2, 3, 1};
    spec.num_modes = 3;
    spec.seed = 123;
    SwitchingModel a = gen_instance(spec);
    SwitchingModel b = gen_instance(spec);
    CHECK(a.psi == b.psi);
    CHECK(a.gamma == b.gamma);
    CHECK(a.terminal == b.terminal);
    REQUIRE(a.tree->num_nodes() == b.tree->num_nodes());
    for (int id = 0; id < a.tree->num_nodes(); ++id)
        CHECK(a.tree->node(id).branch_prob == b.tree->node(id).branch_prob);

    spec.seed = 124;
    SwitchingModel c = gen_instance(spec);
    CHECK(a.psi != c.psi);
}

TEST_CASE("generated instances pass validation wholesale") {
    GeneratorSpec spec;
    spec.horizon = 4;
    spec.branching = {2, 2, 2, 1};
    spec.num_modes = 3;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        spec.seed = seed;
        SwitchingModel model = gen_instance(spec);
        CHECK(validate_tree(*model.tree).empty());
        CHECK(validate_model(model).empty());
    }
}

TEST_CASE("unused rows stay zero") {
    GeneratorSpec spec;
    spec.horizon = 2;
    spec.branching = {2, 2};
    spec.seed = 9;
    SwitchingModel model = gen_instance(spec);
    for (int leaf : model.tree->leaves())
        for (int i = 0; i < model.num_modes; ++i)
            CHECK(model.psi_at(leaf, i) == 0.0);
    for (const Node& nd : model.tree->nodes())
        if (!model.tree->is_leaf(nd.id))
            for (int i = 0; i < model.num_modes; ++i)
                CHECK(model.terminal_at(nd.id, i) == 0.0);
}

TEST_CASE("the default cost range actually produces subsidies") {
    GeneratorSpec spec;
    spec.horizon = 2;
    spec.branching = {2, 2};
    spec.num_modes = 2;
    bool saw_negative = false;
    for (std::uint64_t seed = 0; seed < 40 && !saw_negative; ++seed) {
        spec.seed = seed;
        SwitchingModel model = gen_instance(spec);
        for (const Node& nd : model.tree->nodes())
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    if (model.gamma_at(nd.id, i, j) < 0.0) saw_negative = true;
    }
    CHECK(saw_negative);
}

TEST_CASE("generated instances are solvable end to end") {
    GeneratorSpec spec;
    spec.horizon = 3;
    spec.branching = {3, 2, 2};
    spec.num_modes = 3;
    spec.seed = 5;
    SwitchingModel model = gen_instance(spec);
    EquivalenceReport rep = equivalence_report(model);
    CHECK(rep.explicit_vs_implicit <= kValueTol);
    CHECK(rep.snell_identity <= kValueTol);
    CHECK(rep.verification <= kValueTol);
}

TEST_CASE("malformed specs are rejected") {
    GeneratorSpec spec;
    spec.horizon = 0;
    spec.branching = {};
    CHECK_THROWS_AS(gen_instance(spec), std::invalid_argument);

    spec.horizon = 2;
    spec.branching = {2};
    CHECK_THROWS_AS(gen_instance(spec), std::invalid_argument);

    spec.branching = {2, 0};
    CHECK_THROWS_AS(gen_instance(spec), std::invalid_argument);

    spec.branching = {2, 2};
    spec.num_modes = 1;
    CHECK_THROWS_AS(gen_instance(spec), std::invalid_argument);

    spec.num_modes = 2;
    spec.psi_range = {1.0, -1.0};
    CHECK_THROWS_AS(gen_instance(spec), std::invalid_argument);
}

TEST_CASE("an infeasible cost range is reported, not looped forever") {
    GeneratorSpec spec;
    spec.horizon = 1;
    spec.branching = {1};
    spec.num_modes = 2;
    // Both off-diagonal costs land in [-1, -0.5], so every round trip is a
    // profitable cycle and no draw can pass the triangle check.
    spec.gamma_range = {-1.0, -0.5};
    CHECK_THROWS_WITH_AS(gen_instance(spec),
                         doctest::Contains("looks infeasible"), std::invalid_argument);
}

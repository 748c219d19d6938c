#include <doctest.h>

#include <limits>

#include "oswitch/generators.hpp"
#include "oswitch/model.hpp"

using namespace oswitch;

namespace {

bool any_contains(const std::vector<std::string>& msgs, const std::string& needle) {
    for (const auto& m : msgs)
        if (m.find(needle) != std::string::npos) return true;
    return false;
}

/// Model with node-independent data: psi_by_mode/terminal_by_mode have one
/// entry per mode, gamma_rows is the m*m cost matrix in row-major order.
SwitchingModel constant_model(TreePtr tree, int m, const std::vector<double>& psi_by_mode,
                              const std::vector<double>& gamma_rows,
                              const std::vector<double>& terminal_by_mode) {
    const size_t n = static_cast<size_t>(tree->num_nodes());
    std::vector<double> psi, gamma, terminal;
    for (size_t nd = 0; nd < n; ++nd) {
        psi.insert(psi.end(), psi_by_mode.begin(), psi_by_mode.end());
        gamma.insert(gamma.end(), gamma_rows.begin(), gamma_rows.end());
        terminal.insert(terminal.end(), terminal_by_mode.begin(), terminal_by_mode.end());
    }
    return make_model(std::move(tree), m, std::move(psi), std::move(gamma), std::move(terminal));
}

/// The running two-mode example: zero rewards in mode 0, reward 2 in mode 1,
/// entering mode 1 costs 1 and leaving it pays a subsidy of 0.5.
SwitchingModel signed_chain() {
    return constant_model(make_chain(2), 2, {0.0, 2.0}, {0.0, 1.0, -0.5, 0.0}, {0.0, 0.0});
}

}  // namespace

TEST_CASE("make_model rejects shape errors") {
    TreePtr chain = make_chain(1);
    CHECK_THROWS_AS(make_model(nullptr, 2, {}, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(make_model(chain, 1, {0, 0}, {0, 0, 0, 0, 0, 0, 0, 0}, {0, 0}),
                    std::invalid_argument);
    // 2 nodes * 2 modes = 4 psi entries, give 3.
    CHECK_THROWS_AS(make_model(chain, 2, {0, 0, 0}, std::vector<double>(8, 0.0), {0, 0, 0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_model(chain, 2, {0, 0, 0, 0}, std::vector<double>(7, 0.0), {0, 0, 0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_model(chain, 2, {0, 0, 0, 0}, std::vector<double>(8, 0.0), {0}),
                    std::invalid_argument);
}

TEST_CASE("accessors read the flattened layout") {
    SwitchingModel model = signed_chain();
    CHECK(model.psi_at(1, 0) == 0.0);
    CHECK(model.psi_at(1, 1) == 2.0);
    CHECK(model.gamma_at(0, 0, 1) == 1.0);
    CHECK(model.gamma_at(2, 1, 0) == -0.5);
    CHECK(model.terminal_at(2, 1) == 0.0);
}

TEST_CASE("validate_model accepts signed costs with a positive round trip") {
    // gamma[0][1] + gamma[1][0] = 0.5 > 0, so the negative entry is fine.
    CHECK(validate_model(signed_chain()).empty());
}

TEST_CASE("validate_model flags a nonzero diagonal") {
    SwitchingModel model =
        constant_model(make_chain(1), 2, {0, 0}, {0.0, 1.0, 1.0, 0.1}, {0, 0});
    auto violations = validate_model(model);
    CHECK(any_contains(violations, "diagonal"));
    CHECK(any_contains(violations, "gamma[1][1]"));
}

TEST_CASE("validate_model flags a profitable round trip") {
    // gamma[0][1] + gamma[1][0] = 0: switching there and back is free, so
    // strategies could churn without penalty.
    SwitchingModel model =
        constant_model(make_chain(1), 2, {0, 0}, {0.0, 1.0, -1.0, 0.0}, {0, 0});
    CHECK(any_contains(validate_model(model), "triangle not strict"));
}

TEST_CASE("validate_model flags an indirect route cheaper than the direct one") {
    // 0 -> 2 costs 5, but 0 -> 1 -> 2 costs 2.
    std::vector<double> gamma_rows{0.0, 1.0, 5.0,  //
                                   1.0, 0.0, 1.0,  //
                                   1.0, 1.0, 0.0};
    SwitchingModel model =
        constant_model(make_chain(1), 3, {0, 0, 0}, gamma_rows, {0, 0, 0});
    auto violations = validate_model(model);
    CHECK(any_contains(violations, "gamma[0][2]"));
}

TEST_CASE("validate_model reports each offending node") {
    SwitchingModel model = signed_chain();
    model.gamma[(1 * 2 + 1) * 2 + 0] = -2.0;  // node 1 only: round trip 1 - 2 < 0
    auto violations = validate_model(model);
    CHECK(any_contains(violations, "node 1"));
    CHECK_FALSE(any_contains(violations, "node 0"));
    CHECK_FALSE(any_contains(violations, "node 2"));
}

TEST_CASE("validate_model flags non-finite data") {
    SwitchingModel model = signed_chain();
    model.psi[0] = std::numeric_limits<double>::infinity();
    CHECK(any_contains(validate_model(model), "psi"));

    SwitchingModel model2 = signed_chain();
    model2.gamma[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK(any_contains(validate_model(model2), "not finite"));
}

TEST_CASE("generated instances validate cleanly") {
    GeneratorSpec spec;
    spec.horizon = 3;
    spec.branching = {2, 2, 1};
    spec.num_modes = 3;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        spec.seed = seed;
        CHECK(validate_model(gen_instance(spec)).empty());
    }
}

TEST_CASE("forbid_switch_cost bounds") {
    SUBCASE("all-zero data gives the floor of 1") {
        SwitchingModel model =
            constant_model(make_chain(2), 2, {0, 0}, {0, 0, 0, 0}, {0, 0});
        CHECK(forbid_switch_cost(model) == 1.0);
    }
    SUBCASE("unit data over horizon 3") {
        SwitchingModel model =
            constant_model(make_chain(3), 2, {1, -1}, {0, 1, -1, 0}, {1, -1});
        // 2 * (1 + 3*1 + 3*1) + 1
        CHECK(forbid_switch_cost(model) == 15.0);
    }
    SUBCASE("terminal-only data") {
        SwitchingModel model =
            constant_model(make_chain(1), 2, {0, 0}, {0, 0, 0, 0}, {10.0, -3.0});
        CHECK(forbid_switch_cost(model) == 21.0);
    }
    SUBCASE("rows past the horizon are ignored") {
        SwitchingModel model =
            constant_model(make_chain(1), 2, {0, 0}, {0, 0, 0, 0}, {0, 0});
        // Leaf psi/gamma rows are never read, so junk there must not leak in.
        model.psi[2] = 100.0;
        model.gamma[4] = 100.0;
        CHECK(forbid_switch_cost(model) == 1.0);
    }
    SUBCASE("forbidden transitions are never taken by a greedy bound argument") {
        SwitchingModel model = signed_chain();
        double big = forbid_switch_cost(model);
        // Any strategy gain is bounded by T*max|psi| + max|terminal| plus
        // collected subsidies, all strictly below big.
        CHECK(big > 2 * 2.0 + 0.0 + 2 * 0.5);
    }
}

TEST_CASE("negate_for_minimization") {
    SUBCASE("negates every array") {
        // All-zero costs fail the strict triangle, so this input is invalid
        // and passes through unchecked; the rewards still flip sign.
        SwitchingModel model =
            constant_model(make_chain(1), 2, {3.0, -2.0}, {0, 0, 0, 0}, {1.0, 0.0});
        SwitchingModel flipped = negate_for_minimization(model);
        CHECK(flipped.psi_at(0, 0) == -3.0);
        CHECK(flipped.psi_at(0, 1) == 2.0);
        CHECK(flipped.terminal_at(1, 0) == -1.0);
    }
    SUBCASE("valid costs cannot survive negation") {
        // Round trips flip sign: 0.4 + (-0.3) = 0.1 > 0 becomes -0.1 < 0.
        SwitchingModel model =
            constant_model(make_chain(1), 2, {0, 0}, {0.0, 0.4, -0.3, 0.0}, {0, 0});
        REQUIRE(validate_model(model).empty());
        CHECK_THROWS_AS(negate_for_minimization(model), std::invalid_argument);
    }
    SUBCASE("symmetric unit costs also throw") {
        SwitchingModel model =
            constant_model(make_chain(1), 2, {0, 0}, {0.0, 1.0, 1.0, 0.0}, {0, 0});
        REQUIRE(validate_model(model).empty());
        CHECK_THROWS_AS(negate_for_minimization(model), std::invalid_argument);
    }
}

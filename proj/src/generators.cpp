#include "oswitch/generators.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace oswitch {

namespace {

constexpr int kMaxRejectionRounds = 10'000;

/// Uniform double in [0, 1) from the raw engine stream, so instances are
/// reproducible across standard library implementations.
double unit_draw(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

double range_draw(std::mt19937_64& rng, const std::pair<double, double>& range) {
    return range.first + (range.second - range.first) * unit_draw(rng);
}

void require_range(const std::pair<double, double>& range, const char* name) {
    if (!std::isfinite(range.first) || !std::isfinite(range.second) ||
        range.first > range.second)
        throw std::invalid_argument(std::string(name) + " range [" +
                                    std::to_string(range.first) + ", " +
                                    std::to_string(range.second) + "] is not a finite interval");
}

/// Strict triangle check with a working margin well above the validator's,
/// so downstream fp identities have room to breathe.
bool triangle_ok(const std::vector<double>& g, int m, double margin) {
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            for (int k = 0; k < m; ++k) {
                if (k == j) continue;
                if (!(g[static_cast<size_t>(i) * m + k] <
                      g[static_cast<size_t>(i) * m + j] + g[static_cast<size_t>(j) * m + k] - margin))
                    return false;
            }
        }
    return true;
}

}  // namespace

TreePtr make_chain(int horizon) {
    std::vector<Node> nodes;
    for (int t = 0; t <= horizon; ++t) {
        std::optional<int> parent;
        if (t > 0) parent = t - 1;
        nodes.push_back({t, t, parent, 1.0});
    }
    return std::make_shared<ScenarioTree>(horizon, std::move(nodes));
}

TreePtr make_uniform_tree(int horizon, const std::vector<int>& branching) {
    if (static_cast<int>(branching.size()) != horizon)
        throw std::invalid_argument("branching list has " + std::to_string(branching.size()) +
                                    " entries, horizon is " + std::to_string(horizon));
    std::vector<Node> nodes{{0, 0, std::nullopt, 1.0}};
    std::vector<int> frontier{0};
    for (int t = 0; t < horizon; ++t) {
        int b = branching[static_cast<size_t>(t)];
        if (b < 1)
            throw std::invalid_argument("branching factor at time " + std::to_string(t) +
                                        " must be at least 1");
        std::vector<int> next;
        for (int parent : frontier) {
            for (int k = 0; k < b; ++k) {
                int id = static_cast<int>(nodes.size());
                nodes.push_back({id, t + 1, parent, 1.0 / b});
                next.push_back(id);
            }
        }
        frontier = std::move(next);
    }
    return std::make_shared<ScenarioTree>(horizon, std::move(nodes));
}

SwitchingModel gen_instance(const GeneratorSpec& spec) {
    if (spec.horizon < 1)
        throw std::invalid_argument("horizon must be at least 1, got " +
                                    std::to_string(spec.horizon));
    if (spec.num_modes < 2)
        throw std::invalid_argument("need at least 2 modes, got " +
                                    std::to_string(spec.num_modes));
    if (static_cast<int>(spec.branching.size()) != spec.horizon)
        throw std::invalid_argument("branching list has " + std::to_string(spec.branching.size()) +
                                    " entries, horizon is " + std::to_string(spec.horizon));
    for (int b : spec.branching)
        if (b < 1) throw std::invalid_argument("branching factors must be at least 1");
    require_range(spec.psi_range, "psi");
    require_range(spec.terminal_range, "terminal");
    require_range(spec.gamma_range, "gamma");

    std::mt19937_64 rng(spec.seed);

    // Tree with randomized branch probabilities (weights bounded away from
    // zero, last child takes the exact remainder so the mass is 1).
    std::vector<Node> nodes{{0, 0, std::nullopt, 1.0}};
    std::vector<int> frontier{0};
    for (int t = 0; t < spec.horizon; ++t) {
        int b = spec.branching[static_cast<size_t>(t)];
        std::vector<int> next;
        for (int parent : frontier) {
            std::vector<double> w(static_cast<size_t>(b));
            double total = 0.0;
            for (double& x : w) {
                x = 0.2 + 0.8 * unit_draw(rng);
                total += x;
            }
            double assigned = 0.0;
            for (int k = 0; k < b; ++k) {
                double p;
                if (b == 1)
                    p = 1.0;
                else if (k + 1 == b)
                    p = 1.0 - assigned;
                else {
                    p = w[static_cast<size_t>(k)] / total;
                    assigned += p;
                }
                int id = static_cast<int>(nodes.size());
                nodes.push_back({id, t + 1, parent, p});
                next.push_back(id);
            }
        }
        frontier = std::move(next);
    }
    TreePtr tree = std::make_shared<ScenarioTree>(spec.horizon, std::move(nodes));

    const int m = spec.num_modes;
    const size_t n = static_cast<size_t>(tree->num_nodes());
    std::vector<double> psi(n * m, 0.0);
    std::vector<double> gamma(n * m * m, 0.0);
    std::vector<double> terminal(n * m, 0.0);

    for (int id = 0; id < tree->num_nodes(); ++id) {
        bool leaf = tree->is_leaf(id);
        for (int i = 0; i < m; ++i) {
            if (!leaf) psi[static_cast<size_t>(id) * m + i] = range_draw(rng, spec.psi_range);
            if (leaf)
                terminal[static_cast<size_t>(id) * m + i] = range_draw(rng, spec.terminal_range);
        }
        // Costs must satisfy the strict triangle inequality; draw until they
        // do or give up on a range that cannot.
        std::vector<double> g(static_cast<size_t>(m) * m, 0.0);
        bool ok = false;
        for (int round = 0; round < kMaxRejectionRounds && !ok; ++round) {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    g[static_cast<size_t>(i) * m + j] =
                        (i == j) ? 0.0 : range_draw(rng, spec.gamma_range);
            ok = triangle_ok(g, m, 1e-6);
        }
        if (!ok)
            throw std::invalid_argument(
                "gamma range [" + std::to_string(spec.gamma_range.first) + ", " +
                std::to_string(spec.gamma_range.second) + "] failed the strict triangle " +
                "inequality for " + std::to_string(kMaxRejectionRounds) +
                " rounds at node " + std::to_string(id) + "; the range looks infeasible");
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                gamma[(static_cast<size_t>(id) * m + i) * m + j] = g[static_cast<size_t>(i) * m + j];
    }
    return make_model(std::move(tree), m, std::move(psi), std::move(gamma), std::move(terminal));
}

}  // namespace oswitch

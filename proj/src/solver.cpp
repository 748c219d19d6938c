#include "oswitch/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oswitch {

namespace {

void require_valid(const SwitchingModel& model) {
    auto tree_violations = validate_tree(*model.tree);
    auto model_violations = validate_model(model);
    if (tree_violations.empty() && model_violations.empty()) return;
    std::string msg = "model failed validation:";
    for (const auto& v : tree_violations) msg += "\n  " + v;
    for (const auto& v : model_violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
}

/// Cumulative running reward of each mode over strict ancestors:
/// prefix(node, i) = sum of psi_i over the path from the root up to but
/// excluding the node.
std::vector<double> prefix_psi(const SwitchingModel& model) {
    const ScenarioTree& tree = *model.tree;
    const int m = model.num_modes;
    std::vector<double> prefix(static_cast<size_t>(tree.num_nodes()) * m, 0.0);
    for (int t = 1; t <= tree.max_time(); ++t) {
        for (int id : tree.nodes_at_time(t)) {
            int p = *tree.node(id).parent;
            for (int i = 0; i < m; ++i)
                prefix[static_cast<size_t>(id) * m + i] =
                    prefix[static_cast<size_t>(p) * m + i] + model.psi_at(p, i);
        }
    }
    return prefix;
}

/// One-step conditional expectation of the per-(node, mode) field at `node`
/// for each mode.
std::vector<double> next_step_expectation(const SwitchingModel& model,
                                          const std::vector<double>& field, int node) {
    const ScenarioTree& tree = *model.tree;
    const int m = model.num_modes;
    std::vector<double> out(static_cast<size_t>(m), 0.0);
    for (int c : tree.children(node)) {
        double p = tree.node(c).branch_prob;
        for (int i = 0; i < m; ++i) out[static_cast<size_t>(i)] += p * field[static_cast<size_t>(c) * m + i];
    }
    return out;
}

/// Fills u_implicit, u_hat and y_hat from a computed y field.
void fill_gain_fields(ValueField& vf) {
    const SwitchingModel& model = vf.model;
    const ScenarioTree& tree = *model.tree;
    const int m = model.num_modes;
    const size_t n = static_cast<size_t>(tree.num_nodes());
    auto prefix = prefix_psi(model);

    vf.u_implicit.assign(n * m, 0.0);
    vf.u_hat.assign(n * m, 0.0);
    vf.y_hat.assign(n * m, 0.0);

    for (int id = 0; id < tree.num_nodes(); ++id) {
        const size_t base = static_cast<size_t>(id) * m;
        if (tree.is_leaf(id)) {
            for (int i = 0; i < m; ++i) {
                vf.u_implicit[base + i] = model.terminal_at(id, i);
                vf.u_hat[base + i] = prefix[base + i] + model.terminal_at(id, i);
            }
        } else {
            auto expect = next_step_expectation(model, vf.y, id);
            for (int i = 0; i < m; ++i) {
                double best_now = -std::numeric_limits<double>::infinity();
                double best_next = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < m; ++j) {
                    if (j == i) continue;
                    double g = model.gamma_at(id, i, j);
                    best_now = std::max(best_now, vf.y[base + j] - g);
                    best_next = std::max(best_next,
                                         -g + model.psi_at(id, j) + expect[static_cast<size_t>(j)]);
                }
                vf.u_implicit[base + i] = best_now;
                vf.u_hat[base + i] = prefix[base + i] + best_next;
            }
        }
        for (int i = 0; i < m; ++i) vf.y_hat[base + i] = vf.y[base + i] + prefix[base + i];
    }
}

}  // namespace

ProcessField ValueField::y_hat_field(int mode) const {
    ProcessField f{model.tree, {}};
    f.values.reserve(static_cast<size_t>(model.tree->num_nodes()));
    for (int id = 0; id < model.tree->num_nodes(); ++id) f.values.push_back(y_hat_at(id, mode));
    return f;
}

ProcessField ValueField::u_hat_field(int mode) const {
    ProcessField f{model.tree, {}};
    f.values.reserve(static_cast<size_t>(model.tree->num_nodes()));
    for (int id = 0; id < model.tree->num_nodes(); ++id) f.values.push_back(u_hat_at(id, mode));
    return f;
}

ValueField backward_induction_explicit(const SwitchingModel& model) {
    require_valid(model);
    const ScenarioTree& tree = *model.tree;
    const int m = model.num_modes;

    ValueField vf{model, {}, {}, {}, {}};
    vf.y.assign(static_cast<size_t>(tree.num_nodes()) * m, 0.0);
    for (int leaf : tree.leaves())
        for (int i = 0; i < m; ++i)
            vf.y[static_cast<size_t>(leaf) * m + i] = model.terminal_at(leaf, i);

    for (int t = tree.max_time() - 1; t >= 0; --t) {
        for (int id : tree.nodes_at_time(t)) {
            if (tree.is_leaf(id)) continue;
            auto expect = next_step_expectation(model, vf.y, id);
            const size_t base = static_cast<size_t>(id) * m;
            for (int i = 0; i < m; ++i) {
                double best = model.psi_at(id, i) + expect[static_cast<size_t>(i)];
                for (int j = 0; j < m; ++j) {
                    if (j == i) continue;
                    best = std::max(best, -model.gamma_at(id, i, j) + model.psi_at(id, j) +
                                              expect[static_cast<size_t>(j)]);
                }
                vf.y[base + i] = best;
            }
        }
    }
    fill_gain_fields(vf);
    return vf;
}

ValueField backward_induction_implicit(const SwitchingModel& model) {
    require_valid(model);
    const ScenarioTree& tree = *model.tree;
    const int m = model.num_modes;

    ValueField vf{model, {}, {}, {}, {}};
    vf.y.assign(static_cast<size_t>(tree.num_nodes()) * m, 0.0);
    for (int leaf : tree.leaves())
        for (int i = 0; i < m; ++i)
            vf.y[static_cast<size_t>(leaf) * m + i] = model.terminal_at(leaf, i);

    std::vector<double> cont(static_cast<size_t>(m));
    std::vector<double> cur(static_cast<size_t>(m));
    for (int t = tree.max_time() - 1; t >= 0; --t) {
        for (int id : tree.nodes_at_time(t)) {
            if (tree.is_leaf(id)) continue;
            auto expect = next_step_expectation(model, vf.y, id);
            for (int i = 0; i < m; ++i) {
                cont[static_cast<size_t>(i)] = model.psi_at(id, i) + expect[static_cast<size_t>(i)];
                cur[static_cast<size_t>(i)] = cont[static_cast<size_t>(i)];
            }
            // Coupled fixed point: raise each mode against the others until a
            // full pass changes nothing. The iteration is monotone and the
            // strict triangle inequality bounds profitable switch chains to a
            // single hop, so it settles after one improving pass; the pass
            // budget guards against broken cost data slipping through.
            bool stable = false;
            for (int pass = 0; pass < m && !stable; ++pass) {
                stable = true;
                for (int i = 0; i < m; ++i) {
                    double best = cont[static_cast<size_t>(i)];
                    for (int j = 0; j < m; ++j) {
                        if (j == i) continue;
                        best = std::max(best,
                                        -model.gamma_at(id, i, j) + cur[static_cast<size_t>(j)]);
                    }
                    if (best != cur[static_cast<size_t>(i)]) {
                        cur[static_cast<size_t>(i)] = best;
                        stable = false;
                    }
                }
            }
            if (!stable) {
                // One more pass to distinguish "converged on the last allowed
                // pass" from genuine failure.
                bool settled = true;
                for (int i = 0; i < m && settled; ++i) {
                    double best = cont[static_cast<size_t>(i)];
                    for (int j = 0; j < m; ++j) {
                        if (j == i) continue;
                        best = std::max(best,
                                        -model.gamma_at(id, i, j) + cur[static_cast<size_t>(j)]);
                    }
                    if (best != cur[static_cast<size_t>(i)]) settled = false;
                }
                if (!settled)
                    throw std::runtime_error("implicit recursion: fixed point not reached at node " +
                                             std::to_string(id) +
                                             "; switching costs admit a profitable cycle");
            }
            for (int i = 0; i < m; ++i)
                vf.y[static_cast<size_t>(id) * m + i] = cur[static_cast<size_t>(i)];
        }
    }
    fill_gain_fields(vf);
    return vf;
}

Strategy extract_strategy(const ValueField& vf, int start_node, int start_mode) {
    const SwitchingModel& model = vf.model;
    const ScenarioTree& tree = *model.tree;
    const int m = model.num_modes;
    if (start_node < 0 || start_node >= tree.num_nodes())
        throw std::invalid_argument("start node " + std::to_string(start_node) + " out of range");
    if (start_mode < 0 || start_mode >= m)
        throw std::invalid_argument("start mode " + std::to_string(start_mode) + " out of range");

    Strategy s;
    s.tree = model.tree;
    s.start_node = start_node;
    s.start_mode = start_mode;
    s.mode_assignment.assign(static_cast<size_t>(tree.num_nodes()), Strategy::kUnassigned);

    const int T = tree.horizon();
    std::vector<std::pair<int, int>> stack;  // (node, mode held on arrival)
    if (tree.node(start_node).time < T) stack.push_back({start_node, start_mode});
    while (!stack.empty()) {
        auto [id, held] = stack.back();
        stack.pop_back();
        auto expect = next_step_expectation(model, vf.y, id);
        double cont = model.psi_at(id, held) + expect[static_cast<size_t>(held)];
        double best_switch = -std::numeric_limits<double>::infinity();
        int target = held;
        for (int j = 0; j < m; ++j) {
            if (j == held) continue;
            double v = vf.y_at(id, j) - model.gamma_at(id, held, j);
            if (v > best_switch) {
                best_switch = v;
                target = j;
            }
        }
        // Switch only when it strictly beats continuing; a tie keeps the
        // current mode. Once switched, the new mode runs from this very node
        // (no second switch here: an immediate re-switch would mean a
        // profitable two-hop chain, which the strict triangle rules out).
        int mode = (best_switch > cont) ? target : held;
        s.mode_assignment[static_cast<size_t>(id)] = mode;
        for (int c : tree.children(id))
            if (tree.node(c).time < T) stack.push_back({c, mode});
    }
    return s;
}

EquivalenceReport equivalence_report(const SwitchingModel& model) {
    ValueField ve = backward_induction_explicit(model);
    ValueField vi = backward_induction_implicit(model);
    const ScenarioTree& tree = *model.tree;
    const int m = model.num_modes;

    EquivalenceReport rep;
    for (size_t k = 0; k < ve.y.size(); ++k)
        rep.explicit_vs_implicit = std::max(rep.explicit_vs_implicit, std::abs(ve.y[k] - vi.y[k]));

    for (int i = 0; i < m; ++i) {
        ProcessField z = snell_envelope(ve.u_hat_field(i));
        ProcessField yh = ve.y_hat_field(i);
        for (int id = 0; id < tree.num_nodes(); ++id)
            rep.snell_identity =
                std::max(rep.snell_identity, std::abs(z.at(id) - yh.at(id)));
    }

    for (int id = 0; id < tree.num_nodes(); ++id) {
        for (int i = 0; i < m; ++i) {
            Strategy s = extract_strategy(ve, id, i);
            double j = evaluate(s, model);
            rep.verification = std::max(rep.verification, std::abs(j - ve.y_at(id, i)));
        }
    }
    return rep;
}

}  // namespace oswitch

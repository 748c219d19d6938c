#include "oswitch/strategy.hpp"

#include <algorithm>
#include <stdexcept>

namespace oswitch {

namespace {

int require_node(const ScenarioTree& tree, int id, const char* what) {
    if (id < 0 || id >= tree.num_nodes())
        throw std::invalid_argument(std::string(what) + " " + std::to_string(id) + " out of range");
    return id;
}

/// Stop node of a stage on the path from the rule's anchor to `leaf`.
int stop_on_path(const ScenarioTree& tree, const StoppingRule& rule, int leaf) {
    int found = -1;
    bool below = false;
    for (int nd : tree.path_from_root(leaf)) {
        if (nd == rule.anchor) below = true;
        if (below && rule.stops_at(nd)) {
            found = nd;
            break;
        }
    }
    return found;
}

}  // namespace

std::vector<SwitchEvent> Strategy::switch_events() const {
    std::vector<SwitchEvent> out;
    const ScenarioTree& t = *tree;
    const int T = t.horizon();
    if (t.node(start_node).time >= T) return out;
    std::vector<std::pair<int, int>> stack{{start_node, start_mode}};  // (node, mode before it)
    while (!stack.empty()) {
        auto [id, prev] = stack.back();
        stack.pop_back();
        int cur = mode_at(id);
        if (cur != prev) out.push_back({id, prev, cur});
        for (int c : t.children(id))
            if (t.node(c).time < T) stack.push_back({c, cur});
    }
    std::sort(out.begin(), out.end(),
              [](const SwitchEvent& a, const SwitchEvent& b) { return a.node < b.node; });
    return out;
}

int Strategy::switch_count(int leaf) const {
    const ScenarioTree& t = *tree;
    int count = 0;
    int prev = start_mode;
    bool below = false;
    for (int nd : t.path_from_root(leaf)) {
        if (nd == start_node) below = true;
        if (!below || t.node(nd).time >= t.horizon()) continue;
        int cur = mode_at(nd);
        if (cur != prev) ++count;
        prev = cur;
    }
    return count;
}

int Strategy::last_mode(int leaf) const {
    const ScenarioTree& t = *tree;
    if (t.node(start_node).time >= t.horizon()) return start_mode;
    // The leaf sits at the horizon, so its parent holds the last active mode.
    return mode_at(*t.node(leaf).parent);
}

std::vector<std::string> check_admissibility(const RawControl& raw, const ScenarioTree& tree,
                                             int num_modes) {
    std::vector<std::string> out;
    if (raw.start_node < 0 || raw.start_node >= tree.num_nodes()) {
        out.push_back("start node " + std::to_string(raw.start_node) + " out of range");
        return out;
    }
    if (raw.start_mode < 0 || raw.start_mode >= num_modes) {
        out.push_back("start mode " + std::to_string(raw.start_mode) + " out of range");
        return out;
    }

    for (size_t q = 0; q < raw.stages.size(); ++q) {
        const RawStage& st = raw.stages[q];
        std::string tag = "stage " + std::to_string(q + 1);
        if (st.when.anchor != raw.start_node) {
            out.push_back(tag + ": anchored at node " + std::to_string(st.when.anchor) +
                          ", expected start node " + std::to_string(raw.start_node));
            return out;
        }
        for (const auto& v : validate_stopping_rule(tree, st.when)) out.push_back(tag + ": " + v);
        if (st.target_mode.size() != static_cast<size_t>(tree.num_nodes())) {
            out.push_back(tag + ": target modes cover " + std::to_string(st.target_mode.size()) +
                          " nodes, tree has " + std::to_string(tree.num_nodes()));
            return out;
        }
    }
    if (!out.empty()) return out;  // per-path checks need well-formed stages

    const int T = tree.horizon();
    for (int leaf : tree.leaves_below(raw.start_node)) {
        int prev_node = raw.start_node;
        int prev_mode = raw.start_mode;
        for (size_t q = 0; q < raw.stages.size(); ++q) {
            const RawStage& st = raw.stages[q];
            std::string tag = "stage " + std::to_string(q + 1) + ", path to leaf " +
                              std::to_string(leaf);
            int stop = stop_on_path(tree, st.when, leaf);
            if (stop < 0) {
                out.push_back(tag + ": no stop on this path");
                break;
            }
            if (tree.node(stop).time < tree.node(prev_node).time) {
                out.push_back(tag + ": stops at time " + std::to_string(tree.node(stop).time) +
                              ", before stage " + std::to_string(q) + " at time " +
                              std::to_string(tree.node(prev_node).time));
            }
            if (q > 0 && stop == prev_node && tree.node(stop).time < T)
                out.push_back(tag + ": double switch at node " + std::to_string(stop));
            int target = st.target_mode[static_cast<size_t>(stop)];
            if (target < 0 || target >= num_modes) {
                out.push_back(tag + ": target mode " + std::to_string(target) + " out of range");
                break;
            }
            if (target == prev_mode)
                out.push_back(tag + ": mode repeat (" + std::to_string(target) + " after " +
                              std::to_string(prev_mode) + ")");
            prev_node = stop;
            prev_mode = target;
        }
    }
    return out;
}

Strategy canonicalize(const RawControl& raw, TreePtr tree, int num_modes) {
    auto violations = check_admissibility(raw, *tree, num_modes);
    if (!violations.empty()) {
        std::string msg = "control is not admissible:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::invalid_argument(msg);
    }

    const ScenarioTree& t = *tree;
    const int T = t.horizon();
    Strategy s;
    s.tree = tree;
    s.start_node = raw.start_node;
    s.start_mode = raw.start_mode;
    s.mode_assignment.assign(static_cast<size_t>(t.num_nodes()), Strategy::kUnassigned);

    // Walk the subtree carrying (mode, index of the next pending stage); a
    // node's mode is the target of the last stage that stopped at or above it.
    struct Frame {
        int node;
        int mode;
        size_t next;
    };
    std::vector<Frame> stack{{raw.start_node, raw.start_mode, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        while (f.next < raw.stages.size() && raw.stages[f.next].when.stops_at(f.node)) {
            f.mode = raw.stages[f.next].target_mode[static_cast<size_t>(f.node)];
            ++f.next;
        }
        if (t.node(f.node).time < T)
            s.mode_assignment[static_cast<size_t>(f.node)] = f.mode;
        for (int c : t.children(f.node)) stack.push_back({c, f.mode, f.next});
    }
    return s;
}

RawControl to_raw(const Strategy& strategy, int num_modes) {
    return raw_from_events(*strategy.tree, strategy.start_node, strategy.start_mode,
                           strategy.switch_events(), num_modes);
}

RawControl raw_from_events(const ScenarioTree& tree, int start_node, int start_mode,
                           const std::vector<SwitchEvent>& events, int num_modes) {
    require_node(tree, start_node, "start node");
    const int T = tree.horizon();

    std::vector<const SwitchEvent*> event_at(static_cast<size_t>(tree.num_nodes()), nullptr);
    std::vector<std::uint8_t> in_scope(static_cast<size_t>(tree.num_nodes()), 0);
    for (int id : tree.subtree(start_node)) in_scope[static_cast<size_t>(id)] = 1;
    for (const auto& ev : events) {
        require_node(tree, ev.node, "switch event node");
        if (tree.node(ev.node).time >= T) continue;  // a horizon switch is a no-op, dropped
        if (!in_scope[static_cast<size_t>(ev.node)])
            throw std::invalid_argument("switch event at node " + std::to_string(ev.node) +
                                        " outside the subtree of start node " +
                                        std::to_string(start_node));
        if (event_at[static_cast<size_t>(ev.node)])
            throw std::invalid_argument("two switch events at node " + std::to_string(ev.node));
        event_at[static_cast<size_t>(ev.node)] = &ev;
    }

    // Per-leaf switch sequences; the n-th stage stops at the n-th switch node,
    // or at the leaf (padding) when the path has run out of switches.
    const auto leaves = tree.leaves_below(start_node);
    size_t max_stages = 0;
    std::vector<std::vector<SwitchEvent>> per_leaf(leaves.size());
    for (size_t li = 0; li < leaves.size(); ++li) {
        for (int nd : tree.path_from_root(leaves[li]))
            if (const SwitchEvent* ev = event_at[static_cast<size_t>(nd)])
                per_leaf[li].push_back(*ev);
        max_stages = std::max(max_stages, per_leaf[li].size());
    }

    RawControl raw;
    raw.start_node = start_node;
    raw.start_mode = start_mode;
    for (size_t q = 0; q < max_stages; ++q) {
        RawStage st;
        st.when.anchor = start_node;
        st.when.stop.assign(static_cast<size_t>(tree.num_nodes()), 0);
        st.target_mode.assign(static_cast<size_t>(tree.num_nodes()), 0);
        for (size_t li = 0; li < leaves.size(); ++li) {
            if (q < per_leaf[li].size()) {
                const auto& ev = per_leaf[li][q];
                st.when.stop[static_cast<size_t>(ev.node)] = 1;
                st.target_mode[static_cast<size_t>(ev.node)] = ev.to_mode;
            } else {
                // Padding at the horizon: alternate between the real last mode
                // and a neighbour so consecutive targets never repeat.
                int leaf = leaves[li];
                int a = per_leaf[li].empty() ? start_mode : per_leaf[li].back().to_mode;
                int b = (a + 1) % num_modes;
                size_t padding = q - per_leaf[li].size();
                st.when.stop[static_cast<size_t>(leaf)] = 1;
                st.target_mode[static_cast<size_t>(leaf)] = (padding % 2 == 0) ? b : a;
            }
        }
        raw.stages.push_back(std::move(st));
    }
    return raw;
}

Strategy strategy_from_events(TreePtr tree, int start_node, int start_mode,
                              const std::vector<SwitchEvent>& events, int num_modes) {
    RawControl raw = raw_from_events(*tree, start_node, start_mode, events, num_modes);
    Strategy s = canonicalize(raw, tree, num_modes);

    // The from-modes in the input are redundant; insist they agree with what
    // the control actually holds so inconsistent documents are rejected.
    auto canonical = s.switch_events();
    const int T = tree->horizon();
    for (const auto& ev : events) {
        if (tree->node(ev.node).time >= T) continue;
        bool matched = false;
        for (const auto& got : canonical)
            if (got == ev) {
                matched = true;
                break;
            }
        if (!matched)
            throw std::invalid_argument(
                "switch event at node " + std::to_string(ev.node) + " (" +
                std::to_string(ev.from_mode) + " -> " + std::to_string(ev.to_mode) +
                ") does not match the mode actually held there");
    }
    return s;
}

double evaluate(const Strategy& strategy, const SwitchingModel& model) {
    if (strategy.tree.get() != model.tree.get())
        throw std::invalid_argument("strategy and model live on different trees");
    const ScenarioTree& t = *model.tree;
    const int T = t.horizon();
    require_node(t, strategy.start_node, "start node");

    // Recursive expectation below the start node: running reward and switch
    // cost at each pre-horizon node, terminal reward of the carried mode at
    // the leaf.
    auto walk = [&](auto&& self, int id, int prev_mode) -> double {
        if (t.node(id).time >= T) return model.terminal_at(id, prev_mode);
        int mode = strategy.mode_at(id);
        if (mode < 0 || mode >= model.num_modes)
            throw std::invalid_argument("node " + std::to_string(id) +
                                        " has no assigned mode on the strategy's subtree");
        double acc = 0.0;
        if (mode != prev_mode) acc -= model.gamma_at(id, prev_mode, mode);
        acc += model.psi_at(id, mode);
        for (int c : t.children(id)) acc += t.node(c).branch_prob * self(self, c, mode);
        return acc;
    };
    return walk(walk, strategy.start_node, strategy.start_mode);
}

double evaluate_raw(const RawControl& raw, const SwitchingModel& model) {
    const ScenarioTree& t = *model.tree;
    auto violations = check_admissibility(raw, t, model.num_modes);
    if (!violations.empty()) {
        std::string msg = "control is not admissible:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::invalid_argument(msg);
    }
    const int T = t.horizon();

    struct Frame {
        int node;
        int mode;
        size_t next;
    };
    // Direct fold of the stage form: pay a cost at every pre-horizon stop,
    // collect the running reward of the active mode, and at the leaf the
    // terminal reward of the mode carried into the final step.
    auto walk = [&](auto&& self, Frame f) -> double {
        double acc = 0.0;
        while (f.next < raw.stages.size() && raw.stages[f.next].when.stops_at(f.node)) {
            int target = raw.stages[f.next].target_mode[static_cast<size_t>(f.node)];
            if (t.node(f.node).time < T) {
                acc -= model.gamma_at(f.node, f.mode, target);
                f.mode = target;
            }
            ++f.next;
        }
        if (t.node(f.node).time >= T) return acc + model.terminal_at(f.node, f.mode);
        acc += model.psi_at(f.node, f.mode);
        for (int c : t.children(f.node))
            acc += t.node(c).branch_prob * self(self, Frame{c, f.mode, f.next});
        return acc;
    };
    return walk(walk, Frame{raw.start_node, raw.start_mode, 0});
}

}  // namespace oswitch

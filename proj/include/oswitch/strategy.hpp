#pragma once

#include <string>
#include <vector>

#include "oswitch/model.hpp"
#include "oswitch/tree.hpp"

namespace oswitch {

/// A single switch: at `node`, leave from_mode and pay gamma[from][to] there.
struct SwitchEvent {
    int node = 0;
    int from_mode = 0;
    int to_mode = 0;

    friend bool operator==(const SwitchEvent&, const SwitchEvent&) = default;
};

/// An admissible switching control in canonical form: the active mode at every
/// node of the start node's subtree with time < T. Per-node storage makes
/// adaptedness structural and allows at most one switch per node, so the
/// no-double-switch admissibility condition holds by construction. Nodes
/// outside the scope keep kUnassigned.
///
/// Switches at the horizon are never represented: they would pay no cost and
/// change no terminal reward, so canonical form drops them.
struct Strategy {
    static constexpr int kUnassigned = -1;

    TreePtr tree;
    int start_node = 0;
    int start_mode = 0;
    std::vector<int> mode_assignment;  // indexed by node id

    int mode_at(int node) const { return mode_assignment[static_cast<size_t>(node)]; }

    /// All switches, in preorder: an event at start_node when the assignment
    /// jumps immediately, and one wherever a node's mode differs from its
    /// parent's.
    std::vector<SwitchEvent> switch_events() const;

    /// Number of switches on the path from start_node to the given leaf.
    int switch_count(int leaf) const;

    /// The mode holding at the last pre-horizon step on the path to the leaf
    /// (start_mode when the strategy starts at the horizon itself). This is
    /// the mode whose terminal reward the leaf collects.
    int last_mode(int leaf) const;

    friend bool operator==(const Strategy& a, const Strategy& b) {
        return a.tree.get() == b.tree.get() && a.start_node == b.start_node &&
               a.start_mode == b.start_mode && a.mode_assignment == b.mode_assignment;
    }
};

/// Stage form of a control: the n-th switch happens where `when` stops, moving
/// to target_mode read at that stop node. Stops at horizon-time nodes are
/// padding (no cost, no effect).
struct RawStage {
    StoppingRule when;
    std::vector<int> target_mode;  // indexed by node id
};

/// Import/export view of a control as a finite stage sequence; stages past the
/// list are implicitly "never" (stopped at the horizon).
struct RawControl {
    int start_node = 0;
    int start_mode = 0;
    std::vector<RawStage> stages;
};

/// Checks the admissibility conditions on every path below the start node:
/// each stage is a valid stopping rule anchored at the start, stage times are
/// non-decreasing, no two stages stop at the same pre-horizon node, target
/// modes are in range and never repeat the previous mode. Returns one message
/// per violation.
std::vector<std::string> check_admissibility(const RawControl& raw, const ScenarioTree& tree,
                                             int num_modes);

/// Converts an admissible stage-form control to canonical per-node form.
/// Throws std::invalid_argument listing violations when inadmissible.
Strategy canonicalize(const RawControl& raw, TreePtr tree, int num_modes);

/// Exports a canonical strategy back to stage form. Paths with fewer switches
/// than the longest one are padded with horizon-time stops whose target modes
/// alternate, keeping the mode-repeat condition satisfied.
RawControl to_raw(const Strategy& strategy, int num_modes);

/// Builds stage form from a switch-event list (the import format used by the
/// command line). Events at horizon-time nodes are dropped: such a switch
/// pays nothing and changes nothing. Throws std::invalid_argument when an
/// event sits outside the start node's subtree or two events share a node.
RawControl raw_from_events(const ScenarioTree& tree, int start_node, int start_mode,
                           const std::vector<SwitchEvent>& events, int num_modes);

/// Full import path: event list -> stage form -> canonical strategy, then
/// verifies the list round-trips (every declared from-mode matches the mode
/// actually held). Throws std::invalid_argument on inadmissible or
/// inconsistent input, listing the violations.
Strategy strategy_from_events(TreePtr tree, int start_node, int start_mode,
                              const std::vector<SwitchEvent>& events, int num_modes);

/// Expected total payoff conditional on the start node: running rewards at
/// every pre-horizon step, plus the terminal reward of the last mode, minus
/// the switching costs paid along the way.
double evaluate(const Strategy& strategy, const SwitchingModel& model);

/// Same payoff computed directly on the stage form, without canonicalizing.
/// Used to cross-check that canonical form preserves the control's value.
double evaluate_raw(const RawControl& raw, const SwitchingModel& model);

}  // namespace oswitch

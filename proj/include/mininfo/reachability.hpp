#pragma once

#include <span>
#include <vector>

#include "mininfo/mdp.hpp"

namespace mininfo {

/// allowed[s][a] != 0 when action a of state s may be used.
using ActionMask = std::vector<std::vector<char>>;

ActionMask all_actions(const Mdp& mdp);

/// States that reach `goal` with positive probability under some choice of
/// allowed actions. Goal states are included; `terminal` states other than
/// the goal are dead ends.
std::vector<char> can_reach(const Mdp& mdp, const ActionMask& allowed,
                            std::span<const char> terminal, std::span<const char> goal);

/// States from which some policy over allowed actions reaches `goal` with
/// probability one, never passing through non-goal `terminal` states.
std::vector<char> almost_sure_reach(const Mdp& mdp, const ActionMask& allowed,
                                    std::span<const char> terminal, std::span<const char> goal);

struct MaxReach {
  std::vector<double> value;  ///< optimal reach probability per state
  std::vector<int> choice;    ///< an optimal action per non-terminal state, -1 if none
  std::vector<char> optimal_progress;  ///< choice reaches a terminal state almost surely
};

/// Maximum probability of entering `goal` (a subset of `terminal`) where
/// terminal states stop the process. Qualitative pre-pass, then
/// Gauss-Seidel value iteration. `choice` is built by an attractor over
/// the near-optimal actions, so following it reaches a terminal state
/// almost surely whenever that is possible.
MaxReach max_reach(const Mdp& mdp, const ActionMask& allowed, std::span<const char> terminal,
                   std::span<const char> goal);

/// Max-reach to the MDP's own targets from the initial state.
double max_reach_probability(const Mdp& mdp);

enum class Feasibility { kFeasible, kInfeasible };

/// Feasible iff the maximum reach probability is at least the threshold
/// (within 1e-9).
Feasibility feasibility_check(const Mdp& mdp);

/// Deterministic policy attaining the maximum reach probability; states
/// without a useful choice take their first action.
StationaryPolicy max_reach_policy(const Mdp& mdp);

}  // namespace mininfo

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mininfo/components.hpp"
#include "mininfo/information.hpp"
#include "mininfo/mdp.hpp"

namespace mininfo {

enum class SolveStatus { kOptimal, kInfeasible, kInfiniteInformation };

std::string to_string(SolveStatus status);

struct SolveOptions {
  double tol = 1e-6;
  /// Extra grouped penalties added to the objective (exit information).
  std::vector<GroupTerm> groups;
  /// Re-solve with observed states whose residence falls below
  /// `support_zero` removed, keeping the better objective.
  bool refine_support = true;
  double support_zero = 1e-7;
  int max_newton = 4000;
};

/// Expected state-action residence times over the states outside C_end.
struct OccupationSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<std::vector<double>> x;        ///< aligned with Mdp::actions
  std::vector<std::vector<char>> variable;   ///< action had a variable in the final program
  std::vector<char> c_end;
  ExtReal objective;    ///< information plus group penalties
  ExtReal information;  ///< observed-state terms only
  double reach_prob = 0.0;
  int newton_steps = 0;

  [[nodiscard]] double residence(StateId s) const;
  /// Largest violation of the flow balance over states outside C_end.
  [[nodiscard]] double flow_residual(const Mdp& mdp) const;
};

/// Minimizes the expected total information over residence times that
/// satisfy the flow balance outside `c_end` and the reach requirement.
OccupationSolution solve_program6(const Mdp& mdp, std::span<const char> c_end,
                                  const SolveOptions& options = {});

/// Uniform over D(s) on the union, uniform over all actions elsewhere.
/// Throws InvalidUnion when some state of the union has no action.
StationaryPolicy stay_policy(const Mdp& mdp, const SubMdp& union_uec);

/// pi(s,a) = x(s,a) / x_s; `stay` on C_end; uniform where x_s vanishes.
StationaryPolicy extract_policy(const Mdp& mdp, const OccupationSolution& sol,
                                std::span<const char> c_end, const StationaryPolicy& stay);

struct ExhaustiveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  StationaryPolicy policy;
  OccupationSolution solution;
  SubMdp chosen;           ///< the union UEC the agent stays in
  int configurations = 0;  ///< union UECs solved
};

/// Tries every subset of the UMEC states that is a union of unobserved end
/// components and keeps the first strict minimizer. Throws SearchTooLarge
/// when there are more than `cap` UMEC states.
ExhaustiveResult exhaustive_search(const Mdp& mdp, const SolveOptions& options = {}, int cap = 20);

/// Copy of the MDP where every UMEC state s gains a closed duplicate and a
/// `switch` action moving there.
struct ModifiedMdp {
  Mdp mdp;
  std::vector<StateId> duplicate;  ///< per original state, its copy or -1
  std::vector<StateId> original;   ///< per modified state, the state it stands for
  std::vector<char> c_end;         ///< UMEC states, over original states
  std::vector<char> c_end_bar;     ///< duplicates, over modified states
  std::vector<int> switch_action;  ///< per original state, index of `switch` or -1
};

inline constexpr const char* kSwitchAction = "switch";

ModifiedMdp build_modified_mdp(const Mdp& mdp);

/// Runtime policy: stationary outside C_end, one memory bit inside.
struct SwitchPolicy {
  StationaryPolicy base;    ///< on the modified MDP, switch included
  StationaryPolicy policy;  ///< base without switch, renormalized, on the original MDP
  StationaryPolicy stay;    ///< on the original MDP, stays inside C_end
  std::vector<char> c_end;
  std::vector<double> switch_prob;
};

/// Rebuilds `base` from the original-level fields.
StationaryPolicy lift_switch_policy(const ModifiedMdp& modified, const SwitchPolicy& sp);

struct SwitchResult {
  SolveStatus status = SolveStatus::kInfeasible;
  SwitchPolicy policy;
  OccupationSolution solution;  ///< over the modified MDP
};

SwitchResult solve_switch(const Mdp& mdp, const SolveOptions& options = {});

struct ActResult {
  int action = 0;
  bool switched = false;
};

/// One decision of the switching policy. `uniform` returns draws from
/// U[0,1); the first draw decides the switch, the next picks the action.
ActResult act(const SwitchPolicy& sp, StateId s, bool switched,
              const std::function<double()>& uniform);

/// Index drawn from a probability row with one uniform draw.
int sample_index(std::span<const double> probs, double u);

enum class Mode { kClosed, kExhaustive, kSwitch };

std::string to_string(Mode mode);
std::optional<Mode> parse_mode(const std::string& text);

struct SynthesisResult {
  Mode mode = Mode::kClosed;
  SolveStatus status = SolveStatus::kInfeasible;
  StationaryPolicy policy;  ///< on the original MDP (switch: without switching)
  std::optional<SwitchPolicy> switch_policy;
  OccupationSolution solution;
  std::vector<StateId> c_end;
  ExtReal objective;
  ExtReal information;
  double reach_prob = 0.0;
};

/// Feasibility check, then the selected mode. Closed mode throws InvalidMdp
/// unless every UMEC is closed. With infinite information the policy is a
/// maximum-reach policy.
SynthesisResult synthesize(const Mdp& mdp, Mode mode, const SolveOptions& options = {});

}  // namespace mininfo

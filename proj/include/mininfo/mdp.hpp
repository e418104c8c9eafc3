#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mininfo/ext_real.hpp"

namespace mininfo {

using StateId = int;

struct Transition {
  StateId to = 0;
  double prob = 0.0;
};

/// An enabled action with its successor distribution, sorted by state and
/// holding only positive probabilities.
struct Action {
  std::string name;
  std::vector<Transition> successors;
};

struct ReachSpec {
  std::vector<StateId> targets;
  double threshold = 0.0;
};

struct TileCoord {
  int col = 0;
  int row = 0;
  friend bool operator==(const TileCoord&, const TileCoord&) = default;
};

/// Finite MDP with an observed set and a reachability requirement.
///
/// `actions[s]` lists the enabled actions of state `s`. Targets must be
/// absorbing and unobserved; see validate(). `tiles`, when present, carries
/// grid coordinates for every state (grid-generated models only).
struct Mdp {
  std::vector<std::string> states;
  std::vector<std::vector<Action>> actions;
  StateId initial = 0;
  std::vector<char> observed;
  ReachSpec reach;
  std::optional<std::vector<TileCoord>> tiles;

  [[nodiscard]] int num_states() const { return static_cast<int>(states.size()); }
  [[nodiscard]] std::optional<StateId> find(std::string_view name) const;
  /// Throws InvalidMdp for unknown names.
  [[nodiscard]] StateId index_of(std::string_view name) const;
  /// -1 when the action is not enabled at `s`.
  [[nodiscard]] int action_index(StateId s, std::string_view name) const;
  [[nodiscard]] bool is_observed(StateId s) const { return observed[s] != 0; }
  [[nodiscard]] std::vector<char> target_mask() const;
  /// Succ(s): every state reachable in one step under some enabled action.
  [[nodiscard]] std::vector<StateId> successors(StateId s) const;
  [[nodiscard]] std::vector<StateId> observed_states() const;
  [[nodiscard]] int num_state_actions() const;
};

struct Violation {
  enum class Kind {
    kNoActions,
    kRowSum,
    kNegativeProbability,
    kDuplicateAction,
    kBadStateIndex,
    kInitialMissing,
    kObservedTarget,
    kTargetNotAbsorbing,
    kThresholdRange,
    kShapeMismatch,
  };
  Kind kind;
  std::string state;
  std::string action;
  std::string message;
};

/// Every violated structural invariant; empty means valid.
std::vector<Violation> validate(const Mdp& mdp);

/// Non-fatal findings, currently observed states with a single successor
/// (their transition information is infinite whenever they are visited).
std::vector<std::string> warnings(const Mdp& mdp);

/// Throws InvalidMdp listing the violations, if any.
void require_valid(const Mdp& mdp);

/// Per-state distribution over the enabled actions, aligned with
/// `Mdp::actions`.
struct StationaryPolicy {
  std::vector<std::vector<double>> prob;

  static StationaryPolicy uniform(const Mdp& mdp);
  /// Picks `choice[s]` with probability one at each state.
  static StationaryPolicy deterministic(const Mdp& mdp, std::span<const int> choice);
  /// Sets the distribution at `s` by action name; unnamed actions get zero.
  void set(const Mdp& mdp, StateId s,
           std::initializer_list<std::pair<std::string_view, double>> dist);
  [[nodiscard]] double at(const Mdp& mdp, StateId s, std::string_view action) const;
};

/// Throws InvalidPolicy unless every row matches the action count, is
/// nonnegative and sums to one within 1e-9.
void check_policy(const Mdp& mdp, const StationaryPolicy& policy);

struct MarkovChain {
  std::vector<std::vector<Transition>> rows;
  StateId initial = 0;

  [[nodiscard]] int num_states() const { return static_cast<int>(rows.size()); }
  [[nodiscard]] double prob(StateId from, StateId to) const;
};

/// P^pi(s,q) = sum_a pi(s,a) P(s,a,q); zero entries omitted.
MarkovChain induce_chain(const Mdp& mdp, const StationaryPolicy& policy);

/// Recurrence structure of a chain, computed on the support graph.
struct ChainClasses {
  std::vector<char> reachable;   ///< reachable from the initial state
  std::vector<char> recurrent;   ///< member of a bottom strongly connected component
  std::vector<int> component;    ///< SCC id per state
};

ChainClasses classify(const MarkovChain& chain);

/// Reachable non-recurrent states.
std::vector<char> transient_set(const ChainClasses& classes);

/// Pr(eventually reach `targets`) from every state. States that cannot reach
/// the targets are identified on the support graph and fixed at zero.
std::vector<double> reach_probabilities(const MarkovChain& chain, std::span<const StateId> targets);

double reach_probability(const MarkovChain& chain, std::span<const StateId> targets, StateId from);

/// Expected number of visits from the initial state.
///
/// States in `transient` are solved from (I - Q^T) x = e_init. The others are
/// +inf when reachable and recurrent, 0 when unreachable. Any mismatch with
/// the actual recurrence structure raises RecurrenceMisclassification.
std::vector<ExtReal> residence_times(const MarkovChain& chain, std::span<const char> transient);

}  // namespace mininfo

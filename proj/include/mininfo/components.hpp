#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mininfo/mdp.hpp"

namespace mininfo {

/// Sub-MDP (C, D): `states` is sorted and `actions[i]` lists the action
/// indices of D(states[i]).
struct SubMdp {
  std::vector<StateId> states;
  std::vector<std::vector<int>> actions;

  [[nodiscard]] bool empty() const { return states.empty(); }
  [[nodiscard]] std::vector<char> state_mask(int num_states) const;
  /// Position of `s` in `states`, or -1.
  [[nodiscard]] int position(StateId s) const;
};

struct EndComponentReport {
  std::vector<SubMdp> mecs;
  std::vector<SubMdp> umecs;
  std::vector<StateId> c_end;
  bool assumption1_holds = true;
};

std::vector<SubMdp> maximal_end_components(const Mdp& mdp);

/// Maximal end components of the MDP restricted to the states with
/// `within[s] != 0`; actions whose support leaves the set are discarded.
std::vector<SubMdp> maximal_end_components_within(const Mdp& mdp, std::span<const char> within);

std::vector<SubMdp> unobserved_mecs(const Mdp& mdp);

/// Succ(s) is contained in `c` for every s in `c`, over all enabled actions.
bool is_closed(const Mdp& mdp, std::span<const StateId> c);

bool check_assumption1(const Mdp& mdp);

/// The union of end components covering exactly `l`, with maximal action
/// sets, or nothing when some state of `l` lies in no end component inside
/// `l`. The empty set yields the empty union.
std::optional<SubMdp> is_union_uec(const Mdp& mdp, std::span<const StateId> l);

/// Merges several disjoint sub-MDPs into one.
SubMdp merge(std::span<const SubMdp> parts);

EndComponentReport analyze_components(const Mdp& mdp);

}  // namespace mininfo

#pragma once

#include <random>

#include "mininfo/mdp.hpp"

namespace fixtures {

struct RandomMdpOptions {
  int transient = 4;     ///< non-absorbing states s0..s{n-1}
  int actions = 2;       ///< per non-absorbing state
  int max_support = 3;   ///< successors per action, drawn from all states
  double observe_prob = 0.75;
  bool require_assumption1 = true;
};

/// Random model with states s0..s{n-1}, an absorbing target "goal" and an
/// absorbing non-target "sink". At least one state is observed and the goal
/// is reachable. The threshold is left at zero; see random_threshold().
mininfo::Mdp random_mdp(std::mt19937_64& rng, const RandomMdpOptions& options = {});

/// A threshold among the feasible values: 0, the maximum reach probability,
/// or a uniform fraction of it.
double random_threshold(std::mt19937_64& rng, const mininfo::Mdp& mdp);

}  // namespace fixtures

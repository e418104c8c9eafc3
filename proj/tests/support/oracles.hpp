#pragma once

#include <span>
#include <vector>

#include "mininfo/mdp.hpp"

// Independent reference computations. Nothing here calls the library's
// evaluation or solver code; they only share the Mdp data type.
namespace oracles {

/// Expected total information and reach probability of a stationary policy,
/// from a dense chain and a full-pivot LU. info is +inf when infinite.
struct Evaluation {
  double info = 0.0;
  double reach = 0.0;
};
Evaluation evaluate(const mininfo::Mdp& mdp, const std::vector<std::vector<double>>& pi);

/// Example 1 with pi(s1,.) uniform: minimize 1/(2p(1-p)) + 2p over a grid.
struct Scalar {
  double argmin = 0.0;
  double value = 0.0;
};
Scalar example1_grid(double step = 1e-5);

/// Minimum of the expected total information over a grid of stationary
/// policies that meet the reach threshold. Each state with two actions gets
/// one coordinate. A coarse pass keeps the best `keep` points, then each
/// level searches +-5 steps around them at a 5x finer step.
struct GridMinimum {
  double value = 0.0;  ///< +inf when no grid policy has finite information
  std::vector<std::vector<double>> policy;
  long evaluations = 0;
};
GridMinimum policy_grid_minimum(const mininfo::Mdp& mdp, double coarse = 0.05, int keep = 6,
                                int levels = 4);

/// Maximal end components by enumerating every state subset (n <= 16).
/// Each entry is a sorted state list; the list is sorted.
std::vector<std::vector<mininfo::StateId>> brute_force_mecs(const mininfo::Mdp& mdp,
                                                            std::span<const char> within = {});

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_se(std::span<const double> samples);

/// Perspective g(y) written out directly, for comparisons.
double g_direct(std::span<const double> y);

}  // namespace oracles

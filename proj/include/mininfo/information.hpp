#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mininfo/ext_real.hpp"
#include "mininfo/mdp.hpp"

namespace mininfo {

/// Support tolerance for the deterministic case, relative to the total.
inline constexpr double kSupportTolerance = 1e-12;

/// 1 / sum_q p_q (1 - p_q); +inf for a deterministic distribution.
/// Throws InvalidDistribution on negative entries or a sum off by > 1e-9.
ExtReal transition_information(std::span<const double> dist);

/// g(y) = T^3 / (T^2 - sum y^2) with T = sum y, extended by 0 at y = 0 and
/// +inf when a single entry carries all the mass (or any entry is +inf).
/// Throws DomainError on negative entries.
ExtReal perspective(std::span<const double> y);
/// Gradient of g at a point with at least two positive entries.
Eigen::VectorXd perspective_gradient(std::span<const double> y);
Eigen::MatrixXd perspective_hessian(std::span<const double> y);

/// Information term of an observed state: y = P x maps the residence times
/// of the state's actions to the expected number of moves into each
/// successor.
struct InfoTerm {
  StateId state = 0;
  std::vector<StateId> successor_order;
  Eigen::MatrixXd p_matrix;  ///< |Succ| x |actions|
};

InfoTerm make_info_term(const Mdp& mdp, StateId s);

/// x_s * iota_s written in residence-time variables, with the extended
/// values at the boundary. Throws DomainError on negative input.
ExtReal info_term_value(const InfoTerm& term, std::span<const double> x);
/// Analytic gradient; throws DomainError at extended-value points.
Eigen::VectorXd info_term_gradient(const InfoTerm& term, std::span<const double> x);

/// One coefficient of a grouped term: `coeff` * x(state, action).
struct FlowCoeff {
  StateId state = 0;
  int action = 0;
  double coeff = 0.0;
};

/// g applied to linear images of the state-action residence times, scaled
/// by `weight`. Used for exit information of a region: one row per bridge.
struct GroupTerm {
  std::string label;
  double weight = 1.0;
  std::vector<std::vector<FlowCoeff>> rows;
};

/// `x[s][a]` residence times aligned with Mdp::actions.
ExtReal group_term_value(const GroupTerm& term, const std::vector<std::vector<double>>& x);

/// Everything the objective and the bounds need about a policy.
struct PolicyEvaluation {
  MarkovChain chain;
  ChainClasses classes;
  std::vector<ExtReal> residence;  ///< expected visits per state
  std::vector<ExtReal> iota;       ///< induced transition information per state
  std::vector<ExtReal> contribution;  ///< x_w * iota_w on observed states, 0 elsewhere
  ExtReal total;
  double reach_prob = 0.0;
};

PolicyEvaluation evaluate_policy(const Mdp& mdp, const StationaryPolicy& policy);

/// Sum over observed states of x_w * iota_w.
ExtReal expected_total_information(const Mdp& mdp, const StationaryPolicy& policy);

/// Sum of the induced transition information over the observed visits of
/// `path` (the last state is not scored). Throws InvalidPath on a
/// zero-probability step or a path not starting at the initial state.
ExtReal path_total_information(const Mdp& mdp, const StationaryPolicy& policy,
                               std::span<const StateId> path);

/// iota of every state under the induced chain.
std::vector<ExtReal> induced_information(const Mdp& mdp, const MarkovChain& chain);

}  // namespace mininfo

#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace mininfo {

/// weight * g(coeff * x[vars]) with g the information perspective function.
struct ConvexTerm {
  std::vector<int> vars;
  Eigen::MatrixXd coeff;  ///< rows x vars.size(), nonnegative
  double weight = 1.0;
};

/// minimize  sum_k terms_k(x)
/// s.t.      equality * x = rhs,  x > 0,
///           optionally  slack_row . x - t = slack_rhs  with t > 0.
struct BarrierProblem {
  int num_vars = 0;
  std::vector<ConvexTerm> terms;
  Eigen::SparseMatrix<double> equality;
  Eigen::VectorXd rhs;
  bool has_slack = false;
  std::vector<std::pair<int, double>> slack_row;
  double slack_rhs = 0.0;
};

struct BarrierOptions {
  double mu_start = 1.0;
  double mu_final = 1e-9;
  double mu_factor = 10.0;
  int max_newton = 4000;
  /// Inner loop stops once half the squared Newton decrement falls below
  /// this times max(1, |objective|).
  double decrement_tol = 1e-11;
};

struct BarrierResult {
  Eigen::VectorXd x;
  double slack = 0.0;
  double objective = 0.0;  ///< sum of the terms at x
  int newton_steps = 0;
};

/// Log-barrier path following from a strictly positive, feasible start.
/// The barrier is mu * sum(x - log x) - mu * log t; the linear part keeps
/// directions the objective does not see bounded. Throws NumericalFailure
/// with the last iterate when the Newton budget runs out.
BarrierResult minimize_barrier(const BarrierProblem& problem, Eigen::VectorXd x0, double t0,
                               const BarrierOptions& options = {});

/// Sum of the terms; +inf outside the finite region.
double barrier_objective(const BarrierProblem& problem, const Eigen::VectorXd& x);

}  // namespace mininfo

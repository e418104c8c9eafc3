#include "mininfo/barrier_solver.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "mininfo/errors.hpp"
#include "mininfo/information.hpp"

namespace mininfo {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr double kBoundaryFraction = 0.99;
constexpr int kDenseKkt = 400;

std::vector<double> term_image(const ConvexTerm& term, const Eigen::VectorXd& x) {
  std::vector<double> y(term.coeff.rows(), 0.0);
  for (std::size_t j = 0; j < term.vars.size(); ++j) {
    const double xj = x[term.vars[j]];
    for (Eigen::Index i = 0; i < term.coeff.rows(); ++i) y[i] += term.coeff(i, j) * xj;
  }
  return y;
}

class Kkt {
 public:
  Kkt(const BarrierProblem& p) : p_(p) {
    n_ = p.num_vars + (p.has_slack ? 1 : 0);
    m_ = static_cast<int>(p.equality.rows()) + (p.has_slack ? 1 : 0);
    dense_ = n_ + m_ <= kDenseKkt;
  }

  int n() const { return n_; }

  /// Solves [H E^T; E 0] [dz; w] = [-grad; r].
  bool solve(const std::vector<Eigen::Triplet<double>>& hessian, const Eigen::VectorXd& grad,
             const Eigen::VectorXd& residual, Eigen::VectorXd& dz) {
    std::vector<Eigen::Triplet<double>> trips = hessian;
    append_constraints(trips);
    const int dim = n_ + m_;
    Eigen::SparseMatrix<double> k(dim, dim);
    k.setFromTriplets(trips.begin(), trips.end());
    k.makeCompressed();
    Eigen::VectorXd rhs(dim);
    rhs.head(n_) = -grad;
    rhs.tail(m_) = residual;
    Eigen::VectorXd sol;
    if (dense_) {
      Eigen::MatrixXd kd(k);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(kd);
      sol = lu.solve(rhs);
      for (int it = 0; it < 2; ++it) sol += lu.solve(rhs - kd * sol);
    } else {
      if (!analyzed_) {
        lu_.analyzePattern(k);
        analyzed_ = true;
      }
      lu_.factorize(k);
      if (lu_.info() != Eigen::Success) return false;
      sol = lu_.solve(rhs);
      for (int it = 0; it < 2; ++it) sol += lu_.solve(rhs - k * sol);
    }
    if (!sol.allFinite()) return false;
    dz = sol.head(n_);
    return true;
  }

 private:
  void append_constraints(std::vector<Eigen::Triplet<double>>& trips) const {
    for (int outer = 0; outer < p_.equality.outerSize(); ++outer) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(p_.equality, outer); it; ++it) {
        const int row = n_ + static_cast<int>(it.row());
        const int col = static_cast<int>(it.col());
        trips.emplace_back(row, col, it.value());
        trips.emplace_back(col, row, it.value());
      }
    }
    if (p_.has_slack) {
      const int row = n_ + m_ - 1;
      for (const auto& [col, v] : p_.slack_row) {
        trips.emplace_back(row, col, v);
        trips.emplace_back(col, row, v);
      }
      trips.emplace_back(row, n_ - 1, -1.0);
      trips.emplace_back(n_ - 1, row, -1.0);
    }
  }

  const BarrierProblem& p_;
  int n_ = 0;
  int m_ = 0;
  bool dense_ = true;
  bool analyzed_ = false;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

struct State {
  const BarrierProblem& p;
  double mu = 1.0;

  int nx() const { return p.num_vars; }

  double objective(const Eigen::VectorXd& z) const {
    double f = 0.0;
    for (const auto& term : p.terms) {
      const ExtReal g = perspective(term_image(term, z));
      if (g.is_infinite()) return std::numeric_limits<double>::infinity();
      f += term.weight * g.value();
    }
    return f;
  }

  double merit(const Eigen::VectorXd& z) const {
    double phi = objective(z);
    if (!std::isfinite(phi)) return phi;
    for (int i = 0; i < nx(); ++i) {
      if (z[i] <= 0.0) return std::numeric_limits<double>::infinity();
      phi += mu * (z[i] - std::log(z[i]));
    }
    if (p.has_slack) {
      const double t = z[nx()];
      if (t <= 0.0) return std::numeric_limits<double>::infinity();
      phi -= mu * std::log(t);
    }
    return phi;
  }

  void derivatives(const Eigen::VectorXd& z, Eigen::VectorXd& grad,
                   std::vector<Eigen::Triplet<double>>& hess) const {
    grad = Eigen::VectorXd::Zero(z.size());
    hess.clear();
    for (const auto& term : p.terms) {
      const auto y = term_image(term, z);
      const Eigen::VectorXd gy = perspective_gradient(y);
      const Eigen::MatrixXd hy = perspective_hessian(y);
      const Eigen::VectorXd gx = term.weight * (term.coeff.transpose() * gy);
      const Eigen::MatrixXd hx = term.weight * (term.coeff.transpose() * hy * term.coeff);
      for (std::size_t j = 0; j < term.vars.size(); ++j) {
        grad[term.vars[j]] += gx[j];
        for (std::size_t k = 0; k < term.vars.size(); ++k) {
          hess.emplace_back(term.vars[j], term.vars[k], hx(j, k));
        }
      }
    }
    for (int i = 0; i < nx(); ++i) {
      grad[i] += mu * (1.0 - 1.0 / z[i]);
      hess.emplace_back(i, i, mu / (z[i] * z[i]));
    }
    if (p.has_slack) {
      const int i = nx();
      grad[i] -= mu / z[i];
      hess.emplace_back(i, i, mu / (z[i] * z[i]));
    }
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& z) const {
    const int m = static_cast<int>(p.equality.rows());
    Eigen::VectorXd r(m + (p.has_slack ? 1 : 0));
    r.head(m) = p.rhs - p.equality * z.head(nx());
    if (p.has_slack) {
      double v = -z[nx()];
      for (const auto& [col, c] : p.slack_row) v += c * z[col];
      r[m] = p.slack_rhs - v;
    }
    return r;
  }

  double max_step(const Eigen::VectorXd& z, const Eigen::VectorXd& dz) const {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (dz[i] < 0.0) alpha = std::min(alpha, -kBoundaryFraction * z[i] / dz[i]);
    }
    return alpha;
  }
};

}  // namespace

double barrier_objective(const BarrierProblem& problem, const Eigen::VectorXd& x) {
  State s{problem};
  return s.objective(x);
}

BarrierResult minimize_barrier(const BarrierProblem& problem, Eigen::VectorXd x0, double t0,
                               const BarrierOptions& options) {
  State state{problem};
  Kkt kkt(problem);
  Eigen::VectorXd z(kkt.n());
  z.head(problem.num_vars) = x0;
  if (problem.has_slack) z[problem.num_vars] = t0;

  BarrierResult result;
  Eigen::VectorXd grad;
  Eigen::VectorXd dz;
  std::vector<Eigen::Triplet<double>> hess;

  auto fail = [&](const std::string& why) {
    std::vector<double> best(z.data(), z.data() + problem.num_vars);
    throw NumericalFailure(why, std::move(best));
  };

  if (problem.num_vars == 0) {
    result.x = x0;
    result.slack = t0;
    return result;
  }

  double mu = options.mu_start;
  while (true) {
    state.mu = mu;
    while (true) {
      if (result.newton_steps >= options.max_newton) {
        fail("barrier solver exceeded " + std::to_string(options.max_newton) + " Newton steps");
      }
      ++result.newton_steps;
      state.derivatives(z, grad, hess);
      const Eigen::VectorXd r = state.residual(z);
      if (!kkt.solve(hess, grad, r, dz)) fail("singular Newton system");

      const double phi = state.merit(z);
      const double slope = grad.dot(dz);
      const double decrement = -slope;
      const bool converged = decrement <= 2.0 * options.decrement_tol * std::max(1.0, std::abs(phi));
      if (converged && r.lpNorm<Eigen::Infinity>() < 1e-9) break;

      double alpha = state.max_step(z, dz);
      bool accepted = false;
      while (alpha > 1e-16) {
        const Eigen::VectorXd trial = z + alpha * dz;
        const double phi_trial = state.merit(trial);
        if (std::isfinite(phi_trial) &&
            (phi_trial <= phi + kArmijo * alpha * std::min(slope, 0.0) ||
             (slope >= 0.0 && phi_trial <= phi))) {
          z = trial;
          accepted = true;
          break;
        }
        alpha *= kBacktrack;
      }
      if (!accepted) break;  // no further progress at this barrier weight
    }
    if (mu <= options.mu_final) break;
    mu = std::max(mu / options.mu_factor, options.mu_final);
  }

  result.x = z.head(problem.num_vars);
  result.slack = problem.has_slack ? z[problem.num_vars] : 0.0;
  result.objective = state.objective(z);
  return result;
}

}  // namespace mininfo

#include "mininfo/information.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mininfo/errors.hpp"

namespace mininfo {

namespace {

struct Moments {
  double total = 0.0;
  double q = 0.0;  // T^2 - sum y^2, accumulated without cancellation
  int positive = 0;
  bool infinite = false;
};

Moments moments(std::span<const double> y) {
  Moments m;
  for (double v : y) {
    if (std::isnan(v) || v < 0.0) throw DomainError("negative or NaN entry in information term");
    if (std::isinf(v)) m.infinite = true;
    m.total += v;
  }
  if (m.infinite || m.total == 0.0) return m;
  for (double v : y) {
    if (v > kSupportTolerance * m.total) ++m.positive;
    m.q += v * (m.total - v);
  }
  return m;
}

}  // namespace

ExtReal transition_information(std::span<const double> dist) {
  double sum = 0.0;
  for (double p : dist) {
    if (std::isnan(p) || p < 0.0) throw InvalidDistribution("negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidDistribution("distribution does not sum to one");
  double var = 0.0;
  int positive = 0;
  for (double p : dist) {
    var += p * (1.0 - p);
    if (p > kSupportTolerance) ++positive;
  }
  if (positive <= 1 || var <= 0.0) return ExtReal::infinity();
  return ExtReal(1.0 / var);
}

ExtReal perspective(std::span<const double> y) {
  const Moments m = moments(y);
  if (m.infinite) return ExtReal::infinity();
  if (m.total == 0.0) return ExtReal::zero();
  if (m.positive <= 1 || m.q <= 0.0) return ExtReal::infinity();
  return ExtReal(m.total * m.total * m.total / m.q);
}

Eigen::VectorXd perspective_gradient(std::span<const double> y) {
  const Moments m = moments(y);
  if (m.infinite || m.positive < 2 || m.q <= 0.0) {
    throw DomainError("gradient requested at an extended-value point");
  }
  const double t = m.total;
  const double q = m.q;
  Eigen::VectorXd g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    g[i] = 3.0 * t * t / q - 2.0 * t * t * t * (t - y[i]) / (q * q);
  }
  return g;
}

Eigen::MatrixXd perspective_hessian(std::span<const double> y) {
  const Moments m = moments(y);
  if (m.infinite || m.positive < 2 || m.q <= 0.0) {
    throw DomainError("Hessian requested at an extended-value point");
  }
  const double t = m.total;
  const double q = m.q;
  const int k = static_cast<int>(y.size());
  Eigen::VectorXd u(k);
  for (int i = 0; i < k; ++i) u[i] = t - y[i];
  const double q2 = q * q;
  const double q3 = q2 * q;
  Eigen::MatrixXd h(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double v = 6.0 * t / q - 6.0 * t * t * (u[i] + u[j]) / q2 + 8.0 * t * t * t * u[i] * u[j] / q3;
      if (i != j) v -= 2.0 * t * t * t / q2;
      h(i, j) = v;
    }
  }
  return h;
}

InfoTerm make_info_term(const Mdp& mdp, StateId s) {
  InfoTerm term;
  term.state = s;
  term.successor_order = mdp.successors(s);
  const auto& acts = mdp.actions[s];
  term.p_matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(term.successor_order.size()),
                                        static_cast<Eigen::Index>(acts.size()));
  for (std::size_t a = 0; a < acts.size(); ++a) {
    for (const auto& t : acts[a].successors) {
      auto it = std::lower_bound(term.successor_order.begin(), term.successor_order.end(), t.to);
      term.p_matrix(it - term.successor_order.begin(), static_cast<Eigen::Index>(a)) = t.prob;
    }
  }
  return term;
}

namespace {

std::vector<double> apply(const InfoTerm& term, std::span<const double> x) {
  if (static_cast<Eigen::Index>(x.size()) != term.p_matrix.cols()) {
    throw DomainError("residence vector does not match the action count");
  }
  std::vector<double> y(term.p_matrix.rows(), 0.0);
  for (Eigen::Index j = 0; j < term.p_matrix.cols(); ++j) {
    const double xj = x[j];
    if (std::isnan(xj) || xj < 0.0) throw DomainError("negative residence time");
    if (xj == 0.0) continue;
    for (Eigen::Index i = 0; i < term.p_matrix.rows(); ++i) {
      if (term.p_matrix(i, j) != 0.0) y[i] += term.p_matrix(i, j) * xj;
    }
  }
  return y;
}

}  // namespace

ExtReal info_term_value(const InfoTerm& term, std::span<const double> x) {
  return perspective(apply(term, x));
}

Eigen::VectorXd info_term_gradient(const InfoTerm& term, std::span<const double> x) {
  const auto y = apply(term, x);
  return term.p_matrix.transpose() * perspective_gradient(y);
}

ExtReal group_term_value(const GroupTerm& term, const std::vector<std::vector<double>>& x) {
  std::vector<double> y(term.rows.size(), 0.0);
  for (std::size_t r = 0; r < term.rows.size(); ++r) {
    for (const auto& c : term.rows[r]) y[r] += c.coeff * x[c.state][c.action];
  }
  const ExtReal g = perspective(y);
  if (term.weight == 0.0) return ExtReal::zero();
  if (g.is_infinite()) return g;
  return g.scaled(term.weight);
}

std::vector<ExtReal> induced_information(const Mdp& mdp, const MarkovChain& chain) {
  std::vector<ExtReal> out(mdp.num_states());
  std::vector<double> dist;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    dist.clear();
    for (const auto& t : chain.rows[s]) dist.push_back(t.prob);
    double sum = std::accumulate(dist.begin(), dist.end(), 0.0);
    for (double& p : dist) p /= sum;
    out[s] = transition_information(dist);
  }
  return out;
}

PolicyEvaluation evaluate_policy(const Mdp& mdp, const StationaryPolicy& policy) {
  PolicyEvaluation ev;
  ev.chain = induce_chain(mdp, policy);
  ev.classes = classify(ev.chain);
  ev.residence = residence_times(ev.chain, transient_set(ev.classes));
  ev.iota = induced_information(mdp, ev.chain);
  ev.contribution.assign(mdp.num_states(), ExtReal::zero());
  for (StateId w = 0; w < mdp.num_states(); ++w) {
    if (!mdp.is_observed(w)) continue;
    const ExtReal& x = ev.residence[w];
    if (x == ExtReal::zero()) continue;
    if (x.is_infinite() || ev.iota[w].is_infinite()) {
      ev.contribution[w] = ExtReal::infinity();
    } else {
      ev.contribution[w] = ExtReal(x.value() * ev.iota[w].value());
    }
    ev.total += ev.contribution[w];
  }
  ev.reach_prob = mdp.reach.targets.empty()
                      ? 0.0
                      : reach_probability(ev.chain, mdp.reach.targets, mdp.initial);
  return ev;
}

ExtReal expected_total_information(const Mdp& mdp, const StationaryPolicy& policy) {
  return evaluate_policy(mdp, policy).total;
}

ExtReal path_total_information(const Mdp& mdp, const StationaryPolicy& policy,
                               std::span<const StateId> path) {
  if (path.empty()) return ExtReal::zero();
  if (path.front() != mdp.initial) throw InvalidPath("path does not start at the initial state");
  const MarkovChain chain = induce_chain(mdp, policy);
  const auto iota = induced_information(mdp, chain);
  ExtReal total;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const StateId s = path[i];
    const StateId q = path[i + 1];
    if (s < 0 || s >= mdp.num_states() || q < 0 || q >= mdp.num_states()) {
      throw InvalidPath("state index out of range");
    }
    if (chain.prob(s, q) <= 0.0) {
      throw InvalidPath("impossible transition " + mdp.states[s] + " -> " + mdp.states[q]);
    }
    if (mdp.is_observed(s)) total += iota[s];
  }
  return total;
}

}  // namespace mininfo

#include "mininfo/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mininfo/errors.hpp"
#include "mininfo/graph.hpp"
#include "mininfo/linear_solve.hpp"

namespace mininfo {

namespace {

constexpr double kRowTolerance = 1e-9;

bool is_absorbing(const Mdp& mdp, StateId s) {
  for (const auto& a : mdp.actions[s]) {
    if (a.successors.size() != 1 || a.successors.front().to != s) return false;
  }
  return !mdp.actions[s].empty();
}

Adjacency support_graph(const MarkovChain& chain) {
  Adjacency g(chain.rows.size());
  for (std::size_t s = 0; s < chain.rows.size(); ++s) {
    for (const auto& t : chain.rows[s]) {
      if (t.prob > 0.0) g[s].push_back(t.to);
    }
  }
  return g;
}

}  // namespace

std::optional<StateId> Mdp::find(std::string_view name) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == name) return static_cast<StateId>(i);
  }
  return std::nullopt;
}

StateId Mdp::index_of(std::string_view name) const {
  if (auto s = find(name)) return *s;
  throw InvalidMdp("unknown state '" + std::string(name) + "'");
}

int Mdp::action_index(StateId s, std::string_view name) const {
  const auto& list = actions[s];
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<char> Mdp::target_mask() const {
  std::vector<char> mask(states.size(), 0);
  for (StateId t : reach.targets) mask[t] = 1;
  return mask;
}

std::vector<StateId> Mdp::successors(StateId s) const {
  std::vector<StateId> out;
  for (const auto& a : actions[s]) {
    for (const auto& t : a.successors) {
      if (t.prob > 0.0) out.push_back(t.to);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<StateId> Mdp::observed_states() const {
  std::vector<StateId> out;
  for (int s = 0; s < num_states(); ++s) {
    if (observed[s]) out.push_back(s);
  }
  return out;
}

int Mdp::num_state_actions() const {
  int n = 0;
  for (const auto& list : actions) n += static_cast<int>(list.size());
  return n;
}

std::vector<Violation> validate(const Mdp& mdp) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  const int n = mdp.num_states();

  if (mdp.actions.size() != mdp.states.size() || mdp.observed.size() != mdp.states.size()) {
    out.push_back({K::kShapeMismatch, "", "", "per-state arrays disagree with the state list"});
    return out;
  }
  if (mdp.initial < 0 || mdp.initial >= n) {
    out.push_back({K::kInitialMissing, "", "", "initial state is not a member of states"});
  }
  if (!(mdp.reach.threshold >= 0.0 && mdp.reach.threshold <= 1.0)) {
    out.push_back({K::kThresholdRange, "", "", "reach threshold outside [0,1]"});
  }

  for (StateId s = 0; s < n; ++s) {
    const auto& name = mdp.states[s];
    if (mdp.actions[s].empty()) {
      out.push_back({K::kNoActions, name, "", "state has no enabled actions"});
    }
    std::set<std::string> seen;
    for (const auto& a : mdp.actions[s]) {
      if (!seen.insert(a.name).second) {
        out.push_back({K::kDuplicateAction, name, a.name, "action listed twice"});
      }
      double sum = 0.0;
      bool bad_index = false;
      for (const auto& t : a.successors) {
        if (t.to < 0 || t.to >= n) bad_index = true;
        if (t.prob < 0.0) {
          out.push_back({K::kNegativeProbability, name, a.name, "negative transition probability"});
        }
        sum += t.prob;
      }
      if (bad_index) {
        out.push_back({K::kBadStateIndex, name, a.name, "successor outside the state set"});
      }
      if (std::abs(sum - 1.0) > kRowTolerance) {
        std::ostringstream msg;
        msg << "transition probabilities sum to " << sum;
        out.push_back({K::kRowSum, name, a.name, msg.str()});
      }
    }
  }

  for (StateId t : mdp.reach.targets) {
    if (t < 0 || t >= n) {
      out.push_back({K::kBadStateIndex, "", "", "reach target outside the state set"});
      continue;
    }
    if (mdp.observed[t]) {
      out.push_back({K::kObservedTarget, mdp.states[t], "", "reach target is observed"});
    }
    if (!is_absorbing(mdp, t)) {
      out.push_back({K::kTargetNotAbsorbing, mdp.states[t], "", "reach target is not absorbing"});
    }
  }
  return out;
}

std::vector<std::string> warnings(const Mdp& mdp) {
  std::vector<std::string> out;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (mdp.observed[s] && mdp.successors(s).size() == 1) {
      out.push_back("observed state '" + mdp.states[s] +
                    "' has a single successor; any visit leaks infinite information");
    }
  }
  return out;
}

void require_valid(const Mdp& mdp) {
  const auto violations = validate(mdp);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid MDP:";
  for (const auto& v : violations) {
    msg << "\n  " << v.message;
    if (!v.state.empty()) msg << " [state " << v.state;
    if (!v.action.empty()) msg << ", action " << v.action;
    if (!v.state.empty()) msg << "]";
  }
  throw InvalidMdp(msg.str());
}

StationaryPolicy StationaryPolicy::uniform(const Mdp& mdp) {
  StationaryPolicy p;
  p.prob.resize(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    const auto k = mdp.actions[s].size();
    p.prob[s].assign(k, k ? 1.0 / static_cast<double>(k) : 0.0);
  }
  return p;
}

StationaryPolicy StationaryPolicy::deterministic(const Mdp& mdp, std::span<const int> choice) {
  StationaryPolicy p;
  p.prob.resize(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    p.prob[s].assign(mdp.actions[s].size(), 0.0);
    p.prob[s].at(choice[s]) = 1.0;
  }
  return p;
}

void StationaryPolicy::set(const Mdp& mdp, StateId s,
                           std::initializer_list<std::pair<std::string_view, double>> dist) {
  if (prob.size() != mdp.states.size()) prob.resize(mdp.states.size());
  prob[s].assign(mdp.actions[s].size(), 0.0);
  for (const auto& [name, p] : dist) {
    const int a = mdp.action_index(s, name);
    if (a < 0) {
      throw InvalidPolicy("action '" + std::string(name) + "' not enabled at " + mdp.states[s]);
    }
    prob[s][a] = p;
  }
}

double StationaryPolicy::at(const Mdp& mdp, StateId s, std::string_view action) const {
  const int a = mdp.action_index(s, action);
  return a < 0 ? 0.0 : prob[s][a];
}

void check_policy(const Mdp& mdp, const StationaryPolicy& policy) {
  if (policy.prob.size() != mdp.states.size()) {
    throw InvalidPolicy("policy covers " + std::to_string(policy.prob.size()) + " states, MDP has " +
                        std::to_string(mdp.states.size()));
  }
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    const auto& row = policy.prob[s];
    if (row.size() != mdp.actions[s].size()) {
      throw InvalidPolicy("policy row at " + mdp.states[s] + " assigns mass to disabled actions");
    }
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw InvalidPolicy("negative policy probability at " + mdp.states[s]);
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTolerance) {
      throw InvalidPolicy("policy row at " + mdp.states[s] + " sums to " + std::to_string(sum));
    }
  }
}

double MarkovChain::prob(StateId from, StateId to) const {
  for (const auto& t : rows[from]) {
    if (t.to == to) return t.prob;
  }
  return 0.0;
}

MarkovChain induce_chain(const Mdp& mdp, const StationaryPolicy& policy) {
  check_policy(mdp, policy);
  MarkovChain chain;
  chain.initial = mdp.initial;
  chain.rows.resize(mdp.num_states());
  std::vector<double> dense(mdp.num_states(), 0.0);
  std::vector<StateId> touched;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    touched.clear();
    for (std::size_t a = 0; a < mdp.actions[s].size(); ++a) {
      const double w = policy.prob[s][a];
      if (w == 0.0) continue;
      for (const auto& t : mdp.actions[s][a].successors) {
        if (dense[t.to] == 0.0) touched.push_back(t.to);
        dense[t.to] += w * t.prob;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (StateId q : touched) {
      if (dense[q] > 0.0) chain.rows[s].push_back({q, dense[q]});
      dense[q] = 0.0;
    }
  }
  return chain;
}

ChainClasses classify(const MarkovChain& chain) {
  const int n = chain.num_states();
  const Adjacency g = support_graph(chain);
  const auto scc = strongly_connected_components(g);

  std::vector<char> bottom(scc.count, 1);
  for (int s = 0; s < n; ++s) {
    for (int q : g[s]) {
      if (scc.component[q] != scc.component[s]) bottom[scc.component[s]] = 0;
    }
  }
  ChainClasses out;
  out.component = scc.component;
  out.recurrent.resize(n);
  for (int s = 0; s < n; ++s) out.recurrent[s] = bottom[scc.component[s]];
  const int init[] = {chain.initial};
  out.reachable = forward_reachable(g, init);
  return out;
}

std::vector<char> transient_set(const ChainClasses& classes) {
  std::vector<char> out(classes.reachable.size(), 0);
  for (std::size_t s = 0; s < out.size(); ++s) {
    out[s] = classes.reachable[s] && !classes.recurrent[s];
  }
  return out;
}

std::vector<double> reach_probabilities(const MarkovChain& chain, std::span<const StateId> targets) {
  const int n = chain.num_states();
  std::vector<double> out(n, 0.0);
  std::vector<char> is_target(n, 0);
  for (StateId t : targets) is_target[t] = 1;

  // Positive probability iff some target is reachable on the support graph.
  const Adjacency back = transpose(support_graph(chain));
  std::vector<int> sources(targets.begin(), targets.end());
  const auto can_reach = forward_reachable(back, sources);

  std::vector<int> index(n, -1);
  std::vector<StateId> unknowns;
  for (int s = 0; s < n; ++s) {
    if (is_target[s]) {
      out[s] = 1.0;
    } else if (can_reach[s]) {
      index[s] = static_cast<int>(unknowns.size());
      unknowns.push_back(s);
    }
  }
  if (unknowns.empty()) return out;

  const auto m = static_cast<Eigen::Index>(unknowns.size());
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    trip.emplace_back(i, i, 1.0);
    for (const auto& t : chain.rows[unknowns[i]]) {
      if (is_target[t.to]) {
        rhs[i] += t.prob;
      } else if (index[t.to] >= 0) {
        trip.emplace_back(i, index[t.to], -t.prob);
      }
    }
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trip.begin(), trip.end());
  LinearSystem system(a);
  if (!system.ok()) throw Error("reach_probabilities: singular system after graph preprocessing");
  const Eigen::VectorXd sol = system.solve(rhs);
  for (Eigen::Index i = 0; i < m; ++i) out[unknowns[i]] = std::clamp(sol[i], 0.0, 1.0);
  return out;
}

double reach_probability(const MarkovChain& chain, std::span<const StateId> targets, StateId from) {
  return reach_probabilities(chain, targets)[from];
}

std::vector<ExtReal> residence_times(const MarkovChain& chain, std::span<const char> transient) {
  const int n = chain.num_states();
  const ChainClasses classes = classify(chain);
  std::vector<ExtReal> out(n, ExtReal::zero());

  std::vector<int> index(n, -1);
  std::vector<StateId> unknowns;
  for (int s = 0; s < n; ++s) {
    const bool listed = s < static_cast<int>(transient.size()) && transient[s];
    if (listed) {
      if (classes.recurrent[s]) {
        throw RecurrenceMisclassification("state " + std::to_string(s) +
                                          " listed as transient is recurrent");
      }
      index[s] = static_cast<int>(unknowns.size());
      unknowns.push_back(s);
    } else if (classes.reachable[s]) {
      if (!classes.recurrent[s]) {
        throw RecurrenceMisclassification("reachable transient state " + std::to_string(s) +
                                          " missing from the transient set");
      }
      out[s] = ExtReal::infinity();
    }
  }
  if (unknowns.empty()) return out;

  // Every listed state must feed only listed or recurrent states; a reachable
  // transient state outside the list was rejected above.
  const auto m = static_cast<Eigen::Index>(unknowns.size());
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    trip.emplace_back(i, i, 1.0);
    if (unknowns[i] == chain.initial) rhs[i] = 1.0;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (const auto& t : chain.rows[unknowns[j]]) {
      if (index[t.to] >= 0) trip.emplace_back(index[t.to], j, -t.prob);
    }
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trip.begin(), trip.end());
  LinearSystem system(a);
  if (!system.ok()) {
    throw RecurrenceMisclassification("residence-time system is singular; transient set contains a recurrent class");
  }
  const Eigen::VectorXd x = system.solve(rhs);
  for (Eigen::Index i = 0; i < m; ++i) out[unknowns[i]] = ExtReal(std::max(0.0, x[i]));
  return out;
}

}  // namespace mininfo

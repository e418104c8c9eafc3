#include "mininfo/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "mininfo/errors.hpp"
#include "mininfo/information.hpp"
#include "mininfo/linear_solve.hpp"

namespace mininfo {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// States inside a recurrent class of `chain` that contains no observed state.
std::vector<char> silent_absorbing(const Mdp& mdp, const MarkovChain& chain) {
  const auto classes = classify(chain);
  const int n = mdp.num_states();
  std::vector<char> has_observed(n, 0);
  for (StateId s = 0; s < n; ++s) {
    if (classes.recurrent[s] && mdp.is_observed(s)) has_observed[classes.component[s]] = 1;
  }
  std::vector<char> out(n, 0);
  for (StateId s = 0; s < n; ++s) {
    out[s] = classes.recurrent[s] && !has_observed[classes.component[s]];
  }
  return out;
}

using Stepper = std::function<StateId(StateId, bool&, std::mt19937_64&)>;

std::vector<PathSample> run(const Mdp& mdp, const std::vector<char>& absorbing,
                            const Stepper& step, const SimulationOptions& options) {
  const int n = options.paths;
  const int horizon = options.horizon > 0 ? options.horizon : 10 * mdp.num_states();
  std::vector<PathSample> out(std::max(n, 0));
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      std::mt19937_64 rng(path_seed(options.seed, static_cast<std::uint64_t>(i)));
      PathSample& path = out[i];
      StateId s = mdp.initial;
      bool switched = false;
      path.states.push_back(s);
      int steps = 0;
      while (true) {
        if (absorbing[s] || switched) break;
        if (steps == horizon) {
          path.truncated = true;
          break;
        }
        s = step(s, switched, rng);
        path.states.push_back(s);
        ++steps;
      }
    }
  };
  int threads = options.threads > 0 ? options.threads
                                     : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    work(0, n);
    return out;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int b = t * chunk;
    const int e = std::min(n, b + chunk);
    if (b < e) pool.emplace_back(work, b, e);
  }
  for (auto& th : pool) th.join();
  return out;
}

StateId move(const Mdp& mdp, StateId s, int a, double u) {
  const auto& succ = mdp.actions[s][a].successors;
  double acc = 0.0;
  for (const auto& t : succ) {
    acc += t.prob;
    if (u < acc) return t.to;
  }
  return succ.back().to;
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix(splitmix(seed) ^ (index * 0xd1342543de82ef95ULL + 1));
}

std::vector<PathSample> simulate_paths(const Mdp& mdp, const StationaryPolicy& policy,
                                       const SimulationOptions& options) {
  check_policy(mdp, policy);
  const auto chain = induce_chain(mdp, policy);
  const auto absorbing = silent_absorbing(mdp, chain);
  Stepper step = [&](StateId s, bool&, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int a = sample_index(policy.prob[s], unif(rng));
    return move(mdp, s, a, unif(rng));
  };
  return run(mdp, absorbing, step, options);
}

std::vector<PathSample> simulate_paths(const Mdp& mdp, const SwitchPolicy& policy,
                                       const SimulationOptions& options) {
  check_policy(mdp, policy.policy);
  check_policy(mdp, policy.stay);
  const auto chain = induce_chain(mdp, policy.policy);
  const auto absorbing = silent_absorbing(mdp, chain);
  Stepper step = [&](StateId s, bool& switched, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto r = act(policy, s, switched, [&] { return unif(rng); });
    switched = r.switched;
    return move(mdp, s, r.action, unif(rng));
  };
  return run(mdp, absorbing, step, options);
}

EstimationReport estimate(std::span<const PathSample> paths, const Mdp& mdp) {
  EstimationReport report;
  std::vector<int> slot(mdp.num_states(), -1);
  for (StateId w = 0; w < mdp.num_states(); ++w) {
    if (!mdp.is_observed(w)) continue;
    slot[w] = static_cast<int>(report.states.size());
    StateEstimate e;
    e.state = w;
    e.successors = mdp.successors(w);
    e.hits.assign(e.successors.size(), 0);
    report.states.push_back(std::move(e));
  }
  report.num_paths = static_cast<int>(paths.size());
  for (const auto& p : paths) {
    if (p.truncated) ++report.truncated_paths;
    for (std::size_t i = 0; i + 1 < p.states.size(); ++i) {
      const int k = slot[p.states[i]];
      if (k < 0) continue;
      auto& e = report.states[k];
      auto it = std::lower_bound(e.successors.begin(), e.successors.end(), p.states[i + 1]);
      if (it == e.successors.end() || *it != p.states[i + 1]) {
        throw InvalidPath("path leaves Succ(" + mdp.states[e.state] + ")");
      }
      ++e.hits[it - e.successors.begin()];
      ++e.count;
    }
  }
  for (auto& e : report.states) {
    report.total_count += e.count;
    e.estimate.assign(e.successors.size(), 0.0);
    e.no_sample = e.count == 0;
    if (e.no_sample) continue;
    for (std::size_t j = 0; j < e.hits.size(); ++j) {
      e.estimate[j] = static_cast<double>(e.hits[j]) / static_cast<double>(e.count);
    }
  }
  return report;
}

void mse_report(EstimationReport& report, const Mdp& mdp, const StationaryPolicy& policy,
                NoSample no_sample) {
  const auto chain = induce_chain(mdp, policy);
  report.total_mse = 0.0;
  report.weighted_mse = 0.0;
  for (auto& e : report.states) {
    e.truth.assign(e.successors.size(), 0.0);
    for (std::size_t j = 0; j < e.successors.size(); ++j) e.truth[j] = chain.prob(e.state, e.successors[j]);
    std::vector<double> est = e.estimate;
    if (e.no_sample) {
      if (no_sample == NoSample::kExclude) {
        e.mse = 0.0;
        continue;
      }
      std::fill(est.begin(), est.end(), 1.0 / static_cast<double>(est.size()));
    }
    e.mse = 0.0;
    for (std::size_t j = 0; j < est.size(); ++j) e.mse += (est[j] - e.truth[j]) * (est[j] - e.truth[j]);
    report.total_mse += e.mse;
    if (report.total_count > 0) {
      report.weighted_mse += static_cast<double>(e.count) / static_cast<double>(report.total_count) * e.mse;
    }
  }
}

CramerRao cramer_rao_bounds(const Mdp& mdp, const StationaryPolicy& policy) {
  check_policy(mdp, policy);
  const auto ev = evaluate_policy(mdp, policy);
  const int n = mdp.num_states();
  CramerRao out;
  out.expected_information = ev.total;

  // Diagonal of the fundamental matrix over the transient states gives the
  // return behaviour: Pr(Reach[w]) = G(s0,w) / G(w,w).
  std::vector<int> index(n, -1);
  int m = 0;
  for (StateId s = 0; s < n; ++s) {
    if (ev.classes.reachable[s] && !ev.classes.recurrent[s]) index[s] = m++;
  }
  std::vector<StateId> observed_transient;
  for (StateId w = 0; w < n; ++w) {
    if (mdp.is_observed(w) && index[w] >= 0) observed_transient.push_back(w);
  }
  std::vector<double> diag(n, 1.0);
  if (!observed_transient.empty()) {
    std::vector<Eigen::Triplet<double>> trips;
    for (StateId s = 0; s < n; ++s) {
      if (index[s] < 0) continue;
      trips.emplace_back(index[s], index[s], 1.0);
      for (const auto& t : ev.chain.rows[s]) {
        if (index[t.to] >= 0) trips.emplace_back(index[s], index[t.to], -t.prob);
      }
    }
    Eigen::SparseMatrix<double> mat(m, m);
    mat.setFromTriplets(trips.begin(), trips.end());
    LinearSystem sys(mat);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(observed_transient.size()));
    for (std::size_t k = 0; k < observed_transient.size(); ++k) rhs(index[observed_transient[k]], k) = 1.0;
    const Eigen::MatrixXd g = sys.solve_columns(rhs);
    for (std::size_t k = 0; k < observed_transient.size(); ++k) {
      diag[observed_transient[k]] = g(index[observed_transient[k]], k);
    }
  }

  // Entry probability of every recurrent class.
  std::vector<double> class_reach(n, 0.0);
  for (StateId s = 0; s < n; ++s) {
    if (index[s] < 0) continue;
    const double xs = ev.residence[s].value();
    for (const auto& t : ev.chain.rows[s]) {
      if (ev.classes.recurrent[t.to]) class_reach[ev.classes.component[t.to]] += xs * t.prob;
    }
  }
  if (ev.classes.recurrent[mdp.initial]) class_reach[ev.classes.component[mdp.initial]] = 1.0;

  double min_reach = 1.0;
  int count = 0;
  for (StateId w = 0; w < n; ++w) {
    if (!mdp.is_observed(w)) continue;
    ++count;
    StateBound b;
    b.state = w;
    b.iota = ev.iota[w];
    b.residence = ev.residence[w].to_double();
    if (!ev.classes.reachable[w]) {
      b.reach = 0.0;
    } else if (ev.classes.recurrent[w]) {
      b.reach = std::min(1.0, class_reach[ev.classes.component[w]]);
    } else {
      b.reach = std::min(1.0, b.residence / diag[w]);
    }
    if (b.residence == 0.0) {
      b.unvisited = true;
      b.bound = 0.0;
    } else if (std::isinf(b.residence) || b.iota.is_infinite()) {
      b.bound = 0.0;
    } else {
      b.bound = b.reach * b.reach / (b.residence * b.iota.value());
    }
    out.sum += b.bound;
    min_reach = std::min(min_reach, b.reach);
    out.states.push_back(b);
  }
  if (count > 0 && out.expected_information.is_finite() && out.expected_information.value() > 0.0) {
    out.corollary = min_reach * min_reach * count * count / out.expected_information.value();
  }
  return out;
}

CramerRao cramer_rao_bounds(const Mdp& mdp, const SwitchPolicy& policy) {
  const auto modified = build_modified_mdp(mdp);
  const auto lifted = lift_switch_policy(modified, policy);
  CramerRao full = cramer_rao_bounds(modified.mdp, lifted);
  // Duplicates are unobserved, so the observed states coincide.
  return full;
}

void attach_bounds(EstimationReport& report, const CramerRao& bounds) {
  for (auto& e : report.states) {
    for (const auto& b : bounds.states) {
      if (b.state != e.state) continue;
      e.residence = b.residence;
      e.iota = b.iota;
      e.reach = b.reach;
      e.bound = b.bound;
      e.unvisited = b.unvisited;
    }
  }
  report.bound_sum = bounds.sum;
  report.corollary_bound = bounds.corollary;
  report.expected_information = bounds.expected_information;
}

namespace {

Json number(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

}  // namespace

Json report_to_json(const Mdp& mdp, const EstimationReport& report) {
  Json states = Json::array();
  for (const auto& e : report.states) {
    Json est = Json::object();
    Json truth = Json::object();
    for (std::size_t j = 0; j < e.successors.size(); ++j) {
      est[mdp.states[e.successors[j]]] = e.estimate[j];
      if (!e.truth.empty()) truth[mdp.states[e.successors[j]]] = e.truth[j];
    }
    states.push_back({{"state", mdp.states[e.state]},
                      {"count", e.count},
                      {"no_sample", e.no_sample},
                      {"estimate", est},
                      {"truth", truth},
                      {"mse", e.mse},
                      {"residence", number(e.residence)},
                      {"iota", ext_real_to_json(e.iota)},
                      {"reach_prob", e.reach},
                      {"bound", e.bound},
                      {"unvisited", e.unvisited}});
  }
  return {{"paths", report.num_paths},
          {"truncated_paths", report.truncated_paths},
          {"total_count", report.total_count},
          {"total_mse", report.total_mse},
          {"weighted_mse", report.weighted_mse},
          {"bound_sum", report.bound_sum},
          {"corollary_bound", report.corollary_bound},
          {"expected_information", ext_real_to_json(report.expected_information)},
          {"note",
           "bounds assume the observer knows every other state's transitions; the sample-mean "
           "estimator does not use that knowledge and need not respect them"},
          {"states", states}};
}

std::string report_to_csv(const Mdp& mdp, const EstimationReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "state,count,mse,bound\n";
  for (const auto& e : report.states) {
    out << mdp.states[e.state] << ',' << e.count << ',' << e.mse << ',' << e.bound << '\n';
  }
  return out.str();
}

Json bounds_to_json(const Mdp& mdp, const CramerRao& bounds) {
  Json states = Json::array();
  for (const auto& b : bounds.states) {
    states.push_back({{"state", mdp.states[b.state]},
                      {"residence", number(b.residence)},
                      {"iota", ext_real_to_json(b.iota)},
                      {"reach_prob", b.reach},
                      {"bound", b.bound},
                      {"unvisited", b.unvisited}});
  }
  return {{"bound_sum", bounds.sum},
          {"corollary_bound", bounds.corollary},
          {"expected_information", ext_real_to_json(bounds.expected_information)},
          {"states", states}};
}

}  // namespace mininfo

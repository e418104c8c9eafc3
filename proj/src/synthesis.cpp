#include "mininfo/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "mininfo/barrier_solver.hpp"
#include "mininfo/errors.hpp"
#include "mininfo/linear_solve.hpp"
#include "mininfo/reachability.hpp"

namespace mininfo {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kInfiniteInformation: return "infinite_information";
  }
  return "unknown";
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kClosed: return "closed";
    case Mode::kExhaustive: return "exhaustive";
    case Mode::kSwitch: return "switch";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(const std::string& text) {
  if (text == "closed") return Mode::kClosed;
  if (text == "exhaustive") return Mode::kExhaustive;
  if (text == "switch") return Mode::kSwitch;
  return std::nullopt;
}

double OccupationSolution::residence(StateId s) const {
  double sum = 0.0;
  for (double v : x[s]) sum += v;
  return sum;
}

double OccupationSolution::flow_residual(const Mdp& mdp) const {
  const int n = mdp.num_states();
  std::vector<double> balance(n, 0.0);
  for (StateId s = 0; s < n; ++s) {
    if (c_end[s]) continue;
    for (std::size_t a = 0; a < x[s].size(); ++a) {
      balance[s] += x[s][a];
      for (const auto& t : mdp.actions[s][a].successors) balance[t.to] -= x[s][a] * t.prob;
    }
  }
  balance[mdp.initial] -= 1.0;
  double worst = 0.0;
  for (StateId s = 0; s < n; ++s) {
    if (!c_end[s]) worst = std::max(worst, std::abs(balance[s]));
  }
  return worst;
}

namespace {

constexpr double kTight = 1e-9;
constexpr double kZeroResidence = 1e-15;

bool any_allowed(const std::vector<char>& row) {
  return std::any_of(row.begin(), row.end(), [](char c) { return c != 0; });
}

void disallow_all(std::vector<char>& row, bool& changed) {
  for (char& c : row) {
    if (c) {
      c = 0;
      changed = true;
    }
  }
}

/// Removes every action that must carry zero flow in any finite-objective
/// solution, until nothing changes.
void prune(const Mdp& mdp, std::span<const char> c_end, const std::vector<GroupTerm>& groups,
           ActionMask& allowed) {
  const int n = mdp.num_states();
  bool changed = true;
  while (changed) {
    changed = false;

    for (StateId w = 0; w < n; ++w) {
      if (c_end[w] || !mdp.is_observed(w) || !any_allowed(allowed[w])) continue;
      std::vector<StateId> live;
      for (std::size_t a = 0; a < allowed[w].size(); ++a) {
        if (!allowed[w][a]) continue;
        for (const auto& t : mdp.actions[w][a].successors) live.push_back(t.to);
      }
      std::sort(live.begin(), live.end());
      live.erase(std::unique(live.begin(), live.end()), live.end());
      if (live.size() <= 1) disallow_all(allowed[w], changed);
    }

    for (const auto& g : groups) {
      if (g.weight <= 0.0) continue;
      int live_rows = 0;
      for (const auto& row : g.rows) {
        bool live = false;
        for (const auto& c : row) live = live || (c.coeff > 0.0 && allowed[c.state][c.action]);
        live_rows += live ? 1 : 0;
      }
      if (live_rows == 1) {
        for (const auto& row : g.rows) {
          for (const auto& c : row) {
            if (c.coeff > 0.0 && allowed[c.state][c.action]) {
              allowed[c.state][c.action] = 0;
              changed = true;
            }
          }
        }
      }
    }

    const auto good = almost_sure_reach(mdp, allowed, c_end, c_end);
    for (StateId s = 0; s < n; ++s) {
      if (c_end[s]) continue;
      if (!good[s]) {
        disallow_all(allowed[s], changed);
        continue;
      }
      for (std::size_t a = 0; a < allowed[s].size(); ++a) {
        if (!allowed[s][a]) continue;
        for (const auto& t : mdp.actions[s][a].successors) {
          if (!good[t.to] && !c_end[t.to]) {
            allowed[s][a] = 0;
            changed = true;
            break;
          }
        }
      }
    }

    std::vector<char> seen(n, 0);
    std::deque<StateId> queue{mdp.initial};
    seen[mdp.initial] = 1;
    while (!queue.empty()) {
      const StateId s = queue.front();
      queue.pop_front();
      if (c_end[s]) continue;
      for (std::size_t a = 0; a < allowed[s].size(); ++a) {
        if (!allowed[s][a]) continue;
        for (const auto& t : mdp.actions[s][a].successors) {
          if (!seen[t.to]) {
            seen[t.to] = 1;
            queue.push_back(t.to);
          }
        }
      }
    }
    for (StateId s = 0; s < n; ++s) {
      if (!seen[s] && !c_end[s]) disallow_all(allowed[s], changed);
    }
  }
}

/// Residence times of the policy `pi` (rows over all actions, zero on
/// disallowed ones) with C_end terminal. Empty on a singular system.
std::vector<std::vector<double>> policy_flow(const Mdp& mdp, std::span<const char> c_end,
                                             const ActionMask& allowed,
                                             const std::vector<std::vector<double>>& pi) {
  const int n = mdp.num_states();
  std::vector<int> index(n, -1);
  int m = 0;
  for (StateId s = 0; s < n; ++s) {
    if (!c_end[s] && any_allowed(allowed[s])) index[s] = m++;
  }
  std::vector<std::vector<double>> x(n);
  for (StateId s = 0; s < n; ++s) x[s].assign(mdp.actions[s].size(), 0.0);
  if (index[mdp.initial] < 0) return x;

  std::vector<Eigen::Triplet<double>> trips;
  for (StateId s = 0; s < n; ++s) {
    if (index[s] < 0) continue;
    trips.emplace_back(index[s], index[s], 1.0);
    for (std::size_t a = 0; a < pi[s].size(); ++a) {
      if (pi[s][a] == 0.0) continue;
      for (const auto& t : mdp.actions[s][a].successors) {
        if (index[t.to] >= 0) trips.emplace_back(index[t.to], index[s], -pi[s][a] * t.prob);
      }
    }
  }
  Eigen::SparseMatrix<double> mat(m, m);
  mat.setFromTriplets(trips.begin(), trips.end());
  LinearSystem sys(mat);
  if (!sys.ok()) return {};
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs[index[mdp.initial]] = 1.0;
  const Eigen::VectorXd xs = sys.solve(rhs);
  for (StateId s = 0; s < n; ++s) {
    if (index[s] < 0) continue;
    const double v = std::max(0.0, xs[index[s]]);
    for (std::size_t a = 0; a < pi[s].size(); ++a) x[s][a] = pi[s][a] * v;
  }
  return x;
}

double reach_of(const Mdp& mdp, std::span<const char> goal,
                const std::vector<std::vector<double>>& x) {
  double r = 0.0;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < x[s].size(); ++a) {
      if (x[s][a] == 0.0) continue;
      for (const auto& t : mdp.actions[s][a].successors) {
        if (goal[t.to]) r += x[s][a] * t.prob;
      }
    }
  }
  return r;
}

void score(const Mdp& mdp, const SolveOptions& options, OccupationSolution& sol) {
  sol.information = ExtReal::zero();
  for (StateId w = 0; w < mdp.num_states(); ++w) {
    if (sol.c_end[w] || !mdp.is_observed(w)) continue;
    sol.information += info_term_value(make_info_term(mdp, w), sol.x[w]);
  }
  sol.objective = sol.information;
  for (const auto& g : options.groups) sol.objective += group_term_value(g, sol.x);
}

OccupationSolution solve_once(const Mdp& mdp, std::span<const char> c_end,
                              const SolveOptions& options, const std::vector<char>& forbidden) {
  const int n = mdp.num_states();
  const double nu = mdp.reach.threshold;
  OccupationSolution sol;
  // stays infinite unless a feasible point gets scored
  sol.information = sol.objective = ExtReal::infinity();
  sol.c_end.assign(c_end.begin(), c_end.end());
  sol.x.resize(n);
  sol.variable.resize(n);
  for (StateId s = 0; s < n; ++s) {
    sol.x[s].assign(mdp.actions[s].size(), 0.0);
    sol.variable[s].assign(mdp.actions[s].size(), 0);
  }
  const auto targets = mdp.target_mask();
  std::vector<char> goal(n, 0);
  for (StateId s = 0; s < n; ++s) goal[s] = targets[s] && c_end[s];

  if (c_end[mdp.initial]) {
    sol.reach_prob = targets[mdp.initial] ? 1.0 : 0.0;
    sol.status = (nu > 0.0 && sol.reach_prob < nu - kTight) ? SolveStatus::kInfiniteInformation
                                                             : SolveStatus::kOptimal;
    if (sol.status == SolveStatus::kOptimal) score(mdp, options, sol);
    return sol;
  }

  ActionMask allowed(n);
  for (StateId s = 0; s < n; ++s) {
    allowed[s].assign(mdp.actions[s].size(), (c_end[s] || forbidden[s]) ? 0 : 1);
  }

  bool constrained = false;
  double r_max = 0.0;
  std::vector<std::vector<double>> x_max;
  while (true) {
    prune(mdp, c_end, options.groups, allowed);
    if (!any_allowed(allowed[mdp.initial])) {
      sol.status = SolveStatus::kInfiniteInformation;
      return sol;
    }
    if (nu <= 0.0) break;

    const auto mr = max_reach(mdp, allowed, c_end, goal);
    std::vector<std::vector<double>> pi(n);
    for (StateId s = 0; s < n; ++s) {
      pi[s].assign(mdp.actions[s].size(), 0.0);
      if (!c_end[s] && any_allowed(allowed[s]) && mr.choice[s] >= 0) pi[s][mr.choice[s]] = 1.0;
    }
    x_max = policy_flow(mdp, c_end, allowed, pi);
    r_max = x_max.empty() ? mr.value[mdp.initial] : reach_of(mdp, goal, x_max);
    if (std::max(r_max, mr.value[mdp.initial]) < nu - kTight) {
      sol.status = SolveStatus::kInfiniteInformation;
      return sol;
    }
    if (x_max.empty()) {
      throw NumericalFailure("maximum-reach policy does not leave the transient states", {});
    }
    if (r_max - nu > kTight) {
      constrained = true;
      break;
    }
    // The requirement is met only on the face of reach-optimal actions.
    bool changed = false;
    for (StateId s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < allowed[s].size(); ++a) {
        if (!allowed[s][a]) continue;
        double v = 0.0;
        for (const auto& t : mdp.actions[s][a].successors) v += t.prob * mr.value[t.to];
        if (mr.value[s] - v > kTight) {
          allowed[s][a] = 0;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  // Variables.
  std::vector<std::vector<int>> var(n);
  std::vector<std::pair<StateId, int>> vars;
  std::vector<int> row_of(n, -1);
  int rows = 0;
  for (StateId s = 0; s < n; ++s) {
    var[s].assign(mdp.actions[s].size(), -1);
    for (std::size_t a = 0; a < allowed[s].size(); ++a) {
      if (!allowed[s][a]) continue;
      var[s][a] = static_cast<int>(vars.size());
      vars.emplace_back(s, static_cast<int>(a));
      sol.variable[s][a] = 1;
    }
    if (any_allowed(allowed[s])) row_of[s] = rows++;
  }

  BarrierProblem problem;
  problem.num_vars = static_cast<int>(vars.size());
  std::vector<Eigen::Triplet<double>> trips;
  for (int j = 0; j < problem.num_vars; ++j) {
    const auto [s, a] = vars[j];
    trips.emplace_back(row_of[s], j, 1.0);
    for (const auto& t : mdp.actions[s][a].successors) {
      if (row_of[t.to] >= 0) trips.emplace_back(row_of[t.to], j, -t.prob);
    }
  }
  problem.equality.resize(rows, problem.num_vars);
  problem.equality.setFromTriplets(trips.begin(), trips.end());
  problem.rhs = Eigen::VectorXd::Zero(rows);
  problem.rhs[row_of[mdp.initial]] = 1.0;

  if (constrained) {
    problem.has_slack = true;
    problem.slack_rhs = nu;
    for (int j = 0; j < problem.num_vars; ++j) {
      const auto [s, a] = vars[j];
      double c = 0.0;
      for (const auto& t : mdp.actions[s][a].successors) {
        if (goal[t.to]) c += t.prob;
      }
      if (c != 0.0) problem.slack_row.emplace_back(j, c);
    }
  }

  for (StateId w = 0; w < n; ++w) {
    if (!mdp.is_observed(w) || row_of[w] < 0) continue;
    ConvexTerm term;
    std::vector<StateId> live;
    for (std::size_t a = 0; a < allowed[w].size(); ++a) {
      if (!allowed[w][a]) continue;
      term.vars.push_back(var[w][a]);
      for (const auto& t : mdp.actions[w][a].successors) live.push_back(t.to);
    }
    std::sort(live.begin(), live.end());
    live.erase(std::unique(live.begin(), live.end()), live.end());
    term.coeff = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(live.size()),
                                       static_cast<Eigen::Index>(term.vars.size()));
    int col = 0;
    for (std::size_t a = 0; a < allowed[w].size(); ++a) {
      if (!allowed[w][a]) continue;
      for (const auto& t : mdp.actions[w][a].successors) {
        const auto pos = std::lower_bound(live.begin(), live.end(), t.to) - live.begin();
        term.coeff(pos, col) += t.prob;
      }
      ++col;
    }
    problem.terms.push_back(std::move(term));
  }
  for (const auto& g : options.groups) {
    if (g.weight <= 0.0) continue;
    ConvexTerm term;
    term.weight = g.weight;
    std::map<int, int> column;
    std::vector<std::vector<std::pair<int, double>>> live_rows;
    for (const auto& row : g.rows) {
      std::vector<std::pair<int, double>> entries;
      for (const auto& c : row) {
        if (c.coeff <= 0.0 || var[c.state][c.action] < 0) continue;
        const int j = var[c.state][c.action];
        if (!column.count(j)) {
          column[j] = static_cast<int>(term.vars.size());
          term.vars.push_back(j);
        }
        entries.emplace_back(column[j], c.coeff);
      }
      if (!entries.empty()) live_rows.push_back(std::move(entries));
    }
    if (live_rows.empty()) continue;
    term.coeff = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(live_rows.size()),
                                       static_cast<Eigen::Index>(term.vars.size()));
    for (std::size_t r = 0; r < live_rows.size(); ++r) {
      for (const auto& [j, c] : live_rows[r]) term.coeff(static_cast<Eigen::Index>(r), j) += c;
    }
    problem.terms.push_back(std::move(term));
  }

  // Strictly positive start: the uniform policy over the allowed actions,
  // mixed with the maximum-reach flow when the requirement needs it.
  std::vector<std::vector<double>> uniform(n);
  for (StateId s = 0; s < n; ++s) {
    uniform[s].assign(mdp.actions[s].size(), 0.0);
    const auto k = std::count(allowed[s].begin(), allowed[s].end(), 1);
    for (std::size_t a = 0; a < allowed[s].size(); ++a) {
      if (allowed[s][a]) uniform[s][a] = 1.0 / static_cast<double>(k);
    }
  }
  auto x_uniform = policy_flow(mdp, c_end, allowed, uniform);
  if (x_uniform.empty()) throw NumericalFailure("uniform flow is singular", {});
  double lambda = 1.0;
  double t0 = 0.0;
  if (constrained) {
    const double r_uniform = reach_of(mdp, goal, x_uniform);
    const double target = nu + 0.5 * (r_max - nu);
    if (r_uniform < nu + 0.25 * (r_max - nu)) lambda = (r_max - target) / (r_max - r_uniform);
    t0 = lambda * r_uniform + (1.0 - lambda) * r_max - nu;
  }
  Eigen::VectorXd x0(problem.num_vars);
  for (int j = 0; j < problem.num_vars; ++j) {
    const auto [s, a] = vars[j];
    x0[j] = lambda * x_uniform[s][a] + (lambda < 1.0 ? (1.0 - lambda) * x_max[s][a] : 0.0);
  }

  BarrierOptions bopt;
  bopt.max_newton = options.max_newton;
  bopt.mu_final = std::min(1e-9, options.tol / std::max(1, problem.num_vars));
  const BarrierResult res = minimize_barrier(problem, x0, t0, bopt);
  sol.newton_steps = res.newton_steps;
  for (int j = 0; j < problem.num_vars; ++j) {
    const auto [s, a] = vars[j];
    sol.x[s][a] = std::max(0.0, res.x[j]);
  }
  sol.reach_prob = reach_of(mdp, goal, sol.x);
  sol.status = SolveStatus::kOptimal;
  score(mdp, options, sol);
  return sol;
}

}  // namespace

OccupationSolution solve_program6(const Mdp& mdp, std::span<const char> c_end,
                                  const SolveOptions& options) {
  if (feasibility_check(mdp) == Feasibility::kInfeasible) {
    OccupationSolution sol;
    sol.status = SolveStatus::kInfeasible;
    sol.information = sol.objective = ExtReal::infinity();
    sol.c_end.assign(c_end.begin(), c_end.end());
    sol.x.resize(mdp.num_states());
    sol.variable.resize(mdp.num_states());
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      sol.x[s].assign(mdp.actions[s].size(), 0.0);
      sol.variable[s].assign(mdp.actions[s].size(), 0);
    }
    return sol;
  }
  std::vector<char> forbidden(mdp.num_states(), 0);
  OccupationSolution best = solve_once(mdp, c_end, options, forbidden);
  if (best.status != SolveStatus::kOptimal || !options.refine_support) return best;

  for (int round = 0; round < 3; ++round) {
    bool more = false;
    for (StateId w = 0; w < mdp.num_states(); ++w) {
      if (!mdp.is_observed(w) || c_end[w] || forbidden[w] || w == mdp.initial) continue;
      const double xw = best.residence(w);
      if (xw > 0.0 && xw < options.support_zero) {
        forbidden[w] = 1;
        more = true;
      }
    }
    if (!more) break;
    OccupationSolution candidate;
    try {
      candidate = solve_once(mdp, c_end, options, forbidden);
    } catch (const NumericalFailure&) {
      break;
    }
    if (candidate.status != SolveStatus::kOptimal || !(candidate.objective < best.objective)) break;
    candidate.newton_steps += best.newton_steps;
    best = std::move(candidate);
  }
  return best;
}

StationaryPolicy stay_policy(const Mdp& mdp, const SubMdp& union_uec) {
  StationaryPolicy pi = StationaryPolicy::uniform(mdp);
  for (std::size_t i = 0; i < union_uec.states.size(); ++i) {
    const StateId s = union_uec.states[i];
    const auto& d = union_uec.actions[i];
    if (d.empty()) throw InvalidUnion("state '" + mdp.states[s] + "' has no action inside the union");
    auto& row = pi.prob[s];
    std::fill(row.begin(), row.end(), 0.0);
    for (int a : d) row[a] = 1.0 / static_cast<double>(d.size());
  }
  return pi;
}

StationaryPolicy extract_policy(const Mdp& mdp, const OccupationSolution& sol,
                                std::span<const char> c_end, const StationaryPolicy& stay) {
  StationaryPolicy pi;
  pi.prob.resize(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    auto& row = pi.prob[s];
    const std::size_t k = mdp.actions[s].size();
    if (c_end[s]) {
      row = stay.prob[s];
      continue;
    }
    const double xs = sol.residence(s);
    if (xs > kZeroResidence) {
      row.resize(k);
      for (std::size_t a = 0; a < k; ++a) row[a] = sol.x[s][a] / xs;
      continue;
    }
    const auto& vars = sol.variable[s];
    const auto nv = std::count(vars.begin(), vars.end(), 1);
    row.assign(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      if (nv == 0) {
        row[a] = 1.0 / static_cast<double>(k);
      } else if (vars[a]) {
        row[a] = 1.0 / static_cast<double>(nv);
      }
    }
  }
  return pi;
}

ExhaustiveResult exhaustive_search(const Mdp& mdp, const SolveOptions& options, int cap) {
  ExhaustiveResult result;
  std::vector<StateId> r;
  for (const auto& u : unobserved_mecs(mdp)) r.insert(r.end(), u.states.begin(), u.states.end());
  std::sort(r.begin(), r.end());
  if (static_cast<int>(r.size()) > cap) {
    throw SearchTooLarge(std::to_string(r.size()) + " UMEC states exceed the exhaustive cap of " +
                         std::to_string(cap) + "; use the switch mode instead");
  }
  if (feasibility_check(mdp) == Feasibility::kInfeasible) {
    result.status = SolveStatus::kInfeasible;
    return result;
  }
  result.status = SolveStatus::kInfiniteInformation;
  std::optional<NumericalFailure> failure;
  const std::uint64_t count = std::uint64_t{1} << r.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::vector<StateId> l;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (mask & (std::uint64_t{1} << i)) l.push_back(r[i]);
    }
    auto u = is_union_uec(mdp, l);
    if (!u) continue;
    ++result.configurations;
    const auto c_end = u->state_mask(mdp.num_states());
    OccupationSolution sol;
    try {
      sol = solve_program6(mdp, c_end, options);
    } catch (const NumericalFailure& e) {
      if (!failure) failure = e;
      continue;
    }
    if (sol.status != SolveStatus::kOptimal) continue;
    const bool better = result.status != SolveStatus::kOptimal ||
                        sol.objective.to_double() <
                            result.solution.objective.to_double() -
                                1e-9 * std::max(1.0, result.solution.objective.to_double());
    if (better) {
      result.status = SolveStatus::kOptimal;
      result.solution = std::move(sol);
      result.chosen = *u;
    }
  }
  if (result.status == SolveStatus::kOptimal) {
    result.policy = extract_policy(mdp, result.solution, result.solution.c_end,
                                   stay_policy(mdp, result.chosen));
  } else if (failure) {
    throw *failure;
  }
  return result;
}

ModifiedMdp build_modified_mdp(const Mdp& mdp) {
  ModifiedMdp out;
  out.mdp = mdp;
  const int n = mdp.num_states();
  out.duplicate.assign(n, -1);
  out.original.resize(n);
  for (StateId s = 0; s < n; ++s) out.original[s] = s;
  out.c_end.assign(n, 0);
  out.switch_action.assign(n, -1);
  for (const auto& u : unobserved_mecs(mdp)) {
    for (StateId s : u.states) out.c_end[s] = 1;
  }

  std::vector<StateId> members;
  for (StateId s = 0; s < n; ++s) {
    if (out.c_end[s]) members.push_back(s);
  }
  if (members.empty()) {
    out.c_end_bar.assign(n, 0);
    return out;
  }

  for (StateId s : members) {
    std::string name = mdp.states[s] + "_bar";
    while (out.mdp.find(name)) name += "_";
    out.duplicate[s] = out.mdp.num_states();
    out.original.push_back(s);
    out.mdp.states.push_back(name);
    out.mdp.observed.push_back(0);
    out.mdp.actions.emplace_back();
    if (out.mdp.tiles) out.mdp.tiles->push_back((*mdp.tiles)[s]);
  }
  for (StateId s : members) {
    auto& dup_actions = out.mdp.actions[out.duplicate[s]];
    for (const auto& a : mdp.actions[s]) {
      bool inside = true;
      for (const auto& t : a.successors) inside = inside && out.c_end[t.to];
      if (!inside) continue;
      Action copy{a.name, {}};
      for (const auto& t : a.successors) copy.successors.push_back({out.duplicate[t.to], t.prob});
      std::sort(copy.successors.begin(), copy.successors.end(),
                [](const Transition& x, const Transition& y) { return x.to < y.to; });
      dup_actions.push_back(std::move(copy));
    }
    if (mdp.action_index(s, kSwitchAction) >= 0) {
      throw InvalidMdp("state '" + mdp.states[s] + "' already has an action named 'switch'");
    }
    out.switch_action[s] = static_cast<int>(out.mdp.actions[s].size());
    out.mdp.actions[s].push_back(Action{kSwitchAction, {{out.duplicate[s], 1.0}}});
  }
  out.mdp.reach.targets.clear();
  for (StateId t : mdp.reach.targets) {
    out.mdp.reach.targets.push_back(out.duplicate[t] >= 0 ? out.duplicate[t] : t);
  }
  std::sort(out.mdp.reach.targets.begin(), out.mdp.reach.targets.end());
  out.c_end_bar.assign(out.mdp.num_states(), 0);
  for (StateId s : members) out.c_end_bar[out.duplicate[s]] = 1;
  return out;
}

StationaryPolicy lift_switch_policy(const ModifiedMdp& modified, const SwitchPolicy& sp) {
  const Mdp& m = modified.mdp;
  const int n = static_cast<int>(modified.duplicate.size());
  StationaryPolicy base;
  base.prob.resize(m.num_states());
  for (StateId s = 0; s < n; ++s) {
    auto& row = base.prob[s];
    row.assign(m.actions[s].size(), 0.0);
    const double p = modified.switch_action[s] >= 0 ? sp.switch_prob[s] : 0.0;
    for (std::size_t a = 0; a < sp.policy.prob[s].size(); ++a) row[a] = sp.policy.prob[s][a] * (1.0 - p);
    if (modified.switch_action[s] >= 0) row[modified.switch_action[s]] = p;
  }
  for (StateId d = n; d < m.num_states(); ++d) {
    const StateId s = modified.original[d];
    auto& row = base.prob[d];
    row.assign(m.actions[d].size(), 0.0);
    double sum = 0.0;
    for (std::size_t a = 0; a < m.actions[d].size(); ++a) {
      const int orig = modified.mdp.action_index(s, m.actions[d][a].name);
      row[a] = orig >= 0 ? sp.stay.prob[s][orig] : 0.0;
      sum += row[a];
    }
    if (sum > 0.0) {
      for (double& v : row) v /= sum;
    } else {
      std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(row.size()));
    }
  }
  return base;
}

SwitchResult solve_switch(const Mdp& mdp, const SolveOptions& options) {
  SwitchResult result;
  if (feasibility_check(mdp) == Feasibility::kInfeasible) {
    result.status = SolveStatus::kInfeasible;
    return result;
  }
  const ModifiedMdp modified = build_modified_mdp(mdp);
  result.solution = solve_program6(modified.mdp, modified.c_end_bar, options);
  result.status = result.solution.status;
  if (result.status != SolveStatus::kOptimal) return result;

  std::vector<StateId> members;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (modified.c_end[s]) members.push_back(s);
  }
  auto u = is_union_uec(mdp, members);
  if (!u) throw InvalidUnion("UMEC states do not form a union of end components");
  std::vector<StateId> dup_members;
  for (StateId s : members) dup_members.push_back(modified.duplicate[s]);
  auto u_bar = is_union_uec(modified.mdp, dup_members);
  if (!u_bar) throw InvalidUnion("duplicated UMEC states do not form a union of end components");

  SwitchPolicy& sp = result.policy;
  sp.stay = stay_policy(mdp, *u);
  sp.base = extract_policy(modified.mdp, result.solution, modified.c_end_bar,
                           stay_policy(modified.mdp, *u_bar));
  sp.c_end = modified.c_end;
  sp.switch_prob.assign(mdp.num_states(), 0.0);
  sp.policy.prob.resize(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    const auto& row = sp.base.prob[s];
    auto& out = sp.policy.prob[s];
    out.assign(mdp.actions[s].size(), 0.0);
    double p = 0.0;
    if (modified.switch_action[s] >= 0) p = row[modified.switch_action[s]];
    sp.switch_prob[s] = p;
    if (p < 1.0 - 1e-12) {
      for (std::size_t a = 0; a < out.size(); ++a) out[a] = row[a] / (1.0 - p);
    } else {
      out = sp.stay.prob[s];
    }
  }
  return result;
}

int sample_index(std::span<const double> probs, double u) {
  double acc = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last >= 0 ? last : 0;
}

ActResult act(const SwitchPolicy& sp, StateId s, bool switched,
              const std::function<double()>& uniform) {
  ActResult r;
  r.switched = switched;
  if (switched) {
    r.action = sample_index(sp.stay.prob[s], uniform());
    return r;
  }
  if (!sp.c_end[s]) {
    r.action = sample_index(sp.policy.prob[s], uniform());
    return r;
  }
  const double p = sp.switch_prob[s];
  const double rnd = uniform();
  if (p > 0.0 && rnd <= p) {
    r.switched = true;
    r.action = sample_index(sp.stay.prob[s], uniform());
    return r;
  }
  r.action = sample_index(sp.policy.prob[s], uniform());
  return r;
}

SynthesisResult synthesize(const Mdp& mdp, Mode mode, const SolveOptions& options) {
  SynthesisResult result;
  result.mode = mode;
  if (feasibility_check(mdp) == Feasibility::kInfeasible) {
    result.status = SolveStatus::kInfeasible;
    return result;
  }

  switch (mode) {
    case Mode::kClosed: {
      const auto report = analyze_components(mdp);
      if (!report.assumption1_holds) {
        std::ostringstream msg;
        msg << "closed mode needs every unobserved maximal end component to be closed; "
               "use --mode exhaustive or --mode switch";
        throw InvalidMdp(msg.str());
      }
      std::vector<char> c_end(mdp.num_states(), 0);
      for (StateId s : report.c_end) c_end[s] = 1;
      result.solution = solve_program6(mdp, c_end, options);
      result.status = result.solution.status;
      result.c_end = report.c_end;
      if (result.status == SolveStatus::kOptimal) {
        result.policy = extract_policy(mdp, result.solution, c_end, stay_policy(mdp, merge(report.umecs)));
      }
      break;
    }
    case Mode::kExhaustive: {
      auto ex = exhaustive_search(mdp, options);
      result.status = ex.status;
      result.solution = std::move(ex.solution);
      result.c_end = ex.chosen.states;
      result.policy = std::move(ex.policy);
      break;
    }
    case Mode::kSwitch: {
      auto sw = solve_switch(mdp, options);
      result.status = sw.status;
      result.solution = std::move(sw.solution);
      if (result.status == SolveStatus::kOptimal) {
        result.policy = sw.policy.policy;
        for (StateId s = 0; s < mdp.num_states(); ++s) {
          if (sw.policy.c_end[s]) result.c_end.push_back(s);
        }
        result.switch_policy = std::move(sw.policy);
      }
      break;
    }
  }

  if (result.status == SolveStatus::kOptimal) {
    result.objective = result.solution.objective;
    result.information = result.solution.information;
    result.reach_prob = result.solution.reach_prob;
  } else if (result.status == SolveStatus::kInfiniteInformation) {
    result.policy = max_reach_policy(mdp);
    result.objective = ExtReal::infinity();
    result.information = ExtReal::infinity();
    result.reach_prob = evaluate_policy(mdp, result.policy).reach_prob;
  }
  return result;
}

}  // namespace mininfo

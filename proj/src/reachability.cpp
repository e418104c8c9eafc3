#include "mininfo/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace mininfo {

namespace {

constexpr double kValueTolerance = 1e-14;
constexpr int kMaxSweeps = 200000;
constexpr double kOptimalSlack = 1e-9;

bool action_inside(const Action& a, std::span<const char> set) {
  for (const auto& t : a.successors) {
    if (!set[t.to]) return false;
  }
  return true;
}

}  // namespace

ActionMask all_actions(const Mdp& mdp) {
  ActionMask m(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) m[s].assign(mdp.actions[s].size(), 1);
  return m;
}

std::vector<char> can_reach(const Mdp& mdp, const ActionMask& allowed,
                            std::span<const char> terminal, std::span<const char> goal) {
  const int n = mdp.num_states();
  std::vector<std::vector<StateId>> pred(n);
  for (StateId s = 0; s < n; ++s) {
    if (terminal[s] || goal[s]) continue;
    for (std::size_t a = 0; a < mdp.actions[s].size(); ++a) {
      if (!allowed[s][a]) continue;
      for (const auto& t : mdp.actions[s][a].successors) pred[t.to].push_back(s);
    }
  }
  std::vector<char> mark(n, 0);
  std::deque<StateId> queue;
  for (StateId s = 0; s < n; ++s) {
    if (goal[s]) {
      mark[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const StateId q = queue.front();
    queue.pop_front();
    for (StateId p : pred[q]) {
      if (!mark[p]) {
        mark[p] = 1;
        queue.push_back(p);
      }
    }
  }
  return mark;
}

std::vector<char> almost_sure_reach(const Mdp& mdp, const ActionMask& allowed,
                                    std::span<const char> terminal, std::span<const char> goal) {
  const int n = mdp.num_states();
  // Greatest fixpoint: keep states that can reach the goal while only using
  // actions that stay inside the current candidate set.
  std::vector<char> candidate(n, 1);
  for (StateId s = 0; s < n; ++s) {
    if (terminal[s] && !goal[s]) candidate[s] = 0;
  }
  while (true) {
    ActionMask inside(n);
    for (StateId s = 0; s < n; ++s) {
      inside[s].assign(mdp.actions[s].size(), 0);
      if (!candidate[s]) continue;
      for (std::size_t a = 0; a < mdp.actions[s].size(); ++a) {
        inside[s][a] = allowed[s][a] && action_inside(mdp.actions[s][a], candidate);
      }
    }
    auto next = can_reach(mdp, inside, terminal, goal);
    for (StateId s = 0; s < n; ++s) next[s] = next[s] && candidate[s];
    if (next == candidate) return candidate;
    candidate = std::move(next);
  }
}

MaxReach max_reach(const Mdp& mdp, const ActionMask& allowed, std::span<const char> terminal,
                   std::span<const char> goal) {
  const int n = mdp.num_states();
  MaxReach out;
  out.value.assign(n, 0.0);
  out.choice.assign(n, -1);
  out.optimal_progress.assign(n, 0);

  const auto positive = can_reach(mdp, allowed, terminal, goal);
  const auto sure = almost_sure_reach(mdp, allowed, terminal, goal);
  std::vector<StateId> open;
  for (StateId s = 0; s < n; ++s) {
    if (goal[s] || sure[s]) {
      out.value[s] = 1.0;
    } else if (positive[s] && !terminal[s]) {
      open.push_back(s);
    }
  }

  for (int sweep = 0; sweep < kMaxSweeps && !open.empty(); ++sweep) {
    double delta = 0.0;
    for (StateId s : open) {
      double best = out.value[s];
      for (std::size_t a = 0; a < mdp.actions[s].size(); ++a) {
        if (!allowed[s][a]) continue;
        double v = 0.0;
        for (const auto& t : mdp.actions[s][a].successors) v += t.prob * out.value[t.to];
        best = std::max(best, v);
      }
      delta = std::max(delta, best - out.value[s]);
      out.value[s] = std::min(best, 1.0);
    }
    if (delta < kValueTolerance) break;
  }

  // Attractor towards terminal states over near-optimal actions.
  std::vector<char> assigned(n, 0);
  for (StateId s = 0; s < n; ++s) assigned[s] = terminal[s] || goal[s];
  std::vector<std::vector<int>> optimal(n);
  for (StateId s = 0; s < n; ++s) {
    if (assigned[s]) continue;
    for (std::size_t a = 0; a < mdp.actions[s].size(); ++a) {
      if (!allowed[s][a]) continue;
      double v = 0.0;
      for (const auto& t : mdp.actions[s][a].successors) v += t.prob * out.value[t.to];
      if (out.value[s] - v <= kOptimalSlack) optimal[s].push_back(static_cast<int>(a));
    }
  }
  bool progress = true;
  while (progress) {
    progress = false;
    for (StateId s = 0; s < n; ++s) {
      if (assigned[s]) continue;
      for (int a : optimal[s]) {
        bool hits = false;
        for (const auto& t : mdp.actions[s][a].successors) hits = hits || assigned[t.to];
        if (hits) {
          out.choice[s] = a;
          out.optimal_progress[s] = 1;
          assigned[s] = 1;
          progress = true;
          break;
        }
      }
    }
  }
  for (StateId s = 0; s < n; ++s) {
    if (out.choice[s] >= 0 || terminal[s] || goal[s]) continue;
    if (!optimal[s].empty()) {
      out.choice[s] = optimal[s].front();
    } else {
      for (std::size_t a = 0; a < mdp.actions[s].size(); ++a) {
        if (allowed[s][a]) {
          out.choice[s] = static_cast<int>(a);
          break;
        }
      }
    }
  }
  return out;
}

double max_reach_probability(const Mdp& mdp) {
  if (mdp.reach.targets.empty()) return 0.0;
  const auto targets = mdp.target_mask();
  return max_reach(mdp, all_actions(mdp), targets, targets).value[mdp.initial];
}

Feasibility feasibility_check(const Mdp& mdp) {
  if (mdp.reach.threshold <= 0.0) return Feasibility::kFeasible;
  return max_reach_probability(mdp) >= mdp.reach.threshold - 1e-9 ? Feasibility::kFeasible
                                                                    : Feasibility::kInfeasible;
}

StationaryPolicy max_reach_policy(const Mdp& mdp) {
  std::vector<int> choice(mdp.num_states(), 0);
  if (!mdp.reach.targets.empty()) {
    const auto targets = mdp.target_mask();
    const auto mr = max_reach(mdp, all_actions(mdp), targets, targets);
    for (StateId s = 0; s < mdp.num_states(); ++s) choice[s] = std::max(mr.choice[s], 0);
  }
  return StationaryPolicy::deterministic(mdp, choice);
}

}  // namespace mininfo

#include "mininfo/components.hpp"

#include <algorithm>

#include "mininfo/graph.hpp"

namespace mininfo {

std::vector<char> SubMdp::state_mask(int num_states) const {
  std::vector<char> mask(num_states, 0);
  for (StateId s : states) mask[s] = 1;
  return mask;
}

int SubMdp::position(StateId s) const {
  auto it = std::lower_bound(states.begin(), states.end(), s);
  if (it == states.end() || *it != s) return -1;
  return static_cast<int>(it - states.begin());
}

std::vector<SubMdp> maximal_end_components_within(const Mdp& mdp, std::span<const char> within) {
  const int n = mdp.num_states();
  std::vector<char> active(within.begin(), within.end());
  std::vector<std::vector<char>> allowed(n);
  for (StateId s = 0; s < n; ++s) allowed[s].assign(mdp.actions[s].size(), active[s]);

  SccDecomposition scc;
  while (true) {
    Adjacency graph(n);
    for (StateId s = 0; s < n; ++s) {
      if (!active[s]) continue;
      for (std::size_t a = 0; a < allowed[s].size(); ++a) {
        if (!allowed[s][a]) continue;
        for (const auto& t : mdp.actions[s][a].successors) {
          if (active[t.to]) graph[s].push_back(t.to);
        }
      }
    }
    scc = strongly_connected_components(graph, active);

    bool changed = false;
    for (StateId s = 0; s < n; ++s) {
      if (!active[s]) continue;
      bool any = false;
      for (std::size_t a = 0; a < allowed[s].size(); ++a) {
        if (!allowed[s][a]) continue;
        for (const auto& t : mdp.actions[s][a].successors) {
          if (!active[t.to] || scc.component[t.to] != scc.component[s]) {
            allowed[s][a] = 0;
            changed = true;
            break;
          }
        }
        any = any || allowed[s][a];
      }
      if (!any) {
        active[s] = 0;
        changed = true;
      }
    }
    if (!changed) break;
  }

  std::vector<int> slot(scc.count, -1);
  std::vector<SubMdp> out;
  for (StateId s = 0; s < n; ++s) {
    if (!active[s]) continue;
    int& k = slot[scc.component[s]];
    if (k < 0) {
      k = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[k].states.push_back(s);
    auto& acts = out[k].actions.emplace_back();
    for (std::size_t a = 0; a < allowed[s].size(); ++a) {
      if (allowed[s][a]) acts.push_back(static_cast<int>(a));
    }
  }
  return out;
}

std::vector<SubMdp> maximal_end_components(const Mdp& mdp) {
  std::vector<char> all(mdp.num_states(), 1);
  return maximal_end_components_within(mdp, all);
}

std::vector<SubMdp> unobserved_mecs(const Mdp& mdp) {
  std::vector<char> hidden(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) hidden[s] = !mdp.is_observed(s);
  return maximal_end_components_within(mdp, hidden);
}

bool is_closed(const Mdp& mdp, std::span<const StateId> c) {
  std::vector<char> mask(mdp.num_states(), 0);
  for (StateId s : c) mask[s] = 1;
  for (StateId s : c) {
    for (const auto& a : mdp.actions[s]) {
      for (const auto& t : a.successors) {
        if (!mask[t.to]) return false;
      }
    }
  }
  return true;
}

bool check_assumption1(const Mdp& mdp) {
  for (const auto& u : unobserved_mecs(mdp)) {
    if (!is_closed(mdp, u.states)) return false;
  }
  return true;
}

SubMdp merge(std::span<const SubMdp> parts) {
  std::vector<std::pair<StateId, std::vector<int>>> rows;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.states.size(); ++i) rows.emplace_back(p.states[i], p.actions[i]);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SubMdp out;
  for (auto& [s, acts] : rows) {
    out.states.push_back(s);
    out.actions.push_back(std::move(acts));
  }
  return out;
}

std::optional<SubMdp> is_union_uec(const Mdp& mdp, std::span<const StateId> l) {
  std::vector<char> mask(mdp.num_states(), 0);
  for (StateId s : l) mask[s] = 1;
  auto parts = maximal_end_components_within(mdp, mask);
  SubMdp u = merge(parts);
  std::vector<StateId> wanted(l.begin(), l.end());
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  if (u.states != wanted) return std::nullopt;
  return u;
}

EndComponentReport analyze_components(const Mdp& mdp) {
  EndComponentReport r;
  r.mecs = maximal_end_components(mdp);
  r.umecs = unobserved_mecs(mdp);
  for (const auto& u : r.umecs) {
    r.c_end.insert(r.c_end.end(), u.states.begin(), u.states.end());
    if (!is_closed(mdp, u.states)) r.assumption1_holds = false;
  }
  std::sort(r.c_end.begin(), r.c_end.end());
  return r;
}

}  // namespace mininfo

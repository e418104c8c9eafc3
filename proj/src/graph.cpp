#include "mininfo/graph.hpp"

#include <algorithm>

namespace mininfo {

SccDecomposition strongly_connected_components(const Adjacency& graph,
                                               std::span<const char> active) {
  const int n = static_cast<int>(graph.size());
  auto is_active = [&](int v) { return active.empty() || active[v] != 0; };

  SccDecomposition out;
  out.component.assign(n, -1);
  std::vector<int> index(n, -1);
  std::vector<int> low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> scc_stack;
  // (vertex, next edge position)
  std::vector<std::pair<int, std::size_t>> call_stack;
  int next_index = 0;

  for (int root = 0; root < n; ++root) {
    if (!is_active(root) || index[root] != -1) continue;
    call_stack.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    scc_stack.push_back(root);
    on_stack[root] = 1;

    while (!call_stack.empty()) {
      auto& [v, pos] = call_stack.back();
      const auto& edges = graph[v];
      bool descended = false;
      while (pos < edges.size()) {
        const int w = edges[pos++];
        if (!is_active(w)) continue;
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          scc_stack.push_back(w);
          on_stack[w] = 1;
          call_stack.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;

      const int finished = v;
      if (low[finished] == index[finished]) {
        int w;
        do {
          w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = 0;
          out.component[w] = out.count;
        } while (w != finished);
        ++out.count;
      }
      call_stack.pop_back();
      if (!call_stack.empty()) {
        const int parent = call_stack.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return out;
}

std::vector<char> forward_reachable(const Adjacency& graph, std::span<const int> sources) {
  std::vector<char> seen(graph.size(), 0);
  std::vector<int> stack;
  for (int s : sources) {
    if (!seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : graph[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

Adjacency transpose(const Adjacency& graph) {
  Adjacency out(graph.size());
  for (std::size_t v = 0; v < graph.size(); ++v) {
    for (int w : graph[v]) out[w].push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace mininfo

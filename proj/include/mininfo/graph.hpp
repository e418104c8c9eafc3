#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mininfo {

using Adjacency = std::vector<std::vector<int>>;

/// Strongly connected components of a digraph.
struct SccDecomposition {
  std::vector<int> component;  ///< component id per vertex, -1 for excluded vertices
  int count = 0;
};

/// Tarjan's algorithm with an explicit stack. Vertices with `active[v] == 0`
/// are ignored along with their edges; an empty mask means all active.
SccDecomposition strongly_connected_components(const Adjacency& graph,
                                               std::span<const char> active = {});

/// Vertices reachable from any of `sources` (sources included).
std::vector<char> forward_reachable(const Adjacency& graph, std::span<const int> sources);

/// Reverses every edge.
Adjacency transpose(const Adjacency& graph);

}  // namespace mininfo

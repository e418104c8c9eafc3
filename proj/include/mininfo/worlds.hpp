#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mininfo/information.hpp"
#include "mininfo/mdp.hpp"
#include "mininfo/mdp_json.hpp"

namespace mininfo {

/// Inclusive tile rectangle.
struct Rect {
  int col0 = 0;
  int row0 = 0;
  int col1 = 0;
  int row1 = 0;
  [[nodiscard]] bool contains(TileCoord t) const {
    return t.col >= col0 && t.col <= col1 && t.row >= row0 && t.row <= row1;
  }
};

struct Region {
  std::string id;
  std::vector<Rect> rects;
  [[nodiscard]] bool contains(TileCoord t) const;
};

struct ExitGroupSpec {
  std::string region;
  std::vector<TileCoord> bridges;
  double weight = 1.0;
};

/// Grid world description. Row 0 is the top row. Wall tiles are not
/// states; blocked edges forbid moves between two adjacent tiles.
struct GridSpec {
  std::string label;
  int width = 0;
  int height = 0;
  double slip = 0.2;
  TileCoord initial;
  TileCoord goal;
  double reach_threshold = 1.0;
  std::vector<TileCoord> walls;
  std::vector<Rect> wall_rects;
  std::vector<std::pair<TileCoord, TileCoord>> blocked_edges;
  std::vector<TileCoord> bridges;
  bool bridges_observed = false;
  std::vector<TileCoord> unobserved;
  std::vector<Rect> unobserved_rects;
  std::vector<TileCoord> absorbing;
  std::vector<Region> regions;
  std::vector<ExitGroupSpec> exit_groups;
};

/// Throws InvalidGridSpec on malformed input.
GridSpec grid_spec_from_json(const Json& doc);
GridSpec load_grid_spec(const std::filesystem::path& path);

std::string tile_name(TileCoord t);

/// One state per non-wall tile, actions up/down/left/right. The intended
/// direction gets 1 - slip and the others slip/3 each; blocked directions
/// are dropped and the rest renormalized, so with slip = 0 an action into a
/// blocked direction disappears. Goal and absorbing tiles get a single
/// self-loop. The goal, bridges (unless observed), absorbing tiles and the
/// unobserved tiles are hidden from the observer.
Mdp build_grid_mdp(const GridSpec& spec);

/// Per region, g of the expected moves from the region into each of its
/// bridges, scaled by the group weight.
std::vector<GroupTerm> exit_information_terms(const GridSpec& spec, const Mdp& mdp);

/// "col,row,value" per state. Throws Unsupported without tile metadata.
std::string export_heatmap(const Mdp& mdp, const std::vector<double>& values);

}  // namespace mininfo

#include "mininfo/worlds.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>

#include "mininfo/errors.hpp"

namespace mininfo {

bool Region::contains(TileCoord t) const {
  return std::any_of(rects.begin(), rects.end(), [&](const Rect& r) { return r.contains(t); });
}

std::string tile_name(TileCoord t) {
  return "c" + std::to_string(t.col) + "_r" + std::to_string(t.row);
}

namespace {

TileCoord coord(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidGridSpec("tile must be [col, row]");
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

Rect rect(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw InvalidGridSpec("rectangle must be [col0, row0, col1, row1]");
  return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

std::vector<TileCoord> coords(const Json& doc, const char* key) {
  std::vector<TileCoord> out;
  if (doc.contains(key)) {
    for (const auto& t : doc.at(key)) out.push_back(coord(t));
  }
  return out;
}

std::vector<Rect> rects(const Json& doc, const char* key) {
  std::vector<Rect> out;
  if (doc.contains(key)) {
    for (const auto& r : doc.at(key)) out.push_back(rect(r));
  }
  return out;
}

using Key = std::pair<int, int>;
Key key(TileCoord t) { return {t.col, t.row}; }

constexpr std::array<const char*, 4> kDirNames{"up", "down", "left", "right"};
constexpr std::array<int, 4> kDc{0, 0, -1, 1};
constexpr std::array<int, 4> kDr{-1, 1, 0, 0};

}  // namespace

GridSpec grid_spec_from_json(const Json& doc) {
  try {
    GridSpec spec;
    spec.label = doc.value("label", std::string{});
    spec.width = doc.at("width").get<int>();
    spec.height = doc.at("height").get<int>();
    spec.slip = doc.value("slip", 0.2);
    spec.initial = coord(doc.at("initial"));
    spec.goal = coord(doc.at("goal"));
    spec.reach_threshold = doc.value("reach_threshold", 1.0);
    spec.walls = coords(doc, "walls");
    spec.wall_rects = rects(doc, "wall_rects");
    if (doc.contains("blocked_edges")) {
      for (const auto& e : doc.at("blocked_edges")) {
        spec.blocked_edges.emplace_back(coord(e.at(0)), coord(e.at(1)));
      }
    }
    spec.bridges = coords(doc, "bridges");
    spec.bridges_observed = doc.value("bridges_observed", false);
    spec.unobserved = coords(doc, "unobserved");
    spec.unobserved_rects = rects(doc, "unobserved_rects");
    spec.absorbing = coords(doc, "absorbing");
    if (doc.contains("regions")) {
      for (const auto& r : doc.at("regions")) {
        Region region;
        region.id = r.at("id").get<std::string>();
        for (const auto& x : r.at("rects")) region.rects.push_back(rect(x));
        spec.regions.push_back(std::move(region));
      }
    }
    if (doc.contains("exit_groups")) {
      for (const auto& g : doc.at("exit_groups")) {
        ExitGroupSpec eg;
        eg.region = g.at("region").get<std::string>();
        eg.bridges = coords(g, "bridges");
        eg.weight = g.value("weight", 1.0);
        spec.exit_groups.push_back(std::move(eg));
      }
    }
    if (spec.width <= 0 || spec.height <= 0) throw InvalidGridSpec("grid dimensions must be positive");
    if (spec.slip < 0.0 || spec.slip >= 1.0) throw InvalidGridSpec("slip must lie in [0, 1)");
    return spec;
  } catch (const Json::exception& e) {
    throw InvalidGridSpec(std::string("malformed grid spec: ") + e.what());
  }
}

GridSpec load_grid_spec(const std::filesystem::path& path) {
  return grid_spec_from_json(read_json_file(path));
}

Mdp build_grid_mdp(const GridSpec& spec) {
  auto inside = [&](TileCoord t) { return t.col >= 0 && t.row >= 0 && t.col < spec.width && t.row < spec.height; };
  std::set<Key> walls;
  for (auto t : spec.walls) walls.insert(key(t));
  for (const auto& r : spec.wall_rects) {
    for (int c = r.col0; c <= r.col1; ++c) {
      for (int w = r.row0; w <= r.row1; ++w) walls.insert({c, w});
    }
  }
  for (auto t : spec.bridges) walls.erase(key(t));
  auto is_tile = [&](TileCoord t) { return inside(t) && !walls.count(key(t)); };

  if (!is_tile(spec.initial)) throw InvalidGridSpec("initial tile is outside the grid or on a wall");
  if (!is_tile(spec.goal)) throw InvalidGridSpec("goal tile is outside the grid or on a wall");
  for (auto t : spec.bridges) {
    if (!inside(t)) throw InvalidGridSpec("bridge " + tile_name(t) + " is outside the grid");
  }

  std::set<std::pair<Key, Key>> blocked;
  for (const auto& [a, b] : spec.blocked_edges) {
    blocked.insert({key(a), key(b)});
    blocked.insert({key(b), key(a)});
  }
  std::set<Key> hidden;
  for (auto t : spec.unobserved) hidden.insert(key(t));
  for (const auto& r : spec.unobserved_rects) {
    for (int c = r.col0; c <= r.col1; ++c) {
      for (int w = r.row0; w <= r.row1; ++w) hidden.insert({c, w});
    }
  }
  std::set<Key> absorbing;
  for (auto t : spec.absorbing) absorbing.insert(key(t));
  std::set<Key> bridges;
  for (auto t : spec.bridges) bridges.insert(key(t));

  Mdp mdp;
  std::map<Key, StateId> index;
  std::vector<TileCoord> tiles;
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      const TileCoord t{c, r};
      if (!is_tile(t)) continue;
      index[key(t)] = mdp.num_states();
      mdp.states.push_back(tile_name(t));
      tiles.push_back(t);
    }
  }
  const int n = mdp.num_states();
  mdp.actions.resize(n);
  mdp.observed.assign(n, 0);
  mdp.initial = index.at(key(spec.initial));
  const StateId goal = index.at(key(spec.goal));
  mdp.reach.targets = {goal};
  mdp.reach.threshold = spec.reach_threshold;

  for (StateId s = 0; s < n; ++s) {
    const TileCoord t = tiles[s];
    const bool terminal = s == goal || absorbing.count(key(t));
    mdp.observed[s] = !(terminal || hidden.count(key(t)) ||
                        (bridges.count(key(t)) && !spec.bridges_observed));
    if (terminal) {
      mdp.actions[s].push_back(Action{"stay", {{s, 1.0}}});
      continue;
    }
    std::array<int, 4> target{};
    for (int d = 0; d < 4; ++d) {
      const TileCoord q{t.col + kDc[d], t.row + kDr[d]};
      const bool open = is_tile(q) && !blocked.count({key(t), key(q)});
      target[d] = open ? index.at(key(q)) : -1;
    }
    for (int d = 0; d < 4; ++d) {
      std::map<StateId, double> dist;
      double total = 0.0;
      for (int e = 0; e < 4; ++e) {
        const double mass = e == d ? 1.0 - spec.slip : spec.slip / 3.0;
        if (target[e] < 0 || mass <= 0.0) continue;
        dist[target[e]] += mass;
        total += mass;
      }
      if (total <= 0.0) continue;
      Action a{kDirNames[d], {}};
      for (const auto& [q, p] : dist) a.successors.push_back({q, p / total});
      mdp.actions[s].push_back(std::move(a));
    }
    if (mdp.actions[s].empty()) mdp.actions[s].push_back(Action{"stay", {{s, 1.0}}});
  }
  mdp.tiles = std::move(tiles);
  return mdp;
}

std::vector<GroupTerm> exit_information_terms(const GridSpec& spec, const Mdp& mdp) {
  if (!mdp.tiles) throw Unsupported("exit information needs a grid-generated model");
  std::map<Key, StateId> index;
  for (StateId s = 0; s < mdp.num_states(); ++s) index[key((*mdp.tiles)[s])] = s;
  std::set<Key> bridge_set;
  for (auto t : spec.bridges) bridge_set.insert(key(t));

  std::vector<GroupTerm> out;
  for (const auto& g : spec.exit_groups) {
    auto it = std::find_if(spec.regions.begin(), spec.regions.end(),
                           [&](const Region& r) { return r.id == g.region; });
    if (it == spec.regions.end()) throw InvalidGridSpec("exit group names unknown region '" + g.region + "'");
    GroupTerm term;
    term.label = g.region;
    term.weight = g.weight;
    for (auto b : g.bridges) {
      auto bi = index.find(key(b));
      if (bi == index.end()) throw InvalidGridSpec("exit bridge " + tile_name(b) + " is not a tile");
      const StateId bs = bi->second;
      std::vector<FlowCoeff> row;
      bool adjacent = false;
      for (StateId s = 0; s < mdp.num_states(); ++s) {
        const TileCoord t = (*mdp.tiles)[s];
        if (!it->contains(t) || bridge_set.count(key(t))) continue;
        for (std::size_t a = 0; a < mdp.actions[s].size(); ++a) {
          for (const auto& tr : mdp.actions[s][a].successors) {
            if (tr.to == bs) {
              row.push_back({s, static_cast<int>(a), tr.prob});
              adjacent = true;
            }
          }
        }
      }
      if (!adjacent) {
        throw InvalidGridSpec("bridge " + tile_name(b) + " is not adjacent to region '" + g.region + "'");
      }
      term.rows.push_back(std::move(row));
    }
    out.push_back(std::move(term));
  }
  return out;
}

std::string export_heatmap(const Mdp& mdp, const std::vector<double>& values) {
  if (!mdp.tiles) throw Unsupported("heatmap export needs a grid-generated model");
  std::ostringstream out;
  out.precision(17);
  out << "col,row,value\n";
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    const auto t = (*mdp.tiles)[s];
    out << t.col << ',' << t.row << ',' << values[s] << '\n';
  }
  return out.str();
}

}  // namespace mininfo

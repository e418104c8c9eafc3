#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mininfo/mdp.hpp"
#include "mininfo/worlds.hpp"

namespace fixtures {

std::filesystem::path data_path(const std::string& relative);

/// Loads data/fixtures/<name>.json.
mininfo::Mdp load(const std::string& name);
/// example1, fig2, fig4a, fig5a, fig5b
std::vector<std::string> names();

mininfo::GridSpec world(const std::string& name);

/// s0 -> s1 -> s2 with s2 absorbing, nothing observed.
mininfo::Mdp line_chain();

using Row = std::vector<std::pair<std::string, double>>;
/// Policy from per-state rows given by name; states not listed are uniform.
mininfo::StationaryPolicy policy(const mininfo::Mdp& mdp,
                                 const std::vector<std::pair<std::string, Row>>& rows);

/// pi(s0,alpha)=p0, pi(s1,alpha)=p1 on Example 1.
mininfo::StationaryPolicy example1_policy(const mininfo::Mdp& mdp, double p0, double p1);

}  // namespace fixtures

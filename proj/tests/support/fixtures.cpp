#include "support/fixtures.hpp"

#include "mininfo/errors.hpp"
#include "mininfo/mdp_json.hpp"

namespace fixtures {

using namespace mininfo;

std::filesystem::path data_path(const std::string& relative) {
  return std::filesystem::path(MININFO_DATA_DIR) / relative;
}

Mdp load(const std::string& name) { return load_mdp(data_path("fixtures/" + name + ".json")); }

std::vector<std::string> names() { return {"example1", "fig2", "fig4a", "fig5a", "fig5b"}; }

GridSpec world(const std::string& name) { return load_grid_spec(data_path("worlds/" + name + ".json")); }

Mdp line_chain() {
  Mdp m;
  m.states = {"s0", "s1", "s2"};
  m.actions = {{Action{"a", {{1, 1.0}}}}, {Action{"a", {{2, 1.0}}}}, {Action{"a", {{2, 1.0}}}}};
  m.observed = {0, 0, 0};
  m.reach.targets = {2};
  m.reach.threshold = 1.0;
  return m;
}

StationaryPolicy policy(const Mdp& mdp, const std::vector<std::pair<std::string, Row>>& rows) {
  StationaryPolicy pi = StationaryPolicy::uniform(mdp);
  for (const auto& [state, row] : rows) {
    const StateId s = mdp.index_of(state);
    std::fill(pi.prob[s].begin(), pi.prob[s].end(), 0.0);
    for (const auto& [action, p] : row) {
      const int a = mdp.action_index(s, action);
      if (a < 0) throw InvalidPolicy("fixture policy names unknown action " + action);
      pi.prob[s][a] = p;
    }
  }
  check_policy(mdp, pi);
  return pi;
}

StationaryPolicy example1_policy(const Mdp& mdp, double p0, double p1) {
  return policy(mdp, {{"s0", {{"alpha", p0}, {"beta", 1.0 - p0}}},
                      {"s1", {{"alpha", p1}, {"beta", 1.0 - p1}}}});
}

}  // namespace fixtures

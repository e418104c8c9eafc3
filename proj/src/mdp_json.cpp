#include "mininfo/mdp_json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include "mininfo/errors.hpp"

namespace mininfo {

namespace {

constexpr double kRenormalizeTolerance = 1e-6;

void renormalize(std::vector<Transition>& row) {
  double sum = 0.0;
  for (const auto& t : row) sum += t.prob;
  if (std::abs(sum - 1.0) <= kRenormalizeTolerance && sum > 0.0) {
    for (auto& t : row) t.prob /= sum;
  }
}

StateId lookup(const std::unordered_map<std::string, StateId>& index, const Json& name,
               const char* where) {
  if (!name.is_string()) throw ParseError(std::string(where) + ": state name must be a string");
  auto it = index.find(name.get<std::string>());
  if (it == index.end()) {
    throw ParseError(std::string(where) + ": unknown state '" + name.get<std::string>() + "'");
  }
  return it->second;
}

}  // namespace

Mdp mdp_from_json(const Json& doc) {
  try {
    Mdp mdp;
    if (!doc.is_object()) throw ParseError("model must be a JSON object");
    std::unordered_map<std::string, StateId> index;
    for (const auto& s : doc.at("states")) {
      const auto name = s.get<std::string>();
      if (!index.emplace(name, mdp.num_states()).second) {
        throw ParseError("duplicate state '" + name + "'");
      }
      mdp.states.push_back(name);
    }
    const int n = mdp.num_states();
    mdp.actions.resize(n);
    mdp.observed.assign(n, 0);
    mdp.initial = lookup(index, doc.at("initial"), "initial");
    if (doc.contains("observed")) {
      for (const auto& s : doc.at("observed")) mdp.observed[lookup(index, s, "observed")] = 1;
    }
    if (doc.contains("reach")) {
      const auto& reach = doc.at("reach");
      for (const auto& s : reach.at("targets")) {
        mdp.reach.targets.push_back(lookup(index, s, "reach.targets"));
      }
      std::sort(mdp.reach.targets.begin(), mdp.reach.targets.end());
      mdp.reach.targets.erase(std::unique(mdp.reach.targets.begin(), mdp.reach.targets.end()),
                              mdp.reach.targets.end());
      mdp.reach.threshold = reach.value("threshold", 0.0);
    }
    for (const auto& tr : doc.at("transitions")) {
      const StateId from = lookup(index, tr.at("from"), "transition.from");
      Action action;
      action.name = tr.at("action").get<std::string>();
      if (mdp.action_index(from, action.name) >= 0) {
        throw ParseError("duplicate transition entry for (" + mdp.states[from] + ", " + action.name + ")");
      }
      std::map<StateId, double> dist;
      for (const auto& [to, p] : tr.at("to").items()) {
        const StateId q = lookup(index, Json(to), "transition.to");
        if (!p.is_number()) throw ParseError("transition probability must be a number");
        dist[q] += p.get<double>();
      }
      for (const auto& [q, p] : dist) {
        if (p != 0.0) action.successors.push_back({q, p});
      }
      renormalize(action.successors);
      mdp.actions[from].push_back(std::move(action));
    }
    if (doc.contains("tiles")) {
      std::vector<TileCoord> tiles(n);
      std::vector<char> seen(n, 0);
      for (const auto& [name, cr] : doc.at("tiles").items()) {
        const StateId s = lookup(index, Json(name), "tiles");
        tiles[s] = {cr.at(0).get<int>(), cr.at(1).get<int>()};
        seen[s] = 1;
      }
      if (std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; })) {
        mdp.tiles = std::move(tiles);
      } else {
        throw ParseError("tiles must cover every state");
      }
    }
    return mdp;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed model: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Mdp load_mdp(const std::filesystem::path& path) { return mdp_from_json(read_json_file(path)); }

Json mdp_to_json(const Mdp& mdp) {
  Json doc;
  doc["states"] = mdp.states;
  doc["initial"] = mdp.states[mdp.initial];
  Json observed = Json::array();
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (mdp.observed[s]) observed.push_back(mdp.states[s]);
  }
  doc["observed"] = observed;
  Json targets = Json::array();
  for (StateId t : mdp.reach.targets) targets.push_back(mdp.states[t]);
  doc["reach"] = {{"targets", targets}, {"threshold", mdp.reach.threshold}};
  Json transitions = Json::array();
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    for (const auto& a : mdp.actions[s]) {
      Json to = Json::object();
      for (const auto& t : a.successors) to[mdp.states[t.to]] = t.prob;
      transitions.push_back({{"from", mdp.states[s]}, {"action", a.name}, {"to", to}});
    }
  }
  doc["transitions"] = transitions;
  if (mdp.tiles) {
    Json tiles = Json::object();
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      tiles[mdp.states[s]] = {(*mdp.tiles)[s].col, (*mdp.tiles)[s].row};
    }
    doc["tiles"] = tiles;
  }
  return doc;
}

Json policy_to_json(const Mdp& mdp, const StationaryPolicy& policy) {
  Json out = Json::object();
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    Json row = Json::object();
    for (std::size_t a = 0; a < mdp.actions[s].size(); ++a) {
      row[mdp.actions[s][a].name] = policy.prob[s][a];
    }
    out[mdp.states[s]] = row;
  }
  return out;
}

StationaryPolicy policy_from_json(const Mdp& mdp, const Json& doc) {
  if (!doc.is_object()) throw InvalidPolicy("policy must be a JSON object");
  StationaryPolicy policy;
  policy.prob.resize(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    auto it = doc.find(mdp.states[s]);
    if (it == doc.end()) throw InvalidPolicy("policy has no entry for state '" + mdp.states[s] + "'");
    auto& row = policy.prob[s];
    row.assign(mdp.actions[s].size(), 0.0);
    for (const auto& [name, p] : it->items()) {
      if (!p.is_number()) throw InvalidPolicy("policy probabilities must be numbers");
      const double v = p.get<double>();
      const int a = mdp.action_index(s, name);
      if (a < 0) {
        if (v != 0.0) {
          throw InvalidPolicy("policy puts mass on action '" + name + "' not enabled at '" +
                              mdp.states[s] + "'");
        }
        continue;
      }
      row[a] = v;
    }
    double sum = 0.0;
    for (double v : row) sum += v;
    if (std::abs(sum - 1.0) <= kRenormalizeTolerance && sum > 0.0) {
      for (double& v : row) v /= sum;
    }
  }
  check_policy(mdp, policy);
  return policy;
}

Json ext_real_to_json(const ExtReal& v) {
  if (v.is_infinite()) return "inf";
  return v.to_double();
}

ExtReal ext_real_from_json(const Json& v) {
  if (v.is_string() && v.get<std::string>() == "inf") return ExtReal::infinity();
  return ExtReal(v.get<double>());
}

}  // namespace mininfo

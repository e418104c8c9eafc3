#include "mininfo/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mininfo/adversary.hpp"
#include "mininfo/components.hpp"
#include "mininfo/errors.hpp"
#include "mininfo/mdp_json.hpp"
#include "mininfo/reachability.hpp"
#include "mininfo/synthesis.hpp"
#include "mininfo/worlds.hpp"

namespace mininfo {

namespace {

struct Config {
  std::string mdp_path;
  std::string spec_path;
  std::string policy_path;
  std::string out_path;
  std::string csv_path;
  std::string heatmap_path;
  std::string policy_out;
  std::string mode = "closed";
  double tol = 1e-6;
  int exhaustive_cap = 20;
  std::uint64_t seed = 1;
  long long paths = 1000;
  int horizon = 0;
  int threads = 0;
  bool exclude_no_sample = false;
  bool synthesize = false;
  std::optional<double> exit_weight;
};

struct InputError : Error {
  using Error::Error;
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Mdp load_valid_mdp(const Config& cfg, std::ostream& err) {
  if (cfg.mdp_path.empty()) throw InputError("--mdp is required");
  Mdp mdp = load_mdp(cfg.mdp_path);
  require_valid(mdp);
  for (const auto& w : warnings(mdp)) err << "warning: " << w << "\n";
  return mdp;
}

Json state_list(const Mdp& mdp, const std::vector<StateId>& states) {
  Json out = Json::array();
  for (StateId s : states) out.push_back(mdp.states[s]);
  return out;
}

Json sub_mdp_json(const Mdp& mdp, const SubMdp& sub) {
  Json actions = Json::object();
  for (std::size_t i = 0; i < sub.states.size(); ++i) {
    Json names = Json::array();
    for (int a : sub.actions[i]) names.push_back(mdp.actions[sub.states[i]][a].name);
    actions[mdp.states[sub.states[i]]] = names;
  }
  return {{"states", state_list(mdp, sub.states)}, {"actions", actions}};
}

Json occupation_json(const Mdp& mdp, const OccupationSolution& sol) {
  Json out = Json::object();
  for (StateId s = 0; s < mdp.num_states() && s < static_cast<int>(sol.x.size()); ++s) {
    if (sol.c_end[s]) continue;
    Json row = Json::object();
    bool any = false;
    for (std::size_t a = 0; a < sol.x[s].size(); ++a) {
      if (sol.x[s][a] == 0.0) continue;
      row[mdp.actions[s][a].name] = sol.x[s][a];
      any = true;
    }
    if (any) out[mdp.states[s]] = row;
  }
  return out;
}

Json synthesis_json(const Mdp& mdp, const SynthesisResult& r) {
  Json doc;
  doc["mode"] = to_string(r.mode);
  doc["status"] = to_string(r.status);
  if (r.status == SolveStatus::kInfeasible) return doc;
  doc["objective"] = ext_real_to_json(r.objective);
  doc["information"] = ext_real_to_json(r.information);
  doc["reach_prob"] = r.reach_prob;
  doc["c_end"] = state_list(mdp, r.c_end);
  doc["policy"] = policy_to_json(mdp, r.policy);
  if (r.switch_policy) {
    const auto& sp = *r.switch_policy;
    Json probs = Json::object();
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      if (sp.c_end[s]) probs[mdp.states[s]] = sp.switch_prob[s];
    }
    doc["switch_probs"] = probs;
    doc["stay_policy"] = policy_to_json(mdp, sp.stay);
  } else if (r.status == SolveStatus::kOptimal) {
    doc["occupation"] = occupation_json(mdp, r.solution);
  }
  return doc;
}

struct LoadedPolicy {
  StationaryPolicy stationary;
  std::optional<SwitchPolicy> switching;
};

LoadedPolicy load_policy(const Mdp& mdp, const std::string& path) {
  if (path.empty()) throw InputError("--policy is required");
  const Json doc = read_json_file(path);
  LoadedPolicy out;
  const Json& map = doc.contains("policy") ? doc.at("policy") : doc;
  out.stationary = policy_from_json(mdp, map);
  if (doc.contains("switch_probs")) {
    SwitchPolicy sp;
    sp.policy = out.stationary;
    sp.stay = policy_from_json(mdp, doc.at("stay_policy"));
    sp.c_end.assign(mdp.num_states(), 0);
    sp.switch_prob.assign(mdp.num_states(), 0.0);
    for (const auto& [name, p] : doc.at("switch_probs").items()) {
      auto s = mdp.find(name);
      if (!s) throw InvalidPolicy("switch probability for unknown state '" + name + "'");
      sp.c_end[*s] = 1;
      sp.switch_prob[*s] = p.get<double>();
    }
    const auto modified = build_modified_mdp(mdp);
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      if (sp.c_end[s] != modified.c_end[s]) {
        throw InvalidPolicy("switch states do not match the UMEC states of the model");
      }
    }
    sp.base = lift_switch_policy(modified, sp);
    out.switching = std::move(sp);
  }
  return out;
}

int cmd_validate(const Config& cfg, std::ostream& out) {
  if (cfg.mdp_path.empty()) throw InputError("--mdp is required");
  const Mdp mdp = load_mdp(cfg.mdp_path);
  const auto violations = validate(mdp);
  Json list = Json::array();
  for (const auto& v : violations) {
    list.push_back({{"state", v.state}, {"action", v.action}, {"message", v.message}});
  }
  Json doc{{"valid", violations.empty()}, {"violations", list}, {"warnings", warnings(mdp)}};
  emit(cfg.out_path, dump(doc), out);
  return violations.empty() ? kExitOk : kExitInput;
}

int cmd_analyze(const Config& cfg, std::ostream& out, std::ostream& err) {
  const Mdp mdp = load_valid_mdp(cfg, err);
  const auto report = analyze_components(mdp);
  Json mecs = Json::array();
  for (const auto& m : report.mecs) mecs.push_back(sub_mdp_json(mdp, m));
  Json umecs = Json::array();
  for (const auto& m : report.umecs) {
    Json j = sub_mdp_json(mdp, m);
    j["closed"] = is_closed(mdp, m.states);
    umecs.push_back(j);
  }
  Json doc{{"mecs", mecs},
           {"umecs", umecs},
           {"c_end", state_list(mdp, report.c_end)},
           {"assumption1", report.assumption1_holds},
           {"max_reach_prob", max_reach_probability(mdp)},
           {"feasible", feasibility_check(mdp) == Feasibility::kFeasible}};
  emit(cfg.out_path, dump(doc), out);
  return kExitOk;
}

Mode mode_of(const Config& cfg) {
  auto m = parse_mode(cfg.mode);
  if (!m) throw InputError("unknown mode '" + cfg.mode + "' (closed, exhaustive or switch)");
  return *m;
}

int report_synthesis(const Mdp& mdp, const SynthesisResult& r, const std::string& path,
                     std::ostream& out, std::ostream& err, double seconds) {
  emit(path, dump(synthesis_json(mdp, r)), out);
  if (r.status == SolveStatus::kInfeasible) {
    err << "no admissible policy: maximum reach probability " << max_reach_probability(mdp)
        << " is below the threshold " << mdp.reach.threshold << "\n";
    return kExitInfeasible;
  }
  err << "status=" << to_string(r.status) << " objective=" << r.objective
      << " reach_prob=" << r.reach_prob << " mode=" << to_string(r.mode) << " time=" << seconds
      << "s\n";
  return kExitOk;
}

int cmd_synthesize(const Config& cfg, std::ostream& out, std::ostream& err) {
  const Mdp mdp = load_valid_mdp(cfg, err);
  SolveOptions opt;
  opt.tol = cfg.tol;
  const auto start = std::chrono::steady_clock::now();
  const auto r = synthesize(mdp, mode_of(cfg), opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report_synthesis(mdp, r, cfg.out_path, out, err, secs);
}

int cmd_simulate(const Config& cfg, std::ostream& out, std::ostream& err) {
  const Mdp mdp = load_valid_mdp(cfg, err);
  if (cfg.paths < 1) throw InputError("--paths must be at least 1");
  if (cfg.horizon < 0) throw InputError("--horizon must be positive");
  const auto policy = load_policy(mdp, cfg.policy_path);
  SimulationOptions sim;
  sim.paths = static_cast<int>(cfg.paths);
  sim.horizon = cfg.horizon;
  sim.seed = cfg.seed;
  sim.threads = cfg.threads;
  const auto paths = policy.switching ? simulate_paths(mdp, *policy.switching, sim)
                                      : simulate_paths(mdp, policy.stationary, sim);
  auto report = estimate(paths, mdp);
  mse_report(report, mdp, policy.stationary,
             cfg.exclude_no_sample ? NoSample::kExclude : NoSample::kUniform);
  const auto bounds = policy.switching ? cramer_rao_bounds(mdp, *policy.switching)
                                       : cramer_rao_bounds(mdp, policy.stationary);
  attach_bounds(report, bounds);
  Json doc = report_to_json(mdp, report);
  doc["seed"] = cfg.seed;
  doc["horizon"] = cfg.horizon > 0 ? cfg.horizon : 10 * mdp.num_states();
  emit(cfg.out_path, dump(doc), out);
  if (!cfg.csv_path.empty()) emit(cfg.csv_path, report_to_csv(mdp, report), out);
  if (report.truncated_paths > 0) {
    err << "warning: " << report.truncated_paths << " paths hit the horizon before absorption\n";
  }
  return kExitOk;
}

int cmd_bounds(const Config& cfg, std::ostream& out, std::ostream& err) {
  const Mdp mdp = load_valid_mdp(cfg, err);
  const auto policy = load_policy(mdp, cfg.policy_path);
  const auto bounds = policy.switching ? cramer_rao_bounds(mdp, *policy.switching)
                                       : cramer_rao_bounds(mdp, policy.stationary);
  emit(cfg.out_path, dump(bounds_to_json(mdp, bounds)), out);
  return kExitOk;
}

int cmd_grid(const Config& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.spec_path.empty()) throw InputError("--spec is required");
  GridSpec spec = load_grid_spec(cfg.spec_path);
  if (cfg.exit_weight) {
    for (auto& g : spec.exit_groups) g.weight = *cfg.exit_weight;
  }
  const Mdp mdp = build_grid_mdp(spec);
  require_valid(mdp);
  if (max_reach_probability(mdp) < spec.reach_threshold - 1e-9) {
    err << "warning: the goal cannot be reached with the required probability\n";
  }
  err << "grid '" << spec.label << "': " << mdp.num_states() << " states, "
      << mdp.observed_states().size() << " observed\n";
  if (!cfg.synthesize) {
    emit(cfg.out_path, dump(mdp_to_json(mdp)), out);
    return kExitOk;
  }
  if (!cfg.out_path.empty()) emit(cfg.out_path, dump(mdp_to_json(mdp)), out);
  SolveOptions opt;
  opt.tol = cfg.tol;
  opt.groups = spec.exit_groups.empty() ? std::vector<GroupTerm>{} : exit_information_terms(spec, mdp);
  const auto start = std::chrono::steady_clock::now();
  const auto r = synthesize(mdp, mode_of(cfg), opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const int code = report_synthesis(mdp, r, cfg.policy_out, out, err, secs);
  if (code == kExitOk && !cfg.heatmap_path.empty()) {
    std::vector<double> values(mdp.num_states(), 0.0);
    if (r.status == SolveStatus::kOptimal) {
      for (StateId s = 0; s < mdp.num_states(); ++s) values[s] = r.solution.residence(s);
    }
    emit(cfg.heatmap_path, export_heatmap(mdp, values), out);
  }
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum-information policy synthesis for MDPs", "mininfo"};
  app.require_subcommand(1);
  Config cfg;

  auto add_mdp = [&](CLI::App* c) { c->add_option("--mdp", cfg.mdp_path, "MDP JSON file")->required(); };
  auto add_out = [&](CLI::App* c) { c->add_option("--out", cfg.out_path, "output file (default stdout)"); };
  auto add_solver = [&](CLI::App* c) {
    c->add_option("--mode", cfg.mode, "closed, exhaustive or switch");
    c->add_option("--tol", cfg.tol, "objective tolerance")->check(CLI::PositiveNumber);
  };

  auto* validate_cmd = app.add_subcommand("validate", "check an MDP file");
  add_mdp(validate_cmd);
  add_out(validate_cmd);

  auto* analyze_cmd = app.add_subcommand("analyze", "end component report");
  add_mdp(analyze_cmd);
  add_out(analyze_cmd);

  auto* synth_cmd = app.add_subcommand("synthesize", "minimum-information policy");
  add_mdp(synth_cmd);
  add_out(synth_cmd);
  add_solver(synth_cmd);

  auto* sim_cmd = app.add_subcommand("simulate", "observer simulation and estimation errors");
  add_mdp(sim_cmd);
  add_out(sim_cmd);
  sim_cmd->add_option("--policy", cfg.policy_path, "policy JSON file")->required();
  sim_cmd->add_option("--paths", cfg.paths, "number of sampled paths");
  sim_cmd->add_option("--horizon", cfg.horizon, "maximum transitions per path (default 10|S|)");
  sim_cmd->add_option("--seed", cfg.seed, "random seed");
  sim_cmd->add_option("--threads", cfg.threads, "worker threads (default: all cores)");
  sim_cmd->add_option("--csv", cfg.csv_path, "per-state CSV output");
  sim_cmd->add_flag("--exclude-no-sample", cfg.exclude_no_sample,
                    "leave states without samples out of the MSE totals");

  auto* bounds_cmd = app.add_subcommand("bounds", "Cramér-Rao bounds of a policy");
  add_mdp(bounds_cmd);
  add_out(bounds_cmd);
  bounds_cmd->add_option("--policy", cfg.policy_path, "policy JSON file")->required();

  auto* grid_cmd = app.add_subcommand("grid", "generate a grid-world MDP");
  grid_cmd->add_option("--spec", cfg.spec_path, "grid spec JSON file")->required();
  add_out(grid_cmd);
  add_solver(grid_cmd);
  grid_cmd->add_flag("--synthesize", cfg.synthesize, "also synthesize a policy");
  grid_cmd->add_option("--policy-out", cfg.policy_out, "policy JSON output (with --synthesize)");
  grid_cmd->add_option("--heatmap", cfg.heatmap_path, "residence-time CSV (with --synthesize)");
  grid_cmd->add_option("--exit-weight", cfg.exit_weight, "override every exit group weight")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*validate_cmd) return cmd_validate(cfg, out);
    if (*analyze_cmd) return cmd_analyze(cfg, out, err);
    if (*synth_cmd) return cmd_synthesize(cfg, out, err);
    if (*sim_cmd) return cmd_simulate(cfg, out, err);
    if (*bounds_cmd) return cmd_bounds(cfg, out, err);
    if (*grid_cmd) return cmd_grid(cfg, out, err);
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace mininfo

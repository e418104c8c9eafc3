#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mininfo/mdp.hpp"
#include "mininfo/mdp_json.hpp"
#include "mininfo/synthesis.hpp"

namespace mininfo {

struct PathSample {
  std::vector<StateId> states;
  bool truncated = false;  ///< horizon reached before absorption
};

struct SimulationOptions {
  int paths = 1000;
  int horizon = 0;  ///< 0 means 10 * |S|
  std::uint64_t seed = 1;
  int threads = 0;  ///< 0 means hardware concurrency
};

/// Per-path generator seed derived from the run seed.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

/// Paths stop when they enter a recurrent class of the induced chain that
/// holds no observed state (absorption) or after `horizon` transitions.
std::vector<PathSample> simulate_paths(const Mdp& mdp, const StationaryPolicy& policy,
                                       const SimulationOptions& options);
/// Switching policy: a path also stops once the agent switches, since it
/// then stays inside unobserved states forever.
std::vector<PathSample> simulate_paths(const Mdp& mdp, const SwitchPolicy& policy,
                                       const SimulationOptions& options);

struct StateEstimate {
  StateId state = 0;
  std::vector<StateId> successors;  ///< Succ(w)
  long long count = 0;              ///< observed departures
  std::vector<long long> hits;
  std::vector<double> estimate;     ///< empirical successor frequencies
  bool no_sample = false;
  std::vector<double> truth;
  double mse = 0.0;
  // Cramér–Rao data
  double residence = 0.0;
  ExtReal iota;
  double reach = 0.0;
  double bound = 0.0;
  bool unvisited = false;
};

struct EstimationReport {
  std::vector<StateEstimate> states;  ///< one per observed state
  long long total_count = 0;
  int truncated_paths = 0;
  int num_paths = 0;
  double total_mse = 0.0;
  double weighted_mse = 0.0;
  double bound_sum = 0.0;
  double corollary_bound = 0.0;
  ExtReal expected_information;
};

/// Counts departures and empirical successor frequencies per observed state.
EstimationReport estimate(std::span<const PathSample> paths, const Mdp& mdp);

enum class NoSample { kUniform, kExclude };

/// Fills truth, per-state MSE and the totals. States without samples use
/// the uniform distribution over Succ(w) as their estimate, or are left out
/// of the totals with NoSample::kExclude.
void mse_report(EstimationReport& report, const Mdp& mdp, const StationaryPolicy& policy,
                NoSample no_sample = NoSample::kUniform);

struct StateBound {
  StateId state = 0;
  double residence = 0.0;  ///< +inf for recurrent states
  ExtReal iota;
  double reach = 0.0;      ///< Pr(Reach[w])
  double bound = 0.0;      ///< reach^2 / (x_w iota_w)
  bool unvisited = false;
};

struct CramerRao {
  std::vector<StateBound> states;
  double sum = 0.0;
  double corollary = 0.0;  ///< min reach^2 |W|^2 / E[iota]
  ExtReal expected_information;
};

CramerRao cramer_rao_bounds(const Mdp& mdp, const StationaryPolicy& policy);
/// Bounds for the process of a switching policy, evaluated on the modified
/// MDP and reported for the original observed states.
CramerRao cramer_rao_bounds(const Mdp& mdp, const SwitchPolicy& policy);

/// Copies the bounds into the matching report entries and totals.
void attach_bounds(EstimationReport& report, const CramerRao& bounds);

Json report_to_json(const Mdp& mdp, const EstimationReport& report);
std::string report_to_csv(const Mdp& mdp, const EstimationReport& report);
Json bounds_to_json(const Mdp& mdp, const CramerRao& bounds);

}  // namespace mininfo

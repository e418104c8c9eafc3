#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mininfo/components.hpp"
#include "mininfo/errors.hpp"
#include "mininfo/information.hpp"
#include "mininfo/reachability.hpp"
#include "mininfo/synthesis.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_mdp.hpp"

using namespace mininfo;
using doctest::Approx;

namespace {

std::vector<char> mask_of(const Mdp& m, std::span<const StateId> states) {
  std::vector<char> mask(m.num_states(), 0);
  for (StateId s : states) mask[s] = 1;
  return mask;
}

std::vector<char> umec_states(const Mdp& m) {
  return mask_of(m, analyze_components(m).c_end);
}

double x_of(const Mdp& m, const OccupationSolution& sol, const char* s, const char* a) {
  const StateId id = m.index_of(s);
  return sol.x[id][m.action_index(id, a)];
}

// relative residence-time agreement of the extracted policy with x
void check_round_trip(const Mdp& m, const OccupationSolution& sol, const StationaryPolicy& pi) {
  const auto ev = evaluate_policy(m, pi);
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (sol.c_end[s]) continue;
    const double xs = sol.residence(s);
    if (xs <= 1e-6) continue;
    REQUIRE(ev.residence[s].is_finite());
    CHECK(std::abs(ev.residence[s].value() - xs) <= 1e-5 * xs);
    for (std::size_t a = 0; a < m.actions[s].size(); ++a) {
      CHECK(std::abs(ev.residence[s].value() * pi.prob[s][a] - sol.x[s][a]) <= 1e-5 * xs);
    }
  }
}

}  // namespace

TEST_CASE("feasibility check") {
  Mdp e1 = fixtures::load("example1");
  e1.reach.threshold = 1.0;
  CHECK(feasibility_check(e1) == Feasibility::kFeasible);
  CHECK(feasibility_check(fixtures::load("fig5a")) == Feasibility::kFeasible);

  Mdp f2 = fixtures::load("fig2");
  f2.reach.threshold = 1.0;
  CHECK(feasibility_check(f2) == Feasibility::kFeasible);
  CHECK(max_reach_probability(f2) == Approx(1.0));
  auto& s1 = f2.actions[1];
  s1.erase(s1.begin());  // drop alpha
  CHECK(feasibility_check(f2) == Feasibility::kInfeasible);
  CHECK(solve_program6(f2, umec_states(f2)).status == SolveStatus::kInfeasible);
  CHECK(synthesize(f2, Mode::kClosed).status == SolveStatus::kInfeasible);
}

TEST_CASE("max reach on fig 4a with a leaky self loop") {
  Mdp m = fixtures::load("fig4a");
  const auto r = max_reach(m, all_actions(m), m.target_mask(), m.target_mask());
  CHECK(r.value[0] == Approx(1.0));
  CHECK(r.value[1] == Approx(1.0));
  const auto pi = max_reach_policy(m);
  CHECK(evaluate_policy(m, pi).reach_prob == Approx(1.0));
}

TEST_CASE("example 1 closed solve") {
  const Mdp m = fixtures::load("example1");
  const auto sol = solve_program6(m, umec_states(m));
  REQUIRE(sol.status == SolveStatus::kOptimal);
  const auto oracle = oracles::example1_grid(1e-5);
  CHECK(oracle.argmin == Approx(0.386).epsilon(0.002));
  CHECK(x_of(m, sol, "s0", "alpha") == Approx(oracle.argmin).epsilon(1e-3));
  CHECK(x_of(m, sol, "s0", "beta") == Approx(1.0 - oracle.argmin).epsilon(1e-3));
  CHECK(x_of(m, sol, "s1", "alpha") == Approx(oracle.argmin / 2).epsilon(1e-3));
  CHECK(x_of(m, sol, "s1", "beta") == Approx(oracle.argmin / 2).epsilon(1e-3));
  CHECK(sol.objective.value() == Approx(oracle.value).epsilon(1e-6));
  CHECK(sol.objective.value() == Approx(2.882).epsilon(1e-3));
  CHECK(sol.flow_residual(m) <= 1e-6);

  const auto pi = extract_policy(m, sol, sol.c_end, stay_policy(m, *is_union_uec(m, analyze_components(m).c_end)));
  CHECK(pi.at(m, 0, "alpha") == Approx(0.386).epsilon(0.003));
  CHECK(pi.at(m, 1, "alpha") == Approx(0.5).epsilon(1e-4));
  check_round_trip(m, sol, pi);
}

TEST_CASE("empty observed set gives objective zero") {
  // example 1 with nothing observed; the UMECs stay the absorbing targets
  Mdp m = fixtures::load("example1");
  std::fill(m.observed.begin(), m.observed.end(), 0);
  m.reach.threshold = 0.7;
  const auto sol = solve_program6(m, umec_states(m));
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.objective.value() == 0.0);
  CHECK(sol.flow_residual(m) <= 1e-6);
  CHECK(sol.reach_prob >= m.reach.threshold - 1e-6);
}

TEST_CASE("fig 2 closed solve matches the policy grid") {
  const Mdp m = fixtures::load("fig2");
  const auto sol = solve_program6(m, umec_states(m));
  REQUIRE(sol.status == SolveStatus::kOptimal);
  const auto oracle = oracles::policy_grid_minimum(m, 0.01, 4, 2);
  CHECK(sol.objective.value() <= oracle.value + 1e-3);
  CHECK(oracle.value <= sol.objective.value() + 1e-3);
  CHECK(sol.objective.value() == Approx(3.375).epsilon(1e-6));
  // all flow goes through s1, which loops on beta with probability 1/3
  CHECK(x_of(m, sol, "s0", "beta") <= 1e-6);
  CHECK(x_of(m, sol, "s1", "beta") == Approx(0.5).epsilon(1e-4));
}

TEST_CASE("extract policy branches") {
  // s3 has three actions and is never entered
  Mdp m = fixtures::load("example1");
  m.states.push_back("s4");
  m.observed.push_back(1);
  m.actions.push_back({Action{"a", {{2, 1.0}}}, Action{"b", {{3, 1.0}}}, Action{"c", {{2, 0.5}, {3, 0.5}}}});
  REQUIRE(validate(m).empty());
  const auto sol = solve_program6(m, umec_states(m));
  REQUIRE(sol.status == SolveStatus::kOptimal);
  const auto u = is_union_uec(m, analyze_components(m).c_end);
  StationaryPolicy stay = stay_policy(m, *u);
  const auto pi = extract_policy(m, sol, sol.c_end, stay);
  for (int a = 0; a < 3; ++a) CHECK(pi.prob[4][a] == Approx(1.0 / 3));
  CHECK(pi.prob[2] == stay.prob[2]);
  CHECK(pi.prob[3] == stay.prob[3]);
}

TEST_CASE("stay policies") {
  const Mdp a = fixtures::load("fig5a");
  const std::vector<StateId> ends{4, 5};
  const auto sa = stay_policy(a, *is_union_uec(a, ends));
  CHECK(sa.at(a, 4, "alpha") == 1.0);
  CHECK(sa.at(a, 5, "alpha") == 1.0);

  const Mdp b = fixtures::load("fig5b");
  const std::vector<StateId> loop{1, 2};
  const auto sb = stay_policy(b, *is_union_uec(b, loop));
  CHECK(sb.at(b, 2, "alpha") == 0.5);
  CHECK(sb.at(b, 2, "beta") == 0.5);
  CHECK(sb.at(b, 1, "alpha") == 1.0);
  CHECK(sb.at(b, 1, "beta") == 0.0);
  // inside-support property
  for (StateId s : loop) {
    double inside = 0.0;
    for (std::size_t k = 0; k < b.actions[s].size(); ++k) {
      for (const auto& t : b.actions[s][k].successors) {
        if (t.to == 1 || t.to == 2) inside += sb.prob[s][k] * t.prob;
      }
    }
    CHECK(inside == Approx(1.0));
  }

  const auto se = stay_policy(b, SubMdp{});
  CHECK(se.prob == StationaryPolicy::uniform(b).prob);
  SubMdp broken{{1}, {{}}};
  CHECK_THROWS_AS(stay_policy(b, broken), InvalidUnion);
}

TEST_CASE("exhaustive search on fig 5b") {
  const Mdp m = fixtures::load("fig5b");
  const auto r = exhaustive_search(m);
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.policy.at(m, 1, "alpha") == Approx(0.5).epsilon(1e-3));
  CHECK(r.policy.at(m, 1, "beta") == Approx(0.5).epsilon(1e-3));
  CHECK(r.policy.at(m, 2, "alpha") == Approx(0.0).epsilon(1e-3));
  CHECK(r.policy.at(m, 2, "beta") == Approx(1.0).epsilon(1e-3));
  CHECK(r.solution.objective.value() == Approx(1.0).epsilon(1e-6));
  const auto ev = evaluate_policy(m, r.policy);
  CHECK(ev.reach_prob == Approx(0.5).epsilon(1e-6));
  CHECK(ev.total.value() == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("exhaustive search on fig 5a reports twice the residence of s3") {
  const Mdp m = fixtures::load("fig5a");
  const auto r = exhaustive_search(m);
  REQUIRE(r.status == SolveStatus::kOptimal);
  const double x3 = r.solution.residence(3);
  CHECK(r.solution.objective.value() == Approx(2.0 * x3).epsilon(1e-6));
  CHECK(r.policy.at(m, 1, "beta") > 0.0);
  CHECK(evaluate_policy(m, r.policy).reach_prob == Approx(1.0));
}

TEST_CASE("exhaustive search collapses to the closed solve when umecs are closed") {
  for (const char* name : {"example1", "fig2", "fig4a"}) {
    const Mdp m = fixtures::load(name);
    const auto closed = solve_program6(m, umec_states(m));
    const auto ex = exhaustive_search(m);
    REQUIRE(ex.status == SolveStatus::kOptimal);
    CHECK(ex.solution.objective.value() == Approx(closed.objective.value()).epsilon(1e-6));
  }
}

TEST_CASE("exhaustive search refuses large searches") {
  // one unobserved absorbing state per copy, 21 of them
  Mdp m;
  m.states = {"s0"};
  m.observed = {1};
  m.actions.resize(1);
  for (int i = 0; i < 21; ++i) {
    const StateId t = m.num_states();
    m.states.push_back("t" + std::to_string(i));
    m.observed.push_back(0);
    m.actions.push_back({Action{"stay", {{t, 1.0}}}});
    m.actions[0].push_back(Action{"go" + std::to_string(i), {{t, 1.0}}});
  }
  CHECK_THROWS_AS(exhaustive_search(m), SearchTooLarge);
}

TEST_CASE("modified model for fig 5a") {
  const Mdp m = fixtures::load("fig5a");
  const auto mod = build_modified_mdp(m);
  CHECK(mod.mdp.num_states() == 10);
  CHECK(validate(mod.mdp).empty());
  for (const char* s : {"s1", "s2", "s4", "s5"}) {
    const StateId id = m.index_of(s);
    const StateId dup = mod.mdp.index_of(std::string(s) + "_bar");
    CHECK(mod.duplicate[id] == dup);
    CHECK(mod.original[dup] == id);
    CHECK(mod.c_end_bar[dup]);
    const int sw = mod.mdp.action_index(id, kSwitchAction);
    REQUIRE(sw >= 0);
    CHECK(mod.mdp.actions[id][sw].successors.size() == 1);
    CHECK(mod.mdp.actions[id][sw].successors[0].to == dup);
  }
  const StateId s1bar = mod.mdp.index_of("s1_bar");
  REQUIRE(mod.mdp.actions[s1bar].size() == 1);
  CHECK(mod.mdp.actions[s1bar][0].name == "alpha");
  CHECK(mod.mdp.actions[s1bar][0].successors[0].to == mod.mdp.index_of("s2_bar"));
  CHECK(mod.mdp.action_index(m.index_of("s3"), kSwitchAction) < 0);
  std::vector<StateId> targets{mod.mdp.index_of("s4_bar"), mod.mdp.index_of("s5_bar")};
  std::sort(targets.begin(), targets.end());
  CHECK(mod.mdp.reach.targets == targets);
}

TEST_CASE("modified model without unobserved end components is unchanged") {
  Mdp m = fixtures::line_chain();
  std::fill(m.observed.begin(), m.observed.end(), 1);
  m.reach.targets.clear();
  m.reach.threshold = 0.0;
  const auto mod = build_modified_mdp(m);
  CHECK(mod.mdp.num_states() == 3);
  CHECK(mod.mdp.actions[2].size() == 1);
}

TEST_CASE("modified model for example 1") {
  const Mdp m = fixtures::load("example1");
  const auto mod = build_modified_mdp(m);
  const StateId d2 = mod.mdp.index_of("s2_bar");
  const StateId d3 = mod.mdp.index_of("s3_bar");
  CHECK(mod.mdp.actions[d2][0].successors[0].to == d2);
  CHECK(mod.mdp.actions[d3][0].successors[0].to == d3);
  CHECK(mod.mdp.reach.targets == std::vector<StateId>{d2, d3});
}

TEST_CASE("an existing switch action is rejected") {
  Mdp m = fixtures::load("example1");
  m.actions[2][0].name = kSwitchAction;
  CHECK_THROWS_AS(build_modified_mdp(m), InvalidMdp);
}

TEST_CASE("switch solve on fig 5a") {
  const Mdp m = fixtures::load("fig5a");
  const auto r = solve_switch(m);
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.solution.objective.value() == Approx(1.0).epsilon(1e-6));
  CHECK(r.solution.residence(3) == Approx(0.5).epsilon(1e-6));
  CHECK(r.solution.reach_prob == Approx(0.5).epsilon(1e-6));
  CHECK(r.policy.switch_prob[1] + r.policy.switch_prob[2] > 0.0);
  CHECK(r.policy.switch_prob[3] == 0.0);
  const auto mod = build_modified_mdp(m);
  CHECK(r.solution.flow_residual(mod.mdp) <= 1e-6);
  const auto ev = evaluate_policy(mod.mdp, lift_switch_policy(mod, r.policy));
  CHECK(ev.total.value() == Approx(1.0).epsilon(1e-5));
  CHECK(ev.reach_prob == Approx(0.5).epsilon(1e-5));
}

TEST_CASE("switch solve agrees with the other modes where they apply") {
  const Mdp b = fixtures::load("fig5b");
  CHECK(solve_switch(b).solution.objective.value() ==
        Approx(exhaustive_search(b).solution.objective.value()).epsilon(1e-6));
  for (const char* name : {"example1", "fig2", "fig4a"}) {
    const Mdp m = fixtures::load(name);
    CHECK(solve_switch(m).solution.objective.value() ==
          Approx(solve_program6(m, umec_states(m)).objective.value()).epsilon(1e-6));
  }
}

TEST_CASE("act follows the switching rule") {
  const Mdp m = fixtures::load("fig5b");
  SwitchPolicy sp;
  sp.c_end = {0, 1, 1, 0, 1, 1};
  sp.switch_prob = {0, 0.4, 0, 0, 0, 0};
  sp.policy = StationaryPolicy::uniform(m);
  sp.policy.prob[1] = {0.0, 1.0};  // beta
  sp.stay = stay_policy(m, *is_union_uec(m, std::vector<StateId>{1, 2, 4, 5}));
  std::vector<double> draws;
  std::size_t next = 0;
  auto uniform = [&] { return draws[next++]; };

  draws = {0.3, 0.99};
  next = 0;
  auto r = act(sp, 1, false, uniform);
  CHECK(r.switched);
  CHECK(m.actions[1][r.action].name == "alpha");

  draws = {0.5, 0.2};
  next = 0;
  r = act(sp, 1, false, uniform);
  CHECK(!r.switched);
  CHECK(m.actions[1][r.action].name == "beta");

  draws = {0.99};
  next = 0;
  r = act(sp, 1, true, uniform);
  CHECK(r.switched);
  CHECK(m.actions[1][r.action].name == "alpha");

  draws = {0.1};
  next = 0;
  r = act(sp, 0, false, uniform);
  CHECK(!r.switched);
  CHECK(r.action == 0);
  CHECK(next == 1);
}

TEST_CASE("solves satisfy flow balance and reproduce residence times on random models") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    fixtures::RandomMdpOptions o;
    o.transient = 3 + trial % 4;
    Mdp m = fixtures::random_mdp(rng, o);
    m.reach.threshold = fixtures::random_threshold(rng, m);
    const auto c_end = umec_states(m);
    const auto sol = solve_program6(m, c_end);
    REQUIRE(sol.status != SolveStatus::kInfeasible);
    if (sol.status != SolveStatus::kOptimal) continue;
    CHECK(sol.flow_residual(m) <= 1e-6);
    CHECK(sol.reach_prob >= m.reach.threshold - 1e-6);
    const auto u = is_union_uec(m, analyze_components(m).c_end);
    const auto pi = extract_policy(m, sol, c_end, stay_policy(m, *u));
    check_round_trip(m, sol, pi);
    const auto ev = evaluate_policy(m, pi);
    CHECK(ev.reach_prob >= m.reach.threshold - 1e-6);
  }
}

TEST_CASE("relabeling states leaves the objective unchanged") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    Mdp m = fixtures::random_mdp(rng);
    m.reach.threshold = fixtures::random_threshold(rng, m);
    const int n = m.num_states();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);  // perm[old] = new
    Mdp p;
    p.states.resize(n);
    p.actions.resize(n);
    p.observed.resize(n);
    for (int s = 0; s < n; ++s) {
      p.states[perm[s]] = m.states[s];
      p.observed[perm[s]] = m.observed[s];
      auto acts = m.actions[s];
      for (auto& a : acts) {
        for (auto& t : a.successors) t.to = perm[t.to];
        std::sort(a.successors.begin(), a.successors.end(),
                  [](const Transition& x, const Transition& y) { return x.to < y.to; });
      }
      p.actions[perm[s]] = acts;
    }
    p.initial = perm[m.initial];
    for (StateId t : m.reach.targets) p.reach.targets.push_back(perm[t]);
    p.reach.threshold = m.reach.threshold;
    const auto a = synthesize(m, Mode::kClosed);
    const auto b = synthesize(p, Mode::kClosed);
    REQUIRE(a.status == b.status);
    if (a.status != SolveStatus::kOptimal) continue;
    CHECK(b.objective.value() == Approx(a.objective.value()).epsilon(1e-6));
    CHECK(evaluate_policy(p, b.policy).total.value() == Approx(a.objective.value()).epsilon(1e-5));
  }
}

TEST_CASE("synthesize dispatch and statuses") {
  const Mdp a = fixtures::load("fig5a");
  CHECK_THROWS_AS(synthesize(a, Mode::kClosed), InvalidMdp);
  const auto ex = synthesize(a, Mode::kExhaustive);
  CHECK(ex.status == SolveStatus::kOptimal);
  const auto sw = synthesize(a, Mode::kSwitch);
  REQUIRE(sw.switch_policy.has_value());
  CHECK(sw.objective.value() == Approx(1.0).epsilon(1e-6));
  CHECK(parse_mode("switch") == Mode::kSwitch);
  CHECK(!parse_mode("bogus").has_value());
  CHECK(to_string(SolveStatus::kInfiniteInformation) == "infinite_information");
}

TEST_CASE("a reach requirement that forces an observed loop leaks infinite information") {
  // s0 observed, alpha goes to target only through a deterministic observed step
  Mdp m;
  m.states = {"s0", "goal", "sink"};
  m.observed = {1, 0, 0};
  m.actions = {{Action{"alpha", {{1, 1.0}}}, Action{"beta", {{2, 1.0}}}},
               {Action{"stay", {{1, 1.0}}}},
               {Action{"stay", {{2, 1.0}}}}};
  m.reach.targets = {1};
  m.reach.threshold = 1.0;
  const auto r = synthesize(m, Mode::kClosed);
  CHECK(r.status == SolveStatus::kInfiniteInformation);
  CHECK(r.objective.is_infinite());
  CHECK(r.policy.at(m, 0, "alpha") == 1.0);
  const auto raw = solve_program6(m, umec_states(m));
  CHECK(raw.status == SolveStatus::kInfiniteInformation);
  CHECK(raw.objective.is_infinite());
  m.reach.threshold = 0.5;
  const auto half = synthesize(m, Mode::kClosed);
  REQUIRE(half.status == SolveStatus::kOptimal);
  CHECK(half.objective.value() == Approx(2.0).epsilon(1e-6));
}

#include <doctest.h>

#include <algorithm>
#include <random>

#include "mininfo/components.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_mdp.hpp"

using namespace mininfo;

namespace {

std::vector<std::vector<StateId>> state_sets(const std::vector<SubMdp>& subs) {
  std::vector<std::vector<StateId>> out;
  for (const auto& s : subs) out.push_back(s.states);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<StateId> ids(const Mdp& m, std::initializer_list<const char*> names) {
  std::vector<StateId> out;
  for (const char* n : names) out.push_back(m.index_of(n));
  return out;
}

}  // namespace

TEST_CASE("maximal end components of the fixtures") {
  const Mdp f2 = fixtures::load("fig2");
  CHECK(state_sets(maximal_end_components(f2)) ==
        std::vector<std::vector<StateId>>{{1}, {2}, {3, 4}});
  const Mdp e1 = fixtures::load("example1");
  CHECK(state_sets(maximal_end_components(e1)) == std::vector<std::vector<StateId>>{{2}, {3}});
  const Mdp f5 = fixtures::load("fig5a");
  CHECK(state_sets(maximal_end_components(f5)) ==
        std::vector<std::vector<StateId>>{{1, 2}, {4}, {5}});
}

TEST_CASE("fig 2 mec {s3,s4} keeps every internal action") {
  const Mdp f2 = fixtures::load("fig2");
  for (const auto& mec : maximal_end_components(f2)) {
    if (mec.states != std::vector<StateId>{3, 4}) continue;
    CHECK(mec.actions[0].size() == 1);
    CHECK(mec.actions[1].size() == 2);
  }
}

TEST_CASE("unobserved maximal end components") {
  const Mdp f2 = fixtures::load("fig2");
  CHECK(state_sets(unobserved_mecs(f2)) == std::vector<std::vector<StateId>>{{2}});
  const Mdp f5 = fixtures::load("fig5a");
  CHECK(state_sets(unobserved_mecs(f5)) == std::vector<std::vector<StateId>>{{1, 2}, {4}, {5}});
  const auto report = analyze_components(f5);
  CHECK(report.c_end == std::vector<StateId>{1, 2, 4, 5});
  CHECK(!report.assumption1_holds);
}

TEST_CASE("closedness") {
  const Mdp f2 = fixtures::load("fig2");
  CHECK(is_closed(f2, ids(f2, {"s2"})));
  const Mdp f5 = fixtures::load("fig5a");
  CHECK(!is_closed(f5, ids(f5, {"s1", "s2"})));
  const Mdp e1 = fixtures::load("example1");
  CHECK(is_closed(e1, ids(e1, {"s3"})));
}

TEST_CASE("closed umec check on the fixtures") {
  CHECK(check_assumption1(fixtures::load("example1")));
  CHECK(!check_assumption1(fixtures::load("fig5a")));
  CHECK(check_assumption1(fixtures::load("fig2")));
  CHECK(check_assumption1(fixtures::load("fig4a")));
  CHECK(!check_assumption1(fixtures::load("fig5b")));
}

TEST_CASE("union of unobserved end components") {
  const Mdp f5 = fixtures::load("fig5a");
  const auto u = is_union_uec(f5, ids(f5, {"s4", "s5"}));
  REQUIRE(u.has_value());
  CHECK(u->states == ids(f5, {"s4", "s5"}));
  CHECK(u->actions == std::vector<std::vector<int>>{{0}, {0}});
  CHECK(!is_union_uec(f5, ids(f5, {"s1", "s4"})).has_value());
  const auto empty = is_union_uec(f5, std::vector<StateId>{});
  REQUIRE(empty.has_value());
  CHECK(empty->empty());

  const Mdp f5b = fixtures::load("fig5b");
  const auto loop = is_union_uec(f5b, ids(f5b, {"s1", "s2"}));
  REQUIRE(loop.has_value());
  CHECK(loop->actions[0] == std::vector<int>{f5b.action_index(1, "alpha")});
  CHECK(loop->actions[1].size() == 2);
}

TEST_CASE("decomposition agrees with brute-force enumeration on random models") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    fixtures::RandomMdpOptions o;
    o.transient = 2 + trial % 11;  // up to 12 states with goal and sink
    o.actions = 1 + trial % 3;
    o.max_support = 1 + trial % 3;
    o.observe_prob = 0.4;
    o.require_assumption1 = false;
    const Mdp m = fixtures::random_mdp(rng, o);
    const auto mecs = maximal_end_components(m);
    CHECK(state_sets(mecs) == oracles::brute_force_mecs(m));

    // partition: each state in at most one mec
    std::vector<int> seen(m.num_states(), 0);
    for (const auto& mec : mecs) {
      for (StateId s : mec.states) ++seen[s];
    }
    CHECK(*std::max_element(seen.begin(), seen.end()) <= 1);

    std::vector<char> hidden(m.num_states());
    for (StateId s = 0; s < m.num_states(); ++s) hidden[s] = !m.observed[s];
    CHECK(state_sets(unobserved_mecs(m)) == oracles::brute_force_mecs(m, hidden));
    CHECK(state_sets(unobserved_mecs(m)) == state_sets(maximal_end_components_within(m, hidden)));
  }
}

TEST_CASE("cutting exits out of umecs makes them closed") {
  std::mt19937_64 rng(8);
  int repaired = 0;
  for (int trial = 0; trial < 200 && repaired < 20; ++trial) {
    fixtures::RandomMdpOptions o;
    o.transient = 5;
    o.observe_prob = 0.3;
    o.require_assumption1 = false;
    Mdp m = fixtures::random_mdp(rng, o);
    if (check_assumption1(m)) continue;
    for (const auto& u : unobserved_mecs(m)) {
      const auto mask = u.state_mask(m.num_states());
      for (StateId s : u.states) {
        auto& acts = m.actions[s];
        acts.erase(std::remove_if(acts.begin(), acts.end(),
                                  [&](const Action& a) {
                                    return std::any_of(a.successors.begin(), a.successors.end(),
                                                       [&](const Transition& t) { return !mask[t.to]; });
                                  }),
                   acts.end());
      }
    }
    CHECK(check_assumption1(m));
    ++repaired;
  }
  CHECK(repaired == 20);
}

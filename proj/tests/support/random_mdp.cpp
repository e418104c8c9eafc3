#include "support/random_mdp.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mininfo/components.hpp"
#include "mininfo/reachability.hpp"

namespace fixtures {

using namespace mininfo;

Mdp random_mdp(std::mt19937_64& rng, const RandomMdpOptions& options) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = options.transient;
  while (true) {
    Mdp m;
    for (int i = 0; i < n; ++i) m.states.push_back("s" + std::to_string(i));
    m.states.push_back("goal");
    m.states.push_back("sink");
    const int total = n + 2;
    m.actions.resize(total);
    m.observed.assign(total, 0);
    bool any_observed = false;
    for (int s = 0; s < n; ++s) {
      if (unit(rng) < options.observe_prob) {
        m.observed[s] = 1;
        any_observed = true;
      }
    }
    if (!any_observed) m.observed[std::uniform_int_distribution<int>(0, n - 1)(rng)] = 1;

    std::vector<int> all(total);
    std::iota(all.begin(), all.end(), 0);
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < options.actions; ++a) {
        const int k = std::uniform_int_distribution<int>(1, options.max_support)(rng);
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<int> support(all.begin(), all.begin() + k);
        std::sort(support.begin(), support.end());
        std::vector<double> w(k);
        double sum = 0.0;
        for (double& v : w) sum += (v = 0.1 + unit(rng));
        Action act{std::string(1, static_cast<char>('a' + a)), {}};
        for (int i = 0; i < k; ++i) act.successors.push_back({support[i], w[i] / sum});
        m.actions[s].push_back(std::move(act));
      }
    }
    m.actions[n] = {Action{"stay", {{n, 1.0}}}};
    m.actions[n + 1] = {Action{"stay", {{n + 1, 1.0}}}};
    m.reach.targets = {n};
    m.reach.threshold = 0.0;
    if (max_reach_probability(m) <= 1e-6) continue;
    if (options.require_assumption1 && !check_assumption1(m)) continue;
    return m;
  }
}

double random_threshold(std::mt19937_64& rng, const Mdp& mdp) {
  const double r = max_reach_probability(mdp);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < 0.3) return 0.0;
  if (u < 0.5) return r;
  return r * std::uniform_real_distribution<double>(0.05, 0.95)(rng);
}

}  // namespace fixtures

#ifndef CPSSPERSO_TESTS_MDPS_HPP_
#define CPSSPERSO_TESTS_MDPS_HPP_

#include <random>
#include <vector>

#include "cpssperso/finite_mdp.hpp"

namespace testing_support {

using cpssperso::FiniteMdp;
using cpssperso::Successor;

inline FiniteMdp single_state_mdp(double reward) {
  FiniteMdp mdp(1, 1);
  mdp.set(0, 0, {{0, 1.0}}, reward);
  return mdp;
}

// s0 -a0-> s1 with reward 1, s0 -a1-> s0 with reward 0; s1 absorbing with
// rewards 0 (a0) and -1 (a1).
inline FiniteMdp chain_mdp() {
  FiniteMdp mdp(2, 2);
  mdp.set(0, 0, {{1, 1.0}}, 1.0);
  mdp.set(0, 1, {{0, 1.0}}, 0.0);
  mdp.set(1, 0, {{1, 1.0}}, 0.0);
  mdp.set(1, 1, {{1, 1.0}}, -1.0);
  return mdp;
}

// Up to 4 distinct successors per pair with normalised random weights,
// rewards uniform in [-2, 2].
inline FiniteMdp random_mdp(std::mt19937_64& gen, std::size_t states,
                            std::size_t actions) {
  FiniteMdp mdp(states, actions);
  std::uniform_int_distribution<std::size_t> pick(0, states - 1);
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::uniform_real_distribution<double> reward(-2.0, 2.0);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t a = 0; a < actions; ++a) {
      std::vector<Successor> succ;
      const int k = count(gen);
      double total = 0.0;
      for (int i = 0; i < k; ++i) {
        const std::size_t t = pick(gen);
        bool dup = false;
        for (const auto& x : succ) dup = dup || x.state == t;
        if (dup) continue;
        succ.push_back({t, weight(gen)});
        total += succ.back().prob;
      }
      for (auto& x : succ) x.prob /= total;
      mdp.set(s, a, std::move(succ), reward(gen));
    }
  }
  return mdp;
}

inline FiniteMdp scaled(const FiniteMdp& mdp, double c) {
  FiniteMdp out(mdp.num_states(), mdp.num_actions());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      const auto succ = mdp.successors(s, a);
      out.set(s, a, {succ.begin(), succ.end()}, c * mdp.reward(s, a));
    }
  }
  return out;
}

}  // namespace testing_support

#endif  // CPSSPERSO_TESTS_MDPS_HPP_

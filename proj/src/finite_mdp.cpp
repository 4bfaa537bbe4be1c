#include "cpssperso/finite_mdp.hpp"

#include <algorithm>
#include <cmath>

#include "cpssperso/error.hpp"

namespace cpssperso {

FiniteMdp::FiniteMdp(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states),
      num_actions_(num_actions),
      rows_(num_states * num_actions),
      rewards_(num_states * num_actions, 0.0) {
  if (num_states == 0 || num_actions == 0) {
    throw Error(ErrorKind::InvalidParams, "MDP needs at least one state and action");
  }
}

void FiniteMdp::set(std::size_t s, std::size_t a,
                    std::vector<Successor> successors, double reward) {
  if (s >= num_states_ || a >= num_actions_) {
    throw Error(ErrorKind::IndexOutOfRange, "state/action outside the MDP");
  }
  for (const auto& succ : successors) {
    if (succ.state >= num_states_) {
      throw Error(ErrorKind::IndexOutOfRange, "successor outside the MDP");
    }
  }
  rows_[s * num_actions_ + a] = std::move(successors);
  rewards_[s * num_actions_ + a] = reward;
}

double FiniteMdp::max_abs_reward() const {
  double m = 0.0;
  for (double r : rewards_) m = std::max(m, std::abs(r));
  return m;
}

}  // namespace cpssperso

#ifndef CPSSPERSO_FINITE_MDP_HPP_
#define CPSSPERSO_FINITE_MDP_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace cpssperso {

struct Successor {
  std::size_t state;
  double prob;
};

// Explicit finite MDP: sparse successor lists and expected immediate reward
// per (state, action), stored row-major by state then action.
class FiniteMdp {
 public:
  FiniteMdp(std::size_t num_states, std::size_t num_actions);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }

  // Replaces the successor list and reward of (s, a). Entries are stored in
  // the order given. Probabilities are not renormalised.
  void set(std::size_t s, std::size_t a, std::vector<Successor> successors,
           double reward);

  std::span<const Successor> successors(std::size_t s, std::size_t a) const {
    return rows_[s * num_actions_ + a];
  }
  double reward(std::size_t s, std::size_t a) const {
    return rewards_[s * num_actions_ + a];
  }

  // max |r(s,a)| over all pairs.
  double max_abs_reward() const;

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<std::vector<Successor>> rows_;
  std::vector<double> rewards_;
};

}  // namespace cpssperso

#endif  // CPSSPERSO_FINITE_MDP_HPP_

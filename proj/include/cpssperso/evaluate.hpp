#ifndef CPSSPERSO_EVALUATE_HPP_
#define CPSSPERSO_EVALUATE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>

#include "cpssperso/rl_core.hpp"
#include "cpssperso/workshop_env.hpp"

namespace cpssperso::eval {

// Chooses an action index from the true state and its observation.
using Agent = std::function<std::size_t(const env::WorkshopState&,
                                        const env::Observation&)>;

struct EvalResult {
  std::size_t episodes = 0;
  double mean_return = 0.0;
  double match_rate = 0.0;   // fraction of steps whose action met the worker's need
  double safety_rate = 0.0;  // fraction of steps that were not unsafe
};

// Runs full-horizon episodes; episode k resets with mix_seed(seed, k), so
// two agents evaluated with the same seed face the same environment draws
// as long as their action choices agree.
EvalResult evaluate(const Agent& agent, const env::EnvParams& params,
                    std::size_t episodes, std::uint64_t seed);

// Greedy agent reading a tabular policy indexed by the true state, or by the
// observation when `partial_obs`.
Agent tabular_agent(rl::Policy policy, const env::EnvParams& params,
                    bool partial_obs = false);

}  // namespace cpssperso::eval

#endif  // CPSSPERSO_EVALUATE_HPP_

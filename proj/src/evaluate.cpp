#include "cpssperso/evaluate.hpp"

namespace cpssperso::eval {

EvalResult evaluate(const Agent& agent, const env::EnvParams& params,
                    std::size_t episodes, std::uint64_t seed) {
  if (episodes == 0) {
    throw Error(ErrorKind::InvalidParams, "evaluation needs at least one episode");
  }
  env::WorkshopEnv workshop(params);
  EvalResult r;
  r.episodes = episodes;
  std::size_t steps = 0, matched = 0, safe = 0;
  double total = 0.0;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    auto start = workshop.reset(mix_seed(seed, ep));
    env::WorkshopState state = start.state;
    env::Observation obs = start.obs;
    bool done = false;
    while (!done) {
      const env::Action action = env::kAllActions[agent(state, obs)];
      matched += action == env::need_action(state.worker, params.profile.pace_preference);
      safe += !env::is_unsafe(state, action, params);
      auto step = workshop.step(action);
      total += step.reward.total;
      ++steps;
      state = step.next;
      obs = step.obs;
      done = step.done;
    }
  }
  r.mean_return = total / static_cast<double>(episodes);
  r.match_rate = static_cast<double>(matched) / static_cast<double>(steps);
  r.safety_rate = static_cast<double>(safe) / static_cast<double>(steps);
  return r;
}

Agent tabular_agent(rl::Policy policy, const env::EnvParams& params,
                    bool partial_obs) {
  if (policy.size() != env::num_states(params)) {
    throw Error(ErrorKind::ShapeError, "policy size does not match the state space");
  }
  return [policy = std::move(policy), params, partial_obs](
             const env::WorkshopState& s, const env::Observation& o) {
    return policy[partial_obs ? env::encode_observation(o, params)
                              : env::encode_state(s, params)];
  };
}

}  // namespace cpssperso::eval

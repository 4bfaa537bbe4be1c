#ifndef CPSSPERSO_WORKSHOP_ENV_HPP_
#define CPSSPERSO_WORKSHOP_ENV_HPP_

// Smart-workshop MDP: a worker with latent emotional / cognitive / pace
// state, an aggregate team state, and machine context elements. The cobot
// picks one of five actions per step and receives a weighted composite
// reward in which the worker term dominates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpssperso/error.hpp"
#include "cpssperso/finite_mdp.hpp"
#include "cpssperso/rng.hpp"

namespace cpssperso::env {

enum class Skill { Novice, Skilled, Expert };
enum class Pace { Slow, Normal, Fast };
enum class Emotion { Calm, Stressed };
enum class Load { Low, Medium, High };
enum class Pressure { Low, High };
enum class Machine { Ok, Degraded };

enum class Action { SlowDown, SpeedUp, Hold, Assist, Handover };
inline constexpr std::size_t kNumActions = 5;
inline constexpr Action kAllActions[] = {Action::SlowDown, Action::SpeedUp,
                                         Action::Hold, Action::Assist,
                                         Action::Handover};
inline constexpr std::size_t kNumWorkerStates = 18;

struct WorkerProfile {
  Skill skill = Skill::Skilled;
  Pace pace_preference = Pace::Normal;
  friend bool operator==(const WorkerProfile&, const WorkerProfile&) = default;
};

struct WorkerState {
  Emotion emotional = Emotion::Calm;
  Load cognitive_load = Load::Low;
  Pace pace = Pace::Normal;
  friend bool operator==(const WorkerState&, const WorkerState&) = default;
};

struct TeamState {
  Pressure pressure = Pressure::Low;
  friend bool operator==(const TeamState&, const TeamState&) = default;
};

// Static description of a context element; its machine state lives in
// WorkshopState::machines at the same position.
struct ContextSpec {
  std::string id;
  bool influences_worker = true;
  friend bool operator==(const ContextSpec&, const ContextSpec&) = default;
};

struct WorkshopState {
  WorkerState worker;
  TeamState team;
  std::vector<Machine> machines;
  std::size_t step_index = 0;
  friend bool operator==(const WorkshopState&, const WorkshopState&) = default;
};

struct Observation {
  WorkerState inferred_worker;
  TeamState team;
  std::vector<Machine> machines;
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct RewardWeights {
  double worker = 1.0;
  double team = 0.5;
  double context = 0.5;
};

struct RewardMagnitudes {
  double worker_match = 1.0;
  double worker_miss = -1.0;
  double team_ok = 0.5;
  double team_blocked = -0.5;
  double unsafe = -2.0;
};

struct RewardBreakdown {
  double worker = 0.0;
  double team = 0.0;
  std::vector<double> context;  // one entry per influencing context element
  double total = 0.0;
};

struct EnvParams {
  double gamma = 0.95;
  double alpha = 0.9;            // worker-state inference accuracy
  double noise_p = 0.1;          // worker transition noise
  double team_flip_p = 0.1;      // team pressure flip probability per step
  double machine_fail_p = 0.05;  // ok -> degraded probability per step
  double machine_recover_p = 0.0;  // degraded -> ok without assist, per step
  std::size_t horizon = 50;
  RewardWeights weights;
  RewardMagnitudes magnitudes;
  std::vector<ContextSpec> contexts{{"machine", true}};
  WorkerProfile profile;
  std::uint64_t seed = 42;

  // Throws Error(InvalidParams) listing the first violated constraint.
  void validate() const;
};

// Action that matches the worker's current need. Precedence: stress, then
// high load, then pace deviation, then medium load.
Action need_action(const WorkerState& worker, Pace preference);

// Deterministic episode start: calm, low load, preferred pace, low pressure,
// all machines ok.
WorkshopState initial_state(const EnvParams& params);

struct Outcome {
  WorkshopState state;
  double prob;
};

// Exact next-state distribution. Worker dynamics:
//  - the matching action moves the violated dimension one level toward its
//    goal; with probability noise_p it lands on a uniform neighbour of that
//    level instead. A satisfied worker stays put, drifting to a uniform
//    load/pace neighbour with probability noise_p.
//  - a mismatched speedUp / slowDown shifts pace one level in its direction;
//    any other mismatched action pushes the violated dimension one level
//    further from its goal (raises load when nothing was violated). A push
//    past the end of a scale stresses the worker instead.
//  - speedUp next to a degraded influencing machine stresses the worker.
// Team pressure flips with team_flip_p. Machines recover on assist; otherwise
// an ok machine degrades with machine_fail_p and a degraded one recovers by
// itself with machine_recover_p (0 by default). Outcomes with zero
// probability are omitted. step_index advances by one.
std::vector<Outcome> transition_model(const WorkshopState& state, Action action,
                                      const EnvParams& params);

RewardBreakdown reward_fn(const WorkshopState& state, Action action,
                          const EnvParams& params);

// Unsafe step: speedUp or handover next to a degraded influencing machine.
bool is_unsafe(const WorkshopState& state, Action action,
               const EnvParams& params);

// Tabular index in [0, num_states(params)). Lexicographic over (emotional,
// load, pace offset from preference, pressure, machines in context order),
// each digit 0 at its initial value, so the initial state encodes to 0.
// step_index is not part of the index.
std::size_t num_states(const EnvParams& params);
std::size_t encode_state(const WorkshopState& state, const EnvParams& params);
WorkshopState decode_state(std::size_t index, const EnvParams& params);
std::size_t encode_observation(const Observation& obs, const EnvParams& params);

std::size_t worker_index(const WorkerState& worker);
WorkerState worker_from_index(std::size_t index);

// Samples an observation: the true worker state with probability alpha,
// otherwise uniformly one of the other 17 worker states.
Observation observe(const WorkshopState& state, const EnvParams& params,
                    Rng& rng);

struct StepResult {
  WorkshopState next;
  Observation obs;
  RewardBreakdown reward;
  bool done = false;
};

// Throws Error(EpisodeOver) when state.step_index >= horizon.
StepResult step(const WorkshopState& state, Action action,
                const EnvParams& params, Rng& rng);

// The full model as an explicit finite MDP (expected total reward per pair).
FiniteMdp to_finite_mdp(const EnvParams& params);

// Episodic environment owning its random stream.
class WorkshopEnv {
 public:
  explicit WorkshopEnv(EnvParams params);

  struct ResetResult {
    WorkshopState state;
    Observation obs;
  };

  // Reseeds the stream from params.seed (or `seed` when given).
  ResetResult reset(std::optional<std::uint64_t> seed = std::nullopt);
  StepResult step(Action action);

  const WorkshopState& state() const { return state_; }
  const EnvParams& params() const { return params_; }

 private:
  EnvParams params_;
  WorkshopState state_;
  Rng rng_;
  bool started_ = false;
};

std::string_view to_string(Action action);
std::string_view to_string(Pace pace);
std::string_view to_string(Skill skill);
std::optional<Action> parse_action(std::string_view text);
std::optional<Pace> parse_pace(std::string_view text);
std::optional<Skill> parse_skill(std::string_view text);

}  // namespace cpssperso::env

#endif  // CPSSPERSO_WORKSHOP_ENV_HPP_

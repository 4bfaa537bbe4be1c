#include "cpssperso/workshop_env.hpp"

#include <algorithm>
#include <cmath>

namespace cpssperso::env {

namespace {

enum class Dimension { None, Emotional, Load, Pace };

int level(Pace p) { return static_cast<int>(p); }
int level(Load l) { return static_cast<int>(l); }

Dimension violated_dimension(const WorkerState& w, Pace pref) {
  if (w.emotional == Emotion::Stressed) return Dimension::Emotional;
  if (w.cognitive_load == Load::High) return Dimension::Load;
  if (w.pace != pref) return Dimension::Pace;
  if (w.cognitive_load == Load::Medium) return Dimension::Load;
  return Dimension::None;
}

struct WorkerOutcome {
  WorkerState worker;
  double prob;
};

void add(std::vector<WorkerOutcome>& out, const WorkerState& w, double prob) {
  if (prob <= 0.0) return;
  for (auto& o : out) {
    if (o.worker == w) {
      o.prob += prob;
      return;
    }
  }
  out.push_back({w, prob});
}

WorkerState with_load(WorkerState w, int l) {
  w.cognitive_load = static_cast<Load>(l);
  return w;
}

WorkerState with_pace(WorkerState w, int p) {
  w.pace = static_cast<Pace>(p);
  return w;
}

WorkerState stressed(WorkerState w) {
  w.emotional = Emotion::Stressed;
  return w;
}

// Lands on `target` with probability 1 - p, otherwise on a uniform neighbour
// of `target` on the 3-level scale.
template <typename Make>
void noisy_ternary(std::vector<WorkerOutcome>& out, int target, double p,
                   Make make) {
  std::vector<int> neighbours;
  for (int n : {target - 1, target + 1}) {
    if (n >= 0 && n <= 2) neighbours.push_back(n);
  }
  add(out, make(target), 1.0 - p);
  for (int n : neighbours) {
    add(out, make(n), p / static_cast<double>(neighbours.size()));
  }
}

std::vector<WorkerOutcome> matched_move(const WorkerState& w, Pace pref,
                                        double p) {
  std::vector<WorkerOutcome> out;
  switch (violated_dimension(w, pref)) {
    case Dimension::Emotional: {
      WorkerState calm = w;
      calm.emotional = Emotion::Calm;
      add(out, calm, 1.0 - p);
      add(out, w, p);
      break;
    }
    case Dimension::Load:
      noisy_ternary(out, level(w.cognitive_load) - 1, p,
                    [&](int l) { return with_load(w, l); });
      break;
    case Dimension::Pace: {
      const int step = level(pref) > level(w.pace) ? 1 : -1;
      noisy_ternary(out, level(w.pace) + step, p,
                    [&](int q) { return with_pace(w, q); });
      break;
    }
    case Dimension::None: {
      std::vector<WorkerState> drift{with_load(w, level(w.cognitive_load) + 1)};
      for (int q : {level(w.pace) - 1, level(w.pace) + 1}) {
        if (q >= 0 && q <= 2) drift.push_back(with_pace(w, q));
      }
      add(out, w, 1.0 - p);
      for (const auto& d : drift) {
        add(out, d, p / static_cast<double>(drift.size()));
      }
      break;
    }
  }
  return out;
}

WorkerState shift_pace(const WorkerState& w, int dir) {
  const int q = level(w.pace) + dir;
  if (q < 0 || q > 2) return stressed(w);
  return with_pace(w, q);
}

WorkerState mismatched_move(const WorkerState& w, Pace pref, Action action) {
  if (action == Action::SpeedUp) return shift_pace(w, +1);
  if (action == Action::SlowDown) return shift_pace(w, -1);
  switch (violated_dimension(w, pref)) {
    case Dimension::Emotional:
      return w;
    case Dimension::Load: {
      const int l = level(w.cognitive_load) + 1;
      return l > 2 ? stressed(w) : with_load(w, l);
    }
    case Dimension::Pace:
      return shift_pace(w, level(w.pace) > level(pref) ? +1 : -1);
    case Dimension::None:
      return with_load(w, level(w.cognitive_load) + 1);
  }
  return w;
}

bool degraded_influencer(const WorkshopState& state, const EnvParams& params) {
  for (std::size_t i = 0; i < params.contexts.size(); ++i) {
    if (params.contexts[i].influences_worker &&
        state.machines[i] == Machine::Degraded) {
      return true;
    }
  }
  return false;
}

void check_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, std::string(name) + " must be in [0,1]");
  }
}

}  // namespace

void EnvParams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorKind::InvalidParams, "gamma must be in (0,1)");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "alpha must be in (0,1]");
  }
  check_probability(noise_p, "noise_p");
  check_probability(team_flip_p, "team_flip_p");
  check_probability(machine_fail_p, "machine_fail_p");
  check_probability(machine_recover_p, "machine_recover_p");
  if (horizon == 0) throw Error(ErrorKind::InvalidParams, "horizon must be positive");
  if (!(weights.worker > 0.0 && weights.team > 0.0 && weights.context > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "reward weights must be positive");
  }
  if (!(weights.worker > weights.team && weights.worker > weights.context)) {
    throw Error(ErrorKind::InvalidParams,
                "worker weight must be strictly greater than team and context weights");
  }
  if (contexts.size() > 16) {
    throw Error(ErrorKind::InvalidParams, "at most 16 context elements");
  }
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    for (std::size_t j = i + 1; j < contexts.size(); ++j) {
      if (contexts[i].id == contexts[j].id) {
        throw Error(ErrorKind::InvalidParams, "duplicate context id " + contexts[i].id);
      }
    }
  }
}

Action need_action(const WorkerState& w, Pace pref) {
  if (w.emotional == Emotion::Stressed) return Action::SlowDown;
  if (w.cognitive_load == Load::High) return Action::Assist;
  if (level(w.pace) > level(pref)) return Action::SlowDown;
  if (level(w.pace) < level(pref)) return Action::SpeedUp;
  if (w.cognitive_load == Load::Medium) return Action::Hold;
  return Action::Handover;
}

WorkshopState initial_state(const EnvParams& params) {
  WorkshopState s;
  s.worker = {Emotion::Calm, Load::Low, params.profile.pace_preference};
  s.team = {Pressure::Low};
  s.machines.assign(params.contexts.size(), Machine::Ok);
  s.step_index = 0;
  return s;
}

std::vector<Outcome> transition_model(const WorkshopState& state, Action action,
                                      const EnvParams& params) {
  const Pace pref = params.profile.pace_preference;
  std::vector<WorkerOutcome> workers;
  if (action == need_action(state.worker, pref)) {
    workers = matched_move(state.worker, pref, params.noise_p);
  } else {
    workers.push_back({mismatched_move(state.worker, pref, action), 1.0});
  }
  if (action == Action::SpeedUp && degraded_influencer(state, params)) {
    std::vector<WorkerOutcome> merged;
    for (const auto& o : workers) add(merged, stressed(o.worker), o.prob);
    workers = std::move(merged);
  }

  std::vector<Outcome> out;
  for (const auto& w : workers) {
    WorkshopState base = state;
    base.worker = w.worker;
    base.step_index = state.step_index + 1;
    out.push_back({base, w.prob});
  }

  // Team factor.
  {
    std::vector<Outcome> next;
    const Pressure flipped = state.team.pressure == Pressure::Low
                                 ? Pressure::High
                                 : Pressure::Low;
    for (const auto& o : out) {
      if (params.team_flip_p < 1.0) next.push_back({o.state, o.prob * (1.0 - params.team_flip_p)});
      if (params.team_flip_p > 0.0) {
        Outcome f = o;
        f.state.team.pressure = flipped;
        f.prob *= params.team_flip_p;
        next.push_back(std::move(f));
      }
    }
    out = std::move(next);
  }

  // Machine factors, one per context element.
  for (std::size_t i = 0; i < state.machines.size(); ++i) {
    if (action == Action::Assist) {
      for (auto& o : out) o.state.machines[i] = Machine::Ok;
      continue;
    }
    const bool ok = state.machines[i] == Machine::Ok;
    const double p_degraded = ok ? params.machine_fail_p : 1.0 - params.machine_recover_p;
    std::vector<Outcome> next;
    for (const auto& o : out) {
      if (p_degraded < 1.0) {
        Outcome f = o;
        f.state.machines[i] = Machine::Ok;
        f.prob *= 1.0 - p_degraded;
        next.push_back(std::move(f));
      }
      if (p_degraded > 0.0) {
        Outcome f = o;
        f.state.machines[i] = Machine::Degraded;
        f.prob *= p_degraded;
        next.push_back(std::move(f));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool is_unsafe(const WorkshopState& state, Action action,
               const EnvParams& params) {
  return (action == Action::SpeedUp || action == Action::Handover) &&
         degraded_influencer(state, params);
}

RewardBreakdown reward_fn(const WorkshopState& state, Action action,
                          const EnvParams& params) {
  const auto& mag = params.magnitudes;
  const auto& w = params.weights;
  RewardBreakdown r;
  r.worker = action == need_action(state.worker, params.profile.pace_preference)
                 ? mag.worker_match
                 : mag.worker_miss;
  r.team = (state.team.pressure == Pressure::High && action == Action::Hold)
               ? mag.team_blocked
               : mag.team_ok;
  const bool risky = action == Action::SpeedUp || action == Action::Handover;
  for (std::size_t i = 0; i < params.contexts.size(); ++i) {
    if (!params.contexts[i].influences_worker) continue;
    r.context.push_back(risky && state.machines[i] == Machine::Degraded
                            ? mag.unsafe
                            : 0.0);
  }
  r.total = w.worker * r.worker + w.team * r.team;
  for (double c : r.context) r.total += w.context * c;
  return r;
}

std::size_t num_states(const EnvParams& params) {
  return kNumWorkerStates * 2 * (std::size_t{1} << params.contexts.size());
}

std::size_t worker_index(const WorkerState& w) {
  return static_cast<std::size_t>(w.emotional) * 9 +
         static_cast<std::size_t>(w.cognitive_load) * 3 +
         static_cast<std::size_t>(w.pace);
}

WorkerState worker_from_index(std::size_t index) {
  return {static_cast<Emotion>(index / 9), static_cast<Load>((index / 3) % 3),
          static_cast<Pace>(index % 3)};
}

namespace {

std::size_t encode_parts(const WorkerState& w, const TeamState& team,
                         const std::vector<Machine>& machines,
                         const EnvParams& params) {
  if (machines.size() != params.contexts.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "machine count does not match contexts");
  }
  const int pace_digit = (level(w.pace) - level(params.profile.pace_preference) + 3) % 3;
  std::size_t idx = static_cast<std::size_t>(w.emotional);
  idx = idx * 3 + static_cast<std::size_t>(w.cognitive_load);
  idx = idx * 3 + static_cast<std::size_t>(pace_digit);
  idx = idx * 2 + static_cast<std::size_t>(team.pressure);
  for (Machine m : machines) idx = idx * 2 + static_cast<std::size_t>(m);
  return idx;
}

}  // namespace

std::size_t encode_state(const WorkshopState& state, const EnvParams& params) {
  return encode_parts(state.worker, state.team, state.machines, params);
}

std::size_t encode_observation(const Observation& obs, const EnvParams& params) {
  return encode_parts(obs.inferred_worker, obs.team, obs.machines, params);
}

WorkshopState decode_state(std::size_t index, const EnvParams& params) {
  if (index >= num_states(params)) {
    throw Error(ErrorKind::IndexOutOfRange,
                "state index " + std::to_string(index) + " out of range");
  }
  WorkshopState s;
  const std::size_t n = params.contexts.size();
  s.machines.resize(n);
  for (std::size_t i = n; i-- > 0;) {
    s.machines[i] = static_cast<Machine>(index % 2);
    index /= 2;
  }
  s.team.pressure = static_cast<Pressure>(index % 2);
  index /= 2;
  const int pace_digit = static_cast<int>(index % 3);
  index /= 3;
  s.worker.pace = static_cast<Pace>((pace_digit + level(params.profile.pace_preference)) % 3);
  s.worker.cognitive_load = static_cast<Load>(index % 3);
  index /= 3;
  s.worker.emotional = static_cast<Emotion>(index);
  return s;
}

Observation observe(const WorkshopState& state, const EnvParams& params,
                    Rng& rng) {
  Observation obs{state.worker, state.team, state.machines};
  if (rng.uniform() < params.alpha) return obs;
  const std::size_t truth = worker_index(state.worker);
  std::size_t other = rng.index(kNumWorkerStates - 1);
  if (other >= truth) ++other;
  obs.inferred_worker = worker_from_index(other);
  return obs;
}

StepResult step(const WorkshopState& state, Action action,
                const EnvParams& params, Rng& rng) {
  if (state.step_index >= params.horizon) {
    throw Error(ErrorKind::EpisodeOver, "episode already finished");
  }
  StepResult result;
  result.reward = reward_fn(state, action, params);
  const auto outcomes = transition_model(state, action, params);
  const double u = rng.uniform();
  double acc = 0.0;
  result.next = outcomes.back().state;
  for (const auto& o : outcomes) {
    acc += o.prob;
    if (u < acc) {
      result.next = o.state;
      break;
    }
  }
  result.obs = observe(result.next, params, rng);
  result.done = result.next.step_index >= params.horizon;
  return result;
}

FiniteMdp to_finite_mdp(const EnvParams& params) {
  const std::size_t n = num_states(params);
  FiniteMdp mdp(n, kNumActions);
  for (std::size_t s = 0; s < n; ++s) {
    const WorkshopState state = decode_state(s, params);
    for (std::size_t a = 0; a < kNumActions; ++a) {
      const Action action = kAllActions[a];
      std::vector<Successor> succ;
      for (const auto& o : transition_model(state, action, params)) {
        succ.push_back({encode_state(o.state, params), o.prob});
      }
      mdp.set(s, a, std::move(succ), reward_fn(state, action, params).total);
    }
  }
  return mdp;
}

WorkshopEnv::WorkshopEnv(EnvParams params)
    : params_(std::move(params)), rng_(params_.seed) {
  params_.validate();
  state_ = initial_state(params_);
}

WorkshopEnv::ResetResult WorkshopEnv::reset(std::optional<std::uint64_t> seed) {
  rng_.reseed(seed.value_or(params_.seed));
  state_ = initial_state(params_);
  started_ = true;
  return {state_, observe(state_, params_, rng_)};
}

StepResult WorkshopEnv::step(Action action) {
  if (!started_) reset();
  StepResult r = env::step(state_, action, params_, rng_);
  state_ = r.next;
  return r;
}

std::string_view to_string(Action action) {
  switch (action) {
    case Action::SlowDown: return "slowDown";
    case Action::SpeedUp: return "speedUp";
    case Action::Hold: return "hold";
    case Action::Assist: return "assist";
    case Action::Handover: return "handover";
  }
  return "?";
}

std::string_view to_string(Pace pace) {
  switch (pace) {
    case Pace::Slow: return "slow";
    case Pace::Normal: return "normal";
    case Pace::Fast: return "fast";
  }
  return "?";
}

std::string_view to_string(Skill skill) {
  switch (skill) {
    case Skill::Novice: return "novice";
    case Skill::Skilled: return "skilled";
    case Skill::Expert: return "expert";
  }
  return "?";
}

std::optional<Action> parse_action(std::string_view text) {
  for (auto a : kAllActions) {
    if (text == to_string(a)) return a;
  }
  return std::nullopt;
}

std::optional<Pace> parse_pace(std::string_view text) {
  for (auto p : {Pace::Slow, Pace::Normal, Pace::Fast}) {
    if (text == to_string(p)) return p;
  }
  return std::nullopt;
}

std::optional<Skill> parse_skill(std::string_view text) {
  for (auto s : {Skill::Novice, Skill::Skilled, Skill::Expert}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

}  // namespace cpssperso::env

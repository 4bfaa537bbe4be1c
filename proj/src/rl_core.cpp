#include "cpssperso/rl_core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cpssperso/format.hpp"

namespace cpssperso::rl {

QTable::QTable(std::size_t num_states, std::size_t num_actions, double init)
    : num_states_(num_states),
      num_actions_(num_actions),
      values_(num_states * num_actions, init) {
  if (num_actions == 0) {
    throw Error(ErrorKind::ShapeError, "Q-table needs at least one action");
  }
}

double QTable::max(std::size_t s) const { return (*this)(s, argmax(s)); }

std::size_t QTable::argmax(std::size_t s) const { return rl::argmax(row(s)); }

bool QTable::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < row.size(); ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

ViResult value_iteration(const FiniteMdp& mdp, double gamma, double tolerance,
                         const ViOptions& options) {
  if (!(tolerance > 0.0)) {
    throw Error(ErrorKind::InvalidTolerance, "tolerance must be positive");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorKind::InvalidParams, "gamma must be in [0,1)");
  }
  ViResult result{QTable(mdp.num_states(), mdp.num_actions()), 0, {}};
  QTable next = result.q;
  std::vector<double> values(mdp.num_states());
  while (result.iterations < options.max_iterations) {
    const double delta = kernels::bellman_sweep(
        options.backend, mdp, result.q.values(), next.values(), values, gamma);
    std::swap(result.q, next);
    ++result.iterations;
    result.deltas.push_back(delta);
    if (delta <= tolerance) break;
  }
  return result;
}

double bellman_residual(const QTable& q, const FiniteMdp& mdp, double gamma,
                        kernels::Backend backend) {
  if (q.num_states() != mdp.num_states() || q.num_actions() != mdp.num_actions()) {
    throw Error(ErrorKind::ShapeError, "Q-table shape does not match the model");
  }
  return kernels::bellman_residual(backend, mdp, q.values(), gamma);
}

double q_update(QTable& q, std::size_t s, std::size_t a, double r,
                std::size_t s_next, double eta, double gamma, bool terminal) {
  if (s >= q.num_states() || s_next >= q.num_states() || a >= q.num_actions()) {
    throw Error(ErrorKind::IndexOutOfRange, "q_update index outside the table");
  }
  const double bootstrap = terminal ? 0.0 : gamma * q.max(s_next);
  const double residual = r + bootstrap - q(s, a);
  q(s, a) += eta * residual;
  return residual;
}

std::size_t epsilon_greedy(std::span<const double> q_row, double epsilon,
                           Rng& rng) {
  if (rng.uniform() < epsilon) return rng.index(q_row.size());
  return argmax(q_row);
}

std::size_t epsilon_greedy(const QTable& q, std::size_t s, double epsilon,
                           Rng& rng) {
  return epsilon_greedy(q.row(s), epsilon, rng);
}

Policy greedy_policy(const QTable& q) {
  Policy pi(q.num_states());
  for (std::size_t s = 0; s < q.num_states(); ++s) pi[s] = q.argmax(s);
  return pi;
}

LearningSchedule LearningSchedule::defaults_for(std::size_t episodes) {
  LearningSchedule s;
  s.episodes = episodes;
  s.decay_steps = episodes * 4 / 5;
  return s;
}

void LearningSchedule::validate() const {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "learning_rate must be in (0,1]");
  }
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 &&
        epsilon_end <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "epsilon values must be in [0,1]");
  }
  if (epsilon_end > epsilon_start) {
    throw Error(ErrorKind::InvalidParams, "epsilon_end must not exceed epsilon_start");
  }
  if (!std::isfinite(initial_q)) {
    throw Error(ErrorKind::InvalidParams, "initial_q must be finite");
  }
}

double LearningSchedule::epsilon_at(std::size_t t) const {
  if (decay_steps == 0 || t >= decay_steps) return epsilon_end;
  const double frac = static_cast<double>(t) / static_cast<double>(decay_steps);
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

TabularRun train_tabular(const env::EnvParams& params,
                         const LearningSchedule& schedule, double gamma,
                         const TrainOptions& options) {
  schedule.validate();
  env::WorkshopEnv workshop(params);
  TabularRun run{QTable(env::num_states(params), env::kNumActions,
                        schedule.initial_q),
                 {}};
  Rng explore(mix_seed(params.seed, 0x51ed));

  auto index_of = [&](const env::WorkshopState& s, const env::Observation& o) {
    return options.partial_obs ? env::encode_observation(o, params)
                               : env::encode_state(s, params);
  };

  for (std::size_t ep = 0; ep < schedule.episodes; ++ep) {
    EpisodeMetrics m;
    m.episode = ep;
    m.epsilon = schedule.epsilon_at(ep);
    m.seed = params.seed;
    auto start = workshop.reset(mix_seed(params.seed, ep));
    std::size_t s = index_of(start.state, start.obs);
    bool done = false;
    while (!done) {
      const std::size_t a = epsilon_greedy(run.q, s, m.epsilon, explore);
      auto step = workshop.step(env::kAllActions[a]);
      const std::size_t s_next = index_of(step.next, step.obs);
      const double td = q_update(run.q, s, a, step.reward.total, s_next,
                                 schedule.learning_rate, gamma);
      m.ret += step.reward.total;
      m.max_abs_td_error = std::max(m.max_abs_td_error, std::abs(td));
      s = s_next;
      done = step.done;
    }
    run.metrics.push_back(m);
  }
  return run;
}

double policy_match_rate(const Policy& policy, const env::EnvParams& params) {
  const std::size_t n = env::num_states(params);
  if (policy.size() != n) {
    throw Error(ErrorKind::ShapeError, "policy size does not match the state space");
  }
  std::size_t hits = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const auto state = env::decode_state(s, params);
    const auto need = env::need_action(state.worker, params.profile.pace_preference);
    if (env::kAllActions[policy[s]] == need) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double argmax_agreement(const Policy& a, const Policy& b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::ShapeError, "policies must be the same nonzero size");
  }
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

void save_qtable(const QTable& q, double gamma, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "qtable 1\n"
      << q.num_states() << ' ' << q.num_actions() << ' ' << format_double(gamma)
      << '\n';
  for (std::size_t s = 0; s < q.num_states(); ++s) {
    for (std::size_t a = 0; a < q.num_actions(); ++a) {
      if (a) out << ' ';
      out << format_double(q(s, a));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

QTable load_qtable(const std::filesystem::path& path, double* gamma) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string magic;
  int version = 0;
  std::size_t ns = 0, na = 0;
  double g = 0.0;
  if (!(in >> magic >> version) || magic != "qtable" || version != 1) {
    throw Error(ErrorKind::Parse, path.string() + " is not a qtable file");
  }
  if (!(in >> ns >> na >> g) || na == 0) {
    throw Error(ErrorKind::Parse, path.string() + ": bad qtable header");
  }
  QTable q(ns, na);
  for (double& v : q.values()) {
    if (!(in >> v)) throw Error(ErrorKind::Parse, path.string() + ": truncated qtable");
  }
  if (gamma) *gamma = g;
  return q;
}

void write_metrics_csv(const std::vector<EpisodeMetrics>& metrics,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "episode,return,epsilon,max_abs_td_error,seed\n";
  for (const auto& m : metrics) {
    out << m.episode << ',' << format_double(m.ret) << ','
        << format_double(m.epsilon) << ',' << format_double(m.max_abs_td_error)
        << ',' << m.seed << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace cpssperso::rl

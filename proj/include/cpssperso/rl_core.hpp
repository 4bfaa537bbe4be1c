#ifndef CPSSPERSO_RL_CORE_HPP_
#define CPSSPERSO_RL_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cpssperso/finite_mdp.hpp"
#include "cpssperso/kernels.hpp"
#include "cpssperso/rng.hpp"
#include "cpssperso/workshop_env.hpp"

namespace cpssperso::rl {

// Dense Q(s, a), row-major by state.
class QTable {
 public:
  QTable(std::size_t num_states, std::size_t num_actions, double init = 0.0);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }

  double& operator()(std::size_t s, std::size_t a) {
    return values_[s * num_actions_ + a];
  }
  double operator()(std::size_t s, std::size_t a) const {
    return values_[s * num_actions_ + a];
  }

  std::span<const double> row(std::size_t s) const {
    return {values_.data() + s * num_actions_, num_actions_};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double max(std::size_t s) const;
  // Lowest index among maximisers.
  std::size_t argmax(std::size_t s) const;

  bool all_finite() const;

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<double> values_;
};

std::size_t argmax(std::span<const double> row);

struct ViOptions {
  kernels::Backend backend = kernels::Backend::OpenMP;
  std::size_t max_iterations = 1'000'000;
};

struct ViResult {
  QTable q;
  std::size_t iterations = 0;
  std::vector<double> deltas;  // ||Q_{i+1} - Q_i||_inf per sweep
};

// Synchronous value iteration from Q_0 = 0; stops after the first sweep whose
// change is <= tolerance, which bounds the returned table's Bellman residual
// by gamma * tolerance. gamma in [0, 1). Throws Error(InvalidTolerance) for
// tolerance <= 0.
ViResult value_iteration(const FiniteMdp& mdp, double gamma, double tolerance,
                         const ViOptions& options = {});

double bellman_residual(const QTable& q, const FiniteMdp& mdp, double gamma,
                        kernels::Backend backend = kernels::Backend::OpenMP);

// Q(s,a) += eta * (r + gamma * max_a' Q(s',a') - Q(s,a)); the bootstrap term
// is dropped when `terminal`. Returns the sampled residual before the update.
double q_update(QTable& q, std::size_t s, std::size_t a, double r,
                std::size_t s_next, double eta, double gamma,
                bool terminal = false);

std::size_t epsilon_greedy(const QTable& q, std::size_t s, double epsilon,
                           Rng& rng);
std::size_t epsilon_greedy(std::span<const double> q_row, double epsilon,
                           Rng& rng);

using Policy = std::vector<std::size_t>;
Policy greedy_policy(const QTable& q);

struct LearningSchedule {
  double learning_rate = 0.1;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  std::size_t decay_steps = 4000;  // episodes over which epsilon decays
  std::size_t episodes = 5000;
  double initial_q = 0.0;

  static LearningSchedule defaults_for(std::size_t episodes);
  void validate() const;
  // Linear decay from epsilon_start to epsilon_end over decay_steps.
  double epsilon_at(std::size_t t) const;
};

struct EpisodeMetrics {
  std::size_t episode = 0;
  double ret = 0.0;
  double epsilon = 0.0;
  double max_abs_td_error = 0.0;
  std::uint64_t seed = 0;
};

struct TabularRun {
  QTable q;
  std::vector<EpisodeMetrics> metrics;
};

struct TrainOptions {
  bool partial_obs = false;
};

// Epsilon-greedy Q-learning on the workshop. Episode k resets the env with
// mix_seed(params.seed, k); exploration draws use their own stream derived
// from the same seed. Time-limit truncation bootstraps normally.
TabularRun train_tabular(const env::EnvParams& params,
                         const LearningSchedule& schedule, double gamma,
                         const TrainOptions& options = {});

// Fraction of enumerated states where the policy picks the worker's need.
double policy_match_rate(const Policy& policy, const env::EnvParams& params);

double argmax_agreement(const Policy& a, const Policy& b);

// Flat text format: "qtable 1" header line, "<states> <actions> <gamma>",
// then one row of values per state, shortest round-trip decimal.
void save_qtable(const QTable& q, double gamma, const std::filesystem::path& path);
QTable load_qtable(const std::filesystem::path& path, double* gamma = nullptr);

void write_metrics_csv(const std::vector<EpisodeMetrics>& metrics,
                       const std::filesystem::path& path);

}  // namespace cpssperso::rl

#endif  // CPSSPERSO_RL_CORE_HPP_

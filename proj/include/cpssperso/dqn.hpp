#ifndef CPSSPERSO_DQN_HPP_
#define CPSSPERSO_DQN_HPP_

// Neural Q-function approximation: a small rectifier MLP trained on the
// squared Bellman residual against a lagged target copy, fed from a uniform
// replay buffer.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "cpssperso/kernels.hpp"
#include "cpssperso/rl_core.hpp"
#include "cpssperso/rng.hpp"
#include "cpssperso/workshop_env.hpp"

namespace cpssperso::dqn {

// All weights and biases in one flat array. Layer k maps sizes[k] inputs to
// sizes[k+1] outputs; its weight block is row-major (output, input) and is
// followed by its bias block. Hidden layers use ReLU, the output is linear.
class MlpParams {
 public:
  MlpParams() = default;
  // Zero-initialised. Throws Error(ShapeError) for fewer than two sizes or a
  // zero size.
  explicit MlpParams(std::vector<std::size_t> sizes);

  // Uniform in +-sqrt(6 / (fan_in + fan_out)) per weight, zero biases.
  static MlpParams glorot(std::vector<std::size_t> sizes, std::uint64_t seed);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t num_layers() const { return sizes_.size() - 1; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::size_t num_params() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> biases(std::size_t layer);
  std::span<const double> biases(std::size_t layer) const;

  double& weight(std::size_t layer, std::size_t out, std::size_t in) {
    return weights(layer)[out * sizes_[layer] + in];
  }
  double& bias(std::size_t layer, std::size_t out) { return biases(layer)[out]; }

  bool same_shape(const MlpParams& other) const { return sizes_ == other.sizes_; }
  bool all_finite() const;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;  // start of each layer's weight block
  std::vector<double> data_;
};

// Q-values for one feature vector. Throws Error(ShapeError) on a length
// mismatch.
std::vector<double> forward(const MlpParams& params,
                            std::span<const double> features);

// One-hot blocks in this order: emotional (2), cognitive load (3), pace (3),
// pace preference (3), team pressure (2), then 2 per context element.
std::size_t feature_dim(const env::EnvParams& params);
std::vector<double> encode_features(const env::WorkshopState& state,
                                    const env::EnvParams& params);
std::vector<double> encode_features(const env::Observation& obs,
                                    const env::EnvParams& params);

struct ReplayItem {
  std::vector<double> features;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_features;
  bool done = false;
};

// Fixed-capacity ring buffer; once full, each push overwrites the oldest item.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(ReplayItem item);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }

  // i-th stored item, oldest first.
  const ReplayItem& at(std::size_t i) const;

  // `batch` items drawn uniformly with replacement. Throws Error(EmptyBatch)
  // when batch is 0 or exceeds size().
  std::vector<ReplayItem> sample(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::vector<ReplayItem> items_;
};

struct LossGrad {
  double loss = 0.0;
  MlpParams grad;
};

// Mean squared Bellman residual over the batch, y = r (+ gamma * max Q_target
// of the next features unless done), and its exact gradient with respect to
// `params` only. Per-item gradients are summed in batch order on both
// backends, so results are bit-identical.
LossGrad loss_and_grad(const MlpParams& params, const MlpParams& target,
                       std::span<const ReplayItem> batch, double gamma,
                       kernels::Backend backend = kernels::Backend::OpenMP);

// params -= lr * grad. Throws Error(ShapeError) on mismatched shapes.
void sgd_step(MlpParams& params, const MlpParams& grad, double lr);

inline MlpParams sync_target(const MlpParams& params) { return params; }

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::size_t decay_steps = 10'000;

  double at(std::size_t step) const;
};

struct DqnConfig {
  std::vector<std::size_t> hidden{32, 32};
  double lr = 1e-3;
  std::size_t batch = 32;
  std::size_t buffer_capacity = 10'000;
  std::size_t target_sync = 250;
  std::size_t total_steps = 20'000;
  EpsilonSchedule epsilon;
  std::uint64_t seed = 42;
  kernels::Backend backend = kernels::Backend::OpenMP;

  // Throws Error(InvalidParams).
  void validate() const;
};

struct DqnStepMetrics {
  std::size_t step = 0;
  std::size_t episode = 0;
  double episode_return = 0.0;  // return of the running episode so far
  std::optional<double> loss;   // empty until the buffer holds one batch
  double epsilon = 0.0;
};

struct DqnRun {
  MlpParams params;
  std::vector<DqnStepMetrics> metrics;
};

// Epsilon-greedy acting on forward() outputs, one gradient step per env step
// once the buffer holds a batch, target sync every `target_sync` steps.
// Episode k resets the env with mix_seed(config.seed, k). Time-limit
// truncation is stored as not-done so targets bootstrap. Throws
// Error(Divergence) as soon as any parameter becomes non-finite.
DqnRun train_dqn(const env::EnvParams& env_params, const DqnConfig& config,
                 bool partial_obs = false);

// Greedy action of the network for every enumerated state.
rl::Policy greedy_policy(const MlpParams& params, const env::EnvParams& env_params);

// Text format: "mlp 1", then the layer count followed by every size, then
// one parameter per line, shortest round-trip decimal.
void save_params(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_params(const std::filesystem::path& path);

void write_metrics_csv(const std::vector<DqnStepMetrics>& metrics,
                       const std::filesystem::path& path);

}  // namespace cpssperso::dqn

#endif  // CPSSPERSO_DQN_HPP_

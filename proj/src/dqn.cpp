#include "cpssperso/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "cpssperso/format.hpp"

namespace cpssperso::dqn {

MlpParams::MlpParams(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw Error(ErrorKind::ShapeError, "an MLP needs an input and an output size");
  }
  if (std::find(sizes_.begin(), sizes_.end(), std::size_t{0}) != sizes_.end()) {
    throw Error(ErrorKind::ShapeError, "layer sizes must be positive");
  }
  std::size_t total = 0;
  for (std::size_t k = 0; k + 1 < sizes_.size(); ++k) {
    offsets_.push_back(total);
    total += sizes_[k] * sizes_[k + 1] + sizes_[k + 1];
  }
  data_.assign(total, 0.0);
}

MlpParams MlpParams::glorot(std::vector<std::size_t> sizes, std::uint64_t seed) {
  MlpParams p(std::move(sizes));
  Rng rng(seed);
  for (std::size_t k = 0; k < p.num_layers(); ++k) {
    const double fan = static_cast<double>(p.sizes_[k] + p.sizes_[k + 1]);
    const double limit = std::sqrt(6.0 / fan);
    for (double& w : p.weights(k)) w = rng.uniform(-limit, limit);
  }
  return p;
}

std::span<double> MlpParams::weights(std::size_t layer) {
  return std::span<double>(data_).subspan(offsets_.at(layer),
                                          sizes_[layer] * sizes_[layer + 1]);
}

std::span<const double> MlpParams::weights(std::size_t layer) const {
  return std::span<const double>(data_).subspan(offsets_.at(layer),
                                                sizes_[layer] * sizes_[layer + 1]);
}

std::span<double> MlpParams::biases(std::size_t layer) {
  return std::span<double>(data_).subspan(
      offsets_.at(layer) + sizes_[layer] * sizes_[layer + 1], sizes_[layer + 1]);
}

std::span<const double> MlpParams::biases(std::size_t layer) const {
  return std::span<const double>(data_).subspan(
      offsets_.at(layer) + sizes_[layer] * sizes_[layer + 1], sizes_[layer + 1]);
}

bool MlpParams::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::vector<double> forward(const MlpParams& params,
                            std::span<const double> features) {
  if (params.sizes().empty() || features.size() != params.input_dim()) {
    throw Error(ErrorKind::ShapeError, "feature length does not match the input layer");
  }
  std::vector<double> act(features.begin(), features.end());
  const auto& sizes = params.sizes();
  for (std::size_t k = 0; k < params.num_layers(); ++k) {
    const auto w = params.weights(k);
    const auto b = params.biases(k);
    const std::size_t in = sizes[k];
    std::vector<double> next(sizes[k + 1]);
    for (std::size_t o = 0; o < next.size(); ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < in; ++i) z += w[o * in + i] * act[i];
      next[o] = (k + 1 < params.num_layers() && z < 0.0) ? 0.0 : z;
    }
    act = std::move(next);
  }
  return act;
}

std::size_t feature_dim(const env::EnvParams& params) {
  return 2 + 3 + 3 + 3 + 2 + 2 * params.contexts.size();
}

namespace {

std::vector<double> encode(const env::WorkerState& worker, const env::TeamState& team,
                           const std::vector<env::Machine>& machines,
                           const env::EnvParams& params) {
  std::vector<double> f(feature_dim(params), 0.0);
  std::size_t base = 0;
  auto hot = [&](std::size_t width, auto value) {
    f[base + static_cast<std::size_t>(value)] = 1.0;
    base += width;
  };
  hot(2, worker.emotional);
  hot(3, worker.cognitive_load);
  hot(3, worker.pace);
  hot(3, params.profile.pace_preference);
  hot(2, team.pressure);
  for (std::size_t i = 0; i < params.contexts.size(); ++i) hot(2, machines.at(i));
  return f;
}

}  // namespace

std::vector<double> encode_features(const env::WorkshopState& state,
                                    const env::EnvParams& params) {
  return encode(state.worker, state.team, state.machines, params);
}

std::vector<double> encode_features(const env::Observation& obs,
                                    const env::EnvParams& params) {
  return encode(obs.inferred_worker, obs.team, obs.machines, params);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw Error(ErrorKind::InvalidParams, "replay capacity must be positive");
  }
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(ReplayItem item) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(item));
    return;
  }
  items_[head_] = std::move(item);
  head_ = (head_ + 1) % capacity_;
}

const ReplayItem& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "replay index outside the buffer");
  }
  return items_[(head_ + i) % items_.size()];
}

std::vector<ReplayItem> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (batch == 0 || batch > items_.size()) {
    throw Error(ErrorKind::EmptyBatch, "replay buffer holds fewer items than the batch");
  }
  std::vector<ReplayItem> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) out.push_back(items_[rng.index(items_.size())]);
  return out;
}

LossGrad loss_and_grad(const MlpParams& params, const MlpParams& target,
                       std::span<const ReplayItem> batch, double gamma,
                       kernels::Backend backend) {
  if (batch.empty()) throw Error(ErrorKind::EmptyBatch, "loss over an empty batch");
  if (!params.same_shape(target)) {
    throw Error(ErrorKind::ShapeError, "online and target networks differ in shape");
  }
  const std::size_t dim = params.input_dim();
  std::vector<double> inputs;
  inputs.reserve(batch.size() * dim);
  std::vector<std::size_t> actions;
  std::vector<double> targets;
  for (const auto& item : batch) {
    if (item.features.size() != dim || item.next_features.size() != dim) {
      throw Error(ErrorKind::ShapeError, "replay item feature length mismatch");
    }
    if (item.action >= params.output_dim()) {
      throw Error(ErrorKind::IndexOutOfRange, "replay item action out of range");
    }
    inputs.insert(inputs.end(), item.features.begin(), item.features.end());
    actions.push_back(item.action);
    double y = item.reward;
    if (!item.done) {
      const auto next_q = forward(target, item.next_features);
      y += gamma * *std::max_element(next_q.begin(), next_q.end());
    }
    targets.push_back(y);
  }
  LossGrad out{0.0, MlpParams(params.sizes())};
  out.loss = kernels::mse_grad(backend, {params.sizes(), params.data()}, inputs,
                               actions, targets, out.grad.data());
  return out;
}

void sgd_step(MlpParams& params, const MlpParams& grad, double lr) {
  if (!params.same_shape(grad)) {
    throw Error(ErrorKind::ShapeError, "gradient shape does not match parameters");
  }
  auto p = params.data();
  const auto g = grad.data();
  for (std::size_t j = 0; j < p.size(); ++j) p[j] -= lr * g[j];
}

double EpsilonSchedule::at(std::size_t step) const {
  if (decay_steps == 0 || step >= decay_steps) return end;
  const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
  return start + (end - start) * frac;
}

void DqnConfig::validate() const {
  if (!(lr >= 0.0 && std::isfinite(lr))) {
    throw Error(ErrorKind::InvalidParams, "dqn lr must be finite and non-negative");
  }
  if (batch == 0) throw Error(ErrorKind::InvalidParams, "dqn batch must be positive");
  if (buffer_capacity < batch) {
    throw Error(ErrorKind::InvalidParams, "dqn buffer_capacity must be >= batch");
  }
  if (target_sync == 0) {
    throw Error(ErrorKind::InvalidParams, "dqn target_sync must be >= 1");
  }
  if (std::find(hidden.begin(), hidden.end(), std::size_t{0}) != hidden.end()) {
    throw Error(ErrorKind::InvalidParams, "dqn hidden sizes must be positive");
  }
  if (!(epsilon.start >= 0.0 && epsilon.start <= 1.0 && epsilon.end >= 0.0 &&
        epsilon.end <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "dqn epsilon values must be in [0,1]");
  }
}

DqnRun train_dqn(const env::EnvParams& env_params, const DqnConfig& config,
                 bool partial_obs) {
  config.validate();
  std::vector<std::size_t> sizes{feature_dim(env_params)};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(env::kNumActions);

  DqnRun run{MlpParams::glorot(sizes, mix_seed(config.seed, 0x1417)), {}};
  MlpParams target = sync_target(run.params);
  ReplayBuffer buffer(config.buffer_capacity);
  Rng explore(mix_seed(config.seed, 0x51ed));
  Rng replay(mix_seed(config.seed, 0x5a3));

  env::EnvParams ep = env_params;
  ep.seed = config.seed;
  env::WorkshopEnv workshop(ep);
  auto features = [&](const env::WorkshopState& s, const env::Observation& o) {
    return partial_obs ? encode_features(o, ep) : encode_features(s, ep);
  };

  std::size_t episode = 0;
  auto start = workshop.reset(mix_seed(config.seed, episode));
  std::vector<double> x = features(start.state, start.obs);
  double episode_return = 0.0;

  for (std::size_t t = 0; t < config.total_steps; ++t) {
    DqnStepMetrics m;
    m.step = t;
    m.episode = episode;
    m.epsilon = config.epsilon.at(t);
    const std::size_t a = rl::epsilon_greedy(forward(run.params, x), m.epsilon, explore);
    auto step = workshop.step(env::kAllActions[a]);
    std::vector<double> x_next = features(step.next, step.obs);
    episode_return += step.reward.total;
    buffer.push({x, a, step.reward.total, x_next, false});

    if (buffer.size() >= config.batch) {
      const auto batch = buffer.sample(config.batch, replay);
      auto lg = loss_and_grad(run.params, target, batch, ep.gamma, config.backend);
      sgd_step(run.params, lg.grad, config.lr);
      if (!std::isfinite(lg.loss) || !run.params.all_finite()) {
        throw Error(ErrorKind::Divergence,
                    "non-finite network parameters at step " + std::to_string(t));
      }
      m.loss = lg.loss;
    }
    if ((t + 1) % config.target_sync == 0) target = sync_target(run.params);

    m.episode_return = episode_return;
    run.metrics.push_back(m);

    if (step.done) {
      ++episode;
      start = workshop.reset(mix_seed(config.seed, episode));
      x = features(start.state, start.obs);
      episode_return = 0.0;
    } else {
      x = std::move(x_next);
    }
  }
  return run;
}

rl::Policy greedy_policy(const MlpParams& params, const env::EnvParams& env_params) {
  const std::size_t n = env::num_states(env_params);
  rl::Policy pi(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto q = forward(params, encode_features(env::decode_state(s, env_params),
                                                   env_params));
    pi[s] = rl::argmax(q);
  }
  return pi;
}

void save_params(const MlpParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "mlp 1\n" << params.sizes().size();
  for (std::size_t s : params.sizes()) out << ' ' << s;
  out << '\n';
  for (double v : params.data()) out << format_double(v) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

MlpParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string magic;
  int version = 0;
  std::size_t count = 0;
  if (!(in >> magic >> version >> count) || magic != "mlp" || version != 1 ||
      count < 2 || count > 64) {
    throw Error(ErrorKind::Parse, path.string() + " is not an mlp parameter file");
  }
  std::vector<std::size_t> sizes(count);
  for (auto& s : sizes) {
    if (!(in >> s) || s == 0 || s > (1u << 20)) {
      throw Error(ErrorKind::Parse, path.string() + ": bad layer size");
    }
  }
  MlpParams p(sizes);
  for (double& v : p.data()) {
    if (!(in >> v)) throw Error(ErrorKind::Parse, path.string() + ": truncated parameters");
  }
  return p;
}

void write_metrics_csv(const std::vector<DqnStepMetrics>& metrics,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "step,episode,episode_return,loss,epsilon\n";
  for (const auto& m : metrics) {
    out << m.step << ',' << m.episode << ',' << format_double(m.episode_return) << ','
        << (m.loss ? format_double(*m.loss) : std::string()) << ','
        << format_double(m.epsilon) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace cpssperso::dqn

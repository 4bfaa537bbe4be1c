#ifndef CPSSPERSO_TESTS_GRADCHECK_HPP_
#define CPSSPERSO_TESTS_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cpssperso/dqn.hpp"

namespace testing_support {

namespace dqn = cpssperso::dqn;

// Random batch for a network: continuous features in [-1, 1], random
// actions and rewards, a quarter of the items terminal.
inline std::vector<dqn::ReplayItem> random_batch(std::mt19937_64& gen,
                                                 std::size_t input_dim,
                                                 std::size_t actions,
                                                 std::size_t size) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> act(0, actions - 1);
  std::bernoulli_distribution terminal(0.25);
  std::vector<dqn::ReplayItem> batch(size);
  for (auto& item : batch) {
    item.features.resize(input_dim);
    item.next_features.resize(input_dim);
    for (double& v : item.features) v = u(gen);
    for (double& v : item.next_features) v = u(gen);
    item.action = act(gen);
    item.reward = 2.0 * u(gen);
    item.done = terminal(gen);
  }
  return batch;
}

inline dqn::MlpParams random_params(std::mt19937_64& gen,
                                    std::vector<std::size_t> sizes) {
  dqn::MlpParams p(std::move(sizes));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : p.data()) v = u(gen);
  return p;
}

// Recomputes the mean squared Bellman residual from forward() alone; the
// target network is held fixed.
inline double reference_loss(const dqn::MlpParams& params,
                             const dqn::MlpParams& target,
                             const std::vector<dqn::ReplayItem>& batch,
                             double gamma) {
  double total = 0.0;
  for (const auto& item : batch) {
    double y = item.reward;
    if (!item.done) {
      const auto next = dqn::forward(target, item.next_features);
      y += gamma * *std::max_element(next.begin(), next.end());
    }
    const double q = dqn::forward(params, item.features)[item.action];
    total += (y - q) * (y - q);
  }
  return total / static_cast<double>(batch.size());
}

struct GradCheck {
  double max_rel_error = 0.0;
  double loss_error = 0.0;  // |analytic loss - reference loss|
};

// Central differences with step h on every parameter. Relative error is
// |a - n| / max(|a|, |n|, floor); the floor keeps gradients that are zero
// up to rounding from dividing noise by noise.
inline GradCheck check_gradient(const dqn::MlpParams& params,
                                const dqn::MlpParams& target,
                                const std::vector<dqn::ReplayItem>& batch,
                                double gamma, double h = 1e-5,
                                double floor = 1e-6) {
  const auto lg = dqn::loss_and_grad(params, target, batch, gamma);
  GradCheck out;
  out.loss_error = std::abs(lg.loss - reference_loss(params, target, batch, gamma));
  dqn::MlpParams probe = params;
  for (std::size_t k = 0; k < params.num_params(); ++k) {
    const double orig = probe.data()[k];
    probe.data()[k] = orig + h;
    const double up = reference_loss(probe, target, batch, gamma);
    probe.data()[k] = orig - h;
    const double down = reference_loss(probe, target, batch, gamma);
    probe.data()[k] = orig;
    const double numeric = (up - down) / (2.0 * h);
    const double analytic = lg.grad.data()[k];
    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), floor});
    out.max_rel_error = std::max(out.max_rel_error, std::abs(analytic - numeric) / denom);
  }
  return out;
}

}  // namespace testing_support

#endif  // CPSSPERSO_TESTS_GRADCHECK_HPP_

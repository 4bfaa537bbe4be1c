#ifndef CPSSPERSO_KERNELS_HPP_
#define CPSSPERSO_KERNELS_HPP_

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP version; the two produce bit-identical results because every output
// element is computed by the same sequence of operations and reductions are
// either order-free (max) or done in a fixed order.

#include <cstddef>
#include <span>

#include "cpssperso/finite_mdp.hpp"

namespace cpssperso::kernels {

enum class Backend { Serial, OpenMP };

// out(s,a) = r(s,a) + gamma * sum_{s'} P(s'|s,a) * max_{a'} in(s',a').
// `values` is scratch of length num_states. Returns max |out - in|.
double bellman_sweep_serial(const FiniteMdp& mdp, std::span<const double> in,
                            std::span<double> out, std::span<double> values,
                            double gamma);
double bellman_sweep_omp(const FiniteMdp& mdp, std::span<const double> in,
                         std::span<double> out, std::span<double> values,
                         double gamma);

// max_{s,a} |q(s,a) - (r(s,a) + gamma * E[max_{a'} q(s',a')])|.
double bellman_residual_serial(const FiniteMdp& mdp, std::span<const double> q,
                               double gamma);
double bellman_residual_omp(const FiniteMdp& mdp, std::span<const double> q,
                            double gamma);

// Flat MLP parameters as laid out by dqn::MlpParams: per layer a row-major
// (out, in) weight block followed by the bias block. ReLU on hidden layers.
struct MlpView {
  std::span<const std::size_t> sizes;
  std::span<const double> params;
};

// Gradient of (1/B) * sum_i (targets[i] - Q(inputs_i)[actions[i]])^2 with
// respect to the flat parameters, written to `grad` (overwritten). `inputs`
// holds B rows of sizes[0] features. Returns the loss. Per-item gradients are
// summed in batch order on both backends.
double mse_grad_serial(MlpView net, std::span<const double> inputs,
                       std::span<const std::size_t> actions,
                       std::span<const double> targets, std::span<double> grad);
double mse_grad_omp(MlpView net, std::span<const double> inputs,
                    std::span<const std::size_t> actions,
                    std::span<const double> targets, std::span<double> grad);

inline double mse_grad(Backend b, MlpView net, std::span<const double> inputs,
                       std::span<const std::size_t> actions,
                       std::span<const double> targets, std::span<double> grad) {
  return b == Backend::Serial
             ? mse_grad_serial(net, inputs, actions, targets, grad)
             : mse_grad_omp(net, inputs, actions, targets, grad);
}

inline double bellman_sweep(Backend b, const FiniteMdp& mdp,
                            std::span<const double> in, std::span<double> out,
                            std::span<double> values, double gamma) {
  return b == Backend::Serial ? bellman_sweep_serial(mdp, in, out, values, gamma)
                              : bellman_sweep_omp(mdp, in, out, values, gamma);
}

inline double bellman_residual(Backend b, const FiniteMdp& mdp,
                               std::span<const double> q, double gamma) {
  return b == Backend::Serial ? bellman_residual_serial(mdp, q, gamma)
                              : bellman_residual_omp(mdp, q, gamma);
}

}  // namespace cpssperso::kernels

#endif  // CPSSPERSO_KERNELS_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "cpssperso/kernels.hpp"

namespace cpssperso::kernels {

namespace {

double row_max(std::span<const double> q, std::size_t s, std::size_t na) {
  double m = q[s * na];
  for (std::size_t a = 1; a < na; ++a) m = std::max(m, q[s * na + a]);
  return m;
}

double backup(const FiniteMdp& mdp, std::span<const double> values,
              std::size_t s, std::size_t a, double gamma) {
  double expected = 0.0;
  for (const auto& succ : mdp.successors(s, a)) {
    expected += succ.prob * values[succ.state];
  }
  return mdp.reward(s, a) + gamma * expected;
}

}  // namespace

double bellman_sweep_serial(const FiniteMdp& mdp, std::span<const double> in,
                            std::span<double> out, std::span<double> values,
                            double gamma) {
  const std::size_t ns = mdp.num_states();
  const std::size_t na = mdp.num_actions();
  for (std::size_t s = 0; s < ns; ++s) values[s] = row_max(in, s, na);
  double delta = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t a = 0; a < na; ++a) {
      const std::size_t i = s * na + a;
      out[i] = backup(mdp, values, s, a, gamma);
      delta = std::max(delta, std::abs(out[i] - in[i]));
    }
  }
  return delta;
}

double bellman_residual_serial(const FiniteMdp& mdp, std::span<const double> q,
                               double gamma) {
  const std::size_t ns = mdp.num_states();
  const std::size_t na = mdp.num_actions();
  std::vector<double> values(ns);
  for (std::size_t s = 0; s < ns; ++s) values[s] = row_max(q, s, na);
  double residual = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t a = 0; a < na; ++a) {
      residual = std::max(
          residual, std::abs(q[s * na + a] - backup(mdp, values, s, a, gamma)));
    }
  }
  return residual;
}

}  // namespace cpssperso::kernels

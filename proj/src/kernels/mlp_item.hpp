#ifndef CPSSPERSO_KERNELS_MLP_ITEM_HPP_
#define CPSSPERSO_KERNELS_MLP_ITEM_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "cpssperso/kernels.hpp"

namespace cpssperso::kernels::detail {

// Backpropagates scale * (y - Q(x)[a])^2 for one item into `g` (overwritten)
// and returns the unscaled squared residual. Both batch kernels call this so
// that every per-item gradient is computed by the same operations.
inline double item_grad(MlpView net, std::span<const double> x, std::size_t a,
                        double y, double scale, std::span<double> g) {
  const std::size_t layers = net.sizes.size() - 1;
  std::vector<std::vector<double>> acts(layers + 1);
  acts[0].assign(x.begin(), x.end());

  std::size_t offset = 0;
  std::vector<std::size_t> offsets(layers);
  for (std::size_t k = 0; k < layers; ++k) {
    const std::size_t in = net.sizes[k], out = net.sizes[k + 1];
    offsets[k] = offset;
    const double* w = net.params.data() + offset;
    const double* b = w + in * out;
    acts[k + 1].resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < in; ++i) z += w[o * in + i] * acts[k][i];
      acts[k + 1][o] = (k + 1 < layers && z < 0.0) ? 0.0 : z;
    }
    offset += in * out + out;
  }

  const double residual = y - acts[layers][a];
  std::vector<double> delta(net.sizes[layers], 0.0);
  delta[a] = -2.0 * residual * scale;

  for (std::size_t k = layers; k-- > 0;) {
    const std::size_t in = net.sizes[k], out = net.sizes[k + 1];
    const double* w = net.params.data() + offsets[k];
    double* gw = g.data() + offsets[k];
    double* gb = gw + in * out;
    for (std::size_t o = 0; o < out; ++o) {
      for (std::size_t i = 0; i < in; ++i) gw[o * in + i] = delta[o] * acts[k][i];
      gb[o] = delta[o];
    }
    if (k == 0) break;
    std::vector<double> prev(in, 0.0);
    for (std::size_t i = 0; i < in; ++i) {
      if (acts[k][i] <= 0.0) continue;  // ReLU was inactive
      double sum = 0.0;
      for (std::size_t o = 0; o < out; ++o) sum += w[o * in + i] * delta[o];
      prev[i] = sum;
    }
    delta = std::move(prev);
  }
  return residual * residual;
}

}  // namespace cpssperso::kernels::detail

#endif  // CPSSPERSO_KERNELS_MLP_ITEM_HPP_

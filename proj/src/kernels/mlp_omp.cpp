#include <vector>

#include "cpssperso/kernels.hpp"
#include "kernels/mlp_item.hpp"

namespace cpssperso::kernels {

double mse_grad_omp(MlpView net, std::span<const double> inputs,
                    std::span<const std::size_t> actions,
                    std::span<const double> targets, std::span<double> grad) {
  const long batch = static_cast<long>(actions.size());
  const std::size_t dim = net.sizes.front();
  const std::size_t np = grad.size();
  const double scale = 1.0 / static_cast<double>(batch);
  std::vector<double> items(static_cast<std::size_t>(batch) * np);
  std::vector<double> sq(static_cast<std::size_t>(batch));

#pragma omp parallel for schedule(static)
  for (long b = 0; b < batch; ++b) {
    const auto ub = static_cast<std::size_t>(b);
    sq[ub] = detail::item_grad(net, inputs.subspan(ub * dim, dim), actions[ub],
                               targets[ub], scale,
                               std::span<double>(items).subspan(ub * np, np));
  }

  // Sum over items in batch order, the same order as the serial kernel.
  const long n = static_cast<long>(np);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) {
    double sum = 0.0;
    for (long b = 0; b < batch; ++b) {
      sum += items[static_cast<std::size_t>(b) * np + static_cast<std::size_t>(j)];
    }
    grad[static_cast<std::size_t>(j)] = sum;
  }

  double loss = 0.0;
  for (double v : sq) loss += v;
  return loss * scale;
}

}  // namespace cpssperso::kernels

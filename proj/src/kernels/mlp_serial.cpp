#include <algorithm>
#include <vector>

#include "cpssperso/kernels.hpp"
#include "kernels/mlp_item.hpp"

namespace cpssperso::kernels {

double mse_grad_serial(MlpView net, std::span<const double> inputs,
                       std::span<const std::size_t> actions,
                       std::span<const double> targets, std::span<double> grad) {
  const std::size_t batch = actions.size();
  const std::size_t dim = net.sizes.front();
  const double scale = 1.0 / static_cast<double>(batch);
  std::vector<double> item(grad.size());
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    loss += detail::item_grad(net, inputs.subspan(b * dim, dim), actions[b],
                              targets[b], scale, item);
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += item[j];
  }
  return loss * scale;
}

}  // namespace cpssperso::kernels

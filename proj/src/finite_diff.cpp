#include "dga/finite_diff.hpp"

namespace dga {

GradStore finite_diff_grad(ModelParams& params,
                           const std::function<real()>& loss_fn,
                           real eps) {
  GradStore out = make_grad_store(params);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& value = params[i].value;
    for (std::size_t j = 0; j < value.size(); ++j) {
      const real saved = value.data[j];
      value.data[j] = saved + eps;
      const real up = loss_fn();
      value.data[j] = saved - eps;
      const real down = loss_fn();
      value.data[j] = saved;
      out[i].data[j] = (up - down) / (real(2) * eps);
    }
  }
  return out;
}

}  // namespace dga

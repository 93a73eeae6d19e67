#include "dga/adam.hpp"

#include <cmath>

#include "dga/errors.hpp"

namespace dga {

AdamState AdamState::create(const ModelParams& params, real lr) {
  AdamState s;
  s.lr = lr;
  s.m = make_grad_store(params);
  s.v = make_grad_store(params);
  return s;
}

void adam_step(ModelParams& params, AdamState& state) {
  for (std::size_t i = 0; i < params.size(); ++i)
    if (!all_finite(params[i].grad))
      throw DivergenceError("non-finite gradient in parameter '" + params[i].name + "'");

  state.step += 1;
  const real t = static_cast<real>(state.step);
  const real bc1 = real(1) - std::pow(state.beta1, t);
  const real bc2 = real(1) - std::pow(state.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& value = params[i].value;
    Matrix& grad = params[i].grad;
    Matrix& m = state.m[i];
    Matrix& v = state.v[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      const real g = grad.data[j];
      m.data[j] = state.beta1 * m.data[j] + (real(1) - state.beta1) * g;
      v.data[j] = state.beta2 * v.data[j] + (real(1) - state.beta2) * g * g;
      const real mhat = m.data[j] / bc1;
      const real vhat = v.data[j] / bc2;
      value.data[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
    grad.fill(real(0));
  }
}

}  // namespace dga

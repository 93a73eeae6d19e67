#include "dga/params.hpp"

#include <cmath>
#include <stdexcept>

#include "dga/errors.hpp"

namespace dga {

std::size_t ModelParams::add(const std::string& name, std::size_t rows, std::size_t cols, Init init) {
  if (index_.count(name)) throw std::logic_error("duplicate parameter name: " + name);
  if (rows == 0 || cols == 0) throw DimensionError("parameter " + name + " has a zero dimension");
  Parameter p;
  p.name = name;
  p.value = Matrix(rows, cols);
  p.grad = Matrix(rows, cols);
  p.init = init;
  params_.push_back(std::move(p));
  index_[name] = params_.size() - 1;
  return params_.size() - 1;
}

std::ptrdiff_t ModelParams::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

void ModelParams::zero_grads() {
  for (auto& p : params_) p.grad.fill(real(0));
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ModelParams::init_values(std::uint64_t seed) {
  SplitMix64 root(seed);
  for (auto& p : params_) {
    if (p.init == Init::Zero) {
      p.value.fill(real(0));
      continue;
    }
    SplitMix64 rng = root.split(p.name);
    const double bound = std::sqrt(6.0 / static_cast<double>(p.value.rows + p.value.cols));
    for (real& v : p.value.data) v = static_cast<real>(rng.uniform(-bound, bound));
  }
}

GradStore make_grad_store(const ModelParams& params) {
  GradStore gs;
  gs.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    gs.emplace_back(params[i].value.rows, params[i].value.cols);
  return gs;
}

void zero_grad_store(GradStore& gs) {
  for (Matrix& g : gs) g.fill(real(0));
}

void accumulate_grads(ModelParams& dst, const GradStore& src) {
  if (src.size() != dst.size()) throw DimensionError("grad store size mismatch");
  for (std::size_t i = 0; i < src.size(); ++i) add_inplace(dst.grad(i), src[i]);
}

}  // namespace dga

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dga/matrix.hpp"
#include "dga/rng.hpp"

namespace dga {

enum class Init { Xavier, Zero };

// One trainable tensor plus its gradient accumulator. value and grad always
// have the same shape.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Init init = Init::Xavier;
};

// Flat registry of every trainable tensor, in registration order. Handles
// into the registry are plain indices; the vector never shrinks.
class ModelParams {
 public:
  // Throws on duplicate name.
  std::size_t add(const std::string& name, std::size_t rows, std::size_t cols, Init init);

  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  std::size_t size() const { return params_.size(); }

  // -1 if absent.
  std::ptrdiff_t find(const std::string& name) const;

  const Matrix& value(std::size_t i) const { return params_[i].value; }
  Matrix& grad(std::size_t i) { return params_[i].grad; }

  void zero_grads();
  std::size_t scalar_count() const;

  // Xavier-uniform for weight matrices, zeros for biases. Each parameter
  // draws from its own stream split off the seed by name, so the values a
  // given parameter gets do not depend on what else is registered.
  void init_values(std::uint64_t seed);

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Gradient buffer shaped like a registry; used when several examples are
// processed in parallel and their contributions reduced in a fixed order.
using GradStore = std::vector<Matrix>;

GradStore make_grad_store(const ModelParams& params);
void zero_grad_store(GradStore& gs);
// dst.grad[i] += src[i] for all i, in index order.
void accumulate_grads(ModelParams& dst, const GradStore& src);

}  // namespace dga

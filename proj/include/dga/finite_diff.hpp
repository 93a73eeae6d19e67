#pragma once

#include <functional>

#include "dga/params.hpp"

namespace dga {

// Central-difference gradient estimate, entry by entry:
//   (f(x + eps) - f(x - eps)) / (2 eps).
// loss_fn must be deterministic for fixed parameter values. Parameter values
// are restored exactly after probing. This is the independent oracle the
// analytic backward passes are checked against; it must never call them.
GradStore finite_diff_grad(ModelParams& params,
                           const std::function<real()>& loss_fn,
                           real eps = real(1e-5));

}  // namespace dga

#pragma once

#include <functional>
#include <vector>

#include "opseq/ndcore/tensor.hpp"

namespace opseq {

struct GradCheckTarget {
  Tensor* value;           // perturbed in place, restored afterwards
  const Tensor* analytic;  // gradient to compare against
};

// Central-difference check of analytic gradients. Returns the maximum over
// all coordinates of |analytic - numeric| / max(1, |analytic| + |numeric|).
// The loss is re-evaluated twice per coordinate; it must be deterministic.
double grad_check(const std::function<double()>& loss, const std::vector<GradCheckTarget>& targets,
                  double step = 1e-4);

}  // namespace opseq

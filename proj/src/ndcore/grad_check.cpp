#include "opseq/ndcore/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "opseq/error.hpp"

namespace opseq {

double grad_check(const std::function<double()>& loss, const std::vector<GradCheckTarget>& targets,
                  double step) {
  auto evaluate = [&] {
    const double v = loss();
    if (!std::isfinite(v)) throw EvaluationError("loss evaluated to a non-finite value during gradient check");
    return v;
  };

  double worst = 0.0;
  for (const auto& target : targets) {
    if (target.value->shape() != target.analytic->shape()) {
      throw DimensionError("gradient shape " + shape_string(target.analytic->shape()) + " does not match parameter " +
                           shape_string(target.value->shape()));
    }
    auto values = target.value->data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = evaluate();
      values[i] = saved - step;
      const double down = evaluate();
      values[i] = saved;

      const double numeric = (up - down) / (2.0 * step);
      const double analytic = (*target.analytic)[i];
      const double err = std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic) + std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace opseq

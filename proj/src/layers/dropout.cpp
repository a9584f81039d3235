#include "opseq/layers/dropout.hpp"

#include <string>

#include "opseq/error.hpp"

namespace opseq {

Tensor dropout(const Tensor& x, double rate, Mode mode, Rng& rng, Tensor* mask) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  if (mode == Mode::eval || rate == 0.0) {
    if (mask) *mask = Tensor::filled(x.shape(), 1.0);
    return x;
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor m(x.shape());
  Tensor y = x;
  for (std::size_t i = 0; i < y.size(); ++i) {
    m[i] = rng.bernoulli(rate) ? 0.0 : keep_scale;
    y[i] *= m[i];
  }
  if (mask) *mask = std::move(m);
  return y;
}

Tensor dropout_backward(const Tensor& mask, const Tensor& d_out) {
  if (mask.shape() != d_out.shape()) {
    throw DimensionError("dropout gradient " + shape_string(d_out.shape()) + " vs mask " + shape_string(mask.shape()));
  }
  Tensor d = d_out;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= mask[i];
  return d;
}

}  // namespace opseq

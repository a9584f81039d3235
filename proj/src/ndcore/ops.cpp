#include "opseq/ndcore/ops.hpp"

#include <algorithm>
#include <cmath>

#include "opseq/error.hpp"
#include "opseq/ndcore/kernels.hpp"

namespace opseq {

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul shape mismatch: " + shape_string(a.shape()) + " * " + shape_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor c({m, n});
  kernels::gemm(m, n, k, a.raw(), k, b.raw(), n, c.raw(), n);
  return c;
}

Tensor transpose(const Tensor& m) {
  if (m.rank() != 2) throw DimensionError("transpose needs a matrix, got " + shape_string(m.shape()));
  const std::size_t r = m.dim(0), c = m.dim(1);
  Tensor t({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) t(j, i) = m(i, j);
  return t;
}

double sigmoid(double x) {
  // Split by sign so exp never overflows.
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

template <typename F>
Tensor map(const Tensor& x, F f) {
  Tensor y = x;
  for (auto& v : y.data()) v = f(v);
  return y;
}

}  // namespace

Tensor sigmoid(const Tensor& x) { return map(x, [](double v) { return sigmoid(v); }); }
Tensor tanh_act(const Tensor& x) { return map(x, [](double v) { return std::tanh(v); }); }
Tensor relu(const Tensor& x) { return map(x, [](double v) { return v > 0 ? v : 0.0; }); }

Tensor softmax(const Tensor& logits) {
  Tensor out = logits;
  auto d = out.data();
  const double peak = *std::max_element(d.begin(), d.end());
  double total = 0;
  for (auto& v : d) {
    v = std::exp(v - peak);
    total += v;
  }
  for (auto& v : d) v /= total;
  return out;
}

double cross_entropy(const Tensor& probs, std::size_t label) {
  if (label >= probs.size()) {
    throw IndexError("label " + std::to_string(label) + " out of range for " + std::to_string(probs.size()) +
                     " classes");
  }
  return -std::log(std::max(probs[label], kProbabilityFloor));
}

Tensor cross_entropy_grad(const Tensor& probs, std::size_t label) {
  if (label >= probs.size()) {
    throw IndexError("label " + std::to_string(label) + " out of range for " + std::to_string(probs.size()) +
                     " classes");
  }
  Tensor g(probs.shape());
  // Inside the clamp the loss is constant, so the gradient vanishes.
  if (probs[label] > kProbabilityFloor) g[label] = -1.0 / probs[label];
  return g;
}

std::size_t argmax(const Tensor& x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[best]) best = i;
  }
  return best;
}

Tensor concat(const Tensor& a, const Tensor& b) {
  std::vector<double> d(a.data().begin(), a.data().end());
  d.insert(d.end(), b.data().begin(), b.data().end());
  const std::size_t n = d.size();
  return Tensor({n}, std::move(d));
}

}  // namespace opseq

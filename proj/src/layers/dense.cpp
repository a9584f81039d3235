#include "opseq/layers/dense.hpp"

#include "opseq/error.hpp"
#include "opseq/ndcore/kernels.hpp"
#include "opseq/ndcore/ops.hpp"

namespace opseq {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::none: return "none";
    case Activation::relu: return "relu";
    case Activation::softmax: return "softmax";
  }
  return "unknown";
}

namespace {

void check_dense(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (w.rank() != 2 || x.size() != w.dim(0) || b.size() != w.dim(1)) {
    throw DimensionError("dense shapes do not compose: x " + shape_string(x.shape()) + ", W " +
                         shape_string(w.shape()) + ", b " + shape_string(b.shape()));
  }
}

}  // namespace

Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b, Activation activation) {
  check_dense(x, w, b);
  const std::size_t in = w.dim(0), out = w.dim(1);
  Tensor y = b.reshaped({out});
  kernels::gemm(1, out, in, x.raw(), in, w.raw(), out, y.raw(), out);
  switch (activation) {
    case Activation::none: return y;
    case Activation::relu: return relu(y);
    case Activation::softmax: return softmax(y);
  }
  return y;
}

DenseBackward dense_backward(const Tensor& x, const Tensor& w, const Tensor& output, Activation activation,
                             const Tensor& d_out) {
  check_dense(x, w, Tensor({w.dim(1)}));
  const std::size_t in = w.dim(0), out = w.dim(1);
  if (d_out.size() != out || output.size() != out) {
    throw DimensionError("dense gradient " + shape_string(d_out.shape()) + " for output width " + std::to_string(out));
  }
  Tensor dz = d_out.reshaped({out});
  if (activation == Activation::relu) {
    for (std::size_t j = 0; j < out; ++j) {
      if (!(output[j] > 0)) dz[j] = 0.0;
    }
  } else if (activation == Activation::softmax) {
    const double proj = kernels::dot(d_out.raw(), output.raw(), out);
    for (std::size_t j = 0; j < out; ++j) dz[j] = output[j] * (d_out[j] - proj);
  }

  DenseBackward g{Tensor(x.shape()), Tensor(w.shape()), dz};
  for (std::size_t r = 0; r < in; ++r) {
    kernels::axpy(x[r], dz.raw(), g.d_w.raw() + r * out, out);
    g.d_x[r] = kernels::dot(w.raw() + r * out, dz.raw(), out);
  }
  return g;
}

}  // namespace opseq

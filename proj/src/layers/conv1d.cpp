#include "opseq/layers/conv1d.hpp"

#include "opseq/error.hpp"
#include "opseq/ndcore/kernels.hpp"

namespace opseq {

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel) {
  if (kernel == 0) throw ConfigError("convolution kernel must be positive");
  if (length < kernel) {
    throw SequenceTooShortError("sequence of length " + std::to_string(length) + " shorter than kernel " +
                                std::to_string(kernel));
  }
  return length - kernel + 1;
}

std::size_t maxpool1d_output_length(std::size_t length, std::size_t pool) {
  if (pool == 0) throw ConfigError("pool size must be positive");
  if (length < pool) {
    throw SequenceTooShortError("sequence of length " + std::to_string(length) + " shorter than pool " +
                                std::to_string(pool));
  }
  return length / pool;
}

namespace {

void check_conv_shapes(const Tensor& seq, const Tensor& filters, const Tensor& bias) {
  if (seq.rank() != 2 || filters.rank() != 3 || seq.dim(1) != filters.dim(1) || bias.size() != filters.dim(2)) {
    throw DimensionError("conv1d shapes do not compose: seq " + shape_string(seq.shape()) + ", filters " +
                         shape_string(filters.shape()) + ", bias " + shape_string(bias.shape()));
  }
}

}  // namespace

Tensor conv1d_forward(const Tensor& seq, const Tensor& filters, const Tensor& bias) {
  check_conv_shapes(seq, filters, bias);
  const std::size_t kernel = filters.dim(0), in = filters.dim(1), out_ch = filters.dim(2);
  const std::size_t out_len = conv1d_output_length(seq.dim(0), kernel);

  Tensor out({out_len, out_ch});
  for (std::size_t t = 0; t < out_len; ++t) std::copy(bias.data().begin(), bias.data().end(), out.row(t).begin());
  // Window t is the contiguous block seq[t .. t+kernel), so consecutive rows of
  // the implicit im2col matrix overlap with stride `in`.
  kernels::gemm(out_len, out_ch, kernel * in, seq.raw(), in, filters.raw(), out_ch, out.raw(), out_ch);
  for (auto& v : out.data()) v = v > 0 ? v : 0.0;
  return out;
}

Conv1dBackward conv1d_backward(const Tensor& seq, const Tensor& filters, const Tensor& output, const Tensor& d_out) {
  check_conv_shapes(seq, filters, Tensor({filters.dim(2)}));
  if (d_out.shape() != output.shape()) {
    throw DimensionError("conv1d gradient " + shape_string(d_out.shape()) + " vs output " +
                         shape_string(output.shape()));
  }
  const std::size_t kernel = filters.dim(0), in = filters.dim(1), out_ch = filters.dim(2);
  const std::size_t out_len = output.dim(0);
  const std::size_t window = kernel * in;

  Tensor d_pre = d_out;
  for (std::size_t i = 0; i < d_pre.size(); ++i) {
    if (!(output[i] > 0)) d_pre[i] = 0.0;
  }

  Conv1dBackward g{Tensor(seq.shape()), Tensor(filters.shape()), Tensor({out_ch})};
  for (std::size_t t = 0; t < out_len; ++t) kernels::axpy(1.0, d_pre.row(t).data(), g.d_bias.raw(), out_ch);
  kernels::gemm_tn(window, out_ch, out_len, seq.raw(), in, d_pre.raw(), out_ch, g.d_filters.raw(), out_ch);

  Tensor d_cols({out_len, window});
  kernels::gemm_nt(out_len, window, out_ch, d_pre.raw(), out_ch, filters.raw(), out_ch, d_cols.raw(), window);
  for (std::size_t t = 0; t < out_len; ++t) kernels::axpy(1.0, d_cols.row(t).data(), g.d_seq.raw() + t * in, window);
  return g;
}

MaxPoolResult maxpool1d_forward(const Tensor& seq, std::size_t pool) {
  if (seq.rank() != 2) throw DimensionError("maxpool1d expects L x channels, got " + shape_string(seq.shape()));
  const std::size_t channels = seq.dim(1);
  const std::size_t out_len = maxpool1d_output_length(seq.dim(0), pool);
  MaxPoolResult r{Tensor({out_len, channels}), std::vector<std::size_t>(out_len * channels), seq.shape()};
  for (std::size_t w = 0; w < out_len; ++w) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::size_t best = w * pool * channels + c;
      for (std::size_t s = 1; s < pool; ++s) {
        const std::size_t idx = (w * pool + s) * channels + c;
        if (seq[idx] > seq[best]) best = idx;
      }
      r.pooled(w, c) = seq[best];
      r.argmax[w * channels + c] = best;
    }
  }
  return r;
}

Tensor maxpool1d(const Tensor& seq, std::size_t pool) { return maxpool1d_forward(seq, pool).pooled; }

Tensor maxpool1d_backward(const MaxPoolResult& forward, const Tensor& d_out) {
  if (d_out.shape() != forward.pooled.shape()) {
    throw DimensionError("maxpool1d gradient " + shape_string(d_out.shape()) + " vs output " +
                         shape_string(forward.pooled.shape()));
  }
  Tensor d_in(forward.input_shape);
  for (std::size_t i = 0; i < d_out.size(); ++i) d_in[forward.argmax[i]] += d_out[i];
  return d_in;
}

}  // namespace opseq

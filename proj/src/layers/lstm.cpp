#include "opseq/layers/lstm.hpp"

#include <cmath>

#include "opseq/error.hpp"
#include "opseq/layers/init.hpp"
#include "opseq/ndcore/kernels.hpp"
#include "opseq/ndcore/ops.hpp"

namespace opseq {

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  if (hidden_dim == 0 || input_dim == 0) throw ConfigError("LSTM dimensions must be positive");
  const Shape w{input_dim + hidden_dim, hidden_dim};
  const Shape b{hidden_dim};
  return {Tensor(w), Tensor(w), Tensor(w), Tensor(w), Tensor(b), Tensor(b), Tensor(b), Tensor(b)};
}

LstmParams LstmParams::random(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  LstmParams p = zeros(input_dim, hidden_dim);
  const std::size_t fan_in = input_dim + hidden_dim;
  for (Tensor* w : {&p.w_f, &p.w_i, &p.w_g, &p.w_o}) *w = glorot_uniform(w->shape(), fan_in, hidden_dim, rng);
  return p;
}

void LstmParams::validate() const {
  const std::size_t h = b_f.size();
  if (h == 0) throw ConfigError("LSTM hidden dimension must be positive");
  for (const Tensor* w : {&w_f, &w_i, &w_g, &w_o}) {
    if (w->rank() != 2 || w->dim(1) != h || w->dim(0) <= h || w->shape() != w_f.shape()) {
      throw DimensionError("LSTM gate matrix " + shape_string(w->shape()) + " inconsistent with hidden size " +
                           std::to_string(h));
    }
  }
  for (const Tensor* b : {&b_f, &b_i, &b_g, &b_o}) {
    if (b->rank() != 1 || b->size() != h) throw DimensionError("LSTM bias " + shape_string(b->shape()));
  }
}

LstmState LstmState::zeros(std::size_t hidden_dim) { return {Tensor({hidden_dim}), Tensor({hidden_dim})}; }

namespace {

enum Gate { kF = 0, kI = 1, kG = 2, kO = 3 };

std::array<const Tensor*, 4> gate_weights(const LstmParams& p) { return {&p.w_f, &p.w_i, &p.w_g, &p.w_o}; }
std::array<const Tensor*, 4> gate_biases(const LstmParams& p) { return {&p.b_f, &p.b_i, &p.b_g, &p.b_o}; }

void check_state(const LstmState& s, std::size_t hidden) {
  if (s.h.size() != hidden || s.c.size() != hidden) {
    throw DimensionError("LSTM state " + shape_string(s.h.shape()) + "/" + shape_string(s.c.shape()) +
                         " does not match hidden size " + std::to_string(hidden));
  }
}

}  // namespace

LstmState lstm_step(const Tensor& x_t, const LstmState& prev, const LstmParams& params) {
  params.validate();
  if (x_t.size() != params.input_dim()) {
    throw DimensionError("LSTM input " + shape_string(x_t.shape()) + " does not match input size " +
                         std::to_string(params.input_dim()));
  }
  LstmTrace trace;
  LstmOutput out = lstm_forward(x_t.reshaped({1, x_t.size()}), params, prev, &trace);
  LstmState next{std::move(out.last_h), trace.cells.reshaped({params.hidden_dim()})};
  return next;
}

LstmOutput lstm_forward(const Tensor& seq, const LstmParams& params, LstmTrace* trace) {
  return lstm_forward(seq, params, LstmState::zeros(params.hidden_dim()), trace);
}

LstmOutput lstm_forward(const Tensor& seq, const LstmParams& params, const LstmState& init, LstmTrace* trace) {
  params.validate();
  if (seq.empty()) throw EmptyInputError("LSTM over an empty sequence");
  if (seq.rank() != 2 || seq.dim(1) != params.input_dim()) {
    throw DimensionError("LSTM input " + shape_string(seq.shape()) + " does not match input size " +
                         std::to_string(params.input_dim()));
  }
  const std::size_t hidden = params.hidden_dim();
  check_state(init, hidden);
  const std::size_t len = seq.dim(0);
  const std::size_t in = seq.dim(1);
  const auto weights = gate_weights(params);
  const auto biases = gate_biases(params);

  // Input contributions for all timesteps at once: seq * W[hidden:, :] + b.
  std::array<Tensor, 4> pre;
  for (int g = 0; g < 4; ++g) {
    pre[g] = Tensor({len, hidden});
    for (std::size_t t = 0; t < len; ++t) {
      std::copy(biases[g]->data().begin(), biases[g]->data().end(), pre[g].row(t).begin());
    }
    kernels::gemm(len, hidden, in, seq.raw(), in, weights[g]->raw() + hidden * hidden, hidden, pre[g].raw(), hidden);
  }

  Tensor all_h({len, hidden});
  Tensor cells({len, hidden});
  Tensor tanh_cells({len, hidden});
  const double* h_prev = init.h.raw();
  const double* c_prev = init.c.raw();

  for (std::size_t t = 0; t < len; ++t) {
    for (int g = 0; g < 4; ++g) {
      kernels::gemm(1, hidden, hidden, h_prev, hidden, weights[g]->raw(), hidden, pre[g].row(t).data(), hidden);
    }
    double* f = pre[kF].row(t).data();
    double* i = pre[kI].row(t).data();
    double* gg = pre[kG].row(t).data();
    double* o = pre[kO].row(t).data();
    double* c = cells.row(t).data();
    double* tc = tanh_cells.row(t).data();
    double* h = all_h.row(t).data();
    for (std::size_t j = 0; j < hidden; ++j) {
      f[j] = sigmoid(f[j]);
      i[j] = sigmoid(i[j]);
      gg[j] = std::tanh(gg[j]);
      o[j] = sigmoid(o[j]);
      c[j] = f[j] * c_prev[j] + i[j] * gg[j];
      tc[j] = std::tanh(c[j]);
      h[j] = o[j] * tc[j];
    }
    h_prev = h;
    c_prev = c;
  }

  LstmOutput out{Tensor({hidden}), std::move(all_h)};
  std::copy(out.all_h.row(len - 1).begin(), out.all_h.row(len - 1).end(), out.last_h.data().begin());
  if (trace) {
    trace->inputs = seq;
    trace->gates = std::move(pre);
    trace->cells = std::move(cells);
    trace->tanh_cells = std::move(tanh_cells);
    trace->hiddens = out.all_h;
    trace->init = init;
  }
  return out;
}

LstmBackward lstm_backward(const LstmTrace& trace, const LstmParams& params, const Tensor& d_last_h,
                           const Tensor* d_all_h) {
  const std::size_t hidden = params.hidden_dim();
  const std::size_t len = trace.inputs.dim(0);
  const std::size_t in = trace.inputs.dim(1);
  if (d_last_h.size() != hidden) throw DimensionError("LSTM output gradient " + shape_string(d_last_h.shape()));
  if (d_all_h && d_all_h->shape() != Shape{len, hidden}) {
    throw DimensionError("LSTM sequence gradient " + shape_string(d_all_h->shape()));
  }
  const auto weights = gate_weights(params);

  LstmBackward out{LstmParams::zeros(in, hidden), Tensor({len, in}), LstmState::zeros(hidden)};
  std::array<Tensor*, 4> dw{&out.grads.w_f, &out.grads.w_i, &out.grads.w_g, &out.grads.w_o};
  std::array<Tensor*, 4> db{&out.grads.b_f, &out.grads.b_i, &out.grads.b_g, &out.grads.b_o};

  std::array<Tensor, 4> d_pre;
  for (auto& d : d_pre) d = Tensor({len, hidden});

  std::vector<double> dh(hidden), dh_next(hidden, 0.0), dc_next(hidden, 0.0);
  for (std::size_t t = len; t-- > 0;) {
    for (std::size_t j = 0; j < hidden; ++j) {
      dh[j] = dh_next[j] + (t == len - 1 ? d_last_h[j] : 0.0) + (d_all_h ? (*d_all_h)(t, j) : 0.0);
    }
    const double* c_prev = t > 0 ? trace.cells.row(t - 1).data() : trace.init.c.raw();
    const double* h_prev = t > 0 ? trace.hiddens.row(t - 1).data() : trace.init.h.raw();
    const double* f = trace.gates[kF].row(t).data();
    const double* i = trace.gates[kI].row(t).data();
    const double* g = trace.gates[kG].row(t).data();
    const double* o = trace.gates[kO].row(t).data();
    const double* tc = trace.tanh_cells.row(t).data();
    double* da_f = d_pre[kF].row(t).data();
    double* da_i = d_pre[kI].row(t).data();
    double* da_g = d_pre[kG].row(t).data();
    double* da_o = d_pre[kO].row(t).data();

    for (std::size_t j = 0; j < hidden; ++j) {
      const double dc = dc_next[j] + dh[j] * o[j] * (1.0 - tc[j] * tc[j]);
      da_o[j] = dh[j] * tc[j] * o[j] * (1.0 - o[j]);
      da_f[j] = dc * c_prev[j] * f[j] * (1.0 - f[j]);
      da_i[j] = dc * g[j] * i[j] * (1.0 - i[j]);
      da_g[j] = dc * i[j] * (1.0 - g[j] * g[j]);
      dc_next[j] = dc * f[j];
    }

    // Recurrent rows: dW[:hidden] += h_prev^T da ; dh_prev = sum_g da W_g[:hidden]^T.
    for (std::size_t r = 0; r < hidden; ++r) {
      double acc = 0.0;
      for (int gate = 0; gate < 4; ++gate) {
        const double* da = d_pre[gate].row(t).data();
        kernels::axpy(h_prev[r], da, dw[gate]->raw() + r * hidden, hidden);
        acc += kernels::dot(weights[gate]->raw() + r * hidden, da, hidden);
      }
      dh_next[r] = acc;
    }
  }

  for (int gate = 0; gate < 4; ++gate) {
    kernels::gemm_tn(in, hidden, len, trace.inputs.raw(), in, d_pre[gate].raw(), hidden,
                     dw[gate]->raw() + hidden * hidden, hidden);
    kernels::gemm_nt(len, in, hidden, d_pre[gate].raw(), hidden, weights[gate]->raw() + hidden * hidden, hidden,
                     out.d_seq.raw(), in);
    for (std::size_t t = 0; t < len; ++t) kernels::axpy(1.0, d_pre[gate].row(t).data(), db[gate]->raw(), hidden);
  }
  std::copy(dh_next.begin(), dh_next.end(), out.d_init.h.data().begin());
  std::copy(dc_next.begin(), dc_next.end(), out.d_init.c.data().begin());
  return out;
}

Tensor reverse_rows(const Tensor& seq) {
  Tensor out(seq.shape());
  const std::size_t len = seq.dim(0);
  for (std::size_t t = 0; t < len; ++t) {
    const auto src = seq.row(len - 1 - t);
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  return out;
}

Tensor bilstm_forward(const Tensor& seq, const LstmParams& fwd, const LstmParams& bwd, BilstmTrace* trace) {
  if (fwd.hidden_dim() != bwd.hidden_dim()) {
    throw DimensionError("bidirectional halves disagree on hidden size: " + std::to_string(fwd.hidden_dim()) +
                         " vs " + std::to_string(bwd.hidden_dim()));
  }
  if (seq.empty()) throw EmptyInputError("LSTM over an empty sequence");
  LstmOutput a = lstm_forward(seq, fwd, trace ? &trace->forward : nullptr);
  LstmOutput b = lstm_forward(reverse_rows(seq), bwd, trace ? &trace->backward : nullptr);
  return concat(a.last_h, b.last_h);
}

BilstmBackward bilstm_backward(const BilstmTrace& trace, const LstmParams& fwd, const LstmParams& bwd,
                               const Tensor& d_out) {
  const std::size_t hidden = fwd.hidden_dim();
  if (d_out.size() != 2 * hidden) throw DimensionError("biLSTM output gradient " + shape_string(d_out.shape()));
  Tensor d_a({hidden}), d_b({hidden});
  for (std::size_t j = 0; j < hidden; ++j) {
    d_a[j] = d_out[j];
    d_b[j] = d_out[hidden + j];
  }
  LstmBackward ga = lstm_backward(trace.forward, fwd, d_a);
  LstmBackward gb = lstm_backward(trace.backward, bwd, d_b);
  Tensor d_seq = ga.d_seq;
  d_seq.add(reverse_rows(gb.d_seq));
  return {std::move(ga.grads), std::move(gb.grads), std::move(d_seq)};
}

}  // namespace opseq

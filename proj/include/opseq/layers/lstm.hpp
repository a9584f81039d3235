#pragma once

#include <array>
#include <string_view>

#include "opseq/ndcore/tensor.hpp"
#include "opseq/rng.hpp"

namespace opseq {

// Four-gate LSTM parameters. Every gate matrix acts on z = [h_prev, x_t], so
// rows [0, hidden) multiply the previous hidden state and rows
// [hidden, hidden + input) multiply the current input.
struct LstmParams {
  Tensor w_f, w_i, w_g, w_o;  // (hidden + input) x hidden
  Tensor b_f, b_i, b_g, b_o;  // hidden

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);
  static LstmParams random(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

  std::size_t hidden_dim() const { return b_f.size(); }
  std::size_t input_dim() const { return w_f.dim(0) - hidden_dim(); }

  void validate() const;

  static constexpr std::array<std::string_view, 8> kNames{"W_f", "W_i", "W_g", "W_o", "b_f", "b_i", "b_g", "b_o"};
  std::array<Tensor*, 8> tensors() { return {&w_f, &w_i, &w_g, &w_o, &b_f, &b_i, &b_g, &b_o}; }
  std::array<const Tensor*, 8> tensors() const { return {&w_f, &w_i, &w_g, &w_o, &b_f, &b_i, &b_g, &b_o}; }
};

struct LstmState {
  Tensor h;  // hidden/output state
  Tensor c;  // cell state

  static LstmState zeros(std::size_t hidden_dim);
};

// One timestep:
//   f = sigmoid(z W_f + b_f), i = sigmoid(z W_i + b_i),
//   g = tanh(z W_g + b_g),    o = sigmoid(z W_o + b_o),
//   c_t = f * c_prev + i * g,  h_t = o * tanh(c_t).
LstmState lstm_step(const Tensor& x_t, const LstmState& prev, const LstmParams& params);

// Everything backward needs from a forward pass.
struct LstmTrace {
  Tensor inputs;                 // L x input
  std::array<Tensor, 4> gates;   // f, i, g, o activations, each L x hidden
  Tensor cells;                  // L x hidden
  Tensor tanh_cells;             // L x hidden
  Tensor hiddens;                // L x hidden
  LstmState init;
};

struct LstmOutput {
  Tensor last_h;  // hidden
  Tensor all_h;   // L x hidden
};

LstmOutput lstm_forward(const Tensor& seq, const LstmParams& params, const LstmState& init,
                        LstmTrace* trace = nullptr);
LstmOutput lstm_forward(const Tensor& seq, const LstmParams& params, LstmTrace* trace = nullptr);

struct LstmBackward {
  LstmParams grads;
  Tensor d_seq;
  LstmState d_init;
};

// Full backpropagation through time. d_all_h, when given, adds per-step
// gradients on the emitted hidden states.
LstmBackward lstm_backward(const LstmTrace& trace, const LstmParams& params, const Tensor& d_last_h,
                           const Tensor* d_all_h = nullptr);

struct BilstmTrace {
  LstmTrace forward;
  LstmTrace backward;
};

// concat(last_h over seq with fwd, last_h over reversed seq with bwd).
Tensor bilstm_forward(const Tensor& seq, const LstmParams& fwd, const LstmParams& bwd, BilstmTrace* trace = nullptr);

struct BilstmBackward {
  LstmParams d_fwd;
  LstmParams d_bwd;
  Tensor d_seq;
};

BilstmBackward bilstm_backward(const BilstmTrace& trace, const LstmParams& fwd, const LstmParams& bwd,
                               const Tensor& d_out);

Tensor reverse_rows(const Tensor& seq);

}  // namespace opseq

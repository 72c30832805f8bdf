#pragma once

#include <utility>
#include <vector>

#include "amnl/rng.hpp"
#include "amnl/tensor.hpp"

namespace amnl {

// One LSTM cell. Gate rows are stacked [input; forget; output; candidate],
// each block of hidden_dim rows.
struct LstmParams {
  Tensor w_input;   // [4H, X]
  Tensor w_hidden;  // [4H, H]
  Tensor bias;      // [4H]

  std::size_t hidden_dim() const { return w_hidden.shape()[1]; }
  std::size_t input_dim() const { return w_input.shape()[1]; }
};

// Zero-mean Gaussian weights scaled by fan-in, zero bias except the forget
// block at 1.0.
LstmParams make_lstm(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

struct LstmState {
  Tensor h;
  Tensor c;
};

LstmState lstm_zero_state(std::size_t hidden_dim);

LstmState lstm_step(Tape& tape, const LstmParams& p, const Tensor& x, const LstmState& prev);

// Runs the cell over embedded tokens and returns the hidden state at the
// last non-pad position; <pad> steps carry state through untouched, so
// trailing padding cannot change the result. Rejects all-pad rows.
Tensor encode_sentence(Tape& tape, const std::vector<std::size_t>& row, const Tensor& embedding,
                       const LstmParams& p);

}  // namespace amnl

#include "amnl/lstm.hpp"

#include <cmath>
#include <stdexcept>

#include "amnl/text.hpp"

namespace amnl {

LstmParams make_lstm(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  // Fan-in-scaled init, matching the rest of the model: preactivations stay
  // O(1) no matter how wide the input is.
  auto gauss = [&rng](Shape shape) {
    double sigma = 1.0 / std::sqrt(static_cast<double>(shape.back()));
    std::vector<double> v(shape_numel(shape));
    for (double& x : v) x = rng.gaussian(0.0, sigma);
    return Tensor(std::move(shape), std::move(v), true);
  };
  LstmParams p;
  p.w_input = gauss({4 * hidden_dim, input_dim});
  p.w_hidden = gauss({4 * hidden_dim, hidden_dim});
  std::vector<double> b(4 * hidden_dim, 0.0);
  for (std::size_t i = hidden_dim; i < 2 * hidden_dim; ++i) b[i] = 1.0;  // forget block
  p.bias = Tensor({4 * hidden_dim}, std::move(b), true);
  return p;
}

LstmState lstm_zero_state(std::size_t hidden_dim) {
  return LstmState{Tensor::zeros({hidden_dim}), Tensor::zeros({hidden_dim})};
}

LstmState lstm_step(Tape& tape, const LstmParams& p, const Tensor& x, const LstmState& prev) {
  std::size_t H = p.hidden_dim();
  Tensor z = tape.add(tape.add(tape.matvec(p.w_input, x), tape.matvec(p.w_hidden, prev.h)),
                      p.bias);
  Tensor i = tape.sigmoid(tape.segment(z, 0, H));
  Tensor f = tape.sigmoid(tape.segment(z, H, H));
  Tensor o = tape.sigmoid(tape.segment(z, 2 * H, H));
  Tensor g = tape.tanh(tape.segment(z, 3 * H, H));
  Tensor c = tape.add(tape.mul(f, prev.c), tape.mul(i, g));
  Tensor h = tape.mul(o, tape.tanh(c));
  return LstmState{h, c};
}

Tensor encode_sentence(Tape& tape, const std::vector<std::size_t>& row, const Tensor& embedding,
                       const LstmParams& p) {
  LstmState state = lstm_zero_state(p.hidden_dim());
  bool stepped = false;
  for (std::size_t id : row) {
    if (id == kPadId) continue;
    Tensor x = tape.row(embedding, id);
    state = lstm_step(tape, p, x, state);
    stepped = true;
  }
  if (!stepped) throw std::invalid_argument("encode_sentence: row is entirely padding");
  return state.h;
}

}  // namespace amnl

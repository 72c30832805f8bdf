#include <cmath>
#include <stdexcept>
#include <vector>

#include "amnl/lstm.hpp"
#include "amnl/rng.hpp"
#include "amnl/tensor.hpp"
#include "amnl/text.hpp"
#include "doctest.h"

using namespace amnl;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Tensor rand_matrix(Shape shape, Rng& rng) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(-0.5, 0.5);
  return Tensor(std::move(shape), std::move(v), true);
}

}  // namespace

TEST_SUITE("lstm") {

TEST_CASE("make_lstm shapes the gates and sets the forget bias to one") {
  Rng rng(3);
  LstmParams p = make_lstm(5, 4, rng);
  CHECK(p.w_input.shape() == Shape{16, 5});
  CHECK(p.w_hidden.shape() == Shape{16, 4});
  CHECK(p.bias.shape() == Shape{16});
  CHECK(p.input_dim() == 5);
  CHECK(p.hidden_dim() == 4);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(p.bias.at(i) == ((i >= 4 && i < 8) ? 1.0 : 0.0));
  }
}

TEST_CASE("one step from the zero state matches the closed form") {
  const std::size_t H = 2, X = 3;
  Rng rng(11);
  LstmParams p;
  p.w_input = rand_matrix({4 * H, X}, rng);
  p.w_hidden = rand_matrix({4 * H, H}, rng);
  p.bias = rand_matrix({4 * H}, rng);
  Tensor x({X}, {0.3, -0.7, 1.1});

  Tape tape;
  LstmState out = lstm_step(tape, p, x, lstm_zero_state(H));

  for (std::size_t j = 0; j < H; ++j) {
    auto pre = [&](std::size_t block) {
      double v = p.bias.at(block * H + j);
      for (std::size_t k = 0; k < X; ++k) v += p.w_input.at((block * H + j) * X + k) * x.at(k);
      return v;  // h0 = 0, so w_hidden contributes nothing
    };
    double i_gate = sigmoid(pre(0));
    double f_gate = sigmoid(pre(1));
    double o_gate = sigmoid(pre(2));
    double cand = std::tanh(pre(3));
    (void)f_gate;  // multiplies the zero initial cell
    double c = i_gate * cand;
    double h = o_gate * std::tanh(c);
    CHECK(std::fabs(out.c.at(j) - c) < 1e-12);
    CHECK(std::fabs(out.h.at(j) - h) < 1e-12);
  }
}

TEST_CASE("the forget gate carries the previous cell") {
  const std::size_t H = 1, X = 1;
  LstmParams p;
  p.w_input = Tensor::zeros({4 * H, X});
  p.w_hidden = Tensor::zeros({4 * H, H});
  // Saturate the forget gate open and close every other gate.
  p.bias = Tensor({4}, {-100.0, 100.0, -100.0, 0.0});
  Tensor x = Tensor::zeros({X});
  Tape tape;
  LstmState prev;
  prev.h = Tensor::zeros({H});
  prev.c = Tensor::full({H}, 0.625);
  LstmState out = lstm_step(tape, p, x, prev);
  CHECK(out.c.at(0) == doctest::Approx(0.625).epsilon(1e-12));
}

TEST_CASE("zero weights produce a zero hidden state") {
  const std::size_t H = 3, X = 2;
  LstmParams p;
  p.w_input = Tensor::zeros({4 * H, X});
  p.w_hidden = Tensor::zeros({4 * H, H});
  p.bias = Tensor::zeros({4 * H});
  Tensor x({X}, {5.0, -3.0});
  Tape tape;
  LstmState out = lstm_step(tape, p, x, lstm_zero_state(H));
  // Candidate tanh(0) = 0 regardless of the gates.
  for (std::size_t j = 0; j < H; ++j) CHECK(out.h.at(j) == 0.0);
}

TEST_CASE("trailing padding cannot change a sentence encoding") {
  Rng rng(29);
  const std::size_t V = 6, D = 3, H = 4;
  Tensor emb = rand_matrix({V, D}, rng);
  LstmParams p = make_lstm(D, H, rng);

  std::vector<std::size_t> bare = {4, 5, kEosId};
  std::vector<std::size_t> padded = bare;
  padded.insert(padded.end(), 7, kPadId);

  Tape t1, t2;
  Tensor a = encode_sentence(t1, bare, emb, p);
  Tensor b = encode_sentence(t2, padded, emb, p);
  REQUIRE(a.numel() == b.numel());
  for (std::size_t j = 0; j < a.numel(); ++j) CHECK(a.at(j) == b.at(j));  // bitwise
}

TEST_CASE("interior padding is carried through unchanged") {
  Rng rng(31);
  Tensor emb = rand_matrix({6, 3}, rng);
  LstmParams p = make_lstm(3, 4, rng);
  Tape t1, t2;
  Tensor a = encode_sentence(t1, {4, kPadId, 5, kEosId}, emb, p);
  Tensor b = encode_sentence(t2, {4, 5, kEosId}, emb, p);
  for (std::size_t j = 0; j < a.numel(); ++j) CHECK(a.at(j) == b.at(j));
}

TEST_CASE("all-pad rows are rejected") {
  Rng rng(37);
  Tensor emb = rand_matrix({4, 2}, rng);
  LstmParams p = make_lstm(2, 3, rng);
  Tape tape;
  CHECK_THROWS_AS(encode_sentence(tape, {kPadId, kPadId}, emb, p), std::invalid_argument);
}

}  // TEST_SUITE

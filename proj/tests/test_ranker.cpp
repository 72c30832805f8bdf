#include <cmath>
#include <vector>

#include "amnl/ranker.hpp"
#include "amnl/rng.hpp"
#include "amnl/tensor.hpp"
#include "doctest.h"

using namespace amnl;

namespace {

Tensor rand_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor(std::move(shape), std::move(v), true);
}

SocialAttentionParams rand_social(std::size_t attn, std::size_t upref, Rng& rng) {
  SocialAttentionParams p;
  p.w_self = rand_tensor({attn, upref}, rng);
  p.w_followee = rand_tensor({attn, upref}, rng);
  p.p = rand_tensor({attn}, rng);
  p.b = rand_tensor({attn}, rng);
  return p;
}

}  // namespace

TEST_SUITE("ranker") {

TEST_CASE("personal score is the plain inner product at full width") {
  Rng rng(3);
  const std::size_t D = 400;
  Tensor u = rand_tensor({D}, rng);
  Tensor z = rand_tensor({D}, rng);
  Tape tape;
  double got = personal_score(tape, u, z).item();
  double want = 0.0;
  for (std::size_t i = 0; i < D; ++i) want += u.at(i) * z.at(i);
  CHECK(std::fabs(got - want) < 1e-12);
}

TEST_CASE("no followees means a neutral social factor") {
  Rng rng(5);
  Tensor u = rand_tensor({4}, rng);
  Tensor z = rand_tensor({4}, rng);
  SocialAttentionParams p = rand_social(3, 4, rng);
  Tape tape;
  CHECK(social_impact(tape, u, {}, z, p).item() == 1.0);
  SocialImpactOut detail = social_impact_detail(tape, u, {}, z, p);
  CHECK(detail.value.item() == 1.0);
  CHECK(!detail.weights.defined());
  // F degrades to the personalized score alone.
  double f = personal_score(tape, u, z).item();
  CHECK(multifaceted_score(tape, u, {}, z, p, true).item() == doctest::Approx(f).epsilon(1e-12));
}

TEST_CASE("a single followee gets weight one") {
  Rng rng(7);
  Tensor u = rand_tensor({4}, rng);
  Tensor q = rand_tensor({4}, rng);
  Tensor z = rand_tensor({4}, rng);
  SocialAttentionParams p = rand_social(3, 4, rng);
  Tape tape;
  SocialImpactOut out = social_impact_detail(tape, u, {q}, z, p);
  REQUIRE(out.weights.numel() == 1);
  CHECK(out.weights.at(0) == 1.0);
  double want = 0.0;
  for (std::size_t i = 0; i < 4; ++i) want += q.at(i) * z.at(i);
  CHECK(std::fabs(out.value.item() - want) < 1e-12);
}

TEST_CASE("three followees match the closed form") {
  Rng rng(11);
  const std::size_t A = 2, D = 3;
  Tensor u = rand_tensor({D}, rng);
  Tensor z = rand_tensor({D}, rng);
  std::vector<Tensor> followees = {rand_tensor({D}, rng), rand_tensor({D}, rng),
                                   rand_tensor({D}, rng)};
  SocialAttentionParams p = rand_social(A, D, rng);
  Tape tape;
  SocialImpactOut out = social_impact_detail(tape, u, followees, z, p);

  auto mv = [&](const Tensor& m, const Tensor& v, std::size_t r) {
    double s = 0.0;
    for (std::size_t c = 0; c < D; ++c) s += m.at(r * D + c) * v.at(c);
    return s;
  };
  std::vector<double> scores(3);
  for (std::size_t k = 0; k < 3; ++k) {
    double s = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      s += p.p.at(a) * std::tanh(mv(p.w_self, u, a) + mv(p.w_followee, followees[k], a) +
                                 p.b.at(a));
    }
    scores[k] = s;
  }
  double mx = std::max({scores[0], scores[1], scores[2]});
  double total = 0.0;
  std::vector<double> w(3);
  for (std::size_t k = 0; k < 3; ++k) total += w[k] = std::exp(scores[k] - mx);
  double want = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    w[k] /= total;
    CHECK(std::fabs(out.weights.at(k) - w[k]) < 1e-12);
    double uz = 0.0;
    for (std::size_t i = 0; i < D; ++i) uz += followees[k].at(i) * z.at(i);
    want += w[k] * uz;
  }
  CHECK(std::fabs(out.value.item() - want) < 1e-12);
}

TEST_CASE("social weights always sum to one") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t D = 1 + rng.below(5);
    std::size_t n = 1 + rng.below(6);
    SocialAttentionParams p = rand_social(1 + rng.below(3), D, rng);
    Tensor u = rand_tensor({D}, rng, -3.0, 3.0);
    Tensor z = rand_tensor({D}, rng, -3.0, 3.0);
    std::vector<Tensor> fs;
    for (std::size_t i = 0; i < n; ++i) fs.push_back(rand_tensor({D}, rng, -3.0, 3.0));
    Tape tape;
    SocialImpactOut out = social_impact_detail(tape, u, fs, z, p);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += out.weights.at(i);
    CHECK(std::fabs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("the full score is the product of both factors") {
  Rng rng(17);
  Tensor u = rand_tensor({5}, rng);
  Tensor z = rand_tensor({5}, rng);
  std::vector<Tensor> followees = {rand_tensor({5}, rng), rand_tensor({5}, rng)};
  SocialAttentionParams p = rand_social(3, 5, rng);
  Tape tape;
  double f = personal_score(tape, u, z).item();
  double h = social_impact(tape, u, followees, z, p).item();
  double full = multifaceted_score(tape, u, followees, z, p, true).item();
  CHECK(std::fabs(full - f * h) < 1e-12);
  double bare = multifaceted_score(tape, u, followees, z, p, false).item();
  CHECK(std::fabs(bare - f) < 1e-12);
}

TEST_CASE("social attention ignores a common shift applied through the bias") {
  // Adding a constant to every followee score cannot move the weights.
  Rng rng(19);
  const std::size_t D = 3;
  Tensor u = rand_tensor({D}, rng);
  Tensor z = rand_tensor({D}, rng);
  std::vector<Tensor> fs = {rand_tensor({D}, rng), rand_tensor({D}, rng), rand_tensor({D}, rng)};
  SocialAttentionParams p = rand_social(1, D, rng);
  // With attn dim 1 and p = 1 the score is tanh(w_self u + w_followee u_q + b):
  // scale p instead, which multiplies every score and keeps the ordering.
  p.p = Tensor::full({1}, 1.0);
  Tape tape;
  SocialImpactOut a = social_impact_detail(tape, u, fs, z, p);
  std::size_t best_a = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (a.weights.at(i) > a.weights.at(best_a)) best_a = i;
  }
  p.p = Tensor::full({1}, 3.0);
  SocialImpactOut b = social_impact_detail(tape, u, fs, z, p);
  std::size_t best_b = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (b.weights.at(i) > b.weights.at(best_b)) best_b = i;
  }
  CHECK(best_a == best_b);
}

}  // TEST_SUITE

#pragma once

#include <vector>

#include "amnl/tensor.hpp"

namespace amnl {

struct SocialAttentionParams {
  Tensor w_self;      // [D_a, D_u]
  Tensor w_followee;  // [D_a, D_u]
  Tensor p;           // [D_a]
  Tensor b;           // [D_a]
};

// f = u_j . z
Tensor personal_score(Tape& tape, const Tensor& u_j, const Tensor& z);

// Attention over the followees' preference embeddings:
// s_q = p . tanh(W_self u_j + W_followee u_q + b), alpha = softmax(s),
// h = sum_q alpha_q (u_q . z). Users without followees get the neutral
// factor 1.0 so F degrades to the personalized score.
Tensor social_impact(Tape& tape, const Tensor& u_j, const std::vector<Tensor>& followee_embs,
                     const Tensor& z, const SocialAttentionParams& p);

// Same, but also exposes the attention weights (empty for no followees).
struct SocialImpactOut {
  Tensor value;    // scalar
  Tensor weights;  // [|N_j|] or undefined
};
SocialImpactOut social_impact_detail(Tape& tape, const Tensor& u_j,
                                     const std::vector<Tensor>& followee_embs, const Tensor& z,
                                     const SocialAttentionParams& p);

// F = f * h, or f alone when social impact is disabled.
Tensor multifaceted_score(Tape& tape, const Tensor& u_j,
                          const std::vector<Tensor>& followee_embs, const Tensor& z,
                          const SocialAttentionParams& p, bool with_social);

}  // namespace amnl

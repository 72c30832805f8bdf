#include "amnl/ranker.hpp"

namespace amnl {

Tensor personal_score(Tape& tape, const Tensor& u_j, const Tensor& z) {
  return tape.dot(u_j, z);
}

SocialImpactOut social_impact_detail(Tape& tape, const Tensor& u_j,
                                     const std::vector<Tensor>& followee_embs, const Tensor& z,
                                     const SocialAttentionParams& p) {
  if (followee_embs.empty()) {
    return SocialImpactOut{Tensor::scalar(1.0), Tensor()};
  }
  Tensor self_part = tape.add(tape.matvec(p.w_self, u_j), p.b);
  std::vector<Tensor> scores;
  scores.reserve(followee_embs.size());
  for (const Tensor& u_q : followee_embs) {
    Tensor hidden = tape.tanh(tape.add(self_part, tape.matvec(p.w_followee, u_q)));
    scores.push_back(tape.dot(p.p, hidden));
  }
  Tensor weights = tape.softmax(tape.concat(scores));
  Tensor h;
  for (std::size_t q = 0; q < followee_embs.size(); ++q) {
    Tensor term = tape.mul(tape.index(weights, q), tape.dot(followee_embs[q], z));
    h = h.defined() ? tape.add(h, term) : term;
  }
  return SocialImpactOut{h, weights};
}

Tensor social_impact(Tape& tape, const Tensor& u_j, const std::vector<Tensor>& followee_embs,
                     const Tensor& z, const SocialAttentionParams& p) {
  return social_impact_detail(tape, u_j, followee_embs, z, p).value;
}

Tensor multifaceted_score(Tape& tape, const Tensor& u_j,
                          const std::vector<Tensor>& followee_embs, const Tensor& z,
                          const SocialAttentionParams& p, bool with_social) {
  Tensor f = personal_score(tape, u_j, z);
  if (!with_social) return f;
  Tensor h = social_impact(tape, u_j, followee_embs, z, p);
  return tape.mul(f, h);
}

}  // namespace amnl

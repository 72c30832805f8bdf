#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "amnl/fusion.hpp"
#include "amnl/graph.hpp"
#include "amnl/lstm.hpp"
#include "amnl/ranker.hpp"
#include "amnl/rng.hpp"
#include "amnl/tensor.hpp"
#include "amnl/text.hpp"

namespace amnl {

enum class FusionKind { kLinear, kGuided };
enum class Ablation { kNone, kImageOnly, kTextOnly, kNoSocial };

std::string to_string(FusionKind k);
std::string to_string(Ablation a);
FusionKind fusion_from_string(const std::string& s);
Ablation ablation_from_string(const std::string& s);

struct ModelConfig {
  FusionKind fusion = FusionKind::kLinear;
  Ablation ablation = Ablation::kNone;
  std::size_t upref_dim = 400;   // D_u, user preference dim
  std::size_t rnn_dim = 1000;    // D_h, text LSTM hidden dim
  std::size_t loc_dim = 256;     // D_r, location RNN hidden dim
  std::size_t attn_dim = 256;    // D_a, attention hidden dim
  std::size_t word_dim = 300;    // D_w, word embedding dim
  std::size_t sentences = kDefaultSentences;
  std::size_t sentence_len = kDefaultSentenceLen;
  std::size_t glimpse_window = 3;
  bool soft_glimpse = false;
  bool per_step_output = false;
  // Dataset-derived extents.
  std::size_t num_users = 0;
  std::size_t vocab_size = 0;
  std::size_t channels = 0;  // D_f
  std::size_t grid = 0;      // G

  bool uses_text() const { return ablation != Ablation::kImageOnly; }
  bool uses_image() const { return ablation != Ablation::kTextOnly; }
  bool uses_social() const { return ablation != Ablation::kNoSocial; }

  void validate() const;
};

// Canonical JSON round-trip (sorted keys, stable formatting) so identical
// configs serialize to identical bytes.
std::string config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(const std::string& text);

// All trainable state. Tensors that the configuration does not use stay
// undefined and never appear in parameters().
struct Model {
  ModelConfig cfg;
  Tensor U;        // [m, D_u]
  Tensor emb;      // [V, D_w]
  LstmParams txt;  // sentence encoder
  LinearFusionParams lin;
  GuidedFusionParams gui;
  SocialAttentionParams soc;

  // Stable (name, tensor) enumeration; order is the checkpoint order.
  std::vector<std::pair<std::string, Tensor>> parameters() const;
};

Model init_model(const ModelConfig& cfg, std::uint64_t seed);

// Token matrices for every tweet, in tweet-index order.
std::vector<TokenMatrix> tokenize_all(const IRMGraph& g, const Vocabulary& vocab,
                                      const ModelConfig& cfg);

// Initial glimpse location: fixed center for evaluation, a uniformly drawn
// valid window center for training.
Location center_l0();
Location random_l0(const ModelConfig& cfg, Rng& rng);

// z for one tweet under the configured fusion.
Tensor tweet_repr(Tape& tape, const Model& m, const ImageTweet& tweet, const TokenMatrix& tokens,
                  Location l0, LocationTrace* trace = nullptr);

// F(user, z) with the user's followee set from the graph.
Tensor score_tweet(Tape& tape, const Model& m, std::size_t user,
                   const std::vector<std::size_t>& followees, const Tensor& z);

}  // namespace amnl

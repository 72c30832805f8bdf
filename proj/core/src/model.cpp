#include "amnl/model.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace amnl {

namespace {

using json = nlohmann::json;

// Zero-mean Gaussian init scaled by the fan-in (the last axis: matrices act on
// vectors of that size, attention vectors dot against activations of that size,
// and embedding rows have that width). A fixed small sigma would shrink the
// score, which multiplies several initialized layers, below the reach of the
// regularizer and stall training.
Tensor gauss_tensor(Shape shape, Rng& rng) {
  double sigma = 1.0 / std::sqrt(static_cast<double>(shape.back()));
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.gaussian(0.0, sigma);
  return Tensor(std::move(shape), std::move(v), true);
}

}  // namespace

std::string to_string(FusionKind k) {
  return k == FusionKind::kLinear ? "linear" : "guided";
}

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::kNone: return "none";
    case Ablation::kImageOnly: return "image-only";
    case Ablation::kTextOnly: return "text-only";
    case Ablation::kNoSocial: return "no-social";
  }
  throw std::logic_error("unreachable ablation");
}

FusionKind fusion_from_string(const std::string& s) {
  if (s == "linear") return FusionKind::kLinear;
  if (s == "guided") return FusionKind::kGuided;
  throw std::invalid_argument("unknown fusion kind '" + s + "'");
}

Ablation ablation_from_string(const std::string& s) {
  if (s == "none") return Ablation::kNone;
  if (s == "image-only") return Ablation::kImageOnly;
  if (s == "text-only") return Ablation::kTextOnly;
  if (s == "no-social") return Ablation::kNoSocial;
  throw std::invalid_argument("unknown ablation '" + s + "'");
}

void ModelConfig::validate() const {
  if (upref_dim == 0 || attn_dim == 0 || word_dim == 0) {
    throw std::invalid_argument("model dims must be positive");
  }
  if (num_users == 0) throw std::invalid_argument("model needs at least one user");
  if (sentences == 0 || sentence_len == 0) {
    throw std::invalid_argument("sentence layout must be positive");
  }
  if (uses_text() && (vocab_size < 4 || rnn_dim == 0)) {
    throw std::invalid_argument("text path needs a vocabulary and a positive rnn dim");
  }
  if (fusion == FusionKind::kGuided) {
    if (ablation == Ablation::kTextOnly) {
      throw std::invalid_argument("guided fusion cannot run text-only: the glimpse is visual");
    }
    if (loc_dim == 0) throw std::invalid_argument("guided fusion needs a positive loc dim");
    if (grid == 0 || glimpse_window == 0 || glimpse_window % 2 == 0 || glimpse_window > grid) {
      throw std::invalid_argument("glimpse window must be odd and fit the grid");
    }
  }
  if (uses_image() && channels == 0) {
    throw std::invalid_argument("image paths need a positive channel dim");
  }
}

std::string config_to_json(const ModelConfig& cfg) {
  json j;
  j["ablation"] = to_string(cfg.ablation);
  j["attn_dim"] = cfg.attn_dim;
  j["channels"] = cfg.channels;
  j["fusion"] = to_string(cfg.fusion);
  j["glimpse_window"] = cfg.glimpse_window;
  j["grid"] = cfg.grid;
  j["loc_dim"] = cfg.loc_dim;
  j["num_users"] = cfg.num_users;
  j["per_step_output"] = cfg.per_step_output;
  j["rnn_dim"] = cfg.rnn_dim;
  j["sentence_len"] = cfg.sentence_len;
  j["sentences"] = cfg.sentences;
  j["soft_glimpse"] = cfg.soft_glimpse;
  j["upref_dim"] = cfg.upref_dim;
  j["vocab_size"] = cfg.vocab_size;
  j["word_dim"] = cfg.word_dim;
  return j.dump();
}

ModelConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  ModelConfig cfg;
  cfg.ablation = ablation_from_string(j.at("ablation").get<std::string>());
  cfg.attn_dim = j.at("attn_dim").get<std::size_t>();
  cfg.channels = j.at("channels").get<std::size_t>();
  cfg.fusion = fusion_from_string(j.at("fusion").get<std::string>());
  cfg.glimpse_window = j.at("glimpse_window").get<std::size_t>();
  cfg.grid = j.at("grid").get<std::size_t>();
  cfg.loc_dim = j.at("loc_dim").get<std::size_t>();
  cfg.num_users = j.at("num_users").get<std::size_t>();
  cfg.per_step_output = j.at("per_step_output").get<bool>();
  cfg.rnn_dim = j.at("rnn_dim").get<std::size_t>();
  cfg.sentence_len = j.at("sentence_len").get<std::size_t>();
  cfg.sentences = j.at("sentences").get<std::size_t>();
  cfg.soft_glimpse = j.at("soft_glimpse").get<bool>();
  cfg.upref_dim = j.at("upref_dim").get<std::size_t>();
  cfg.vocab_size = j.at("vocab_size").get<std::size_t>();
  cfg.word_dim = j.at("word_dim").get<std::size_t>();
  return cfg;
}

Model init_model(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Model m;
  m.cfg = cfg;
  Rng rng(seed);
  m.U = gauss_tensor({cfg.num_users, cfg.upref_dim}, rng);
  if (cfg.uses_text()) {
    m.emb = gauss_tensor({cfg.vocab_size, cfg.word_dim}, rng);
    m.txt = make_lstm(cfg.word_dim, cfg.rnn_dim, rng);
  }
  if (cfg.fusion == FusionKind::kLinear) {
    if (cfg.uses_image()) m.lin.w_visual = gauss_tensor({cfg.upref_dim, cfg.channels}, rng);
    if (cfg.uses_text()) m.lin.w_text = gauss_tensor({cfg.upref_dim, cfg.rnn_dim}, rng);
  } else {
    if (cfg.uses_text()) {
      m.gui.attention.w_text = gauss_tensor({cfg.attn_dim, cfg.rnn_dim}, rng);
      m.gui.attention.w_cell = gauss_tensor({cfg.attn_dim, cfg.channels}, rng);
      m.gui.attention.p = gauss_tensor({cfg.attn_dim}, rng);
      m.gui.attention.b = Tensor::zeros({cfg.attn_dim}, true);
    }
    m.gui.rnn = make_lstm(cfg.channels, cfg.loc_dim, rng);
    m.gui.head.w_visual = gauss_tensor({2, cfg.channels}, rng);
    m.gui.head.w_state = gauss_tensor({2, cfg.loc_dim}, rng);
    std::size_t n_out = cfg.per_step_output ? cfg.sentences : 1;
    for (std::size_t i = 0; i < n_out; ++i) {
      m.gui.w_out.push_back(gauss_tensor({cfg.upref_dim, cfg.loc_dim}, rng));
    }
    m.gui.window = cfg.glimpse_window;
    m.gui.steps = cfg.sentences;
    m.gui.soft_glimpse = cfg.soft_glimpse;
    m.gui.text_guided = cfg.uses_text();
  }
  if (cfg.uses_social()) {
    m.soc.w_self = gauss_tensor({cfg.attn_dim, cfg.upref_dim}, rng);
    m.soc.w_followee = gauss_tensor({cfg.attn_dim, cfg.upref_dim}, rng);
    m.soc.p = gauss_tensor({cfg.attn_dim}, rng);
    m.soc.b = Tensor::zeros({cfg.attn_dim}, true);
  }
  return m;
}

std::vector<std::pair<std::string, Tensor>> Model::parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  auto put = [&out](const std::string& name, const Tensor& t) {
    if (t.defined()) out.emplace_back(name, t);
  };
  put("U", U);
  put("emb", emb);
  put("txt.wx", txt.w_input);
  put("txt.wh", txt.w_hidden);
  put("txt.b", txt.bias);
  put("lin.wi", lin.w_visual);
  put("lin.wd", lin.w_text);
  put("att.wt", gui.attention.w_text);
  put("att.wu", gui.attention.w_cell);
  put("att.p", gui.attention.p);
  put("att.b", gui.attention.b);
  put("loc.wx", gui.rnn.w_input);
  put("loc.wh", gui.rnn.w_hidden);
  put("loc.b", gui.rnn.bias);
  put("head.wj", gui.head.w_visual);
  put("head.wc", gui.head.w_state);
  for (std::size_t i = 0; i < gui.w_out.size(); ++i) {
    put("out.w" + std::to_string(i), gui.w_out[i]);
  }
  put("soc.ws", soc.w_self);
  put("soc.wn", soc.w_followee);
  put("soc.p", soc.p);
  put("soc.b", soc.b);
  return out;
}

std::vector<TokenMatrix> tokenize_all(const IRMGraph& g, const Vocabulary& vocab,
                                      const ModelConfig& cfg) {
  std::vector<TokenMatrix> out;
  out.reserve(g.tweets.size());
  for (const ImageTweet& t : g.tweets) {
    out.push_back(preprocess(t.comments, vocab, cfg.sentences, cfg.sentence_len));
  }
  return out;
}

Location center_l0() { return Location{0.0, 0.0}; }

Location random_l0(const ModelConfig& cfg, Rng& rng) {
  std::size_t half = cfg.glimpse_window / 2;
  std::size_t lo = half;
  std::size_t hi = cfg.grid - 1 - half;
  GridCenter c{lo + rng.below(hi - lo + 1), lo + rng.below(hi - lo + 1)};
  return location_of_cell(c, cfg.grid, cfg.glimpse_window);
}

Tensor tweet_repr(Tape& tape, const Model& m, const ImageTweet& tweet, const TokenMatrix& tokens,
                  Location l0, LocationTrace* trace) {
  std::vector<Tensor> ys;
  if (m.cfg.uses_text()) {
    ys.reserve(tokens.size());
    for (const auto& row : tokens) ys.push_back(encode_sentence(tape, row, m.emb, m.txt));
  }
  if (m.cfg.fusion == FusionKind::kLinear) {
    return linear_fuse(tape, tweet.global, ys, m.lin);
  }
  return guided_fuse(tape, tweet.conv, tweet.global, ys, m.gui, l0, trace);
}

Tensor score_tweet(Tape& tape, const Model& m, std::size_t user,
                   const std::vector<std::size_t>& followees, const Tensor& z) {
  Tensor u_j = tape.row(m.U, user);
  std::vector<Tensor> followee_embs;
  followee_embs.reserve(followees.size());
  for (std::size_t q : followees) followee_embs.push_back(tape.row(m.U, q));
  return multifaceted_score(tape, u_j, followee_embs, z, m.soc, m.cfg.uses_social());
}

}  // namespace amnl

#include "amnl/gradcheck.hpp"

#include <cmath>
#include <set>

namespace amnl {

GradCheckReport gradcheck(const Model& model, const IRMGraph& g,
                          const std::vector<TokenMatrix>& tokens,
                          const std::vector<PreferenceTuple>& batch, double margin, double beta,
                          std::uint64_t seed, double h) {
  bool guided = model.cfg.fusion == FusionKind::kGuided;
  BatchPlan plan;
  if (guided) {
    Rng rng(seed);
    std::set<std::size_t> distinct;
    for (const PreferenceTuple& t : batch) {
      distinct.insert(t.pos);
      distinct.insert(t.neg);
    }
    for (std::size_t tweet : distinct) plan[tweet].l0 = random_l0(model.cfg, rng);
  }
  // The soft path is continuous in the location, so finite differences must
  // recompute it; the discrete path must replay the recorded windows.
  bool replay = guided && !model.cfg.soft_glimpse;

  auto params = model.parameters();
  for (const auto& [name, t] : params) Tensor(t).zero_grad();
  {
    Tape tape;
    Tensor loss =
        batch_objective(tape, model, g, tokens, batch, margin, beta, guided ? &plan : nullptr);
    tape.backward(loss);
  }
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& [name, t] : params) {
    analytic.push_back(t.has_grad() ? t.grad() : std::vector<double>(t.numel(), 0.0));
  }

  auto eval_loss = [&]() {
    Tape tape;
    return batch_objective(tape, model, g, tokens, batch, margin, beta,
                           guided ? &plan : nullptr, replay)
        .item();
  };

  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor t = params[p].second;
    for (std::size_t i = 0; i < t.numel(); ++i) {
      double saved = t.values()[i];
      t.values()[i] = saved + h;
      double up = eval_loss();
      t.values()[i] = saved - h;
      double down = eval_loss();
      t.values()[i] = saved;
      double numeric = (up - down) / (2.0 * h);
      double a = analytic[p][i];
      double rel = std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-6});
      ++report.checked;
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_param = params[p].first;
        report.worst_index = i;
        report.analytic = a;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

MicroInstance make_micro_instance(FusionKind fusion, bool soft_glimpse, std::uint64_t seed,
                                  std::size_t grid, std::size_t window) {
  MicroInstance mi;
  Rng rng(seed);
  IRMGraph& g = mi.graph;

  g.users = {"u0", "u1", "u2"};
  for (std::size_t u = 0; u < g.users.size(); ++u) g.user_index[g.users[u]] = u;
  // One user with two followees, one with one, one isolated (neutral social
  // factor path).
  g.followees = {{1, 2}, {0}, {}};

  // At the default 4x4 grid with a 3x3 window the attention softmax spans
  // nine cells and the window center has real freedom, so the attention and
  // location paths carry task gradient instead of degenerating to the
  // regularizer pull.
  const std::size_t kGrid = grid;
  const std::size_t kChannels = 3;
  const char* kComments[6][2] = {
      {"red fox jumps", "lazy dog"},  {"blue sky today", nullptr},
      {"green tea", "hot green tea"}, {"old map", "paper map"},
      {"tiny boat", nullptr},         {"night sky stars", "dark night"},
  };
  for (std::size_t t = 0; t < 6; ++t) {
    ImageTweet tw;
    tw.id = "t" + std::to_string(t);
    tw.publisher = t % 3;
    tw.timestamp = 100 + static_cast<std::int64_t>(t);
    std::vector<double> conv(kGrid * kGrid * kChannels);
    for (double& x : conv) x = rng.uniform(-1.0, 1.0);
    std::vector<double> fc(kChannels);
    for (double& x : fc) x = rng.uniform(-1.0, 1.0);
    tw.conv = Tensor({kGrid, kGrid, kChannels}, std::move(conv));
    tw.global = Tensor({kChannels}, std::move(fc));
    tw.comments.push_back(kComments[t][0]);
    if (kComments[t][1]) tw.comments.push_back(kComments[t][1]);
    g.tweet_index[tw.id] = g.tweets.size();
    g.tweets.push_back(std::move(tw));
  }
  g.grid = kGrid;
  g.channels = kChannels;
  g.published_by.assign(3, {});
  for (std::size_t t = 0; t < g.tweets.size(); ++t) {
    g.published_by[g.tweets[t].publisher].push_back(t);
  }
  // Two retweets per user; all land in train under a 0.8 split.
  std::size_t event_no = 0;
  for (std::size_t u = 0; u < 3; ++u) {
    for (std::size_t k = 0; k < 2; ++k) {
      g.events.push_back(RetweetEvent{u, (u * 2 + k) % 6,
                                      static_cast<std::int64_t>(1000 + event_no++)});
    }
  }

  std::vector<std::string> corpus;
  for (const ImageTweet& t : g.tweets) {
    corpus.insert(corpus.end(), t.comments.begin(), t.comments.end());
  }
  mi.vocab = Vocabulary::build(corpus, 64);

  ModelConfig& cfg = mi.config;
  cfg.fusion = fusion;
  cfg.upref_dim = 3;
  cfg.rnn_dim = 4;
  cfg.loc_dim = 3;
  cfg.attn_dim = 3;
  cfg.word_dim = 3;
  cfg.sentences = 2;
  cfg.sentence_len = 4;
  cfg.glimpse_window = window;
  cfg.soft_glimpse = soft_glimpse;
  cfg.num_users = g.num_users();
  cfg.vocab_size = mi.vocab.size();
  cfg.channels = kChannels;
  cfg.grid = kGrid;
  return mi;
}

GradCheckReport gradcheck_micro(FusionKind fusion, bool soft_glimpse, std::uint64_t seed,
                                std::size_t grid, std::size_t window) {
  MicroInstance mi = make_micro_instance(fusion, soft_glimpse, seed, grid, window);
  SplitGraph split = temporal_split(mi.graph, 0.8);
  std::vector<PreferenceTuple> tuples = build_triplets(split, 1, seed);
  std::vector<TokenMatrix> tokens = tokenize_all(mi.graph, mi.vocab, mi.config);

  Model model = init_model(mi.config, seed);
  // Inflate the tiny Gaussian init so activations are spread out and no
  // hinge or max sits within finite-difference reach of its kink.
  Rng rng(seed + 1);
  for (auto& [name, t] : model.parameters()) {
    for (double& v : t.values()) v = rng.uniform(-0.5, 0.5);
  }
  return gradcheck(model, mi.graph, tokens, tuples, 0.6, 1e-4, seed);
}

}  // namespace amnl

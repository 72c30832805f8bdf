#include "amnl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "amnl/irmf.hpp"
#include "amnl/rng.hpp"
#include "amnl/text.hpp"

namespace amnl {

namespace {

using Vec = std::vector<double>;

Vec gauss_vec(std::size_t d, Rng& rng) {
  Vec v(d);
  for (double& x : v) x = rng.gaussian();
  return v;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(Vec& v) {
  double n = std::sqrt(dot(v, v));
  if (n < 1e-12) {
    v.assign(v.size(), 0.0);
    v[0] = 1.0;
    return;
  }
  for (double& x : v) x /= n;
}

// Unit anchors; orthonormalized when they fit the latent dimension, so small
// separable configurations are exactly separable.
std::vector<Vec> make_anchors(std::size_t topics, std::size_t d, Rng& rng) {
  std::vector<Vec> anchors;
  for (std::size_t k = 0; k < topics; ++k) {
    Vec a = gauss_vec(d, rng);
    if (topics <= d) {
      for (const Vec& prev : anchors) {
        double proj = dot(a, prev);
        for (std::size_t i = 0; i < d; ++i) a[i] -= proj * prev[i];
      }
    }
    normalize(a);
    anchors.push_back(std::move(a));
  }
  return anchors;
}

Vec around_anchor(const Vec& anchor, double spread, Rng& rng) {
  Vec v = anchor;
  if (spread > 0.0) {
    Vec g = gauss_vec(anchor.size(), rng);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += spread * g[i];
  }
  normalize(v);
  return v;
}

std::vector<double> project(const std::vector<Vec>& basis, const Vec& v, double scale) {
  std::vector<double> out(basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c) out[c] = scale * dot(basis[c], v);
  return out;
}

// Rows of a channels x latent matrix. When the latent space fits inside the
// channel space the columns are orthonormalized, making the projection an
// isometry: distinct latent directions stay distinguishable instead of
// bleeding into each other through random cross-talk.
std::vector<Vec> make_basis(std::size_t channels, std::size_t latent, Rng& rng) {
  std::vector<Vec> cols;
  for (std::size_t k = 0; k < latent; ++k) {
    Vec c = gauss_vec(channels, rng);
    if (latent <= channels) {
      for (const Vec& prev : cols) {
        double p = dot(c, prev);
        for (std::size_t i = 0; i < channels; ++i) c[i] -= p * prev[i];
      }
    }
    normalize(c);
    cols.push_back(std::move(c));
  }
  std::vector<Vec> rows(channels, Vec(latent));
  for (std::size_t i = 0; i < channels; ++i) {
    for (std::size_t k = 0; k < latent; ++k) rows[i][k] = cols[k][i];
  }
  return rows;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string to_string(PlantMode m) {
  return m == PlantMode::kGlobal ? "global-feature" : "glimpse-localized";
}

PlantMode plant_mode_from_string(const std::string& s) {
  if (s == "global-feature" || s == "global") return PlantMode::kGlobal;
  if (s == "glimpse-localized" || s == "localized") return PlantMode::kLocalized;
  throw std::invalid_argument("unknown plant mode '" + s + "'");
}

void GenConfig::validate() const {
  if (users < 2) throw std::invalid_argument("need at least 2 users");
  if (tweets < 2) throw std::invalid_argument("need at least 2 tweets");
  if (grid == 0 || channels == 0) throw std::invalid_argument("feature dims must be positive");
  if (latent_dim == 0 || topics == 0) throw std::invalid_argument("plant dims must be positive");
  if (comments_per_tweet == 0) throw std::invalid_argument("tweets need at least one comment");
  if (!(followees_mean > 0.0)) throw std::invalid_argument("followee mean must be positive");
  if (!(positive_rate > 0.0 && positive_rate < 1.0)) {
    throw std::invalid_argument("positive rate must lie in (0,1)");
  }
  if (noise < 0.0 || spread < 0.0 || homophily_noise < 0.0 || signal_scale <= 0.0) {
    throw std::invalid_argument("noise, spread and scale parameters must be nonnegative");
  }
  if (vocab_target < topics + 8) {
    throw std::invalid_argument("vocab target too small for the topic tokens");
  }
}

void generate(const GenConfig& cfg, const std::string& out_dir, GenSummary* summary) {
  cfg.validate();
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  Rng rng(cfg.seed);

  std::vector<Vec> anchors = make_anchors(cfg.topics, cfg.latent_dim, rng);

  std::vector<Vec> user_latent(cfg.users);
  for (std::size_t u = 0; u < cfg.users; ++u) {
    user_latent[u] = around_anchor(anchors[u % cfg.topics], cfg.spread, rng);
  }
  std::vector<std::size_t> tweet_topic(cfg.tweets);
  std::vector<Vec> tweet_signal(cfg.tweets);
  for (std::size_t t = 0; t < cfg.tweets; ++t) {
    tweet_topic[t] = t % cfg.topics;
    tweet_signal[t] = around_anchor(anchors[tweet_topic[t]], cfg.spread, rng);
  }
  std::vector<std::size_t> publisher(cfg.tweets);
  for (std::size_t t = 0; t < cfg.tweets; ++t) publisher[t] = rng.below(cfg.users);

  // Follow edges: Poisson out-degree, neighbors picked by latent similarity
  // perturbed with Gumbel noise (higher homophily_noise -> more random).
  std::vector<std::vector<std::size_t>> followees(cfg.users);
  for (std::size_t u = 0; u < cfg.users; ++u) {
    std::size_t degree = std::clamp<std::size_t>(rng.poisson(cfg.followees_mean), 1,
                                                 cfg.users - 1);
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(cfg.users - 1);
    for (std::size_t v = 0; v < cfg.users; ++v) {
      if (v == u) continue;
      double s = dot(user_latent[u], user_latent[v]) + cfg.homophily_noise * rng.gumbel();
      scored.emplace_back(-s, v);  // ascending sort -> best first
    }
    std::sort(scored.begin(), scored.end());
    for (std::size_t i = 0; i < degree; ++i) followees[u].push_back(scored[i].second);
    std::sort(followees[u].begin(), followees[u].end());
  }

  // Feature projection bases (channels x latent).
  std::vector<Vec> fc_basis = make_basis(cfg.channels, cfg.latent_dim, rng);
  std::vector<Vec> conv_basis = make_basis(cfg.channels, cfg.latent_dim, rng);

  std::vector<IrmfRecord> features(cfg.tweets);
  std::vector<std::pair<std::size_t, std::size_t>> informative_cell(cfg.tweets, {0, 0});
  std::vector<std::vector<std::string>> comments(cfg.tweets);
  constexpr std::size_t kFillerPool = 100;

  for (std::size_t t = 0; t < cfg.tweets; ++t) {
    std::size_t G = cfg.grid;
    std::size_t C = cfg.channels;
    std::vector<double> fc;
    std::vector<double> conv(G * G * C);
    if (cfg.mode == PlantMode::kGlobal) {
      fc = project(fc_basis, tweet_signal[t], cfg.signal_scale);
      for (double& x : fc) x += cfg.noise * rng.gaussian();
      std::vector<double> base = project(conv_basis, tweet_signal[t], cfg.signal_scale);
      for (std::size_t cell = 0; cell < G * G; ++cell) {
        for (std::size_t c = 0; c < C; ++c) {
          conv[cell * C + c] = base[c] + cfg.noise * rng.gaussian();
        }
      }
    } else {
      fc.assign(C, 0.0);
      for (double& x : fc) x = cfg.noise * rng.gaussian();
      std::size_t info_r = rng.below(G);
      std::size_t info_c = rng.below(G);
      informative_cell[t] = {info_r, info_c};
      for (std::size_t r = 0; r < G; ++r) {
        for (std::size_t cidx = 0; cidx < G; ++cidx) {
          std::vector<double> content;
          if (r == info_r && cidx == info_c) {
            content = project(conv_basis, tweet_signal[t], cfg.signal_scale);
          } else {
            std::size_t d_topic = (tweet_topic[t] + 1 + rng.below(cfg.topics - 1)) % cfg.topics;
            Vec distractor = around_anchor(anchors[d_topic], cfg.spread, rng);
            content = project(conv_basis, distractor, cfg.signal_scale);
          }
          for (std::size_t c = 0; c < C; ++c) {
            conv[(r * G + cidx) * C + c] = content[c] + cfg.noise * rng.gaussian();
          }
        }
      }
    }
    features[t].tweet_id = "t" + std::to_string(t);
    features[t].tensors.push_back(NamedTensor{"conv", {G, G, C}, std::move(conv)});
    features[t].tensors.push_back(NamedTensor{"fc", {C}, std::move(fc)});

    // Filler comments first; the informative comment naming the topic goes
    // last, since later preprocessing duplicates the last comment.
    std::vector<std::string>& cs = comments[t];
    for (std::size_t i = 0; i + 1 < cfg.comments_per_tweet; ++i) {
      cs.push_back("w" + std::to_string(rng.below(kFillerPool)) + " w" +
                   std::to_string(rng.below(kFillerPool)));
    }
    cs.push_back("topic" + std::to_string(tweet_topic[t]) + " w" +
                 std::to_string(rng.below(kFillerPool)) + " w" +
                 std::to_string(rng.below(kFillerPool)));
  }

  // Retweet plant: per user, threshold = the k-th best noisy score.
  std::vector<std::vector<std::size_t>> positives(cfg.users);
  std::size_t k_pos = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(cfg.positive_rate * static_cast<double>(cfg.tweets))),
      1, cfg.tweets - 1);
  for (std::size_t u = 0; u < cfg.users; ++u) {
    std::vector<std::pair<double, std::size_t>> scored(cfg.tweets);
    for (std::size_t t = 0; t < cfg.tweets; ++t) {
      double s = dot(user_latent[u], tweet_signal[t]) + cfg.noise * rng.gaussian();
      scored[t] = {-s, t};
    }
    std::sort(scored.begin(), scored.end());
    for (std::size_t i = 0; i < k_pos; ++i) positives[u].push_back(scored[i].second);
    std::sort(positives[u].begin(), positives[u].end());
  }

  // tweets.jsonl, publication time = 1000 + index.
  std::string tweets_out;
  for (std::size_t t = 0; t < cfg.tweets; ++t) {
    nlohmann::json j;
    j["comments"] = comments[t];
    j["timestamp"] = 1000 + t;
    j["tweet_id"] = "t" + std::to_string(t);
    j["user_id"] = "u" + std::to_string(publisher[t]);
    tweets_out += j.dump();
    tweets_out += '\n';
  }
  write_file(dir / "tweets.jsonl", tweets_out);

  std::string follows_out = "follower_id,followee_id\n";
  for (std::size_t u = 0; u < cfg.users; ++u) {
    for (std::size_t v : followees[u]) {
      follows_out += "u" + std::to_string(u) + ",u" + std::to_string(v) + "\n";
    }
  }
  write_file(dir / "follows.csv", follows_out);

  // Retweet times increase per user in a shuffled tweet order.
  std::string retweets_out = "user_id,tweet_id,timestamp\n";
  for (std::size_t u = 0; u < cfg.users; ++u) {
    std::vector<std::size_t> order = positives[u];
    rng.shuffle(order);
    for (std::size_t i = 0; i < order.size(); ++i) {
      retweets_out += "u" + std::to_string(u) + ",t" + std::to_string(order[i]) + "," +
                      std::to_string(1000000 + 100 * i) + "\n";
    }
  }
  write_file(dir / "retweets.csv", retweets_out);

  write_irmf((dir / "features.irmf").string(), features);

  std::vector<std::string> corpus;
  for (const auto& cs : comments) corpus.insert(corpus.end(), cs.begin(), cs.end());
  Vocabulary::build(corpus, cfg.vocab_target).save((dir / "vocab.txt").string());

  if (summary) {
    summary->user_latent = std::move(user_latent);
    summary->tweet_signal = std::move(tweet_signal);
    summary->tweet_topic = std::move(tweet_topic);
    summary->informative_cell = std::move(informative_cell);
    summary->positives = std::move(positives);
    summary->followees = std::move(followees);
  }
}

}  // namespace amnl

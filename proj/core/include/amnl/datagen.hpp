#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace amnl {

enum class PlantMode { kGlobal, kLocalized };

std::string to_string(PlantMode m);
PlantMode plant_mode_from_string(const std::string& s);

// Synthetic dataset with planted preferences. Users and tweets live near
// topic anchors in a latent space; user u retweets tweet t iff
// latent(u) . signal(t) + noise exceeds u's calibrated threshold (the
// k-th best score, k = round(positive_rate * tweets)).
//
// kGlobal writes the signal into the fc feature (and every conv cell);
// kLocalized hides it in exactly one conv cell per tweet, leaves fc as pure
// noise, fills the other cells with distractor topics, and names the
// informative topic's token in the last comment.
struct GenConfig {
  std::size_t users = 200;
  std::size_t tweets = 500;
  double followees_mean = 6.2;  // Poisson out-degree, clamped to [1, users-1]
  std::size_t grid = 3;
  std::size_t channels = 32;
  std::size_t comments_per_tweet = 2;
  std::size_t vocab_target = 256;
  std::size_t latent_dim = 8;
  std::size_t topics = 8;
  double noise = 0.1;
  double positive_rate = 0.02;
  double spread = 0.2;          // latent jitter around topic anchors
  double homophily_noise = 0.5; // follow choice = similarity + this * gumbel
  double signal_scale = 2.0;
  PlantMode mode = PlantMode::kGlobal;
  std::uint64_t seed = 42;

  void validate() const;
};

// Ground truth kept in memory for tests and calibration; never written out.
struct GenSummary {
  std::vector<std::vector<double>> user_latent;   // m x d
  std::vector<std::vector<double>> tweet_signal;  // n x d
  std::vector<std::size_t> tweet_topic;
  std::vector<std::pair<std::size_t, std::size_t>> informative_cell;  // localized only
  std::vector<std::vector<std::size_t>> positives;                    // per user, sorted
  std::vector<std::vector<std::size_t>> followees;                    // per user, sorted
};

// Writes tweets.jsonl, follows.csv, retweets.csv, features.irmf and
// vocab.txt into out_dir (created if missing). Byte-identical per seed.
void generate(const GenConfig& cfg, const std::string& out_dir, GenSummary* summary = nullptr);

}  // namespace amnl

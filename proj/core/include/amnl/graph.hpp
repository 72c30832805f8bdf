#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "amnl/tensor.hpp"

namespace amnl {

struct ImageTweet {
  std::string id;
  std::size_t publisher = 0;   // user index
  std::int64_t timestamp = 0;  // epoch seconds of publication
  Tensor conv;                 // [G, G, C]
  Tensor global;               // [C]
  std::vector<std::string> comments;
};

struct RetweetEvent {
  std::size_t user = 0;
  std::size_t tweet = 0;
  std::int64_t time = 0;
};

struct LoadReport {
  std::size_t duplicate_retweets = 0;
  std::size_t unused_feature_records = 0;
  std::size_t warnings() const { return duplicate_retweets + unused_feature_records; }
};

// The heterogeneous retweet graph: users, image tweets with features and
// comments, retweet events (the sparse H with per-entry timestamps) and
// followee adjacency (the sparse S). Immutable after load.
struct IRMGraph {
  std::vector<std::string> users;  // index -> id, dense, load order
  std::vector<ImageTweet> tweets;  // index -> tweet, file order
  std::vector<RetweetEvent> events;
  std::vector<std::vector<std::size_t>> followees;     // sorted, no self edges
  std::vector<std::vector<std::size_t>> published_by;  // user -> tweet indices

  std::unordered_map<std::string, std::size_t> user_index;
  std::unordered_map<std::string, std::size_t> tweet_index;

  std::size_t grid = 0;      // G
  std::size_t channels = 0;  // C

  std::size_t num_users() const { return users.size(); }
  std::size_t num_tweets() const { return tweets.size(); }
  const std::vector<std::size_t>& followees_of(const std::string& user_id) const;
};

// Disjoint temporal partition of the retweet events; users/tweets/S shared.
struct SplitGraph {
  const IRMGraph* graph = nullptr;
  std::vector<RetweetEvent> train_events;
  std::vector<RetweetEvent> test_events;
  // Per-user tweet indices, sorted ascending, for membership tests.
  std::vector<std::vector<std::size_t>> train_pos;
  std::vector<std::vector<std::size_t>> test_pos;
};

// Loads and validates the four dataset files. Dangling references, missing
// features, malformed rows and self-follow edges are errors; duplicate
// retweet events collapse to the earliest timestamp with a warning.
IRMGraph load_dataset(const std::string& tweets_path, const std::string& follows_path,
                      const std::string& retweets_path, const std::string& features_path,
                      LoadReport* report = nullptr);

// Per user, the earliest ceil(ratio * count) events train, the rest test.
// With global_time the cut is one ceiling over all events sorted by time.
SplitGraph temporal_split(const IRMGraph& g, double ratio, bool global_time = false);

bool contains(const std::vector<std::size_t>& sorted, std::size_t v);

}  // namespace amnl

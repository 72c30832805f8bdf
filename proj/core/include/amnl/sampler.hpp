#pragma once

#include <cstdint>
#include <vector>

#include "amnl/graph.hpp"

namespace amnl {

// One relative-preference training unit: user j retweeted pos and was
// (presumably) exposed to neg without retweeting it. The followee set is
// reachable through the graph, so only indices are stored.
struct PreferenceTuple {
  std::size_t user = 0;
  std::size_t pos = 0;
  std::size_t neg = 0;
  bool global_fallback = false;  // negative came from the global pool
};

struct SamplerReport {
  std::size_t skipped_positives = 0;
  std::size_t fallback_negatives = 0;
};

// Tweets a user's timeline would plausibly show: published by a followee or
// retweeted by a followee during train, minus the user's own train
// positives. Sorted ascending. With publisher_only, followee retweets are
// ignored.
std::vector<std::size_t> followee_exposed_pool(const SplitGraph& split, std::size_t user,
                                               bool publisher_only = false);

// For every train positive (j, i), emits negatives_per_positive tuples with
// negatives drawn uniformly without replacement from j's followee-exposed
// pool; when that pool runs short the remainder comes from the global
// non-retweeted pool, flagged. Positives whose pools are all empty are
// skipped with a warning. Deterministic for a fixed seed.
std::vector<PreferenceTuple> build_triplets(const SplitGraph& split,
                                            std::size_t negatives_per_positive,
                                            std::uint64_t seed, SamplerReport* report = nullptr,
                                            bool publisher_only = false);

}  // namespace amnl

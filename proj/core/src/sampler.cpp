#include "amnl/sampler.hpp"

#include <algorithm>
#include <stdexcept>

#include "amnl/log.hpp"
#include "amnl/rng.hpp"

namespace amnl {

std::vector<std::size_t> followee_exposed_pool(const SplitGraph& split, std::size_t user,
                                               bool publisher_only) {
  const IRMGraph& g = *split.graph;
  std::vector<std::size_t> pool;
  for (std::size_t q : g.followees[user]) {
    for (std::size_t t : g.published_by[q]) pool.push_back(t);
    if (!publisher_only) {
      for (std::size_t t : split.train_pos[q]) pool.push_back(t);
    }
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  std::erase_if(pool, [&](std::size_t t) { return contains(split.train_pos[user], t); });
  return pool;
}

std::vector<PreferenceTuple> build_triplets(const SplitGraph& split,
                                            std::size_t negatives_per_positive,
                                            std::uint64_t seed, SamplerReport* report,
                                            bool publisher_only) {
  if (negatives_per_positive < 1) {
    throw std::invalid_argument("negatives_per_positive must be >= 1");
  }
  const IRMGraph& g = *split.graph;
  SamplerReport local;
  Rng rng(seed);
  std::vector<PreferenceTuple> tuples;
  tuples.reserve(split.train_events.size() * negatives_per_positive);

  std::vector<std::size_t> all_tweets(g.num_tweets());
  for (std::size_t i = 0; i < all_tweets.size(); ++i) all_tweets[i] = i;

  // train_events are ordered by (user, time, tweet), so pools can be built
  // once per user as the scan enters that user's run.
  std::size_t pool_user = g.num_users();
  std::vector<std::size_t> pool;    // followee-exposed candidates
  std::vector<std::size_t> global;  // everything minus the user's train positives
  for (const RetweetEvent& e : split.train_events) {
    if (e.user != pool_user) {
      pool_user = e.user;
      pool = followee_exposed_pool(split, e.user, publisher_only);
      global.clear();
      for (std::size_t t : all_tweets) {
        if (!contains(split.train_pos[e.user], t)) global.push_back(t);
      }
    }
    std::vector<std::size_t> chosen;
    for (std::size_t idx : rng.sample_without_replacement(
             pool.size(), std::min(negatives_per_positive, pool.size()))) {
      chosen.push_back(pool[idx]);
    }
    std::size_t emitted = chosen.size();
    for (std::size_t t : chosen) {
      tuples.push_back(PreferenceTuple{e.user, e.tweet, t, false});
    }
    if (emitted < negatives_per_positive) {
      std::vector<std::size_t> rest;
      for (std::size_t t : global) {
        if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) rest.push_back(t);
      }
      std::size_t want = std::min(negatives_per_positive - emitted, rest.size());
      for (std::size_t idx : rng.sample_without_replacement(rest.size(), want)) {
        tuples.push_back(PreferenceTuple{e.user, e.tweet, rest[idx], true});
        ++local.fallback_negatives;
        ++emitted;
      }
    }
    if (emitted == 0) {
      ++local.skipped_positives;
      log_info("no negative candidates for user " + g.users[e.user] + ", positive " +
               g.tweets[e.tweet].id + " skipped");
    }
  }
  if (report) *report = local;
  return tuples;
}

}  // namespace amnl

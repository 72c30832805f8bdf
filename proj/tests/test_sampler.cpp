#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "amnl/graph.hpp"
#include "amnl/sampler.hpp"
#include "doctest.h"

using namespace amnl;

namespace {

// Hand-built graph: no files, only the fields the sampler touches.
IRMGraph bare_graph(std::size_t users, std::size_t tweets) {
  IRMGraph g;
  for (std::size_t u = 0; u < users; ++u) {
    g.users.push_back("u" + std::to_string(u));
    g.user_index.emplace(g.users.back(), u);
  }
  for (std::size_t t = 0; t < tweets; ++t) {
    ImageTweet tw;
    tw.id = "t" + std::to_string(t);
    g.tweet_index.emplace(tw.id, t);
    g.tweets.push_back(std::move(tw));
  }
  g.followees.assign(users, {});
  g.published_by.assign(users, {});
  return g;
}

SplitGraph bare_split(const IRMGraph& g) {
  SplitGraph s;
  s.graph = &g;
  s.train_pos.assign(g.num_users(), {});
  s.test_pos.assign(g.num_users(), {});
  return s;
}

void add_train(SplitGraph& s, std::size_t user, std::size_t tweet, std::int64_t time) {
  s.train_events.push_back({user, tweet, time});
  s.train_pos[user].push_back(tweet);
  std::sort(s.train_pos[user].begin(), s.train_pos[user].end());
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("the exposure pool merges followee publications and retweets") {
  IRMGraph g = bare_graph(4, 8);
  g.followees[0] = {1, 2};
  g.published_by[1] = {0, 1};
  g.published_by[2] = {2};
  g.published_by[3] = {3, 4, 5, 6, 7};
  SplitGraph s = bare_split(g);
  add_train(s, 1, 5, 10);  // followee 1 retweeted t5
  add_train(s, 2, 6, 11);  // followee 2 retweeted t6
  add_train(s, 3, 7, 12);  // user 3 is not followed, t7 stays invisible
  add_train(s, 0, 1, 13);  // user 0's own positive leaves the pool

  CHECK(followee_exposed_pool(s, 0) == std::vector<std::size_t>{0, 2, 5, 6});
  CHECK(followee_exposed_pool(s, 0, true) == std::vector<std::size_t>{0, 2});
  CHECK(followee_exposed_pool(s, 3).empty());
}

TEST_CASE("triplets draw valid negatives and flag global fallbacks") {
  IRMGraph g = bare_graph(3, 6);
  g.followees[0] = {1};
  g.published_by[1] = {2};  // pool for user 0 = {2}
  SplitGraph s = bare_split(g);
  add_train(s, 0, 0, 5);
  add_train(s, 0, 1, 6);

  SamplerReport report;
  auto tuples = build_triplets(s, 2, 7, &report);
  REQUIRE(tuples.size() == 4);  // 2 positives x 2 negatives
  std::size_t fallbacks = 0;
  for (const PreferenceTuple& t : tuples) {
    CHECK(t.user == 0);
    CHECK((t.pos == 0 || t.pos == 1));
    CHECK(!contains(s.train_pos[0], t.neg));
    if (t.global_fallback) {
      ++fallbacks;
    } else {
      CHECK(t.neg == 2);  // the only followee-exposed candidate
    }
  }
  // Pool of one forces exactly one fallback per positive.
  CHECK(fallbacks == 2);
  CHECK(report.fallback_negatives == 2);
  CHECK(report.skipped_positives == 0);

  // The fallback may not duplicate the pool pick for the same positive.
  for (std::size_t i = 0; i + 1 < tuples.size(); i += 2) {
    CHECK(tuples[i].neg != tuples[i + 1].neg);
  }
}

TEST_CASE("a user who retweeted everything is skipped with a report entry") {
  IRMGraph g = bare_graph(2, 3);
  SplitGraph s = bare_split(g);
  add_train(s, 0, 0, 1);
  add_train(s, 0, 1, 2);
  add_train(s, 0, 2, 3);
  SamplerReport report;
  auto tuples = build_triplets(s, 2, 7, &report);
  CHECK(tuples.empty());
  CHECK(report.skipped_positives == 3);
}

TEST_CASE("the same seed reproduces the same tuples") {
  IRMGraph g = bare_graph(5, 40);
  for (std::size_t u = 0; u < 4; ++u) g.followees[u] = {4};
  for (std::size_t t = 0; t < 40; ++t) g.published_by[4].push_back(t);
  SplitGraph s = bare_split(g);
  std::int64_t clock = 0;
  for (std::size_t u = 0; u < 4; ++u) {
    for (std::size_t t = 0; t < 5; ++t) add_train(s, u, u * 5 + t, ++clock);
  }
  auto a = build_triplets(s, 3, 99);
  auto b = build_triplets(s, 99, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].user == b[i].user);
    CHECK(a[i].pos == b[i].pos);
    CHECK(a[i].neg == b[i].neg);
    CHECK(a[i].global_fallback == b[i].global_fallback);
  }
  auto c = build_triplets(s, 3, 100);
  bool same = a.size() == c.size();
  if (same) {
    same = std::equal(a.begin(), a.end(), c.begin(), [](const auto& x, const auto& y) {
      return x.neg == y.neg;
    });
  }
  CHECK(!same);
  CHECK_THROWS_AS(build_triplets(s, 0, 7), std::invalid_argument);
}

TEST_CASE("negatives are drawn uniformly from the pool") {
  // One user, 10000 positives, a fixed pool of five candidates.
  const std::size_t kPositives = 10000;
  IRMGraph g = bare_graph(2, kPositives + 5);
  g.followees[0] = {1};
  g.published_by[1] = {0, 1, 2, 3, 4};
  SplitGraph s = bare_split(g);
  s.train_pos[0].reserve(kPositives);
  for (std::size_t i = 0; i < kPositives; ++i) {
    s.train_events.push_back({0, 5 + i, static_cast<std::int64_t>(i)});
    s.train_pos[0].push_back(5 + i);
  }
  auto tuples = build_triplets(s, 1, 4242);
  REQUIRE(tuples.size() == kPositives);
  std::vector<double> hits(5, 0.0);
  for (const PreferenceTuple& t : tuples) {
    REQUIRE(t.neg < 5);
    CHECK(!t.global_fallback);
    hits[t.neg] += 1.0;
  }
  double expected = kPositives / 5.0;
  double chi2 = 0.0;
  for (double h : hits) chi2 += (h - expected) * (h - expected) / expected;
  // 99.9th percentile of chi-square with 4 degrees of freedom.
  CHECK(chi2 < 18.47);
}

}  // TEST_SUITE

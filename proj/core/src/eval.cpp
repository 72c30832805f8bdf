#include "amnl/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace amnl {

double precision_at_k(const RankedList& ranked, std::size_t k) {
  if (k == 0) throw std::invalid_argument("precision_at_k: k must be >= 1");
  if (ranked.empty()) throw std::invalid_argument("precision_at_k: empty ranking");
  std::size_t hits = 0;
  std::size_t upto = std::min(k, ranked.size());
  for (std::size_t i = 0; i < upto; ++i) {
    if (ranked[i].second) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

double auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    throw std::invalid_argument("auc needs both positive and negative scores");
  }
  std::vector<double> neg = neg_scores;
  std::sort(neg.begin(), neg.end());
  // 2*wins + ties, all integer, so the division is the only rounding step --
  // identical to counting every pair by brute force.
  std::uint64_t twice_wins = 0;
  for (double p : pos_scores) {
    auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    auto hi = std::upper_bound(lo, neg.end(), p);
    std::uint64_t less = static_cast<std::uint64_t>(lo - neg.begin());
    std::uint64_t equal = static_cast<std::uint64_t>(hi - lo);
    twice_wins += 2 * less + equal;
  }
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(pos_scores.size()) * static_cast<double>(neg.size()));
}

EvalReport evaluate(const Model& model, const SplitGraph& split,
                    const std::vector<TokenMatrix>& tokens, const EvalConfig& cfg) {
  const IRMGraph& g = *split.graph;
  EvalReport report;
  report.k = cfg.k;
  Rng rng(cfg.seed);
  Tape tape;  // forward only; shared so each tweet is encoded at most once
  std::vector<Tensor> z_cache(g.num_tweets());
  auto repr = [&](std::size_t tweet) {
    if (!z_cache[tweet].defined()) {
      z_cache[tweet] = tweet_repr(tape, model, g.tweets[tweet],
                                  tokens.empty() ? TokenMatrix{} : tokens[tweet], center_l0());
    }
    return z_cache[tweet];
  };

  for (std::size_t user = 0; user < g.num_users(); ++user) {
    const std::vector<std::size_t>& positives = split.test_pos[user];
    if (positives.empty()) continue;
    ++report.users_with_test_positives;

    std::vector<std::size_t> negatives;
    if (cfg.all_candidates) {
      for (std::size_t t = 0; t < g.num_tweets(); ++t) {
        if (!contains(split.train_pos[user], t) && !contains(positives, t)) {
          negatives.push_back(t);
        }
      }
    } else {
      std::vector<std::size_t> pool = followee_exposed_pool(split, user);
      std::erase_if(pool, [&](std::size_t t) { return contains(positives, t); });
      std::size_t want = cfg.negatives_per_positive * positives.size();
      for (std::size_t idx : rng.sample_without_replacement(pool.size(),
                                                            std::min(want, pool.size()))) {
        negatives.push_back(pool[idx]);
      }
      if (negatives.size() < want) {
        std::vector<std::size_t> rest;
        for (std::size_t t = 0; t < g.num_tweets(); ++t) {
          if (contains(split.train_pos[user], t) || contains(positives, t)) continue;
          if (std::find(negatives.begin(), negatives.end(), t) != negatives.end()) continue;
          rest.push_back(t);
        }
        std::size_t more = std::min(want - negatives.size(), rest.size());
        for (std::size_t idx : rng.sample_without_replacement(rest.size(), more)) {
          negatives.push_back(rest[idx]);
        }
      }
    }
    if (negatives.empty()) continue;  // not covered
    ++report.covered_users;

    struct Scored {
      std::size_t tweet;
      double score;
      bool positive;
    };
    std::vector<Scored> scored;
    scored.reserve(positives.size() + negatives.size());
    auto push = [&](std::size_t t, bool is_pos) {
      Tensor f = score_tweet(tape, model, user, g.followees[user], repr(t));
      scored.push_back(Scored{t, f.item(), is_pos});
    };
    for (std::size_t t : positives) push(t, true);
    for (std::size_t t : negatives) push(t, false);
    std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      return g.tweets[a.tweet].id < g.tweets[b.tweet].id;
    });

    RankedList ranked;
    std::vector<double> pos_scores, neg_scores;
    for (const Scored& s : scored) {
      ranked.emplace_back(g.tweets[s.tweet].id, s.positive);
      (s.positive ? pos_scores : neg_scores).push_back(s.score);
    }
    UserEval ue;
    ue.user = user;
    ue.positives = pos_scores.size();
    ue.negatives = neg_scores.size();
    ue.p_at_1 = precision_at_k(ranked, 1);
    ue.p_at_3 = precision_at_k(ranked, 3);
    ue.p_at_k = precision_at_k(ranked, cfg.k);
    ue.auc = auc(pos_scores, neg_scores);
    report.per_user.push_back(ue);
  }

  if (report.users_with_test_positives > 0) {
    report.coverage = static_cast<double>(report.covered_users) /
                      static_cast<double>(report.users_with_test_positives);
  }
  if (!report.per_user.empty()) {
    report.defined = true;
    for (const UserEval& ue : report.per_user) {
      report.precision_at_1 += ue.p_at_1;
      report.precision_at_3 += ue.p_at_3;
      report.precision_at_k += ue.p_at_k;
      report.auc += ue.auc;
    }
    double n = static_cast<double>(report.per_user.size());
    report.precision_at_1 /= n;
    report.precision_at_3 /= n;
    report.precision_at_k /= n;
    report.auc /= n;
  }
  return report;
}

std::string report_json(const EvalReport& r) {
  nlohmann::json j;
  j["auc"] = r.defined ? nlohmann::json(r.auc) : nlohmann::json();
  j["coverage"] = r.coverage;
  j["covered_users"] = r.covered_users;
  j["defined"] = r.defined;
  j["k"] = r.k;
  j["precision_at_1"] = r.defined ? nlohmann::json(r.precision_at_1) : nlohmann::json();
  j["precision_at_3"] = r.defined ? nlohmann::json(r.precision_at_3) : nlohmann::json();
  j["precision_at_k"] = r.defined ? nlohmann::json(r.precision_at_k) : nlohmann::json();
  j["users_with_test_positives"] = r.users_with_test_positives;
  return j.dump();
}

std::string report_table(const EvalReport& r) {
  char buf[512];
  if (!r.defined) {
    std::snprintf(buf, sizeof buf,
                  "no users could be evaluated (test positives: %zu users, coverage 0)\n",
                  r.users_with_test_positives);
    return buf;
  }
  std::string out;
  std::snprintf(buf, sizeof buf, "%-16s %10s\n", "metric", "value");
  out += buf;
  auto row = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%-16s %10.4f\n", name, v);
    out += buf;
  };
  row("precision@1", r.precision_at_1);
  row("precision@3", r.precision_at_3);
  if (r.k != 1 && r.k != 3) {
    std::string pk = "precision@" + std::to_string(r.k);
    row(pk.c_str(), r.precision_at_k);
  }
  row("auc", r.auc);
  row("coverage", r.coverage);
  std::snprintf(buf, sizeof buf, "%-16s %10zu / %zu\n", "covered users", r.covered_users,
                r.users_with_test_positives);
  out += buf;
  return out;
}

std::string per_user_csv(const EvalReport& r, const IRMGraph& g) {
  std::string out = "user_id,positives,negatives,p_at_1,p_at_3,p_at_k,auc\n";
  char buf[256];
  for (const UserEval& ue : r.per_user) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.6f,%.6f,%.6f,%.6f\n",
                  g.users[ue.user].c_str(), ue.positives, ue.negatives, ue.p_at_1, ue.p_at_3,
                  ue.p_at_k, ue.auc);
    out += buf;
  }
  return out;
}

}  // namespace amnl

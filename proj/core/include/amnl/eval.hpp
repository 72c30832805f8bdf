#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amnl/model.hpp"
#include "amnl/sampler.hpp"
#include "amnl/text.hpp"

namespace amnl {

// Candidates ranked best-first; second element marks true retweets.
using RankedList = std::vector<std::pair<std::string, bool>>;

// Positives among the first min(k, len) entries, divided by k.
double precision_at_k(const RankedList& ranked, std::size_t k);

// Fraction of (positive, negative) score pairs ordered correctly, ties
// worth 0.5. Integer pair counting over sorted negatives, so the result
// matches brute force exactly.
double auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

struct UserEval {
  std::size_t user = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double p_at_1 = 0.0;
  double p_at_3 = 0.0;
  double p_at_k = 0.0;
  double auc = 0.0;
};

struct EvalReport {
  std::size_t k = 3;
  bool defined = false;  // false when no user could be evaluated
  double precision_at_1 = 0.0;
  double precision_at_3 = 0.0;
  double precision_at_k = 0.0;
  double auc = 0.0;
  std::size_t covered_users = 0;
  std::size_t users_with_test_positives = 0;
  double coverage = 0.0;
  std::vector<UserEval> per_user;
};

struct EvalConfig {
  std::size_t k = 3;
  std::size_t negatives_per_positive = 2;  // candidate negatives : positives
  std::uint64_t seed = 42;
  bool all_candidates = false;  // rank every non-train tweet instead of sampling
};

// Per user with test positives: candidates = positives + seeded
// followee-pool negatives (global fallback when short). Scores via the
// multi-faceted model with the deterministic center start location; ranking
// ties break by tweet id ascending. Metrics are unweighted means over
// covered users.
EvalReport evaluate(const Model& model, const SplitGraph& split,
                    const std::vector<TokenMatrix>& tokens, const EvalConfig& cfg);

std::string report_json(const EvalReport& r);   // canonical (sorted keys)
std::string report_table(const EvalReport& r);  // plain text
std::string per_user_csv(const EvalReport& r, const IRMGraph& g);

}  // namespace amnl

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "amnl/checkpoint.hpp"
#include "amnl/model.hpp"
#include "amnl/optim.hpp"
#include "amnl/sampler.hpp"
#include "amnl/text.hpp"

namespace amnl {

struct TrainConfig {
  ModelConfig model;
  double margin = 0.6;
  double lr = 0.01;
  double beta = 1e-4;  // L2 trade-off
  std::size_t epochs = 30;
  std::size_t batch = 32;
  std::size_t negatives = 2;
  std::uint64_t seed = 42;
  OptimizerKind optimizer = OptimizerKind::kAdagrad;
  bool resample_each_epoch = false;
  std::string out_dir;  // checkpoints and the CSV log land here; empty = keep in memory

  void validate() const;
};

// max(0, margin + f_neg - f_pos)
Tensor hinge_loss(Tape& tape, const Tensor& f_pos, const Tensor& f_neg, double margin);

// Frozen forward choices for one tweet so a finite-difference pass can
// replay the exact computation the analytic pass ran.
struct TweetPlan {
  Location l0;
  LocationTrace trace;
};
using BatchPlan = std::map<std::size_t, TweetPlan>;  // keyed by tweet index

// Sum of hinge terms over the batch plus beta * ||params||^2 (regularizer
// counted once per call). Tweet representations are computed once per
// distinct tweet. When replay is set, glimpse locations come from the plan;
// otherwise they are recorded into it. tuple_hinges, when given, receives
// each tuple's hinge value in batch order.
Tensor batch_objective(Tape& tape, const Model& model, const IRMGraph& g,
                       const std::vector<TokenMatrix>& tokens,
                       const std::vector<PreferenceTuple>& batch, double margin, double beta,
                       BatchPlan* plan = nullptr, bool replay = false,
                       std::vector<double>* tuple_hinges = nullptr);

struct TrainResult {
  Model model;
  Optimizer opt;
  std::vector<double> epoch_objectives;
  std::string log_csv;  // "epoch,objective,seconds" rows, also written to disk
};

// Minibatch SGD over the preference tuples: seeded shuffle per epoch,
// per-batch tape, AdaGrad (or Adam) updates, per-epoch checkpoint + final
// checkpoint + CSV log when out_dir is set. The logged objective sums the
// tuple hinges in canonical tuple order plus the end-of-epoch regularizer,
// so it is reproducible bit for bit under a fixed seed.
TrainResult train(const TrainConfig& cfg, const SplitGraph& split,
                  const std::vector<TokenMatrix>& tokens, std::vector<PreferenceTuple> tuples);

}  // namespace amnl

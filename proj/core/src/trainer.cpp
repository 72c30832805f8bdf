#include "amnl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "amnl/log.hpp"

namespace amnl {

void TrainConfig::validate() const {
  if (!(margin > 0.0 && margin < 1.0)) {
    throw std::invalid_argument("margin must lie in (0,1)");
  }
  if (!(lr >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (batch == 0) throw std::invalid_argument("batch size must be >= 1");
  if (negatives == 0) throw std::invalid_argument("negatives per positive must be >= 1");
  model.validate();
}

Tensor hinge_loss(Tape& tape, const Tensor& f_pos, const Tensor& f_neg, double margin) {
  return tape.relu(tape.add_const(tape.sub(f_neg, f_pos), margin));
}

Tensor batch_objective(Tape& tape, const Model& model, const IRMGraph& g,
                       const std::vector<TokenMatrix>& tokens,
                       const std::vector<PreferenceTuple>& batch, double margin, double beta,
                       BatchPlan* plan, bool replay, std::vector<double>* tuple_hinges) {
  if (batch.empty()) throw std::invalid_argument("batch_objective: empty batch");

  std::map<std::size_t, Tensor> z_cache;
  auto repr = [&](std::size_t tweet) {
    auto it = z_cache.find(tweet);
    if (it != z_cache.end()) return it->second;
    Location l0 = center_l0();
    LocationTrace* trace = nullptr;
    if (plan != nullptr) {
      TweetPlan& tp = replay ? plan->at(tweet) : (*plan)[tweet];
      tp.trace.replay = replay;
      l0 = tp.l0;
      trace = &tp.trace;
    }
    Tensor z = tweet_repr(tape, model, g.tweets[tweet],
                          tokens.empty() ? TokenMatrix{} : tokens[tweet], l0, trace);
    z_cache.emplace(tweet, z);
    return z;
  };

  Tensor loss;
  for (const PreferenceTuple& t : batch) {
    Tensor f_pos = score_tweet(tape, model, t.user, g.followees[t.user], repr(t.pos));
    Tensor f_neg = score_tweet(tape, model, t.user, g.followees[t.user], repr(t.neg));
    Tensor h = hinge_loss(tape, f_pos, f_neg, margin);
    if (tuple_hinges) tuple_hinges->push_back(h.item());
    loss = loss.defined() ? tape.add(loss, h) : h;
  }
  Tensor reg;
  for (const auto& [name, t] : model.parameters()) {
    Tensor sq = tape.sum_squares(t);
    reg = reg.defined() ? tape.add(reg, sq) : sq;
  }
  return tape.add(loss, tape.scale(reg, beta));
}

TrainResult train(const TrainConfig& cfg, const SplitGraph& split,
                  const std::vector<TokenMatrix>& tokens, std::vector<PreferenceTuple> tuples) {
  cfg.validate();
  if (tuples.empty()) throw std::invalid_argument("train: no preference tuples");
  const IRMGraph& g = *split.graph;

  TrainResult result;
  result.model = init_model(cfg.model, cfg.seed);
  result.opt = Optimizer(cfg.optimizer, cfg.lr);
  auto params = result.model.parameters();
  result.opt.bind(params);

  bool to_disk = !cfg.out_dir.empty();
  if (to_disk) std::filesystem::create_directories(cfg.out_dir);
  auto ckpt_path = [&](const std::string& tag) {
    return (std::filesystem::path(cfg.out_dir) / ("checkpoint-" + tag + ".irmc")).string();
  };

  std::string log_csv = "epoch,objective,seconds\n";
  Rng rng(cfg.seed);
  bool guided = cfg.model.fusion == FusionKind::kGuided;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    if (cfg.resample_each_epoch && epoch > 1) {
      tuples = build_triplets(split, cfg.negatives, rng.next());
    }
    std::vector<std::size_t> order(tuples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    // Hinge values indexed by canonical tuple position, so the logged
    // objective does not depend on the shuffle order of summation.
    std::vector<double> hinges(tuples.size(), 0.0);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      std::size_t end = std::min(order.size(), start + cfg.batch);
      std::vector<PreferenceTuple> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(tuples[order[i]]);

      BatchPlan plan;
      if (guided) {
        std::set<std::size_t> distinct;
        for (const PreferenceTuple& t : batch) {
          distinct.insert(t.pos);
          distinct.insert(t.neg);
        }
        for (std::size_t tweet : distinct) {
          plan[tweet].l0 = random_l0(cfg.model, rng);
        }
      }

      Tape tape;
      std::vector<double> batch_hinges;
      Tensor loss = batch_objective(tape, result.model, g, tokens, batch, cfg.margin, cfg.beta,
                                    guided ? &plan : nullptr, false, &batch_hinges);
      double loss_value = loss.item();
      if (!std::isfinite(loss_value)) {
        throw std::runtime_error("non-finite loss in epoch " + std::to_string(epoch) +
                                 ", batch starting at tuple " + std::to_string(start));
      }
      for (std::size_t i = start; i < end; ++i) hinges[order[i]] = batch_hinges[i - start];

      for (const auto& [name, t] : params) Tensor(t).zero_grad();
      tape.backward(loss);
      result.opt.step(params);
    }

    double objective = 0.0;
    for (double h : hinges) objective += h;
    double reg = 0.0;
    for (const auto& [name, t] : params) {
      for (double v : t.values()) reg += v * v;
    }
    objective += cfg.beta * reg;
    result.epoch_objectives.push_back(objective);

    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char row[160];
    std::snprintf(row, sizeof row, "%zu,%.17g,%.3f\n", epoch, objective, seconds);
    log_csv += row;
    log_info("epoch " + std::to_string(epoch) + " objective " + std::to_string(objective));
    if (to_disk) save_checkpoint(ckpt_path("epoch-" + std::to_string(epoch)), result.model, result.opt);
  }

  if (to_disk) {
    save_checkpoint(ckpt_path("final"), result.model, result.opt);
    std::ofstream log_file(std::filesystem::path(cfg.out_dir) / "train-log.csv",
                           std::ios::binary);
    log_file << log_csv;
    if (!log_file) throw std::runtime_error("could not write training log in " + cfg.out_dir);
  }
  result.log_csv = std::move(log_csv);
  return result;
}

}  // namespace amnl

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "amnl/gradcheck.hpp"
#include "amnl/graph.hpp"
#include "amnl/model.hpp"
#include "amnl/rng.hpp"
#include "amnl/sampler.hpp"
#include "amnl/trainer.hpp"
#include "doctest.h"

using namespace amnl;

namespace {

namespace fs = std::filesystem;

struct MicroSetup {
  MicroInstance mi;
  std::vector<TokenMatrix> tokens;
  SplitGraph split;
  std::vector<PreferenceTuple> tuples;

  explicit MicroSetup(FusionKind fusion, std::uint64_t seed = 21)
      : mi(make_micro_instance(fusion, false, seed)) {
    tokens = tokenize_all(mi.graph, mi.vocab, mi.config);
    split = temporal_split(mi.graph, 0.8);
    tuples = build_triplets(split, 2, seed);
  }
};

double param_norm_sq(const Model& m) {
  double s = 0.0;
  for (const auto& [name, t] : m.parameters()) {
    for (std::size_t i = 0; i < t.numel(); ++i) s += t.at(i) * t.at(i);
  }
  return s;
}

bool params_identical(const Model& a, const Model& b) {
  auto pa = a.parameters();
  auto pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i].first != pb[i].first) return false;
    if (pa[i].second.values() != pb[i].second.values()) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("hinge is zero beyond the margin and exactly the margin at a tie") {
  Rng rng(5);
  for (int tenth = 1; tenth <= 9; ++tenth) {
    double c = tenth / 10.0;
    for (int trial = 0; trial < 30; ++trial) {
      double f_neg = rng.uniform(-5.0, 5.0);
      double gap = rng.uniform(0.0, 4.0);
      Tape tape;
      // Satisfied by at least the margin: exactly zero, not merely small.
      Tensor sat = hinge_loss(tape, Tensor::scalar(f_neg + c + gap), Tensor::scalar(f_neg), c);
      CHECK(sat.item() == 0.0);
      // Tied scores pay exactly the margin.
      Tensor tie = hinge_loss(tape, Tensor::scalar(f_neg), Tensor::scalar(f_neg), c);
      CHECK(tie.item() == c);
      // Inside the margin the loss is linear in the shortfall.
      double shortfall = rng.uniform(0.0, c);
      Tensor mid =
          hinge_loss(tape, Tensor::scalar(f_neg + c - shortfall), Tensor::scalar(f_neg), c);
      CHECK(mid.item() == doctest::Approx(shortfall).epsilon(1e-12));
    }
  }
}

TEST_CASE("the objective decomposes into hinge terms plus the scaled regularizer") {
  MicroSetup s(FusionKind::kLinear);
  Model model = init_model(s.mi.config, 3);
  REQUIRE(!s.tuples.empty());
  const double margin = 0.6, beta = 1e-4;
  Tape tape;
  std::vector<double> hinges;
  Tensor obj = batch_objective(tape, model, s.mi.graph, s.tokens, s.tuples, margin, beta,
                               nullptr, false, &hinges);
  REQUIRE(hinges.size() == s.tuples.size());
  double want = 0.0;
  for (double h : hinges) want += h;
  want += beta * param_norm_sq(model);
  CHECK(obj.item() == doctest::Approx(want).epsilon(1e-12));

  // The regularizer is charged once per call, not once per tuple: doubling
  // the batch doubles the hinge part only.
  std::vector<PreferenceTuple> doubled = s.tuples;
  doubled.insert(doubled.end(), s.tuples.begin(), s.tuples.end());
  Tape tape2;
  Tensor obj2 =
      batch_objective(tape2, model, s.mi.graph, s.tokens, doubled, margin, beta, nullptr, false);
  double hinge_part = 0.0;
  for (double h : hinges) hinge_part += h;
  CHECK(obj2.item() ==
        doctest::Approx(obj.item() + hinge_part).epsilon(1e-12));
}

TEST_CASE("ranking a tweet against itself contributes margin and no gradient") {
  MicroSetup s(FusionKind::kLinear);
  Model model = init_model(s.mi.config, 3);
  std::vector<PreferenceTuple> self = {{0, 0, 0, false}, {1, 2, 2, false}};
  Tape tape;
  Tensor obj = batch_objective(tape, model, s.mi.graph, s.tokens, self, 0.5, 0.0);
  CHECK(obj.item() == 1.0);  // two tuples, each exactly the margin
  tape.backward(obj);
  for (const auto& [name, t] : model.parameters()) {
    if (!t.has_grad()) continue;
    for (double gv : t.grad()) {
      INFO(name);
      CHECK(gv == 0.0);
    }
  }
}

TEST_CASE("a batch satisfied beyond the margin has exactly zero gradients") {
  MicroSetup s(FusionKind::kLinear);
  Model model = init_model(s.mi.config, 3);
  // Work out each tuple's score gap, keep the comfortably satisfied ones.
  std::vector<PreferenceTuple> satisfied;
  for (const PreferenceTuple& t : s.tuples) {
    Tape probe;
    Tensor zp = tweet_repr(probe, model, s.mi.graph.tweets[t.pos], s.tokens[t.pos], center_l0());
    Tensor zn = tweet_repr(probe, model, s.mi.graph.tweets[t.neg], s.tokens[t.neg], center_l0());
    double fp = score_tweet(probe, model, t.user, s.mi.graph.followees[t.user], zp).item();
    double fn = score_tweet(probe, model, t.user, s.mi.graph.followees[t.user], zn).item();
    if (fp - fn > 0.02) satisfied.push_back(t);
  }
  REQUIRE(!satisfied.empty());
  Tape tape;
  Tensor obj = batch_objective(tape, model, s.mi.graph, s.tokens, satisfied, 0.01, 0.0);
  CHECK(obj.item() == 0.0);
  tape.backward(obj);
  for (const auto& [name, t] : model.parameters()) {
    if (!t.has_grad()) continue;
    for (double gv : t.grad()) {
      INFO(name);
      CHECK(gv == 0.0);
    }
  }
}

TEST_CASE("zero epochs returns the freshly initialized model") {
  MicroSetup s(FusionKind::kLinear);
  TrainConfig cfg;
  cfg.model = s.mi.config;
  cfg.epochs = 0;
  cfg.seed = 77;
  TrainResult r = train(cfg, s.split, s.tokens, s.tuples);
  CHECK(r.epoch_objectives.empty());
  CHECK(r.log_csv == "epoch,objective,seconds\n");
  Model fresh = init_model(cfg.model, cfg.seed);
  CHECK(params_identical(r.model, fresh));
}

TEST_CASE("zero learning rate freezes the parameters and the objective") {
  MicroSetup s(FusionKind::kLinear);
  TrainConfig cfg;
  cfg.model = s.mi.config;
  cfg.epochs = 3;
  cfg.lr = 0.0;
  cfg.seed = 9;
  TrainResult r = train(cfg, s.split, s.tokens, s.tuples);
  REQUIRE(r.epoch_objectives.size() == 3);
  CHECK(r.epoch_objectives[0] == r.epoch_objectives[1]);
  CHECK(r.epoch_objectives[1] == r.epoch_objectives[2]);
  CHECK(params_identical(r.model, init_model(cfg.model, cfg.seed)));
}

TEST_CASE("identical configurations train to identical results") {
  for (FusionKind fusion : {FusionKind::kLinear, FusionKind::kGuided}) {
    MicroSetup s(fusion);
    TrainConfig cfg;
    cfg.model = s.mi.config;
    cfg.epochs = 2;
    cfg.batch = 3;
    cfg.seed = 31;
    TrainResult a = train(cfg, s.split, s.tokens, s.tuples);
    TrainResult b = train(cfg, s.split, s.tokens, s.tuples);
    CHECK(a.epoch_objectives == b.epoch_objectives);  // bitwise
    CHECK(params_identical(a.model, b.model));
  }
}

TEST_CASE("each epoch writes one log row holding the canonical objective") {
  MicroSetup s(FusionKind::kLinear);
  TrainConfig cfg;
  cfg.model = s.mi.config;
  cfg.epochs = 2;
  TrainResult r = train(cfg, s.split, s.tokens, s.tuples);
  std::istringstream lines(r.log_csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "epoch,objective,seconds");
  for (std::size_t e = 1; e <= 2; ++e) {
    REQUIRE(std::getline(lines, line));
    std::istringstream row(line);
    std::string epoch, objective, seconds;
    REQUIRE(std::getline(row, epoch, ','));
    REQUIRE(std::getline(row, objective, ','));
    REQUIRE(std::getline(row, seconds, ','));
    CHECK(epoch == std::to_string(e));
    CHECK(std::stod(objective) == r.epoch_objectives[e - 1]);
  }
  CHECK(!std::getline(lines, line));
}

TEST_CASE("checkpoints and the log land in the output directory") {
  MicroSetup s(FusionKind::kLinear);
  fs::path out = fs::temp_directory_path() / "amnl_trainer_out";
  fs::remove_all(out);
  TrainConfig cfg;
  cfg.model = s.mi.config;
  cfg.epochs = 2;
  cfg.out_dir = out.string();
  train(cfg, s.split, s.tokens, s.tuples);
  CHECK(fs::exists(out / "checkpoint-epoch-1.irmc"));
  CHECK(fs::exists(out / "checkpoint-epoch-2.irmc"));
  CHECK(fs::exists(out / "checkpoint-final.irmc"));
  CHECK(fs::exists(out / "train-log.csv"));
  // The final checkpoint is the last epoch's state, byte for byte.
  std::ifstream a(out / "checkpoint-epoch-2.irmc", std::ios::binary);
  std::ifstream b(out / "checkpoint-final.irmc", std::ios::binary);
  std::ostringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  fs::remove_all(out);
}

TEST_CASE("bad configurations and empty batches are rejected") {
  MicroSetup s(FusionKind::kLinear);
  TrainConfig cfg;
  cfg.model = s.mi.config;
  cfg.margin = 0.0;
  CHECK_THROWS_AS(train(cfg, s.split, s.tokens, s.tuples), std::invalid_argument);
  cfg.margin = 1.0;
  CHECK_THROWS_AS(train(cfg, s.split, s.tokens, s.tuples), std::invalid_argument);
  cfg.margin = 0.6;
  cfg.batch = 0;
  CHECK_THROWS_AS(train(cfg, s.split, s.tokens, s.tuples), std::invalid_argument);
  cfg.batch = 32;
  cfg.negatives = 0;
  CHECK_THROWS_AS(train(cfg, s.split, s.tokens, s.tuples), std::invalid_argument);
  cfg.negatives = 2;
  CHECK_THROWS_AS(train(cfg, s.split, s.tokens, {}), std::invalid_argument);
  Model model = init_model(s.mi.config, 3);
  Tape tape;
  CHECK_THROWS_AS(batch_objective(tape, model, s.mi.graph, s.tokens, {}, 0.6, 0.0),
                  std::invalid_argument);
}

}  // TEST_SUITE

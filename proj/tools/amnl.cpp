// Command line front end: train / eval / predict / gen-synthetic /
// gradcheck / sweep / stats. Every command echoes its resolved
// configuration (seed included) before doing work, and every command is
// deterministic for a fixed --seed. Log verbosity comes from IRM_LOG.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "amnl/checkpoint.hpp"
#include "amnl/datagen.hpp"
#include "amnl/eval.hpp"
#include "amnl/gradcheck.hpp"
#include "amnl/graph.hpp"
#include "amnl/log.hpp"
#include "amnl/model.hpp"
#include "amnl/optim.hpp"
#include "amnl/sampler.hpp"
#include "amnl/tensor.hpp"
#include "amnl/text.hpp"
#include "amnl/trainer.hpp"

namespace fs = std::filesystem;

namespace {

constexpr double kGradTolerance = 1e-4;

std::string num_str(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// The user-facing --model values; the library names the fusion kinds by
// what they do (linear / guided).
amnl::FusionKind fusion_flag(const std::string& s) {
  if (s == "amnl") return amnl::FusionKind::kLinear;
  if (s == "amnl+") return amnl::FusionKind::kGuided;
  return amnl::fusion_from_string(s);
}

std::string fusion_flag_name(amnl::FusionKind k) {
  return k == amnl::FusionKind::kLinear ? "amnl" : "amnl+";
}

// Aligned "key = value" block so runs are easy to eyeball and diff.
class ConfigEcho {
 public:
  void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
  void add(const std::string& key, const char* value) { rows_.emplace_back(key, value); }
  void add(const std::string& key, double value) { rows_.emplace_back(key, num_str(value)); }
  void add(const std::string& key, std::size_t value) {
    rows_.emplace_back(key, std::to_string(value));
  }
  void add(const std::string& key, bool value) { rows_.emplace_back(key, value ? "true" : "false"); }

  void print(const std::string& command) const {
    std::size_t width = 0;
    for (const auto& r : rows_) width = std::max(width, r.first.size());
    std::printf("amnl %s\n", command.c_str());
    for (const auto& r : rows_)
      std::printf("  %-*s = %s\n", static_cast<int>(width), r.first.c_str(), r.second.c_str());
    std::fflush(stdout);
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

struct Dataset {
  amnl::IRMGraph graph;
  amnl::Vocabulary vocab;
  amnl::LoadReport report;
};

Dataset load_dir(const std::string& dir) {
  Dataset d;
  d.graph = amnl::load_dataset(dir + "/tweets.jsonl", dir + "/follows.csv", dir + "/retweets.csv",
                               dir + "/features.irmf", &d.report);
  const std::string vocab_path = dir + "/vocab.txt";
  if (fs::exists(vocab_path)) {
    d.vocab = amnl::Vocabulary::load(vocab_path);
  } else {
    std::vector<std::string> corpus;
    for (const auto& t : d.graph.tweets)
      for (const auto& c : t.comments) corpus.push_back(c);
    d.vocab = amnl::Vocabulary::build(corpus, amnl::kDefaultVocabSize);
    amnl::log_info("no vocab.txt in " + dir + ", built a vocabulary from the comments (" +
                   std::to_string(d.vocab.size()) + " tokens)");
  }
  return d;
}

// Flags shared by every command that instantiates a model.
struct ModelFlags {
  std::string model = "amnl";
  std::string ablation = "none";
  std::size_t upref_dim = 400;
  std::size_t rnn_dim = 1000;
  std::size_t attn_dim = 256;
  std::size_t loc_dim = 256;
  std::size_t word_dim = 300;
  std::size_t glimpse_window = 3;
  bool soft_glimpse = false;
  bool per_step_output = false;
};

void add_model_flags(CLI::App* sub, ModelFlags* f) {
  sub->add_option("--model", f->model, "ranking model")
      ->check(CLI::IsMember({"amnl", "amnl+"}))
      ->capture_default_str();
  sub->add_option("--ablation", f->ablation, "drop a modality or the social term")
      ->check(CLI::IsMember({"none", "image-only", "text-only", "no-social"}))
      ->capture_default_str();
  sub->add_option("--upref-dim", f->upref_dim, "user preference dimension")->capture_default_str();
  sub->add_option("--rnn-dim", f->rnn_dim, "text LSTM hidden dimension")->capture_default_str();
  sub->add_option("--attn-dim", f->attn_dim, "attention hidden dimension")->capture_default_str();
  sub->add_option("--loc-dim", f->loc_dim, "location LSTM hidden dimension")->capture_default_str();
  sub->add_option("--word-dim", f->word_dim, "word embedding dimension")->capture_default_str();
  sub->add_option("--glimpse-window", f->glimpse_window, "glimpse window side length (odd)")
      ->capture_default_str();
  sub->add_flag("--soft-glimpse", f->soft_glimpse,
                "bilinear soft glimpse instead of the discrete window");
  sub->add_flag("--per-step-output", f->per_step_output,
                "separate output projection per glimpse step");
}

struct TrainFlags {
  double split = 0.8;
  double margin = 0.6;
  double lr = 0.01;
  double beta = 1e-4;
  std::size_t epochs = 30;
  std::size_t batch = 32;
  std::size_t negatives = 2;
  std::uint64_t seed = 42;
  std::string optimizer = "adagrad";
  bool global_split = false;
  bool resample = false;
  bool publisher_only = false;
};

void add_train_flags(CLI::App* sub, TrainFlags* f) {
  sub->add_option("--split", f->split, "fraction of each user's events that train")
      ->capture_default_str();
  sub->add_option("--margin", f->margin, "ranking margin c")->capture_default_str();
  sub->add_option("--lr", f->lr, "learning rate")->capture_default_str();
  sub->add_option("--beta", f->beta, "L2 regularization trade-off")->capture_default_str();
  sub->add_option("--epochs", f->epochs, "training epochs")->capture_default_str();
  sub->add_option("--batch", f->batch, "minibatch size")->capture_default_str();
  sub->add_option("--negatives", f->negatives, "negatives sampled per positive")
      ->capture_default_str();
  sub->add_option("--seed", f->seed, "RNG seed")->capture_default_str();
  sub->add_option("--optimizer", f->optimizer, "parameter update rule")
      ->check(CLI::IsMember({"adagrad", "adam"}))
      ->capture_default_str();
  sub->add_flag("--global-split", f->global_split,
                "one time cut over all events instead of a per-user cut");
  sub->add_flag("--resample", f->resample, "redraw negatives every epoch");
  sub->add_flag("--publisher-only", f->publisher_only,
                "exposure pool from followee publications only");
}

amnl::ModelConfig make_model_config(const ModelFlags& f, const amnl::IRMGraph& g,
                                    std::size_t vocab_size) {
  amnl::ModelConfig cfg;
  cfg.fusion = fusion_flag(f.model);
  cfg.ablation = amnl::ablation_from_string(f.ablation);
  cfg.upref_dim = f.upref_dim;
  cfg.rnn_dim = f.rnn_dim;
  cfg.attn_dim = f.attn_dim;
  cfg.loc_dim = f.loc_dim;
  cfg.word_dim = f.word_dim;
  cfg.glimpse_window = f.glimpse_window;
  cfg.soft_glimpse = f.soft_glimpse;
  cfg.per_step_output = f.per_step_output;
  cfg.num_users = g.num_users();
  cfg.vocab_size = vocab_size;
  cfg.channels = g.channels;
  cfg.grid = g.grid;
  cfg.validate();
  return cfg;
}

void echo_model(ConfigEcho& echo, const ModelFlags& mf) {
  echo.add("model", mf.model);
  echo.add("ablation", mf.ablation);
  echo.add("upref-dim", mf.upref_dim);
  echo.add("rnn-dim", mf.rnn_dim);
  echo.add("attn-dim", mf.attn_dim);
  echo.add("loc-dim", mf.loc_dim);
  echo.add("word-dim", mf.word_dim);
  echo.add("glimpse-window", mf.glimpse_window);
  echo.add("soft-glimpse", mf.soft_glimpse);
  echo.add("per-step-output", mf.per_step_output);
}

void echo_train(ConfigEcho& echo, const TrainFlags& tf) {
  echo.add("split", tf.split);
  echo.add("margin", tf.margin);
  echo.add("lr", tf.lr);
  echo.add("beta", tf.beta);
  echo.add("epochs", tf.epochs);
  echo.add("batch", tf.batch);
  echo.add("negatives", tf.negatives);
  echo.add("optimizer", tf.optimizer);
  echo.add("global-split", tf.global_split);
  echo.add("resample", tf.resample);
  echo.add("publisher-only", tf.publisher_only);
  echo.add("seed", tf.seed);
}

amnl::TrainConfig make_train_config(const amnl::ModelConfig& mc, const TrainFlags& tf,
                                    const std::string& out_dir) {
  amnl::TrainConfig tc;
  tc.model = mc;
  tc.margin = tf.margin;
  tc.lr = tf.lr;
  tc.beta = tf.beta;
  tc.epochs = tf.epochs;
  tc.batch = tf.batch;
  tc.negatives = tf.negatives;
  tc.seed = tf.seed;
  tc.optimizer = amnl::optimizer_from_string(tf.optimizer);
  tc.resample_each_epoch = tf.resample;
  tc.out_dir = out_dir;
  tc.validate();
  return tc;
}

int cmd_train(const std::string& data, const std::string& out, const ModelFlags& mf,
              const TrainFlags& tf) {
  Dataset d = load_dir(data);
  const amnl::ModelConfig mc = make_model_config(mf, d.graph, d.vocab.size());
  const amnl::TrainConfig tc = make_train_config(mc, tf, out);

  ConfigEcho echo;
  echo.add("data", data);
  echo.add("out", out);
  echo_model(echo, mf);
  echo_train(echo, tf);
  echo.print("train");

  fs::create_directories(out);
  const amnl::SplitGraph split = amnl::temporal_split(d.graph, tf.split, tf.global_split);
  amnl::SamplerReport srep;
  std::vector<amnl::PreferenceTuple> tuples =
      amnl::build_triplets(split, tc.negatives, tc.seed, &srep, tf.publisher_only);
  if (tuples.empty()) throw std::runtime_error("the train split yields no preference tuples");
  const std::vector<amnl::TokenMatrix> tokens = amnl::tokenize_all(d.graph, d.vocab, mc);

  std::printf("train events: %zu  test events: %zu  tuples: %zu (fallback %zu, skipped %zu)\n",
              split.train_events.size(), split.test_events.size(), tuples.size(),
              srep.fallback_negatives, srep.skipped_positives);
  std::fflush(stdout);

  amnl::TrainResult result = amnl::train(tc, split, tokens, std::move(tuples));
  std::printf("final objective: %.17g\n", result.epoch_objectives.back());
  std::printf("checkpoint: %s\n", (out + "/checkpoint-final.irmc").c_str());
  std::printf("training log: %s\n", (out + "/train-log.csv").c_str());
  return 0;
}

void check_checkpoint_matches(const amnl::ModelConfig& cfg, const Dataset& d) {
  if (cfg.num_users != d.graph.num_users())
    throw std::runtime_error("checkpoint expects " + std::to_string(cfg.num_users) +
                             " users but the dataset has " + std::to_string(d.graph.num_users()));
  if (cfg.uses_image() && (cfg.grid != d.graph.grid || cfg.channels != d.graph.channels))
    throw std::runtime_error("checkpoint feature geometry does not match the dataset");
  if (cfg.uses_text() && cfg.vocab_size != d.vocab.size())
    throw std::runtime_error("checkpoint expects a vocabulary of " +
                             std::to_string(cfg.vocab_size) + " tokens but vocab.txt has " +
                             std::to_string(d.vocab.size()));
}

int cmd_eval(const std::string& data, const std::string& checkpoint, double split_ratio,
             bool global_split, const amnl::EvalConfig& ec, bool as_json,
             const std::string& out) {
  Dataset d = load_dir(data);
  const amnl::Model model = amnl::load_checkpoint(checkpoint);
  check_checkpoint_matches(model.cfg, d);

  ConfigEcho echo;
  echo.add("data", data);
  echo.add("checkpoint", checkpoint);
  echo.add("model", fusion_flag_name(model.cfg.fusion));
  echo.add("ablation", amnl::to_string(model.cfg.ablation));
  echo.add("split", split_ratio);
  echo.add("global-split", global_split);
  echo.add("k", ec.k);
  echo.add("negatives", ec.negatives_per_positive);
  echo.add("eval-all-candidates", ec.all_candidates);
  echo.add("seed", ec.seed);
  echo.print("eval");

  const amnl::SplitGraph split = amnl::temporal_split(d.graph, split_ratio, global_split);
  const std::vector<amnl::TokenMatrix> tokens = amnl::tokenize_all(d.graph, d.vocab, model.cfg);
  const amnl::EvalReport report = amnl::evaluate(model, split, tokens, ec);

  if (as_json)
    std::printf("%s\n", amnl::report_json(report).c_str());
  else
    std::printf("%s", amnl::report_table(report).c_str());

  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream(out + "/report.json", std::ios::binary) << amnl::report_json(report) << "\n";
    std::ofstream(out + "/per-user.csv", std::ios::binary)
        << amnl::per_user_csv(report, d.graph);
    std::printf("wrote %s/report.json and %s/per-user.csv\n", out.c_str(), out.c_str());
  }
  return 0;
}

int cmd_predict(const std::string& data, const std::string& checkpoint, const std::string& user,
                std::size_t k) {
  Dataset d = load_dir(data);
  const amnl::Model model = amnl::load_checkpoint(checkpoint);
  check_checkpoint_matches(model.cfg, d);

  ConfigEcho echo;
  echo.add("data", data);
  echo.add("checkpoint", checkpoint);
  echo.add("model", fusion_flag_name(model.cfg.fusion));
  echo.add("user", user);
  echo.add("k", k);
  echo.print("predict");

  auto it = d.graph.user_index.find(user);
  if (it == d.graph.user_index.end()) throw std::runtime_error("unknown user id: " + user);
  const std::size_t u = it->second;

  std::vector<std::size_t> seen;
  for (const auto& ev : d.graph.events)
    if (ev.user == u) seen.push_back(ev.tweet);
  std::sort(seen.begin(), seen.end());

  const std::vector<amnl::TokenMatrix> tokens = amnl::tokenize_all(d.graph, d.vocab, model.cfg);
  amnl::Tape tape;
  std::vector<std::pair<double, std::string>> scored;
  for (std::size_t t = 0; t < d.graph.num_tweets(); ++t) {
    if (amnl::contains(seen, t)) continue;
    const amnl::Tensor z =
        amnl::tweet_repr(tape, model, d.graph.tweets[t], tokens[t], amnl::center_l0());
    const amnl::Tensor f = amnl::score_tweet(tape, model, u, d.graph.followees[u], z);
    scored.emplace_back(f.item(), d.graph.tweets[t].id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  const std::size_t top = std::min(k, scored.size());
  for (std::size_t i = 0; i < top; ++i)
    std::printf("%zu\t%s\t%s\n", i + 1, scored[i].second.c_str(), num_str(scored[i].first).c_str());
  return 0;
}

int cmd_gen(const std::string& out, const amnl::GenConfig& cfg, const std::string& mode) {
  amnl::GenConfig resolved = cfg;
  resolved.mode = amnl::plant_mode_from_string(mode);
  resolved.validate();

  ConfigEcho echo;
  echo.add("out", out);
  echo.add("users", resolved.users);
  echo.add("tweets", resolved.tweets);
  echo.add("mode", amnl::to_string(resolved.mode));
  echo.add("grid", resolved.grid);
  echo.add("channels", resolved.channels);
  echo.add("topics", resolved.topics);
  echo.add("latent-dim", resolved.latent_dim);
  echo.add("followees-mean", resolved.followees_mean);
  echo.add("comments-per-tweet", resolved.comments_per_tweet);
  echo.add("vocab", resolved.vocab_target);
  echo.add("noise", resolved.noise);
  echo.add("positive-rate", resolved.positive_rate);
  echo.add("spread", resolved.spread);
  echo.add("homophily-noise", resolved.homophily_noise);
  echo.add("signal-scale", resolved.signal_scale);
  echo.add("seed", resolved.seed);
  echo.print("gen-synthetic");

  amnl::GenSummary summary;
  amnl::generate(resolved, out, &summary);

  std::size_t events = 0;
  for (const auto& p : summary.positives) events += p.size();
  std::size_t edges = 0;
  for (const auto& f : summary.followees) edges += f.size();
  std::printf("wrote %zu users, %zu tweets, %zu follow edges, %zu retweet events to %s\n",
              resolved.users, resolved.tweets, edges, events, out.c_str());
  return 0;
}

int cmd_gradcheck(const std::string& which, bool soft, std::uint64_t seed) {
  ConfigEcho echo;
  echo.add("model", which);
  echo.add("soft-glimpse", soft);
  echo.add("tolerance", kGradTolerance);
  echo.add("seed", seed);
  echo.print("gradcheck");

  std::vector<std::pair<std::string, amnl::FusionKind>> runs;
  if (which == "amnl" || which == "both") runs.emplace_back("amnl", amnl::FusionKind::kLinear);
  if (which == "amnl+" || which == "both") runs.emplace_back("amnl+", amnl::FusionKind::kGuided);

  bool ok = true;
  for (const auto& [name, kind] : runs) {
    const bool use_soft = soft && kind == amnl::FusionKind::kGuided;
    const amnl::GradCheckReport r = amnl::gradcheck_micro(kind, use_soft, seed);
    const bool pass = r.max_rel_err < kGradTolerance;
    ok = ok && pass;
    std::printf("%-5s checked=%zu max_rel_err=%s worst=%s[%zu] analytic=%s numeric=%s %s\n",
                name.c_str(), r.checked, num_str(r.max_rel_err).c_str(), r.worst_param.c_str(),
                r.worst_index, num_str(r.analytic).c_str(), num_str(r.numeric).c_str(),
                pass ? "ok" : "FAIL");
  }
  return ok ? 0 : 1;
}

std::vector<double> parse_values(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    const auto a = spec.find(':');
    const auto b = spec.find(':', a + 1);
    if (b == std::string::npos) throw std::runtime_error("range wants lo:hi:step, got " + spec);
    lo = std::stod(spec.substr(0, a));
    hi = std::stod(spec.substr(a + 1, b - a - 1));
    step = std::stod(spec.substr(b + 1));
    if (step <= 0.0 || hi < lo) throw std::runtime_error("bad range " + spec);
    // Half-step slack keeps the inclusive endpoint despite rounding.
    for (double v = lo; v <= hi + step * 0.5; v += step) out.push_back(v);
    if (out.size() > 1000) throw std::runtime_error("range " + spec + " expands to too many values");
  } else {
    std::string rest = spec;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      out.push_back(std::stod(rest.substr(0, comma)));
      if (comma == std::string::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  if (out.empty()) throw std::runtime_error("no values in " + spec);
  return out;
}

int cmd_sweep(const std::string& data, const std::string& param, const std::string& values_spec,
              ModelFlags mf, TrainFlags tf, std::size_t k, const std::string& out) {
  const std::vector<double> values = parse_values(values_spec);

  ConfigEcho echo;
  echo.add("data", data);
  echo.add("param", param);
  echo.add("values", values_spec);
  echo.add("k", k);
  echo_model(echo, mf);
  echo_train(echo, tf);
  echo.print("sweep");

  Dataset d = load_dir(data);
  const amnl::SplitGraph split = amnl::temporal_split(d.graph, tf.split, tf.global_split);

  std::string csv = "value,objective,auc,p_at_1,p_at_3,p_at_k\n";
  std::printf("%s", csv.c_str());
  for (double v : values) {
    ModelFlags mfv = mf;
    TrainFlags tfv = tf;
    if (param == "margin") tfv.margin = v;
    else if (param == "lr") tfv.lr = v;
    else if (param == "beta") tfv.beta = v;
    else if (param == "epochs") tfv.epochs = static_cast<std::size_t>(std::llround(v));
    else if (param == "negatives") tfv.negatives = static_cast<std::size_t>(std::llround(v));
    else if (param == "upref-dim") mfv.upref_dim = static_cast<std::size_t>(std::llround(v));
    else if (param == "rnn-dim") mfv.rnn_dim = static_cast<std::size_t>(std::llround(v));
    else if (param == "attn-dim") mfv.attn_dim = static_cast<std::size_t>(std::llround(v));
    else if (param == "glimpse-window")
      mfv.glimpse_window = static_cast<std::size_t>(std::llround(v));
    else throw std::runtime_error("unknown sweep parameter: " + param);

    const amnl::ModelConfig mc = make_model_config(mfv, d.graph, d.vocab.size());
    const amnl::TrainConfig tc = make_train_config(mc, tfv, "");
    amnl::SamplerReport srep;
    std::vector<amnl::PreferenceTuple> tuples =
        amnl::build_triplets(split, tc.negatives, tc.seed, &srep, tfv.publisher_only);
    if (tuples.empty()) throw std::runtime_error("the train split yields no preference tuples");
    const std::vector<amnl::TokenMatrix> tokens = amnl::tokenize_all(d.graph, d.vocab, mc);
    const amnl::TrainResult result = amnl::train(tc, split, tokens, std::move(tuples));

    amnl::EvalConfig ec;
    ec.k = k;
    ec.negatives_per_positive = tfv.negatives;
    ec.seed = tfv.seed;
    const amnl::EvalReport report = amnl::evaluate(result.model, split, tokens, ec);

    char row[256];
    std::snprintf(row, sizeof(row), "%s,%.17g,%.6f,%.6f,%.6f,%.6f\n", num_str(v).c_str(),
                  result.epoch_objectives.back(), report.auc, report.precision_at_1,
                  report.precision_at_3, report.precision_at_k);
    csv += row;
    std::printf("%s", row);
    std::fflush(stdout);
  }

  if (!out.empty()) {
    std::ofstream(out, std::ios::binary) << csv;
    std::printf("wrote %s\n", out.c_str());
  }
  return 0;
}

struct Summary {
  double mean = 0.0;
  std::size_t min = 0, p50 = 0, p90 = 0, max = 0;
};

Summary summarize(std::vector<std::size_t> xs) {
  Summary s;
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  double total = 0.0;
  for (std::size_t x : xs) total += static_cast<double>(x);
  s.mean = total / static_cast<double>(xs.size());
  s.min = xs.front();
  s.max = xs.back();
  s.p50 = xs[(xs.size() - 1) / 2];
  s.p90 = xs[(xs.size() - 1) * 9 / 10];
  return s;
}

void print_distribution(const char* label, const std::vector<std::size_t>& xs) {
  const Summary s = summarize(xs);
  std::printf("%s: min=%zu p50=%zu p90=%zu max=%zu mean=%.2f\n", label, s.min, s.p50, s.p90, s.max,
              s.mean);
  struct Bucket {
    const char* name;
    std::size_t lo, hi;
  };
  const Bucket buckets[] = {{"0", 0, 0},      {"1", 1, 1},      {"2", 2, 2},
                            {"3-5", 3, 5},    {"6-10", 6, 10},  {"11-20", 11, 20},
                            {"21-50", 21, 50}, {"51+", 51, SIZE_MAX}};
  for (const auto& b : buckets) {
    std::size_t n = 0;
    for (std::size_t x : xs)
      if (x >= b.lo && x <= b.hi) ++n;
    if (n > 0) std::printf("  %-6s %zu\n", b.name, n);
  }
}

int cmd_stats(const std::string& data) {
  ConfigEcho echo;
  echo.add("data", data);
  echo.print("stats");

  Dataset d = load_dir(data);
  std::size_t edges = 0;
  for (const auto& f : d.graph.followees) edges += f.size();
  std::size_t comments = 0;
  for (const auto& t : d.graph.tweets) comments += t.comments.size();

  std::printf("users: %zu\ntweets: %zu\nretweet events: %zu\nfollow edges: %zu\n",
              d.graph.num_users(), d.graph.num_tweets(), d.graph.events.size(), edges);
  std::printf("feature grid: %zux%zu x %zu channels\n", d.graph.grid, d.graph.grid,
              d.graph.channels);
  std::printf("comments: %zu total, vocabulary: %zu tokens\n", comments, d.vocab.size());
  std::printf("load warnings: %zu duplicate retweets, %zu unused feature records\n",
              d.report.duplicate_retweets, d.report.unused_feature_records);

  std::vector<std::size_t> per_tweet(d.graph.num_tweets(), 0);
  std::vector<std::size_t> per_user(d.graph.num_users(), 0);
  for (const auto& ev : d.graph.events) {
    ++per_tweet[ev.tweet];
    ++per_user[ev.user];
  }
  std::vector<std::size_t> degree;
  for (const auto& f : d.graph.followees) degree.push_back(f.size());

  print_distribution("retweets per tweet", per_tweet);
  print_distribution("retweets per user", per_user);
  print_distribution("followees per user", degree);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-faceted ranking for image retweet prediction"};
  app.require_subcommand(1);
  int rc = 0;

  // train
  std::string train_data, train_out;
  ModelFlags train_mf;
  TrainFlags train_tf;
  auto* train = app.add_subcommand("train", "train a model and write checkpoints");
  train->add_option("--data", train_data, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  train->add_option("--out", train_out, "output directory")->required();
  add_model_flags(train, &train_mf);
  add_train_flags(train, &train_tf);
  train->callback([&] { rc = cmd_train(train_data, train_out, train_mf, train_tf); });

  // eval
  std::string eval_data, eval_ckpt, eval_out;
  double eval_split = 0.8;
  bool eval_global = false, eval_json = false;
  amnl::EvalConfig eval_cfg;
  auto* eval = app.add_subcommand("eval", "rank held-out tweets and report metrics");
  eval->add_option("--data", eval_data, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--split", eval_split, "train fraction used when the model was trained")
      ->capture_default_str();
  eval->add_flag("--global-split", eval_global, "one time cut over all events");
  eval->add_option("--k", eval_cfg.k, "precision cutoff")->capture_default_str();
  eval->add_option("--negatives", eval_cfg.negatives_per_positive,
                   "candidate negatives per positive")
      ->capture_default_str();
  eval->add_option("--seed", eval_cfg.seed, "RNG seed")->capture_default_str();
  eval->add_flag("--eval-all-candidates", eval_cfg.all_candidates,
                 "rank every non-train tweet instead of sampling negatives");
  eval->add_flag("--json", eval_json, "print the report as JSON instead of a table");
  eval->add_option("--out", eval_out, "directory for report.json and per-user.csv");
  eval->callback([&] {
    rc = cmd_eval(eval_data, eval_ckpt, eval_split, eval_global, eval_cfg, eval_json, eval_out);
  });

  // predict
  std::string pred_data, pred_ckpt, pred_user;
  std::size_t pred_k = 10;
  auto* predict = app.add_subcommand("predict", "top-K unseen tweets for one user");
  predict->add_option("--data", pred_data, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  predict->add_option("--checkpoint", pred_ckpt, "checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--user", pred_user, "user id")->required();
  predict->add_option("--k", pred_k, "list length")->capture_default_str();
  predict->callback([&] { rc = cmd_predict(pred_data, pred_ckpt, pred_user, pred_k); });

  // gen-synthetic
  std::string gen_out, gen_mode = "global";
  amnl::GenConfig gen_cfg;
  auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic dataset with planted signal");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--users", gen_cfg.users, "user count")->capture_default_str();
  gen->add_option("--tweets", gen_cfg.tweets, "tweet count")->capture_default_str();
  gen->add_option("--mode", gen_mode, "where the preference signal lives")
      ->check(CLI::IsMember({"global", "localized", "global-feature", "glimpse-localized"}))
      ->capture_default_str();
  gen->add_option("--grid", gen_cfg.grid, "feature grid side")->capture_default_str();
  gen->add_option("--channels", gen_cfg.channels, "feature channels")->capture_default_str();
  gen->add_option("--topics", gen_cfg.topics, "topic anchor count")->capture_default_str();
  gen->add_option("--latent-dim", gen_cfg.latent_dim, "latent dimension")->capture_default_str();
  gen->add_option("--followees-mean", gen_cfg.followees_mean, "mean followee count")
      ->capture_default_str();
  gen->add_option("--comments-per-tweet", gen_cfg.comments_per_tweet, "comments per tweet")
      ->capture_default_str();
  gen->add_option("--vocab", gen_cfg.vocab_target, "vocabulary budget")->capture_default_str();
  gen->add_option("--noise", gen_cfg.noise, "feature noise scale")->capture_default_str();
  gen->add_option("--positive-rate", gen_cfg.positive_rate, "retweet rate per user")
      ->capture_default_str();
  gen->add_option("--spread", gen_cfg.spread, "latent jitter around topic anchors")
      ->capture_default_str();
  gen->add_option("--homophily-noise", gen_cfg.homophily_noise, "gumbel scale in follow choice")
      ->capture_default_str();
  gen->add_option("--signal-scale", gen_cfg.signal_scale, "planted signal magnitude")
      ->capture_default_str();
  gen->add_option("--seed", gen_cfg.seed, "RNG seed")->capture_default_str();
  gen->callback([&] { rc = cmd_gen(gen_out, gen_cfg, gen_mode); });

  // gradcheck
  std::string gc_model = "both";
  bool gc_soft = false;
  std::uint64_t gc_seed = 42;
  auto* gc = app.add_subcommand("gradcheck", "finite-difference check on a micro instance");
  gc->add_option("--model", gc_model, "which model to check")
      ->check(CLI::IsMember({"amnl", "amnl+", "both"}))
      ->capture_default_str();
  gc->add_flag("--soft-glimpse", gc_soft, "check the soft glimpse path");
  gc->add_option("--seed", gc_seed, "RNG seed")->capture_default_str();
  gc->callback([&] { rc = cmd_gradcheck(gc_model, gc_soft, gc_seed); });

  // sweep
  std::string sweep_data, sweep_param, sweep_values, sweep_out;
  std::size_t sweep_k = 3;
  ModelFlags sweep_mf;
  TrainFlags sweep_tf;
  auto* sweep = app.add_subcommand("sweep", "train and evaluate across one parameter's values");
  sweep->add_option("--data", sweep_data, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  sweep->add_option("--param", sweep_param, "parameter to vary")
      ->required()
      ->check(CLI::IsMember({"margin", "lr", "beta", "epochs", "negatives", "upref-dim", "rnn-dim",
                             "attn-dim", "glimpse-window"}));
  sweep->add_option("--values", sweep_values, "lo:hi:step range or comma list")->required();
  sweep->add_option("--k", sweep_k, "precision cutoff for the per-value eval")
      ->capture_default_str();
  sweep->add_option("--csv", sweep_out, "also write the rows to this CSV file");
  add_model_flags(sweep, &sweep_mf);
  add_train_flags(sweep, &sweep_tf);
  sweep->callback([&] {
    rc = cmd_sweep(sweep_data, sweep_param, sweep_values, sweep_mf, sweep_tf, sweep_k, sweep_out);
  });

  // stats
  std::string stats_data;
  auto* stats = app.add_subcommand("stats", "dataset distribution summaries");
  stats->add_option("--data", stats_data, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  stats->callback([&] { rc = cmd_stats(stats_data); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}

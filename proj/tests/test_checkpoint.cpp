#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "amnl/checkpoint.hpp"
#include "amnl/gradcheck.hpp"
#include "amnl/model.hpp"
#include "amnl/optim.hpp"
#include "doctest.h"

using namespace amnl;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("amnl_ckpt_" + name);
}

}  // namespace

TEST_SUITE("checkpoint") {

TEST_CASE("save, load and save again produce identical bytes") {
  for (FusionKind fusion : {FusionKind::kLinear, FusionKind::kGuided}) {
    MicroInstance mi = make_micro_instance(fusion, false, 11);
    Model model = init_model(mi.config, 5);
    Optimizer opt(OptimizerKind::kAdagrad, 0.01);
    opt.bind(model.parameters());
    // Dirty the accumulators so the round trip carries real state.
    for (auto& acc : opt.moment1()) {
      for (double& v : acc) v = 0.125;
    }
    opt.restore(17);

    auto p1 = temp_file("rt1.irmc");
    auto p2 = temp_file("rt2.irmc");
    save_checkpoint(p1.string(), model, opt);
    Optimizer opt_back;
    Model back = load_checkpoint(p1.string(), &opt_back);
    save_checkpoint(p2.string(), back, opt_back);
    CHECK(slurp(p1) == slurp(p2));

    CHECK(config_to_json(back.cfg) == config_to_json(model.cfg));
    auto pa = model.parameters();
    auto pb = back.parameters();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pa[i].first == pb[i].first);
      CHECK(pa[i].second.values() == pb[i].second.values());  // f64 payload, bit-exact
    }
    CHECK(opt_back.kind() == OptimizerKind::kAdagrad);
    CHECK(opt_back.lr() == 0.01);
    CHECK(opt_back.step_count() == 17);
    CHECK(opt_back.moment1() == opt.moment1());
    fs::remove(p1);
    fs::remove(p2);
  }
}

TEST_CASE("adam state round-trips both moment sets") {
  MicroInstance mi = make_micro_instance(FusionKind::kLinear, false, 7);
  Model model = init_model(mi.config, 5);
  Optimizer opt(OptimizerKind::kAdam, 0.002);
  opt.bind(model.parameters());
  for (auto& m : opt.moment1()) {
    for (double& v : m) v = -0.5;
  }
  for (auto& m : opt.moment2()) {
    for (double& v : m) v = 0.25;
  }
  auto path = temp_file("adam.irmc");
  save_checkpoint(path.string(), model, opt);
  Optimizer back;
  load_checkpoint(path.string(), &back);
  CHECK(back.kind() == OptimizerKind::kAdam);
  CHECK(back.lr() == 0.002);
  CHECK(back.moment1() == opt.moment1());
  CHECK(back.moment2() == opt.moment2());
  fs::remove(path);
}

TEST_CASE("parameter values that are not f32-exact still round-trip bitwise") {
  MicroInstance mi = make_micro_instance(FusionKind::kLinear, false, 13);
  Model model = init_model(mi.config, 5);
  model.U.values()[0] = 0.1;  // not representable in f32
  model.U.values()[1] = 1.0 / 3.0;
  Optimizer opt(OptimizerKind::kAdagrad, 0.01);
  opt.bind(model.parameters());
  auto path = temp_file("wide.irmc");
  save_checkpoint(path.string(), model, opt);
  Model back = load_checkpoint(path.string());
  CHECK(back.U.at(0) == 0.1);
  CHECK(back.U.at(1) == 1.0 / 3.0);
  fs::remove(path);
}

TEST_CASE("corrupt files are rejected") {
  auto path = temp_file("bad.irmc");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPEnope";
  }
  CHECK_THROWS_AS(load_checkpoint(path.string()), std::runtime_error);
  CHECK_THROWS_AS(load_checkpoint((fs::temp_directory_path() / "amnl_absent.irmc").string()),
                  std::runtime_error);
  fs::remove(path);
}

TEST_CASE("the model config serializes canonically") {
  MicroInstance mi = make_micro_instance(FusionKind::kGuided, true, 3);
  std::string once = config_to_json(mi.config);
  ModelConfig back = config_from_json(once);
  CHECK(config_to_json(back) == once);
  CHECK(back.fusion == mi.config.fusion);
  CHECK(back.soft_glimpse == mi.config.soft_glimpse);
  CHECK(back.num_users == mi.config.num_users);
  CHECK(back.vocab_size == mi.config.vocab_size);
}

TEST_CASE("unused parameter groups stay out of the checkpoint") {
  MicroInstance lin = make_micro_instance(FusionKind::kLinear, false, 19);
  Model model = init_model(lin.config, 5);
  for (const auto& [name, t] : model.parameters()) {
    CHECK(name.substr(0, 4) != "att.");
    CHECK(name.substr(0, 4) != "out.");
  }
  MicroInstance gui = make_micro_instance(FusionKind::kGuided, false, 19);
  Model gmodel = init_model(gui.config, 5);
  for (const auto& [name, t] : gmodel.parameters()) {
    CHECK(name.substr(0, 4) != "lin.");
  }
}

}  // TEST_SUITE

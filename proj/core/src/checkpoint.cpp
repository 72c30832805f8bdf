#include "amnl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "amnl/irmf.hpp"

namespace amnl {

namespace {

constexpr char kMagic[4] = {'I', 'R', 'M', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  write_u64(out, bits);
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

void write_moments(std::ostream& out, const std::vector<std::vector<double>>& moments) {
  write_u32(out, static_cast<std::uint32_t>(moments.size()));
  for (const auto& m : moments) {
    NamedTensor t{"", {m.size()}, m};
    write_tensor_record(out, t, true);
  }
}

std::vector<std::vector<double>> read_moments(std::istream& in) {
  std::uint32_t count = read_u32(in);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    out.push_back(read_tensor_record(in, true).data);
  }
  return out;
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& model, const Optimizer& opt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  std::string cfg = config_to_json(model.cfg);
  write_u32(out, static_cast<std::uint32_t>(cfg.size()));
  out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

  auto params = model.parameters();
  write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    write_tensor_record(out, NamedTensor{name, t.shape(), t.values()}, true);
  }

  out.put(opt.kind() == OptimizerKind::kAdagrad ? 0 : 1);
  write_f64(out, opt.lr());
  write_u64(out, opt.step_count());
  write_moments(out, opt.moment1());
  write_moments(out, opt.moment2());
  out.flush();
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Model load_checkpoint(const std::string& path, Optimizer* opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a checkpoint file (bad magic): " + path);
  }
  std::uint32_t version = read_u32(in);
  if (version != kVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  std::uint32_t cfg_len = read_u32(in);
  if (cfg_len > (1u << 20)) throw std::runtime_error("implausible checkpoint config length");
  std::string cfg_text(cfg_len, '\0');
  in.read(cfg_text.data(), cfg_len);
  if (in.gcount() != static_cast<std::streamsize>(cfg_len)) {
    throw std::runtime_error("truncated checkpoint: " + path);
  }
  ModelConfig cfg = config_from_json(cfg_text);

  // Rebuild the same parameter layout, then overwrite every value.
  Model model = init_model(cfg, 0);
  auto params = model.parameters();
  std::uint32_t count = read_u32(in);
  if (count != params.size()) {
    throw std::runtime_error("checkpoint has " + std::to_string(count) + " tensors, expected " +
                             std::to_string(params.size()));
  }
  for (auto& [name, t] : params) {
    NamedTensor rec = read_tensor_record(in, true);
    if (rec.name != name) {
      throw std::runtime_error("checkpoint tensor '" + rec.name + "' where '" + name +
                               "' was expected");
    }
    if (rec.shape != t.shape()) {
      throw std::runtime_error("checkpoint tensor " + name + " has shape [" +
                               shape_str(rec.shape) + "], expected [" + shape_str(t.shape()) +
                               "]");
    }
    t.values() = std::move(rec.data);
  }

  int kind_byte = in.get();
  if (kind_byte != 0 && kind_byte != 1) throw std::runtime_error("truncated checkpoint: " + path);
  double lr = read_f64(in);
  std::uint64_t steps = read_u64(in);
  Optimizer restored(kind_byte == 0 ? OptimizerKind::kAdagrad : OptimizerKind::kAdam, lr);
  restored.moment1() = read_moments(in);
  restored.moment2() = read_moments(in);
  restored.restore(steps);
  if (opt) *opt = restored;
  return model;
}

}  // namespace amnl

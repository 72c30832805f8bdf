#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "amnl/tensor.hpp"

namespace amnl {

enum class OptimizerKind { kAdagrad, kAdam };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

// Diagonal AdaGrad (default): acc += g^2; theta -= lr * g / (sqrt(acc) + 1e-8).
// Adam is the alternative, with the usual bias-corrected moments.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerKind kind, double lr);

  // Allocates accumulators matching the parameter list; call once.
  void bind(const std::vector<std::pair<std::string, Tensor>>& params);

  // Applies one update from the parameters' current gradients. Parameters
  // without an accumulated gradient are left untouched.
  void step(const std::vector<std::pair<std::string, Tensor>>& params);

  OptimizerKind kind() const { return kind_; }
  double lr() const { return lr_; }
  std::uint64_t step_count() const { return step_count_; }

  // Serialized state, aligned with the bound parameter order.
  std::vector<std::vector<double>>& moment1() { return m1_; }
  std::vector<std::vector<double>>& moment2() { return m2_; }
  const std::vector<std::vector<double>>& moment1() const { return m1_; }
  const std::vector<std::vector<double>>& moment2() const { return m2_; }
  void restore(std::uint64_t step_count) { step_count_ = step_count; }

 private:
  OptimizerKind kind_ = OptimizerKind::kAdagrad;
  double lr_ = 0.01;
  std::uint64_t step_count_ = 0;
  std::vector<std::vector<double>> m1_;  // adagrad accumulator / adam first moment
  std::vector<std::vector<double>> m2_;  // adam second moment (unused for adagrad)
};

}  // namespace amnl

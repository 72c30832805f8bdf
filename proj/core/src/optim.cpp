#include "amnl/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace amnl {

namespace {
constexpr double kEps = 1e-8;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
}  // namespace

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::kAdagrad ? "adagrad" : "adam";
}

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "adagrad") return OptimizerKind::kAdagrad;
  if (s == "adam") return OptimizerKind::kAdam;
  throw std::invalid_argument("unknown optimizer '" + s + "'");
}

Optimizer::Optimizer(OptimizerKind kind, double lr) : kind_(kind), lr_(lr) {
  if (!(lr >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
}

void Optimizer::bind(const std::vector<std::pair<std::string, Tensor>>& params) {
  m1_.clear();
  m2_.clear();
  for (const auto& [name, t] : params) {
    m1_.emplace_back(t.numel(), 0.0);
    if (kind_ == OptimizerKind::kAdam) m2_.emplace_back(t.numel(), 0.0);
  }
}

void Optimizer::step(const std::vector<std::pair<std::string, Tensor>>& params) {
  if (m1_.size() != params.size()) {
    throw std::invalid_argument("optimizer bound to a different parameter list");
  }
  ++step_count_;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor t = params[p].second;  // handle copy; storage is shared
    if (!t.has_grad()) continue;
    const std::vector<double>& g = t.grad();
    std::vector<double>& value = t.values();
    if (g.size() != m1_[p].size()) {
      throw std::invalid_argument("gradient shape mismatch for " + params[p].first);
    }
    if (kind_ == OptimizerKind::kAdagrad) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        m1_[p][i] += g[i] * g[i];
        value[i] -= lr_ * g[i] / (std::sqrt(m1_[p][i]) + kEps);
      }
    } else {
      double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step_count_));
      double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step_count_));
      for (std::size_t i = 0; i < g.size(); ++i) {
        m1_[p][i] = kAdamBeta1 * m1_[p][i] + (1.0 - kAdamBeta1) * g[i];
        m2_[p][i] = kAdamBeta2 * m2_[p][i] + (1.0 - kAdamBeta2) * g[i] * g[i];
        double mhat = m1_[p][i] / c1;
        double vhat = m2_[p][i] / c2;
        value[i] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
      }
    }
  }
}

}  // namespace amnl

#include "amnl/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace amnl {

namespace {

std::atomic<std::uint64_t> g_next_tape_id{1};

constexpr double kScaledTanhGain = 1.7159;
constexpr double kScaledTanhSlope = 2.0 / 3.0;

void ensure_grad(detail::TensorNode& n) {
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
}

}  // namespace

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  for (std::size_t d : shape) {
    if (d == 0) throw std::invalid_argument("tensor: zero extent in shape " + shape_str(shape));
  }
  if (data.size() != shape_numel(shape)) {
    throw std::invalid_argument("tensor: data length " + std::to_string(data.size()) +
                                " does not match shape " + shape_str(shape));
  }
  node_ = std::make_shared<detail::TensorNode>();
  node_->shape = std::move(shape);
  node_->value = std::move(data);
  node_->requires_grad = requires_grad;
  node_->needs_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  std::vector<double> data(shape_numel(shape), 0.0);
  return Tensor(std::move(shape), std::move(data), requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  std::vector<double> data(shape_numel(shape), value);
  return Tensor(std::move(shape), std::move(data), requires_grad);
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, {value}); }

double Tensor::item() const {
  if (numel() != 1) {
    throw std::invalid_argument("item: tensor " + shape_str(shape()) + " is not a scalar");
  }
  return node_->value[0];
}

std::vector<double>& Tensor::grad_storage() {
  ensure_grad(*node_);
  return node_->grad;
}

void Tensor::zero_grad() { node_->grad.clear(); }

Tape::Tape() : id_(g_next_tape_id.fetch_add(1)) {}

Tensor Tape::make(Shape shape, bool needs_grad) {
  Tensor t = Tensor::zeros(std::move(shape));
  t.node_->tape_id = id_;
  t.node_->needs_grad = needs_grad;
  return t;
}

void Tape::check_same_shape(const char* op, const Tensor& a, const Tensor& b) const {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
  }
}

void Tape::check_on_tape(const char* op, const Tensor& t) const {
  if (!t.defined()) throw std::invalid_argument(std::string(op) + ": undefined tensor");
  std::uint64_t owner = t.node_->tape_id;
  if (owner != 0 && owner != id_) {
    throw std::invalid_argument(std::string(op) + ": tensor belongs to another tape");
  }
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  check_on_tape("add", a);
  check_on_tape("add", b);
  check_same_shape("add", a, b);
  Tensor out = make(a.shape(), a.node_->needs_grad || b.node_->needs_grad);
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.node_->value[i] = a.at(i) + b.at(i);
  auto an = a.node_, bn = b.node_, on = out.node_;
  nodes_.push_back([an, bn, on] {
    if (on->grad.empty()) return;
    if (an->needs_grad) {
      ensure_grad(*an);
      for (std::size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += on->grad[i];
    }
    if (bn->needs_grad) {
      ensure_grad(*bn);
      for (std::size_t i = 0; i < on->grad.size(); ++i) bn->grad[i] += on->grad[i];
    }
  });
  return out;
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
  check_on_tape("sub", a);
  check_on_tape("sub", b);
  check_same_shape("sub", a, b);
  Tensor out = make(a.shape(), a.node_->needs_grad || b.node_->needs_grad);
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.node_->value[i] = a.at(i) - b.at(i);
  auto an = a.node_, bn = b.node_, on = out.node_;
  nodes_.push_back([an, bn, on] {
    if (on->grad.empty()) return;
    if (an->needs_grad) {
      ensure_grad(*an);
      for (std::size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += on->grad[i];
    }
    if (bn->needs_grad) {
      ensure_grad(*bn);
      for (std::size_t i = 0; i < on->grad.size(); ++i) bn->grad[i] -= on->grad[i];
    }
  });
  return out;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
  check_on_tape("mul", a);
  check_on_tape("mul", b);
  check_same_shape("mul", a, b);
  Tensor out = make(a.shape(), a.node_->needs_grad || b.node_->needs_grad);
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.node_->value[i] = a.at(i) * b.at(i);
  auto an = a.node_, bn = b.node_, on = out.node_;
  nodes_.push_back([an, bn, on] {
    if (on->grad.empty()) return;
    if (an->needs_grad) {
      ensure_grad(*an);
      for (std::size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += on->grad[i] * bn->value[i];
    }
    if (bn->needs_grad) {
      ensure_grad(*bn);
      for (std::size_t i = 0; i < on->grad.size(); ++i) bn->grad[i] += on->grad[i] * an->value[i];
    }
  });
  return out;
}

Tensor Tape::scale(const Tensor& a, double k) {
  check_on_tape("scale", a);
  Tensor out = make(a.shape(), a.node_->needs_grad);
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.node_->value[i] = a.at(i) * k;
  auto an = a.node_;
  auto on = out.node_;
  nodes_.push_back([an, on, k] {
    if (on->grad.empty() || !an->needs_grad) return;
    ensure_grad(*an);
    for (std::size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += on->grad[i] * k;
  });
  return out;
}

Tensor Tape::add_const(const Tensor& a, double k) {
  check_on_tape("add_const", a);
  Tensor out = make(a.shape(), a.node_->needs_grad);
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.node_->value[i] = a.at(i) + k;
  auto an = a.node_;
  auto on = out.node_;
  nodes_.push_back([an, on] {
    if (on->grad.empty() || !an->needs_grad) return;
    ensure_grad(*an);
    for (std::size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += on->grad[i];
  });
  return out;
}

Tensor Tape::tanh(const Tensor& a) {
  check_on_tape("tanh", a);
  Tensor out = make(a.shape(), a.node_->needs_grad);
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.node_->value[i] = std::tanh(a.at(i));
  auto an = a.node_;
  auto on = out.node_;
  nodes_.push_back([an, on] {
    if (on->grad.empty() || !an->needs_grad) return;
    ensure_grad(*an);
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      double y = on->value[i];
      an->grad[i] += on->grad[i] * (1.0 - y * y);
    }
  });
  return out;
}

Tensor Tape::sigmoid(const Tensor& a) {
  check_on_tape("sigmoid", a);
  Tensor out = make(a.shape(), a.node_->needs_grad);
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.node_->value[i] = 1.0 / (1.0 + std::exp(-a.at(i)));
  auto an = a.node_;
  auto on = out.node_;
  nodes_.push_back([an, on] {
    if (on->grad.empty() || !an->needs_grad) return;
    ensure_grad(*an);
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      double y = on->value[i];
      an->grad[i] += on->grad[i] * y * (1.0 - y);
    }
  });
  return out;
}

Tensor Tape::scaled_tanh(const Tensor& a) {
  check_on_tape("scaled_tanh", a);
  Tensor out = make(a.shape(), a.node_->needs_grad);
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) {
    out.node_->value[i] = kScaledTanhGain * std::tanh(kScaledTanhSlope * a.at(i));
  }
  auto an = a.node_;
  auto on = out.node_;
  nodes_.push_back([an, on] {
    if (on->grad.empty() || !an->needs_grad) return;
    ensure_grad(*an);
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      double t = on->value[i] / kScaledTanhGain;
      an->grad[i] += on->grad[i] * kScaledTanhGain * kScaledTanhSlope * (1.0 - t * t);
    }
  });
  return out;
}

Tensor Tape::relu(const Tensor& a) {
  check_on_tape("relu", a);
  Tensor out = make(a.shape(), a.node_->needs_grad);
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.node_->value[i] = a.at(i) > 0.0 ? a.at(i) : 0.0;
  auto an = a.node_;
  auto on = out.node_;
  nodes_.push_back([an, on] {
    if (on->grad.empty() || !an->needs_grad) return;
    ensure_grad(*an);
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      if (an->value[i] > 0.0) an->grad[i] += on->grad[i];
    }
  });
  return out;
}

Tensor Tape::clamp(const Tensor& a, double lo, double hi) {
  check_on_tape("clamp", a);
  if (!(lo < hi)) throw std::invalid_argument("clamp: lo must be < hi");
  Tensor out = make(a.shape(), a.node_->needs_grad);
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.node_->value[i] = std::min(hi, std::max(lo, a.at(i)));
  auto an = a.node_;
  auto on = out.node_;
  nodes_.push_back([an, on, lo, hi] {
    if (on->grad.empty() || !an->needs_grad) return;
    ensure_grad(*an);
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      double x = an->value[i];
      if (x > lo && x < hi) an->grad[i] += on->grad[i];
    }
  });
  return out;
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  check_on_tape("matmul", a);
  check_on_tape("matmul", b);
  if (a.rank() != 2 || b.rank() != 2 || a.shape()[1] != b.shape()[0]) {
    throw std::invalid_argument("matmul: shape mismatch " + shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
  }
  const std::size_t m = a.shape()[0], n = a.shape()[1], p = b.shape()[1];
  Tensor out = make({m, p}, a.node_->needs_grad || b.node_->needs_grad);
  const double* A = a.values().data();
  const double* B = b.values().data();
  double* C = out.node_->value.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      double aik = A[i * n + k];
      for (std::size_t j = 0; j < p; ++j) C[i * p + j] += aik * B[k * p + j];
    }
  }
  auto an = a.node_, bn = b.node_, on = out.node_;
  nodes_.push_back([an, bn, on, m, n, p] {
    if (on->grad.empty()) return;
    const double* G = on->grad.data();
    if (an->needs_grad) {
      ensure_grad(*an);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) {
          double g = G[i * p + j];
          for (std::size_t k = 0; k < n; ++k) an->grad[i * n + k] += g * bn->value[k * p + j];
        }
    }
    if (bn->needs_grad) {
      ensure_grad(*bn);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) {
          double g = G[i * p + j];
          for (std::size_t k = 0; k < n; ++k) bn->grad[k * p + j] += g * an->value[i * n + k];
        }
    }
  });
  return out;
}

Tensor Tape::matvec(const Tensor& a, const Tensor& v) {
  check_on_tape("matvec", a);
  check_on_tape("matvec", v);
  if (a.rank() != 2 || v.rank() != 1 || a.shape()[1] != v.shape()[0]) {
    throw std::invalid_argument("matvec: shape mismatch " + shape_str(a.shape()) + " vs " +
                                shape_str(v.shape()));
  }
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  Tensor out = make({m}, a.node_->needs_grad || v.node_->needs_grad);
  const double* A = a.values().data();
  const double* X = v.values().data();
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += A[i * n + k] * X[k];
    out.node_->value[i] = acc;
  }
  auto an = a.node_, vn = v.node_, on = out.node_;
  nodes_.push_back([an, vn, on, m, n] {
    if (on->grad.empty()) return;
    const double* G = on->grad.data();
    if (an->needs_grad) {
      ensure_grad(*an);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < n; ++k) an->grad[i * n + k] += G[i] * vn->value[k];
    }
    if (vn->needs_grad) {
      ensure_grad(*vn);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < n; ++k) vn->grad[k] += G[i] * an->value[i * n + k];
    }
  });
  return out;
}

Tensor Tape::dot(const Tensor& a, const Tensor& b) {
  check_on_tape("dot", a);
  check_on_tape("dot", b);
  if (a.rank() != 1 || b.rank() != 1) {
    throw std::invalid_argument("dot: rank-1 tensors required, got " + shape_str(a.shape()) +
                                " and " + shape_str(b.shape()));
  }
  check_same_shape("dot", a, b);
  Tensor out = make({}, a.node_->needs_grad || b.node_->needs_grad);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) acc += a.at(i) * b.at(i);
  out.node_->value[0] = acc;
  auto an = a.node_, bn = b.node_, on = out.node_;
  nodes_.push_back([an, bn, on] {
    if (on->grad.empty()) return;
    double g = on->grad[0];
    if (an->needs_grad) {
      ensure_grad(*an);
      for (std::size_t i = 0; i < an->value.size(); ++i) an->grad[i] += g * bn->value[i];
    }
    if (bn->needs_grad) {
      ensure_grad(*bn);
      for (std::size_t i = 0; i < bn->value.size(); ++i) bn->grad[i] += g * an->value[i];
    }
  });
  return out;
}

Tensor Tape::sum(const Tensor& a) {
  check_on_tape("sum", a);
  Tensor out = make({}, a.node_->needs_grad);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) acc += a.at(i);
  out.node_->value[0] = acc;
  auto an = a.node_;
  auto on = out.node_;
  nodes_.push_back([an, on] {
    if (on->grad.empty() || !an->needs_grad) return;
    ensure_grad(*an);
    double g = on->grad[0];
    for (std::size_t i = 0; i < an->value.size(); ++i) an->grad[i] += g;
  });
  return out;
}

Tensor Tape::sum_squares(const Tensor& a) {
  check_on_tape("sum_squares", a);
  Tensor out = make({}, a.node_->needs_grad);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) acc += a.at(i) * a.at(i);
  out.node_->value[0] = acc;
  auto an = a.node_;
  auto on = out.node_;
  nodes_.push_back([an, on] {
    if (on->grad.empty() || !an->needs_grad) return;
    ensure_grad(*an);
    double g = on->grad[0];
    for (std::size_t i = 0; i < an->value.size(); ++i) an->grad[i] += 2.0 * g * an->value[i];
  });
  return out;
}

Tensor Tape::smul(const Tensor& a, const Tensor& s) {
  check_on_tape("smul", a);
  check_on_tape("smul", s);
  if (s.numel() != 1) {
    throw std::invalid_argument("smul: scalar tensor required, got " + shape_str(s.shape()));
  }
  Tensor out = make(a.shape(), a.node_->needs_grad || s.node_->needs_grad);
  const double k = s.item();
  for (std::size_t i = 0; i < a.numel(); ++i) out.node_->value[i] = a.at(i) * k;
  auto an = a.node_, sn = s.node_, on = out.node_;
  nodes_.push_back([an, sn, on] {
    if (on->grad.empty()) return;
    double k = sn->value[0];
    if (an->needs_grad) {
      ensure_grad(*an);
      for (std::size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += on->grad[i] * k;
    }
    if (sn->needs_grad) {
      ensure_grad(*sn);
      double acc = 0.0;
      for (std::size_t i = 0; i < on->grad.size(); ++i) acc += on->grad[i] * an->value[i];
      sn->grad[0] += acc;
    }
  });
  return out;
}

Tensor Tape::softmax(const Tensor& v) {
  check_on_tape("softmax", v);
  if (v.rank() != 1 || v.numel() == 0) {
    throw std::invalid_argument("softmax: nonempty rank-1 tensor required, got " +
                                shape_str(v.shape()));
  }
  Tensor out = make(v.shape(), v.node_->needs_grad);
  const std::size_t n = v.numel();
  double mx = v.at(0);
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, v.at(i));
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = std::exp(v.at(i) - mx);
    out.node_->value[i] = e;
    z += e;
  }
  for (std::size_t i = 0; i < n; ++i) out.node_->value[i] /= z;
  auto vn = v.node_;
  auto on = out.node_;
  nodes_.push_back([vn, on] {
    if (on->grad.empty() || !vn->needs_grad) return;
    ensure_grad(*vn);
    double gy = 0.0;
    for (std::size_t i = 0; i < on->value.size(); ++i) gy += on->grad[i] * on->value[i];
    for (std::size_t i = 0; i < on->value.size(); ++i) {
      vn->grad[i] += on->value[i] * (on->grad[i] - gy);
    }
  });
  return out;
}

Tensor Tape::emax(const std::vector<Tensor>& xs) {
  if (xs.empty()) throw std::invalid_argument("emax: at least one tensor required");
  bool needs = false;
  for (const auto& x : xs) {
    check_on_tape("emax", x);
    check_same_shape("emax", xs.front(), x);
    needs = needs || x.node_->needs_grad;
  }
  const std::size_t n = xs.front().numel();
  Tensor out = make(xs.front().shape(), needs);
  std::vector<std::uint32_t> argmax(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = xs[0].at(i);
    std::uint32_t bi = 0;
    for (std::uint32_t k = 1; k < xs.size(); ++k) {
      if (xs[k].at(i) > best) {
        best = xs[k].at(i);
        bi = k;
      }
    }
    out.node_->value[i] = best;
    argmax[i] = bi;
  }
  std::vector<std::shared_ptr<detail::TensorNode>> ins;
  ins.reserve(xs.size());
  for (const auto& x : xs) ins.push_back(x.node_);
  auto on = out.node_;
  nodes_.push_back([ins, on, argmax = std::move(argmax)] {
    if (on->grad.empty()) return;
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      auto& src = *ins[argmax[i]];
      if (!src.needs_grad) continue;
      ensure_grad(src);
      src.grad[i] += on->grad[i];
    }
  });
  return out;
}

Tensor Tape::concat(const std::vector<Tensor>& xs) {
  if (xs.empty()) throw std::invalid_argument("concat: at least one tensor required");
  std::size_t total = 0;
  bool needs = false;
  for (const auto& x : xs) {
    check_on_tape("concat", x);
    if (x.rank() > 1) {
      throw std::invalid_argument("concat: rank-0/1 tensors required, got " +
                                  shape_str(x.shape()));
    }
    total += x.numel();
    needs = needs || x.node_->needs_grad;
  }
  Tensor out = make({total}, needs);
  std::size_t off = 0;
  for (const auto& x : xs) {
    for (std::size_t i = 0; i < x.numel(); ++i) out.node_->value[off + i] = x.at(i);
    off += x.numel();
  }
  std::vector<std::shared_ptr<detail::TensorNode>> ins;
  ins.reserve(xs.size());
  for (const auto& x : xs) ins.push_back(x.node_);
  auto on = out.node_;
  nodes_.push_back([ins, on] {
    if (on->grad.empty()) return;
    std::size_t off = 0;
    for (auto& in : ins) {
      if (in->needs_grad) {
        ensure_grad(*in);
        for (std::size_t i = 0; i < in->value.size(); ++i) in->grad[i] += on->grad[off + i];
      }
      off += in->value.size();
    }
  });
  return out;
}

Tensor Tape::segment(const Tensor& v, std::size_t offset, std::size_t len) {
  check_on_tape("segment", v);
  if (v.rank() != 1 || offset + len > v.numel() || len == 0) {
    throw std::invalid_argument("segment: invalid range [" + std::to_string(offset) + ", " +
                                std::to_string(offset + len) + ") of " + shape_str(v.shape()));
  }
  Tensor out = make({len}, v.node_->needs_grad);
  for (std::size_t i = 0; i < len; ++i) out.node_->value[i] = v.at(offset + i);
  auto vn = v.node_;
  auto on = out.node_;
  nodes_.push_back([vn, on, offset] {
    if (on->grad.empty() || !vn->needs_grad) return;
    ensure_grad(*vn);
    for (std::size_t i = 0; i < on->grad.size(); ++i) vn->grad[offset + i] += on->grad[i];
  });
  return out;
}

Tensor Tape::index(const Tensor& v, std::size_t i) {
  check_on_tape("index", v);
  if (v.rank() != 1 || i >= v.numel()) {
    throw std::invalid_argument("index: position " + std::to_string(i) + " out of " +
                                shape_str(v.shape()));
  }
  Tensor out = make({}, v.node_->needs_grad);
  out.node_->value[0] = v.at(i);
  auto vn = v.node_;
  auto on = out.node_;
  nodes_.push_back([vn, on, i] {
    if (on->grad.empty() || !vn->needs_grad) return;
    ensure_grad(*vn);
    vn->grad[i] += on->grad[0];
  });
  return out;
}

Tensor Tape::row(const Tensor& m, std::size_t i) {
  check_on_tape("row", m);
  if (m.rank() != 2 || i >= m.shape()[0]) {
    throw std::invalid_argument("row: index " + std::to_string(i) + " out of " +
                                shape_str(m.shape()));
  }
  const std::size_t cols = m.shape()[1];
  Tensor out = make({cols}, m.node_->needs_grad);
  for (std::size_t j = 0; j < cols; ++j) out.node_->value[j] = m.at(i * cols + j);
  auto mn = m.node_;
  auto on = out.node_;
  nodes_.push_back([mn, on, i, cols] {
    if (on->grad.empty() || !mn->needs_grad) return;
    ensure_grad(*mn);
    for (std::size_t j = 0; j < cols; ++j) mn->grad[i * cols + j] += on->grad[j];
  });
  return out;
}

Tensor Tape::grid_cell(const Tensor& x, std::size_t r, std::size_t c) {
  check_on_tape("grid_cell", x);
  if (x.rank() != 3 || r >= x.shape()[0] || c >= x.shape()[1]) {
    throw std::invalid_argument("grid_cell: cell (" + std::to_string(r) + ", " +
                                std::to_string(c) + ") out of " + shape_str(x.shape()));
  }
  const std::size_t cols = x.shape()[1], depth = x.shape()[2];
  const std::size_t base = (r * cols + c) * depth;
  Tensor out = make({depth}, x.node_->needs_grad);
  for (std::size_t d = 0; d < depth; ++d) out.node_->value[d] = x.at(base + d);
  auto xn = x.node_;
  auto on = out.node_;
  nodes_.push_back([xn, on, base] {
    if (on->grad.empty() || !xn->needs_grad) return;
    ensure_grad(*xn);
    for (std::size_t d = 0; d < on->grad.size(); ++d) xn->grad[base + d] += on->grad[d];
  });
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (!loss.defined()) throw std::invalid_argument("backward: undefined loss");
  if (loss.numel() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar, got " +
                                shape_str(loss.shape()));
  }
  if (loss.node_->tape_id != id_) {
    throw std::invalid_argument("backward: loss was not produced on this tape");
  }
  ensure_grad(*loss.node_);
  loss.node_->grad[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
}

}  // namespace amnl

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace amnl {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {
struct TensorNode {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until touched by backward
  bool requires_grad = false;
  bool needs_grad = false;
  std::uint64_t tape_id = 0;  // 0 = leaf, otherwise the producing tape
};
}  // namespace detail

/// Dense row-major tensor of doubles. Value-semantic handle onto shared
/// storage so the tape can hold the same node a forward pass produced.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->value.size(); }

  const std::vector<double>& values() const { return node_->value; }
  std::vector<double>& values() { return node_->value; }
  double at(std::size_t i) const { return node_->value[i]; }
  // Scalar payload; requires numel() == 1.
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  const std::vector<double>& grad() const { return node_->grad; }
  std::vector<double>& grad_storage();
  void zero_grad();

  // Identity of the underlying storage, for caching and diagnostics.
  const void* id() const { return node_.get(); }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::TensorNode> node_;
  friend class Tape;
};

/// Dynamic reverse-mode tape. Ops append a backward closure; backward()
/// replays them once in reverse. A tape and its intermediates belong to a
/// single thread; distinct tapes are independent.
class Tape {
 public:
  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Elementwise, shapes must match exactly (no broadcasting).
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);
  Tensor scale(const Tensor& a, double k);
  Tensor add_const(const Tensor& a, double k);
  Tensor tanh(const Tensor& a);
  Tensor sigmoid(const Tensor& a);
  // 1.7159 * tanh(2x/3), the scaled hyperbolic tangent used as activation g().
  Tensor scaled_tanh(const Tensor& a);
  Tensor relu(const Tensor& a);
  Tensor clamp(const Tensor& a, double lo, double hi);

  // Linear algebra.
  Tensor matmul(const Tensor& a, const Tensor& b);   // [m,n]x[n,p] -> [m,p]
  Tensor matvec(const Tensor& a, const Tensor& v);   // [m,n]x[n] -> [m]
  Tensor dot(const Tensor& a, const Tensor& b);      // [n].[n] -> scalar
  Tensor sum(const Tensor& a);                       // -> scalar
  Tensor sum_squares(const Tensor& a);               // -> scalar

  // Multiply a tensor by a scalar tensor (gradient flows to both).
  Tensor smul(const Tensor& a, const Tensor& s);

  // Stable softmax over a rank-1 tensor (max-subtraction).
  Tensor softmax(const Tensor& v);

  // Elementwise max over >=1 equal-shape tensors; gradient routes to the
  // first argmax per element.
  Tensor emax(const std::vector<Tensor>& xs);

  // Concatenate rank-0/rank-1 tensors into one rank-1 tensor.
  Tensor concat(const std::vector<Tensor>& xs);

  // Structural gathers; backward scatters.
  Tensor segment(const Tensor& v, std::size_t offset, std::size_t len);
  Tensor index(const Tensor& v, std::size_t i);                 // rank-1 -> scalar
  Tensor row(const Tensor& m, std::size_t i);                   // rank-2 -> rank-1
  Tensor grid_cell(const Tensor& x, std::size_t r, std::size_t c);  // [G,G,D] -> [D]

  // Seeds d(loss)/d(loss)=1 and accumulates gradients into every tensor
  // reachable on this tape. Gradients add across uses; leaves keep their
  // accumulated grad until zero_grad().
  void backward(const Tensor& loss);

  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  Tensor make(Shape shape, bool needs_grad);
  void check_same_shape(const char* op, const Tensor& a, const Tensor& b) const;
  void check_on_tape(const char* op, const Tensor& t) const;

  std::vector<std::function<void()>> nodes_;
  std::uint64_t id_;
};

}  // namespace amnl

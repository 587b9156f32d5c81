// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

// Dense 64-bit tensors with define-by-run reverse-mode differentiation.
//
// Every op allocates a fresh output node that remembers its inputs and a
// backward rule. Calling backward() on a scalar walks the recorded graph in
// reverse topological order and accumulates gradients (+=) into every tensor
// that requires them. Leaf tensors created with requires_grad=true are the
// trainable parameters; they keep their gradient across backward calls until
// zero_grad() is invoked.
//
// Ops validate shapes eagerly and refuse to produce non-finite values.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mtsa {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

namespace detail {
struct Node;
struct NodeAccess;
}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;

  std::span<const double> values() const;
  // Only leaves may be written (initialisation, optimiser updates).
  std::span<double> mutable_values();
  double item() const;
  double operator()(std::size_t i) const;
  double operator()(std::size_t i, std::size_t j) const;

  bool requires_grad() const;
  bool is_leaf() const;
  bool has_grad() const;
  // Empty span when no gradient has reached this tensor yet.
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  /// Reverse pass from a scalar. Returns the number of recorded operations
  /// visited; each is visited exactly once.
  std::size_t backward() const;

  /// Copy of the values with no graph history.
  Tensor detach(bool requires_grad = false) const;

  bool same_node(const Tensor& other) const noexcept {
    return node_ == other.node_;
  }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  detail::Node& node() const;

  std::shared_ptr<detail::Node> node_;
  friend struct detail::NodeAccess;
};

// Linear algebra. A rank-1 left operand is treated as a row vector and the
// result is rank-1 as well.
Tensor matmul(const Tensor& a, const Tensor& b);

// Pointwise ops. add/sub accept identical shapes or a matrix on the left and
// a row-length vector on the right (bias broadcast). mul needs equal shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);  // relu'(0) = 0
Tensor sigmoid(const Tensor& a);

enum class ElementwiseOp { kTanh, kRelu, kSigmoid, kAdd, kMul, kScale };

/// Dispatcher over the pointwise family; `factor` is used by kScale only.
Tensor elementwise(ElementwiseOp op, std::span<const Tensor> inputs,
                   double factor = 1.0);

/// Softmax over the last axis. Positions where `mask` is false receive
/// exactly zero probability (equivalent to a -inf logit). An empty mask
/// means every position is live.
Tensor softmax(const Tensor& x, const std::vector<bool>& mask = {});

/// Concatenation along the last axis; other extents must agree.
Tensor concat(const Tensor& a, const Tensor& b);

/// out[i] = u^T T[i] v for T of shape k x d x d.
Tensor bilinear(const Tensor& u, const Tensor& t, const Tensor& v);

Tensor row(const Tensor& m, std::size_t index);
/// Stacks rank-1 rows into a matrix; undefined entries become zero rows.
Tensor stack_rows(const std::vector<Tensor>& rows, std::size_t width);
Tensor reshape(const Tensor& x, Shape shape);
Tensor sum(const Tensor& x);

/// Mean over rows of -log softmax(logits)[label], via log-sum-exp.
/// Accepts logits of shape [C] (one label) or [N x C].
Tensor softmax_cross_entropy(const Tensor& logits,
                             std::span<const int> labels);

// ---------------------------------------------------------------------------
// Finite-difference gradient checking.

struct GradCheckOptions {
  double step = 1e-4;
  double tolerance = 1e-4;
  // Denominator floor for the relative error, so coordinates whose true
  // gradient is zero are compared absolutely.
  double abs_floor = 1e-8;
};

struct GradCheckEntry {
  std::size_t tensor = 0;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  std::size_t checked = 0;
  // Coordinates whose central difference straddled a ReLU kink.
  std::size_t skipped = 0;
  double max_rel_error = 0.0;
  std::vector<GradCheckEntry> failures;
  bool passed() const { return failures.empty(); }
};

/// Compares the analytic gradient of the scalar `f` with respect to each
/// leaf in `inputs` against central differences. `f` must rebuild its graph
/// from the current leaf values on every call.
GradCheckReport grad_check(const std::function<Tensor()>& f,
                           std::span<Tensor> inputs,
                           const GradCheckOptions& options = {});

namespace detail {

// Test hook: builds a unary op with caller-supplied forward and derivative,
// used to exercise grad_check against a deliberately wrong rule.
Tensor custom_unary(const Tensor& a, double (*forward)(double),
                    double (*derivative)(double x, double y));

}  // namespace detail

}  // namespace mtsa

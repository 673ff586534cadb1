#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace numsarc::autodiff {

/// Row-major matrix of doubles; column vectors have cols == 1.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  static Tensor column(std::vector<double> values);

  std::size_t size() const { return data.size(); }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
};

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool freeze_first_row = false;  // used for the PAD embedding row

  Parameter() = default;
  Parameter(std::string n, Tensor v, bool freeze = false)
      : name(std::move(n)), value(std::move(v)), grad(value.rows, value.cols), freeze_first_row(freeze) {}
  void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
};

class Tape;

struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  Var constant(Tensor value);
  /// Gradients flow straight into param.grad.
  Var param(Parameter& param);
  Var push(Tensor value, Backward backward);

  const Tensor& value(std::size_t id) const;
  /// Gradient buffer of a node, allocated as zeros on first use.
  Tensor& grad(std::size_t id);
  const Tensor& grad_of(std::size_t id) const;

  /// Seeds d(output)/d(output) with `seed`; output must be 1x1.
  void backward(Var output, double seed = 1.0);
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    const Tensor* external_value = nullptr;
    Tensor* external_grad = nullptr;
    Backward backward;
    bool touched = false;
  };
  std::vector<Node> nodes_;
};

enum class Activation { Tanh, Sigmoid, Relu };

std::string activation_name(Activation a);
Activation parse_activation(const std::string& name);

Var matvec(Var W, Var x);
Var add(Var a, Var b);
Var hadamard(Var a, Var b);
Var sigmoid(Var x);
Var tanh(Var x);
Var relu(Var x);
Var activate(Var x, Activation a);
/// Stacks column vectors.
Var concat(const std::vector<Var>& parts);
/// Gathers table rows; a frozen first row receives no gradient.
Var embed(Tape& tape, Parameter& table, std::span<const std::size_t> indices);
/// input (S x d), filters (n x width*d), bias (n x 1) -> (S - width + 1) x n pre-activations.
Var conv1d(Var input, Var filters, Var bias, std::size_t width);
/// Column-wise maximum of a matrix -> column vector; ties go to the earliest row.
Var max_over_time(Var m);
/// Non-overlapping row windows of `size`, column-wise max.
Var max_pool_rows(Var m, std::size_t size);
/// Row r of a matrix as a column vector.
Var row(Var m, std::size_t r);
Var mean(const std::vector<Var>& parts);
/// Elementwise product with a constant mask (inverted dropout).
Var mask(Var x, Tensor mask);
/// Binary cross-entropy of a 1x1 probability against a 0/1 target, with clamping to [1e-7, 1 - 1e-7].
Var bce(Var y_hat, double target);

inline constexpr double kProbabilityClamp = 1e-7;

}  // namespace numsarc::autodiff

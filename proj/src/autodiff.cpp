#include "numsarc/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "numsarc/error.hpp"

namespace numsarc::autodiff {

namespace {

std::string shape(const Tensor& t) { return std::to_string(t.rows) + "x" + std::to_string(t.cols); }

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

}  // namespace

Tensor Tensor::column(std::vector<double> values) {
  Tensor t;
  t.rows = values.size();
  t.cols = 1;
  t.data = std::move(values);
  return t;
}

const Tensor& Var::value() const { return tape->value(id); }

Var Tape::constant(Tensor value) { return push(std::move(value), nullptr); }

Var Tape::param(Parameter& param) {
  Node node;
  node.external_value = &param.value;
  node.external_grad = &param.grad;
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Tape::push(Tensor value, Backward backward) {
  Node node;
  node.value = std::move(value);
  node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

const Tensor& Tape::value(std::size_t id) const {
  const auto& n = nodes_[id];
  return n.external_value != nullptr ? *n.external_value : n.value;
}

Tensor& Tape::grad(std::size_t id) {
  auto& n = nodes_[id];
  n.touched = true;
  if (n.external_grad != nullptr) return *n.external_grad;
  if (n.grad.size() != n.value.size()) n.grad = Tensor(n.value.rows, n.value.cols);
  return n.grad;
}

const Tensor& Tape::grad_of(std::size_t id) const {
  const auto& n = nodes_[id];
  return n.external_grad != nullptr ? *n.external_grad : n.grad;
}

void Tape::backward(Var output, double seed) {
  require(value(output.id).size() == 1, "backward needs a scalar output");
  grad(output.id).data[0] += seed;
  for (std::size_t i = output.id + 1; i-- > 0;) {
    if (nodes_[i].touched && nodes_[i].backward) nodes_[i].backward(*this, i);
  }
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Relu: return "relu";
  }
  return "tanh";
}

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "relu") return Activation::Relu;
  throw UsageError("unknown activation '" + name + "' (expected tanh, sigmoid or relu)");
}

Var matvec(Var W, Var x) {
  const auto& w = W.value();
  const auto& v = x.value();
  require(v.cols == 1 && w.cols == v.rows, "matvec shape mismatch: " + shape(w) + " * " + shape(v));
  Tensor out(w.rows, 1);
  for (std::size_t r = 0; r < w.rows; ++r) {
    double s = 0.0;
    const double* wr = &w.data[r * w.cols];
    for (std::size_t c = 0; c < w.cols; ++c) s += wr[c] * v.data[c];
    out.data[r] = s;
  }
  return W.tape->push(std::move(out), [W, x](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    const auto& w = t.value(W.id);
    const auto& v = t.value(x.id);
    auto& gw = t.grad(W.id);
    auto& gx = t.grad(x.id);
    for (std::size_t r = 0; r < w.rows; ++r) {
      const double gr = g.data[r];
      if (gr == 0.0) continue;
      double* gwr = &gw.data[r * w.cols];
      const double* wr = &w.data[r * w.cols];
      for (std::size_t c = 0; c < w.cols; ++c) {
        gwr[c] += gr * v.data[c];
        gx.data[c] += gr * wr[c];
      }
    }
  });
}

Var add(Var a, Var b) {
  const auto& x = a.value();
  const auto& y = b.value();
  require(x.same_shape(y), "add shape mismatch: " + shape(x) + " + " + shape(y));
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += y.data[i];
  return a.tape->push(std::move(out), [a, b](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self).data;
    auto& ga = t.grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g[i];
    auto& gb = t.grad(b.id);
    for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g[i];
  });
}

Var hadamard(Var a, Var b) {
  const auto& x = a.value();
  const auto& y = b.value();
  require(x.same_shape(y), "hadamard shape mismatch: " + shape(x) + " * " + shape(y));
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= y.data[i];
  return a.tape->push(std::move(out), [a, b](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self).data;
    const auto& x = t.value(a.id).data;
    const auto& y = t.value(b.id).data;
    auto& ga = t.grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g[i] * y[i];
    auto& gb = t.grad(b.id);
    for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g[i] * x[i];
  });
}

namespace {

// Elementwise op whose derivative is expressed through its output.
template <typename F, typename D>
Var unary(Var x, F f, D dfdy) {
  Tensor out = x.value();
  for (auto& v : out.data) v = f(v);
  return x.tape->push(std::move(out), [x, dfdy](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    const auto& y = t.value(self);
    auto& gx = t.grad(x.id);
    for (std::size_t i = 0; i < g.size(); ++i) gx.data[i] += g.data[i] * dfdy(y.data[i]);
  });
}

double logistic(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

}  // namespace

Var sigmoid(Var x) {
  return unary(x, logistic, [](double y) { return y * (1.0 - y); });
}

Var tanh(Var x) {
  return unary(x, [](double v) { return std::tanh(v); }, [](double y) { return 1.0 - y * y; });
}

Var relu(Var x) {
  return unary(x, [](double v) { return v > 0 ? v : 0.0; }, [](double y) { return y > 0 ? 1.0 : 0.0; });
}

Var activate(Var x, Activation a) {
  switch (a) {
    case Activation::Tanh: return tanh(x);
    case Activation::Sigmoid: return sigmoid(x);
    case Activation::Relu: return relu(x);
  }
  return tanh(x);
}

Var concat(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat of nothing");
  std::vector<double> values;
  for (const auto& p : parts) {
    require(p.value().cols == 1, "concat expects column vectors");
    values.insert(values.end(), p.value().data.begin(), p.value().data.end());
  }
  return parts.front().tape->push(Tensor::column(std::move(values)), [parts](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self).data;
    std::size_t offset = 0;
    for (const auto& p : parts) {
      auto& gp = t.grad(p.id);
      for (std::size_t i = 0; i < gp.size(); ++i) gp.data[i] += g[offset + i];
      offset += gp.size();
    }
  });
}

Var embed(Tape& tape, Parameter& table, std::span<const std::size_t> indices) {
  const auto& E = table.value;
  const std::size_t d = E.cols;
  Tensor out(indices.size(), d);
  for (std::size_t p = 0; p < indices.size(); ++p) {
    require(indices[p] < E.rows, "embedding index " + std::to_string(indices[p]) + " out of range");
    std::copy_n(&E.data[indices[p] * d], d, &out.data[p * d]);
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return tape.push(std::move(out), [&table, idx = std::move(idx)](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    const std::size_t d = table.value.cols;
    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (idx[p] == 0 && table.freeze_first_row) continue;
      double* dst = &table.grad.data[idx[p] * d];
      for (std::size_t c = 0; c < d; ++c) dst[c] += g.data[p * d + c];
    }
  });
}

Var conv1d(Var input, Var filters, Var bias, std::size_t width) {
  const auto& I = input.value();
  const auto& W = filters.value();
  const auto& b = bias.value();
  const std::size_t S = I.rows, d = I.cols, n = W.rows;
  require(width >= 1 && width <= S, "filter width " + std::to_string(width) + " exceeds sequence length " + std::to_string(S));
  require(W.cols == width * d, "filter shape " + shape(W) + " does not match width " + std::to_string(width) + " and d=" + std::to_string(d));
  require(b.rows == n && b.cols == 1, "conv bias shape mismatch");
  const std::size_t L = S - width + 1, span = width * d;
  Tensor out(L, n);
  for (std::size_t p = 0; p < L; ++p) {
    const double* window = &I.data[p * d];
    for (std::size_t f = 0; f < n; ++f) {
      const double* wf = &W.data[f * span];
      double s = b.data[f];
      for (std::size_t k = 0; k < span; ++k) s += wf[k] * window[k];
      out.data[p * n + f] = s;
    }
  }
  return input.tape->push(std::move(out), [input, filters, bias, width](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    const auto& I = t.value(input.id);
    const auto& W = t.value(filters.id);
    const std::size_t d = I.cols, n = W.rows, L = g.rows, span = width * d;
    auto& gI = t.grad(input.id);
    auto& gW = t.grad(filters.id);
    auto& gb = t.grad(bias.id);
    for (std::size_t p = 0; p < L; ++p) {
      const double* window = &I.data[p * d];
      double* gwindow = &gI.data[p * d];
      for (std::size_t f = 0; f < n; ++f) {
        const double gv = g.data[p * n + f];
        if (gv == 0.0) continue;
        gb.data[f] += gv;
        const double* wf = &W.data[f * span];
        double* gwf = &gW.data[f * span];
        for (std::size_t k = 0; k < span; ++k) {
          gwf[k] += gv * window[k];
          gwindow[k] += gv * wf[k];
        }
      }
    }
  });
}

Var max_over_time(Var m) {
  const auto& M = m.value();
  require(M.rows >= 1, "max-over-time pooling of an empty map");
  Tensor out(M.cols, 1);
  std::vector<std::size_t> arg(M.cols, 0);
  for (std::size_t c = 0; c < M.cols; ++c) {
    double best = M(0, c);
    for (std::size_t r = 1; r < M.rows; ++r) {
      if (M(r, c) > best) {
        best = M(r, c);
        arg[c] = r;
      }
    }
    out.data[c] = best;
  }
  return m.tape->push(std::move(out), [m, arg](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self).data;
    auto& gm = t.grad(m.id);
    for (std::size_t c = 0; c < g.size(); ++c) gm(arg[c], c) += g[c];
  });
}

Var max_pool_rows(Var m, std::size_t size) {
  const auto& M = m.value();
  require(size >= 1 && M.rows % size == 0,
          "pool size " + std::to_string(size) + " does not divide map length " + std::to_string(M.rows));
  const std::size_t L = M.rows / size;
  Tensor out(L, M.cols);
  std::vector<std::size_t> arg(L * M.cols);
  for (std::size_t w = 0; w < L; ++w) {
    for (std::size_t c = 0; c < M.cols; ++c) {
      std::size_t best = w * size;
      for (std::size_t r = w * size + 1; r < (w + 1) * size; ++r) {
        if (M(r, c) > M(best, c)) best = r;
      }
      arg[w * M.cols + c] = best;
      out(w, c) = M(best, c);
    }
  }
  return m.tape->push(std::move(out), [m, arg](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self);
    auto& gm = t.grad(m.id);
    for (std::size_t i = 0; i < g.size(); ++i) gm(arg[i], i % g.cols) += g.data[i];
  });
}

Var row(Var m, std::size_t r) {
  const auto& M = m.value();
  require(r < M.rows, "row index out of range");
  std::vector<double> values(M.data.begin() + static_cast<std::ptrdiff_t>(r * M.cols),
                             M.data.begin() + static_cast<std::ptrdiff_t>((r + 1) * M.cols));
  return m.tape->push(Tensor::column(std::move(values)), [m, r](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self).data;
    auto& gm = t.grad(m.id);
    for (std::size_t c = 0; c < g.size(); ++c) gm(r, c) += g[c];
  });
}

Var mean(const std::vector<Var>& parts) {
  require(!parts.empty(), "mean of nothing");
  Tensor out = parts.front().value();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto& v = parts[i].value();
    require(v.same_shape(out), "mean shape mismatch");
    for (std::size_t j = 0; j < out.size(); ++j) out.data[j] += v.data[j];
  }
  const double inv = 1.0 / static_cast<double>(parts.size());
  for (auto& v : out.data) v *= inv;
  return parts.front().tape->push(std::move(out), [parts, inv](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self).data;
    for (const auto& p : parts) {
      auto& gp = t.grad(p.id);
      for (std::size_t j = 0; j < g.size(); ++j) gp.data[j] += g[j] * inv;
    }
  });
}

Var mask(Var x, Tensor m) {
  require(x.value().same_shape(m), "mask shape mismatch");
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= m.data[i];
  return x.tape->push(std::move(out), [x, m = std::move(m)](Tape& t, std::size_t self) {
    const auto& g = t.grad_of(self).data;
    auto& gx = t.grad(x.id);
    for (std::size_t i = 0; i < g.size(); ++i) gx.data[i] += g[i] * m.data[i];
  });
}

Var bce(Var y_hat, double target) {
  require(y_hat.value().size() == 1, "bce expects a scalar prediction");
  require(target == 0.0 || target == 1.0, "bce target must be 0 or 1");
  const double raw = y_hat.value().data[0];
  const double p = std::clamp(raw, kProbabilityClamp, 1.0 - kProbabilityClamp);
  const double loss = -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
  const bool clamped = p != raw;
  return y_hat.tape->push(Tensor::column({loss}), [y_hat, target, p, clamped](Tape& t, std::size_t self) {
    if (clamped) return;
    const double g = t.grad_of(self).data[0];
    t.grad(y_hat.id).data[0] += g * (-(target / p) + (1.0 - target) / (1.0 - p));
  });
}

}  // namespace numsarc::autodiff

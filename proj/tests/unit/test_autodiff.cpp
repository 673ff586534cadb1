#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "numsarc/autodiff.hpp"
#include "numsarc/error.hpp"
#include "numsarc/rng.hpp"

using namespace numsarc;
using namespace numsarc::autodiff;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng) {
  Tensor t(r, c);
  for (auto& v : t.data) v = rng.normal(0, 0.7);
  return t;
}

// Builds a scalar from parameters; returns the worst relative gradient error against central differences.
double check_graph(std::vector<Parameter>& params, const std::function<Var(Tape&)>& build) {
  for (auto& p : params) p.zero_grad();
  {
    Tape tape;
    tape.backward(build(tape));
  }
  double worst = 0.0;
  const double eps = 1e-5;
  for (auto& p : params) {
    const Tensor analytic = p.grad;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      if (p.freeze_first_row && i < p.value.cols) continue;
      const double keep = p.value.data[i];
      p.value.data[i] = keep + eps;
      Tape up;
      const double fu = build(up).value().data[0];
      p.value.data[i] = keep - eps;
      Tape down;
      const double fd = build(down).value().data[0];
      p.value.data[i] = keep;
      const double numeric = (fu - fd) / (2 * eps);
      worst = std::max(worst, std::abs(numeric - analytic.data[i]) /
                                  std::max({std::abs(numeric), std::abs(analytic.data[i]), 1e-6}));
    }
  }
  return worst;
}

// Reduces a tensor to a scalar through a fixed random projection so every entry matters.
Var project(Tape& tape, Var x, const Tensor& weights) {
  Tensor flat(1, x.value().size());
  flat.data = weights.data;
  std::vector<Var> rows;
  for (std::size_t r = 0; r < x.value().rows; ++r) rows.push_back(row(x, r));
  return matvec(tape.constant(flat), concat(rows));
}

}  // namespace

TEST_CASE("elementwise and linear ops match finite differences") {
  Rng rng(1);
  std::vector<Parameter> ps;
  ps.emplace_back("W", random_tensor(3, 4, rng));
  ps.emplace_back("x", random_tensor(4, 1, rng));
  ps.emplace_back("b", random_tensor(3, 1, rng));
  ps.emplace_back("y", random_tensor(3, 1, rng));
  const Tensor proj = random_tensor(1, 3, rng);
  for (auto act : {Activation::Tanh, Activation::Sigmoid}) {
    const double err = check_graph(ps, [&](Tape& t) {
      const Var z = add(matvec(t.param(ps[0]), t.param(ps[1])), t.param(ps[2]));
      const Var h = hadamard(activate(z, act), t.param(ps[3]));
      return matvec(t.constant(proj), h);
    });
    CHECK(err < 1e-6);
  }
}

TEST_CASE("conv, pooling, concat, mean and embedding ops match finite differences") {
  Rng rng(2);
  std::vector<Parameter> ps;
  ps.emplace_back("E", random_tensor(5, 3, rng), true);
  for (std::size_t c = 0; c < 3; ++c) ps[0].value(0, c) = 0.0;
  ps.emplace_back("F", random_tensor(2, 2 * 3, rng));
  ps.emplace_back("fb", random_tensor(2, 1, rng));
  const std::vector<std::size_t> idx{3, 1, 4, 2, 0, 0, 0, 1, 2};
  const Tensor proj_a = random_tensor(1, 4, rng);
  const Tensor proj_b = random_tensor(1, 2 * 2, rng);
  const double err = check_graph(ps, [&](Tape& t) {
    const Var I = embed(t, ps[0], idx);
    const Var map = tanh(conv1d(I, t.param(ps[1]), t.param(ps[2]), 2));  // 8 x 2
    const Var pooled = max_pool_rows(map, 4);                            // 2 x 2
    const Var mot = max_over_time(map);                                  // 2 x 1
    const Var avg = mean({row(pooled, 0), row(pooled, 1)});
    const Var a = matvec(t.constant(proj_a), concat({mot, avg}));
    return add(a, project(t, pooled, proj_b));
  });
  CHECK(err < 1e-6);
}

TEST_CASE("frozen first embedding row receives no gradient") {
  Parameter E("E", Tensor(3, 2, 1.0), true);
  Tape tape;
  const std::vector<std::size_t> idx{0, 2, 0};
  const Var I = embed(tape, E, idx);
  Tensor w(1, 2, 1.0);
  const Var s = matvec(tape.constant(w), mean({row(I, 0), row(I, 1), row(I, 2)}));
  tape.backward(s);
  CHECK(E.grad(0, 0) == 0.0);
  CHECK(E.grad(2, 0) == doctest::Approx(1.0 / 3));
}

TEST_CASE("bce matches its analytic values and clamps") {
  Tape tape;
  const Var half = tape.constant(Tensor::column({0.5}));
  CHECK(bce(half, 1).value().data[0] == doctest::Approx(std::log(2.0)));
  CHECK(bce(half, 0).value().data[0] == doctest::Approx(std::log(2.0)));
  const Var one = tape.constant(Tensor::column({1.0}));
  CHECK(bce(one, 1).value().data[0] == doctest::Approx(-std::log(1 - 1e-7)));
  CHECK(std::isfinite(bce(one, 0).value().data[0]));
  CHECK_THROWS_AS(bce(half, 2), UsageError);
}

TEST_CASE("shape errors") {
  Tape tape;
  const Var a = tape.constant(Tensor(2, 3));
  const Var x = tape.constant(Tensor(2, 1));
  CHECK_THROWS_AS(matvec(a, x), UsageError);
  CHECK_THROWS_AS(add(a, x), UsageError);
  CHECK_THROWS_AS(conv1d(tape.constant(Tensor(3, 2)), tape.constant(Tensor(1, 8)), tape.constant(Tensor(1, 1)), 4),
                  UsageError);
  CHECK_THROWS_AS(max_pool_rows(tape.constant(Tensor(6, 1)), 4), UsageError);
  CHECK_THROWS_AS(max_over_time(tape.constant(Tensor(0, 1))), UsageError);
}

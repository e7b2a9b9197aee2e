// Copyright (c) 2026 The langadv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "langadv/autodiff.hpp"
#include "langadv/error.hpp"
#include "langadv/rng.hpp"

using namespace langadv;

namespace {

Tensor RandomTensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape), 0.0);
  for (double& x : t.data()) x = rng.Uniform(lo, hi);
  return t;
}

double CheckUnary(Var (*op)(const Var&), Tensor x) {
  const auto r = GradCheck(
      [op](std::span<const Var> v) {
        // weight the output so every coordinate gets a distinct upstream
        Var y = op(v[0]);
        Tensor w(y.value().shape(), 0.0);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + 0.1 * i;
        return Sum(Mul(y, Constant(w)));
      },
      {x});
  return r.max_relative_error;
}

}  // namespace

TEST_CASE("matmul forward by hand") {
  Var a = Constant(Tensor::FromRows({{1, 2}, {3, 4}}));
  Var b = Constant(Tensor::FromRows({{5, 6, 7}, {8, 9, 10}}));
  const Tensor c = MatMul(a, b).value();
  CHECK(c == Tensor::FromRows({{21, 24, 27}, {47, 54, 61}}));
  CHECK_THROWS_AS(MatMul(b, b), ShapeError);
}

TEST_CASE("elementwise ops forward") {
  Var a = Constant(Tensor::FromRows({{1, -2}}));
  Var b = Constant(Tensor::FromRows({{3, 4}}));
  CHECK(Add(a, b).value() == Tensor::FromRows({{4, 2}}));
  CHECK(Sub(a, b).value() == Tensor::FromRows({{-2, -6}}));
  CHECK(Mul(a, b).value() == Tensor::FromRows({{3, -8}}));
  CHECK(Scale(a, 2.0).value() == Tensor::FromRows({{2, -4}}));
  CHECK(Relu(a).value() == Tensor::FromRows({{1, 0}}));
  CHECK(Sum(a).value().item() == -1);
  CHECK(Exp(Constant(Tensor::Scalar(0.0))).value().item() == 1.0);
  CHECK(MeanOverRows(Constant(Tensor::FromRows({{1, 1}, {3, 3}}))).value() ==
        Tensor::FromRows({{2, 2}}));
  CHECK_THROWS_AS(Add(a, Constant(Tensor::FromRows({{1, 2, 3}}))), ShapeError);
}

TEST_CASE("log rejects non-positive input") {
  CHECK_THROWS_AS(Log(Constant(Tensor::Vector({1.0, 0.0}))), NumericalError);
  CHECK_THROWS_AS(Log(Constant(Tensor::Vector({-1.0}))), NumericalError);
}

TEST_CASE("overflowing exp is reported") {
  CHECK_THROWS_AS(Exp(Constant(Tensor::Scalar(1000.0))), NumericalError);
}

TEST_CASE("l2 normalize rows") {
  const Tensor y =
      L2NormalizeRows(Constant(Tensor::FromRows({{3, 4}, {0, 0}}))).value();
  CHECK(y.at(0, 0) == doctest::Approx(0.6));
  CHECK(y.at(0, 1) == doctest::Approx(0.8));
  CHECK(y.at(1, 0) == 0.0);
  CHECK(y.at(1, 1) == 0.0);
}

TEST_CASE("shared subexpressions accumulate") {
  Var x = Parameter(Tensor::Vector({3.0, -2.0}));
  Var y = Sum(Add(Mul(x, x), x));
  Backward(y);
  CHECK(x.grad()[0] == 7.0);
  CHECK(x.grad()[1] == -3.0);

  // a second backward starts from zero
  Backward(y);
  CHECK(x.grad()[0] == 7.0);
}

TEST_CASE("unreached nodes report zero gradient") {
  Var x = Parameter(Tensor::Vector({1.0, 2.0}));
  Var unused = Parameter(Tensor::Vector({5.0}));
  Backward(Sum(x));
  CHECK(unused.grad() == Tensor::Vector({0.0}));
  CHECK_FALSE(Constant(Tensor::Scalar(1)).requires_grad());
}

TEST_CASE("gradient checks per op") {
  Rng rng(1);
  CHECK(CheckUnary(&Relu, RandomTensor({3, 4}, rng)) < 1e-6);
  CHECK(CheckUnary(&Exp, RandomTensor({2, 3}, rng)) < 1e-6);
  CHECK(CheckUnary(&Log, RandomTensor({2, 3}, rng, 0.5, 2.0)) < 1e-6);
  CHECK(CheckUnary(&L2NormalizeRows, RandomTensor({3, 5}, rng)) < 1e-6);
  CHECK(CheckUnary(&MeanOverRows, RandomTensor({4, 3}, rng)) < 1e-6);

  const auto mm = GradCheck(
      [](std::span<const Var> v) {
        return Sum(Relu(Add(MatMul(v[0], v[1]), v[2])));
      },
      {RandomTensor({3, 4}, rng), RandomTensor({4, 2}, rng),
       RandomTensor({3, 2}, rng)});
  CHECK(mm.max_relative_error < 1e-6);
  CHECK(mm.coords_checked == 12 + 8 + 6);

  const auto bin = GradCheck(
      [](std::span<const Var> v) {
        return Sum(Mul(Sub(v[0], v[1]), Scale(v[0], 0.5)));
      },
      {RandomTensor({2, 2}, rng), RandomTensor({2, 2}, rng)});
  CHECK(bin.max_relative_error < 1e-6);

  const auto stack = GradCheck(
      [](std::span<const Var> v) {
        std::vector<Var> rows{v[0], v[1]};
        Var m = StackRows(rows);
        return Sum(Mul(m, m));
      },
      {RandomTensor({1, 3}, rng), RandomTensor({3}, rng)});
  CHECK(stack.max_relative_error < 1e-6);
}

TEST_CASE("scale gradient is identity forward") {
  Rng rng(2);
  const Tensor v = RandomTensor({2, 3}, rng);
  Var x = Parameter(v);
  Var y = ScaleGradient(x, -0.25);
  CHECK(y.value() == v);
  Backward(Sum(y));
  for (double g : x.grad().data()) CHECK(g == -0.25);
}

TEST_CASE("dropout") {
  Rng rng(4);
  Var x = Parameter(Tensor({1, 2000}, 1.0));
  Rng r0(9);
  Var same = Dropout(x, 0.0, r0);
  CHECK(same.value() == x.value());

  Var d = Dropout(x, 0.25, rng);
  int kept = 0;
  for (double v : d.value().data()) {
    if (v != 0.0) {
      ++kept;
      CHECK(v == doctest::Approx(1.0 / 0.75));
    }
  }
  CHECK(std::abs(kept - 1500) < 100);
  Backward(Sum(d));
  for (std::size_t i = 0; i < 2000; ++i) {
    CHECK(x.grad()[i] == d.value()[i]);
  }

  Rng a(5), b(5);
  CHECK(Dropout(x, 0.5, a).value() == Dropout(x, 0.5, b).value());
}

TEST_CASE("grad check subsampling is bounded") {
  Rng rng(8);
  GradCheckOptions o;
  o.max_coords_per_tensor = 5;
  const auto r = GradCheck(
      [](std::span<const Var> v) { return Sum(Mul(v[0], v[0])); },
      {RandomTensor({10, 10}, rng)}, o);
  CHECK(r.coords_checked == 5);
  CHECK(r.max_relative_error < 1e-6);
}

// Copyright 2026 The DCA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "dca/error.hpp"
#include "dca/gradcheck.hpp"
#include "dca/matrix.hpp"
#include "dca/optim.hpp"
#include "dca/params.hpp"
#include "dca/rng.hpp"
#include "dca/tape.hpp"
#include "test_util.hpp"

using dca::Matrix;
using dca::ParamStore;
using dca::Rng;
using dca::testing::random_matrix;
namespace ad = dca::ad;

TEST_CASE("matmul hand cases") {
  const Matrix m{{1.5, -2.0}, {0.25, 4.0}};
  CHECK(dca::matmul(Matrix::identity(2), m) == m);
  CHECK(dca::matmul(Matrix{{1, 2}, {3, 4}}, Matrix{{0}, {1}}) == Matrix{{2}, {4}});
  Rng rng(3);
  CHECK(dca::matmul(Matrix(3, 4), random_matrix(4, 2, rng)) == Matrix(3, 2));
}

TEST_CASE("matmul shape mismatch names both shapes") {
  try {
    dca::matmul(Matrix(2, 3), Matrix(2, 3));
    FAIL("expected a DimensionError");
  } catch (const dca::DimensionError& e) {
    const std::string what = e.what();
    CHECK(what.find("2x3") != std::string::npos);
    CHECK(what.find("matmul") != std::string::npos);
  }
}

TEST_CASE("matmul variants agree with explicit transposes") {
  Rng rng(11);
  const Matrix a = random_matrix(3, 4, rng), b = random_matrix(5, 4, rng), c = random_matrix(3, 5, rng);
  CHECK(dca::max_abs_diff(dca::matmul_nt(a, b), dca::matmul(a, dca::transpose(b))) == 0.0);
  CHECK(dca::max_abs_diff(dca::matmul_tn(a, c), dca::matmul(dca::transpose(a), c)) < 1e-15);
}

TEST_CASE("matmul is associative on random shapes") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const std::size_t p = 1 + rng.below(5), q = 1 + rng.below(5), r = 1 + rng.below(5),
                      s = 1 + rng.below(5);
    const Matrix a = random_matrix(p, q, rng), b = random_matrix(q, r, rng),
                 c = random_matrix(r, s, rng);
    CHECK(dca::max_abs_diff(dca::matmul(dca::matmul(a, b), c), dca::matmul(a, dca::matmul(b, c))) <
          1e-10);
  }
}

TEST_CASE("softmax_rows examples") {
  const Matrix half = dca::softmax_rows(Matrix{{0, 0}});
  CHECK(half(0, 0) == 0.5);
  CHECK(half(0, 1) == 0.5);

  const Matrix thirds = dca::softmax_rows(Matrix{{std::log(2.0), 0.0}});
  CHECK(thirds(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(thirds(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const Matrix big = dca::softmax_rows(Matrix{{1e8, 1e8, 1e8}});
  for (double v : big.data()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("softmax rows sum to one and ignore a per-row shift") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Matrix s = random_matrix(1 + rng.below(6), 1 + rng.below(8), rng, 20.0);
    const Matrix p = dca::softmax_rows(s);
    Matrix shifted = s;
    for (std::size_t r = 0; r < s.rows(); ++r) {
      const double c = rng.uniform(-50.0, 50.0);
      for (double& v : shifted.row(r)) v += c;
    }
    const Matrix q = dca::softmax_rows(shifted);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      double total = 0.0;
      for (double v : p.row(r)) {
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
    CHECK(dca::max_abs_diff(p, q) < 1e-12);
  }
}

TEST_CASE("backward: gradient of sum(W) is all ones, of |W|^2/2 is W") {
  Rng rng(5);
  ParamStore store;
  store.add("W", random_matrix(3, 4, rng));
  store.add("unused", random_matrix(2, 2, rng));
  {
    ad::Tape tape(store, &store.grads());
    tape.backward(ad::sum(tape.param("W")));
    CHECK(store.grad("W") == Matrix(3, 4, 1.0));
    CHECK(store.grad("unused") == Matrix(2, 2));
  }
  store.zero_grad();
  {
    ad::Tape tape(store, &store.grads());
    const ad::Var W = tape.param("W");
    tape.backward(ad::scale(ad::frobenius_dot(W, W), 0.5));
    CHECK(dca::max_abs_diff(store.grad("W"), store.value("W")) < 1e-15);
  }
}

TEST_CASE("backward twice on one tape is rejected") {
  ParamStore store;
  store.add("W", Matrix(2, 2, 1.0));
  ad::Tape tape(store, &store.grads());
  const ad::Var loss = ad::sum(tape.param("W"));
  tape.backward(loss);
  CHECK_THROWS_AS(tape.backward(loss), dca::DoubleBackwardError);
}

TEST_CASE("backward needs a scalar loss and a recording tape") {
  ParamStore store;
  store.add("W", Matrix(2, 2, 1.0));
  ad::Tape tape(store, &store.grads());
  CHECK_THROWS_AS(tape.backward(tape.param("W")), dca::DimensionError);
  ad::Tape inference(store);
  CHECK_THROWS_AS(inference.backward(ad::sum(inference.param("W"))), dca::Error);
}

TEST_CASE("fd_check: quadratic loss is exact up to round-off") {
  Rng rng(2);
  ParamStore store;
  store.add("W", random_matrix(3, 3, rng));
  const Matrix A = random_matrix(3, 3, rng);
  const dca::LossBuilder quad = [&](ad::Tape& t) {
    const ad::Var W = t.param("W");
    const ad::Var AW = ad::matmul(t.constant(A), W);
    return ad::frobenius_dot(AW, AW);
  };
  CHECK(dca::fd_check(store, "W", quad) < 1e-9);
}

TEST_CASE("fd_check: softmax cross-entropy toy") {
  Rng rng(4);
  ParamStore store;
  store.add("W", random_matrix(4, 6, rng));
  const Matrix x = random_matrix(1, 4, rng);
  const dca::LossBuilder ce = [&](ad::Tape& t) {
    return ad::nll(ad::matmul(t.constant(x), t.param("W")), 2);
  };
  CHECK(dca::fd_check(store, "W", ce) < 1e-6);
}

TEST_CASE("fd_compare flags a corrupted gradient") {
  Rng rng(4);
  ParamStore store;
  store.add("W", random_matrix(4, 6, rng));
  const Matrix x = random_matrix(1, 4, rng);
  const dca::LossBuilder ce = [&](ad::Tape& t) {
    return ad::nll(ad::matmul(t.constant(x), t.param("W")), 2);
  };
  Matrix g = dca::analytic_gradient(store, "W", ce);
  for (double& v : g.data()) v += 0.1;
  CHECK(dca::fd_compare(store, "W", ce, g).max_rel_error > 1e-2);
}

TEST_CASE("fd_check rejects a non-deterministic loss") {
  ParamStore store;
  store.add("W", Matrix(2, 2, 1.0));
  int calls = 0;
  const dca::LossBuilder flaky = [&](ad::Tape& t) {
    ++calls;
    return ad::scale(ad::sum(t.param("W")), 1.0 + 1e-3 * calls);
  };
  CHECK_THROWS_AS(dca::fd_check(store, "W", flaky), dca::OracleInvalidError);
}

namespace {

struct OpCase {
  const char* name;
  // Builds the op output from the two parameters "a" (p x q) and "b".
  std::function<ad::Var(ad::Tape&, ad::Var, ad::Var)> op;
  // Shape of "b" given (p, q).
  std::function<std::pair<std::size_t, std::size_t>(std::size_t, std::size_t)> b_shape;
};

std::vector<OpCase> op_cases() {
  using Shape = std::pair<std::size_t, std::size_t>;
  auto same = [](std::size_t p, std::size_t q) { return Shape{p, q}; };
  return {
      {"matmul", [](ad::Tape&, ad::Var a, ad::Var b) { return ad::matmul(a, b); },
       [](std::size_t, std::size_t q) { return Shape{q, 3}; }},
      {"matmul_nt", [](ad::Tape&, ad::Var a, ad::Var b) { return ad::matmul_nt(a, b); },
       [](std::size_t, std::size_t q) { return Shape{2, q}; }},
      {"transpose", [](ad::Tape&, ad::Var a, ad::Var) { return ad::transpose(a); }, same},
      {"add", [](ad::Tape&, ad::Var a, ad::Var b) { return ad::add(a, b); }, same},
      {"sub", [](ad::Tape&, ad::Var a, ad::Var b) { return ad::sub(a, b); }, same},
      {"add_row", [](ad::Tape&, ad::Var a, ad::Var b) { return ad::add_row(a, b); },
       [](std::size_t, std::size_t q) { return Shape{1, q}; }},
      {"mul", [](ad::Tape&, ad::Var a, ad::Var b) { return ad::mul(a, b); }, same},
      {"scale", [](ad::Tape&, ad::Var a, ad::Var) { return ad::scale(a, -1.7); }, same},
      {"one_minus", [](ad::Tape&, ad::Var a, ad::Var) { return ad::one_minus(a); }, same},
      {"add_scalar", [](ad::Tape&, ad::Var a, ad::Var) { return ad::add_scalar(a, 0.3); }, same},
      {"sigmoid", [](ad::Tape&, ad::Var a, ad::Var) { return ad::sigmoid(a); }, same},
      {"tanh", [](ad::Tape&, ad::Var a, ad::Var) { return ad::tanh(a); }, same},
      {"softmax_rows", [](ad::Tape&, ad::Var a, ad::Var) { return ad::softmax_rows(a); }, same},
      {"concat_cols", [](ad::Tape&, ad::Var a, ad::Var b) { return ad::concat_cols(a, b); },
       [](std::size_t p, std::size_t) { return Shape{p, 2}; }},
      {"row", [](ad::Tape&, ad::Var a, ad::Var) { return ad::row(a, a.rows() - 1); }, same},
      {"stack_rows",
       [](ad::Tape&, ad::Var a, ad::Var b) {
         const ad::Var rows[] = {ad::row(a, 0), b, ad::row(a, 0)};
         return ad::stack_rows(rows);
       },
       [](std::size_t, std::size_t q) { return Shape{1, q}; }},
      {"gather_rows",
       [](ad::Tape&, ad::Var a, ad::Var) {
         const std::size_t ids[] = {0, a.rows() - 1, 0};
         return ad::gather_rows(a, ids);
       },
       same},
      {"outer_flat",
       [](ad::Tape&, ad::Var a, ad::Var b) { return ad::outer_flat(ad::row(a, 0), b); },
       [](std::size_t, std::size_t) { return Shape{1, 3}; }},
      {"mean",
       [](ad::Tape&, ad::Var a, ad::Var b) {
         const ad::Var xs[] = {a, b, a};
         return ad::mean(xs);
       },
       same},
      {"sum", [](ad::Tape&, ad::Var a, ad::Var) { return ad::sum(a); }, same},
      {"frobenius_dot", [](ad::Tape&, ad::Var a, ad::Var b) { return ad::frobenius_dot(a, b); },
       same},
      {"nll",
       [](ad::Tape&, ad::Var a, ad::Var) { return ad::nll(ad::row(a, 0), a.cols() - 1); }, same},
      {"dropout",
       [](ad::Tape&, ad::Var a, ad::Var) {
         Rng rng(99);
         return ad::dropout(a, 0.3, rng);
       },
       same},
  };
}

}  // namespace

TEST_CASE("every differentiable op passes fd_check on random shapes") {
  const auto cases = op_cases();
  std::size_t checks = 0;
  for (const auto& c : cases) {
    CAPTURE(c.name);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed * 131 + 7);
      const std::size_t p = 1 + rng.below(4), q = 1 + rng.below(4);
      const auto [br, bc] = c.b_shape(p, q);
      ParamStore store;
      store.add("a", random_matrix(p, q, rng));
      store.add("b", random_matrix(br, bc, rng));
      // Project the output onto a fixed random direction so every entry
      // contributes to the scalar loss.
      Matrix probe;
      const dca::LossBuilder build = [&](ad::Tape& t) {
        const ad::Var out = c.op(t, t.param("a"), t.param("b"));
        if (probe.empty()) {
          Rng prng(seed);
          probe = random_matrix(out.rows(), out.cols(), prng);
        }
        return ad::frobenius_dot(out, t.constant(probe));
      };
      for (const char* param : {"a", "b"}) {
        CAPTURE(param);
        CAPTURE(seed);
        CHECK(dca::fd_check(store, param, build) < 1e-4);
        ++checks;
      }
    }
  }
  CHECK(checks >= 100);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Rng rng(1);
  ParamStore store;
  store.add("W", random_matrix(3, 3, rng));
  const Matrix before = store.value("W");
  dca::adam_step(store, {});
  CHECK(store.value("W") == before);
  CHECK(store.step() == 1);
}

TEST_CASE("adam: first step on unit gradient moves by lr") {
  ParamStore store;
  store.add("W", Matrix(1, 1, 0.5));
  store.grad("W")[0] = 1.0;
  dca::adam_step(store, {});
  // m_hat = 1, v_hat = 1, so the step is lr / (1 + eps).
  CHECK(store.value("W")[0] - 0.5 == doctest::Approx(-3e-4 / (1.0 + 1e-8)).epsilon(1e-12));
  CHECK(store.grad("W")[0] == 0.0);
}

TEST_CASE("adam matches a scalar reimplementation over several steps") {
  ParamStore store;
  store.add("w", Matrix(1, 1, 1.0));
  double w = 1.0, m = 0.0, v = 0.0;
  const double lr = 1e-2, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int t = 1; t <= 5; ++t) {
    const double g = 2.0 * w - 0.3 * t;
    store.grad("w")[0] = g;
    dca::adam_step(store, {lr, b1, b2, eps});
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    w -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
    CHECK(store.value("w")[0] == doctest::Approx(w).epsilon(1e-13));
  }
}

TEST_CASE("adam aborts on a NaN gradient, naming the parameter") {
  ParamStore store;
  store.add("dec.O", Matrix(2, 2));
  store.grad("dec.O")(1, 1) = std::nan("");
  try {
    dca::adam_step(store, {});
    FAIL("expected a NumericError");
  } catch (const dca::NumericError& e) {
    CHECK(std::string(e.what()).find("dec.O") != std::string::npos);
  }
}

TEST_CASE("adam steps are reproducible") {
  auto run = [] {
    Rng rng(21);
    ParamStore store;
    store.add("W", random_matrix(4, 4, rng));
    for (int step = 0; step < 3; ++step) {
      store.grad("W") = random_matrix(4, 4, rng);
      dca::adam_step(store, {});
    }
    return store.value("W");
  };
  CHECK(run() == run());
}

TEST_CASE("rng: equal seeds give equal streams, derived streams differ") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  CHECK(Rng::derive(42, 1, 0).next() != Rng::derive(42, 2, 0).next());
  CHECK(Rng::derive(42, 1, 0).next() != Rng::derive(42, 1, 1).next());
  // SplitMix64 reference output for seed 0.
  CHECK(Rng(0).next() == 0xe220a8397b1dcdafULL);
}

TEST_CASE("rng: below() stays in range and covers it") {
  Rng rng(8);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[rng.below(7)];
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("glorot bounds and parameter registry contracts") {
  Rng rng(9);
  const Matrix w = dca::glorot_uniform(30, 10, rng);
  const double a = std::sqrt(6.0 / 40.0);
  for (double v : w.data()) CHECK(std::abs(v) <= a);
  ParamStore store;
  store.add("x", Matrix(2, 3));
  CHECK_THROWS_AS(store.add("x", Matrix(1, 1)), dca::Error);
  CHECK(store.grad("x").same_shape(store.value("x")));
}

TEST_CASE("checkpoint round trip is exact and byte-stable") {
  Rng rng(12);
  ParamStore store;
  store.add("embed", random_matrix(5, 3, rng));
  store.add("dca.L0", random_matrix(3, 3, rng));
  store.grad("embed") = random_matrix(5, 3, rng);
  dca::adam_step(store, {});
  const auto dir = dca::testing::scratch_dir("ckpt");
  dca::write_checkpoint(dir / "a.bin", dca::export_store(store, true));
  const ParamStore back = dca::import_store(dca::read_checkpoint(dir / "a.bin"));
  CHECK(back.names() == store.names());
  for (std::size_t i = 0; i < store.size(); ++i) {
    CHECK(back.value(i) == store.value(i));
    CHECK(back.first_moments()[i] == store.first_moments()[i]);
    CHECK(back.second_moments()[i] == store.second_moments()[i]);
  }
  CHECK(back.step() == store.step());

  dca::write_checkpoint(dir / "b.bin", dca::export_store(back, true));
  auto bytes = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::vector<char>(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(bytes(dir / "a.bin") == bytes(dir / "b.bin"));
}

TEST_CASE("checkpoint header is a tagged little-endian layout") {
  ParamStore store;
  store.add("w", Matrix(1, 1, 1.0));
  const auto dir = dca::testing::scratch_dir("ckpt_layout");
  dca::write_checkpoint(dir / "w.bin", dca::export_store(store, false));
  std::ifstream in(dir / "w.bin", std::ios::binary);
  const std::vector<unsigned char> b(std::istreambuf_iterator<char>(in), {});
  REQUIRE(b.size() >= 8 + 4 + 4 + 4 + 1 + 16 + 8);
  CHECK(std::string(b.begin(), b.begin() + 7) == "DCACKPT");
  CHECK(b[8] == dca::kCheckpointVersion);
  // 1.0 as IEEE-754 binary64, little-endian.
  const std::vector<unsigned char> one = {0, 0, 0, 0, 0, 0, 0xf0, 0x3f};
  CHECK(std::vector<unsigned char>(b.end() - 8, b.end()) == one);
}

TEST_CASE("reading a damaged checkpoint fails loudly") {
  const auto dir = dca::testing::scratch_dir("ckpt_bad");
  std::ofstream(dir / "bad.bin", std::ios::binary) << "not a checkpoint";
  CHECK_THROWS_AS(dca::read_checkpoint(dir / "bad.bin"), dca::Error);
}

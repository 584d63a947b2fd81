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
#include <vector>

#include "dca/error.hpp"
#include "dca/model.hpp"
#include "dca/ortho.hpp"
#include "ortho_fixtures.hpp"
#include "test_util.hpp"

using dca::Matrix;
using dca::ParamStore;
using dca::Rng;
namespace ortho = dca::ortho;
namespace ad = dca::ad;

TEST_CASE("r_beta: hand values") {
  const std::vector<Matrix> two_i = {2.0 * Matrix::identity(2)};
  CHECK(ortho::r_beta(two_i, 0.01) == doctest::Approx(0.1225).epsilon(1e-14));
  CHECK(ortho::r_beta(two_i, 0.02) == doctest::Approx(2 * 0.1225).epsilon(1e-14));
  Rng rng(1);
  const auto family = dca::testing::orthonormal_family(4, 3, rng);
  CHECK(std::abs(ortho::r_beta(family, 0.01)) < 1e-28);
}

TEST_CASE("r_beta_grad: hand value and stationarity") {
  const std::vector<Matrix> two_i = {2.0 * Matrix::identity(2)};
  const Matrix g = ortho::r_beta_grad(two_i, 0.01, 0);
  CHECK(dca::max_abs_diff(g, 0.14 * Matrix::identity(2)) < 1e-15);
  Rng rng(2);
  const auto family = dca::testing::orthonormal_family(3, 2, rng);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const Matrix gi = ortho::r_beta_grad(family, 0.01, i);
    for (double v : gi.data()) CHECK(std::abs(v) < 1e-15);
  }
}

TEST_CASE("r_beta_grad matches central differences of r_beta") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    std::vector<Matrix> Ls;
    for (int k = 0; k < 3; ++k) Ls.push_back(dca::testing::random_matrix(3, 3, rng));
    for (std::size_t i = 0; i < Ls.size(); ++i) {
      const Matrix g = ortho::r_beta_grad(Ls, 0.01, i);
      for (std::size_t e = 0; e < g.size(); ++e) {
        const double h = 1e-5, x = Ls[i][e];
        Ls[i][e] = x + h;
        const double up = ortho::r_beta(Ls, 0.01);
        Ls[i][e] = x - h;
        const double down = ortho::r_beta(Ls, 0.01);
        Ls[i][e] = x;
        const double numeric = (up - down) / (2 * h);
        CHECK(std::abs(g[e] - numeric) / (std::abs(numeric) + 1e-8) < 1e-6);
      }
    }
  }
}

TEST_CASE("ortho_update: hand value") {
  std::vector<Matrix> Ls = {2.0 * Matrix::identity(2)};
  ortho::ortho_update(Ls, 0.01);
  CHECK(dca::max_abs_diff(Ls[0], 1.86 * Matrix::identity(2)) < 1e-14);
}

TEST_CASE("ortho_update leaves orthonormal families fixed") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (std::size_t d : {4, 8}) {
      for (std::size_t K : {2, 3}) {
        Rng rng(seed);
        const auto family = dca::testing::orthonormal_family(d, K, rng);
        for (auto mode : {ortho::Mode::kSimultaneous, ortho::Mode::kSequential}) {
          auto Ls = family;
          ortho::ortho_update(Ls, 0.01, mode);
          for (std::size_t k = 0; k < K; ++k) CHECK(dca::max_abs_diff(Ls[k], family[k]) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("simultaneous update is a gradient step: L_i - grad_i") {
  Rng rng(3);
  std::vector<Matrix> Ls;
  for (int k = 0; k < 3; ++k) Ls.push_back(dca::testing::random_matrix(4, 4, rng));
  auto updated = Ls;
  ortho::ortho_update(updated, 0.05);
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    const Matrix expect = Ls[i] - ortho::r_beta_grad(Ls, 0.05, i);
    CHECK(dca::max_abs_diff(updated[i], expect) < 1e-12);
  }
  auto sequential = Ls;
  ortho::ortho_update(sequential, 0.05, ortho::Mode::kSequential);
  CHECK(dca::max_abs_diff(sequential[0], updated[0]) < 1e-15);
  CHECK(dca::max_abs_diff(sequential[2], updated[2]) > 1e-6);
}

TEST_CASE("iterating the update drives the family to orthonormality") {
  Rng rng(4);
  auto Ls = dca::testing::gaussian_family(8, 3, rng);
  double prev = ortho::r_beta(Ls, 0.01);
  bool monotone = true;
  for (int it = 0; it < 1000; ++it) {
    ortho::ortho_update(Ls, 0.01);
    const double r = ortho::r_beta(Ls, 0.01);
    monotone = monotone && r <= prev;
    prev = r;
  }
  CHECK(monotone);
  const Matrix G = ortho::gram(Ls);
  CHECK(dca::max_abs_diff(G, Matrix::identity(3)) < 1e-3);
}

TEST_CASE("loss-term path shares gradients with the analytic formula") {
  Rng rng(5);
  dca::ModelConfig cfg;
  cfg.vocab_size = 10;
  cfg.frame_dim = 3;
  cfg.hidden = 4;
  cfg.perspectives = 3;
  ParamStore store = dca::init_params(cfg, 1);
  const auto Ls = ortho::metrics_of(store);
  REQUIRE(Ls.size() == 3);
  const double R = ortho::accumulate_regularizer(store, 0.01, store.grads());
  CHECK(R == doctest::Approx(ortho::r_beta(Ls, 0.01)).epsilon(1e-13));
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(dca::max_abs_diff(store.grad(dca::names::metric(k)), ortho::r_beta_grad(Ls, 0.01, k)) <
          1e-14);
  }
  CHECK(store.grad(dca::names::kEmbed) == Matrix(10, 4));
}

TEST_CASE("apply_post_update honours enabled and mode") {
  dca::ModelConfig cfg;
  cfg.vocab_size = 10;
  cfg.frame_dim = 3;
  cfg.hidden = 4;
  ParamStore store = dca::init_params(cfg, 1);
  const auto before = ortho::metrics_of(store);
  ortho::OrthoConfig off;
  off.enabled = false;
  ortho::apply_post_update(store, off);
  CHECK(ortho::metrics_of(store) == before);
  ortho::OrthoConfig loss_term;
  loss_term.mode = ortho::Mode::kLossTerm;
  ortho::apply_post_update(store, loss_term);
  CHECK(ortho::metrics_of(store) == before);
  ortho::apply_post_update(store, {});
  auto expect = before;
  ortho::ortho_update(expect, 0.01);
  CHECK(ortho::metrics_of(store) == expect);
}

TEST_CASE("mode names round-trip") {
  for (auto m : {ortho::Mode::kSimultaneous, ortho::Mode::kSequential, ortho::Mode::kLossTerm}) {
    CHECK(ortho::mode_from_string(ortho::to_string(m)) == m);
  }
  CHECK_THROWS_AS(ortho::mode_from_string("sideways"), dca::UsageError);
}

TEST_CASE("gram and off-diagonal mass") {
  const std::vector<Matrix> Ls = {Matrix{{1, 0}, {0, 0}}, Matrix{{1, 1}, {0, 0}}};
  const Matrix G = ortho::gram(Ls);
  CHECK(G == Matrix{{1, 1}, {1, 2}});
  CHECK(ortho::off_diagonal_mass(G) == 2.0);
}

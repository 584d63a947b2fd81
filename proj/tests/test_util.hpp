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

// Shared fixtures for the unit tests and the acceptance binary.

#ifndef DCA_TESTS_TEST_UTIL_HPP_
#define DCA_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dca/corpus.hpp"
#include "dca/matrix.hpp"
#include "dca/rng.hpp"

namespace dca::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = scale * rng.uniform(-1.0, 1.0);
  return m;
}

/// Instance with n random frames of dimension d_f, a context of m token ids
/// and the given target, all ids drawn from [4, vocab).
inline corpus::Instance tiny_instance(std::size_t n, std::size_t d_f, std::size_t m,
                                      std::size_t target_len, std::size_t vocab, Rng& rng) {
  corpus::Instance inst;
  inst.id = "tiny";
  inst.video_id = "v";
  inst.frames = random_matrix(n, d_f, rng);
  for (std::size_t i = 0; i < m; ++i) {
    inst.context.push_back(corpus::kNumReserved + rng.below(vocab - corpus::kNumReserved));
  }
  for (std::size_t i = 0; i < target_len; ++i) {
    inst.target.push_back(corpus::kNumReserved + rng.below(vocab - corpus::kNumReserved));
  }
  return inst;
}

/// Fresh directory under the system temp dir, emptied if it exists.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dca_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace dca::testing

#endif  // DCA_TESTS_TEST_UTIL_HPP_

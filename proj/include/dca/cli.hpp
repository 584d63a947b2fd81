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

#ifndef DCA_CLI_HPP_
#define DCA_CLI_HPP_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "dca/matrix.hpp"

namespace dca::cli {

/// Runs one command. `args` excludes the program name. Returns the process
/// exit code: 0 on success, 2 on a usage error, 1 on any other failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Full-precision CSV (one matrix row per line).
void write_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_csv(const std::filesystem::path& path);

/// Binary grayscale PGM, min -> black and max -> white, each entry drawn as
/// a cell x cell block.
void write_pgm(const std::filesystem::path& path, const Matrix& m, std::size_t cell = 16);

}  // namespace dca::cli

#endif  // DCA_CLI_HPP_

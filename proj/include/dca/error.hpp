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

#ifndef DCA_ERROR_HPP_
#define DCA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dca {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// backward() was invoked on a tape that has already been differentiated.
class DoubleBackwardError : public Error {
 public:
  using Error::Error;
};

/// The finite-difference oracle cannot be trusted (loss is not reproducible).
class OracleInvalidError : public Error {
 public:
  using Error::Error;
};

/// A NaN/Inf showed up in a loss or gradient.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data.
class CorpusError : public Error {
 public:
  using Error::Error;
};

/// The training corpus has too few distinct comments to fill a candidate set.
class CorpusTooSmallError : public CorpusError {
 public:
  using CorpusError::CorpusError;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace dca

#endif  // DCA_ERROR_HPP_

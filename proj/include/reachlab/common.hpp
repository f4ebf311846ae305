// Copyright 2026 The reachlab Authors
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

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace reachlab {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Error codes surfaced through the C API.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kParse = 2,
  kIo = 3,
  kNumeric = 4,
  kInternal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void check(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

inline void check_arg(bool ok, const std::string& what) {
  check(ok, ErrorCode::kInvalidArgument, what);
}

}  // namespace reachlab

// Copyright 2026 The FreshReplay Authors.
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

#ifndef FRESHREPLAY_ERROR_HPP
#define FRESHREPLAY_ERROR_HPP

#include <stdexcept>
#include <string>

namespace freshreplay {

/// Error categories. Values are stable: the C API returns them verbatim.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kParse = 2,
  kValidation = 3,
  kNotFound = 4,
  kEmpty = 5,
  kFrozenBase = 6,
  kSupportViolation = 7,
  kIo = 8,
  kOutOfRange = 9,
  kState = 10,
  kInternal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace freshreplay

#endif  // FRESHREPLAY_ERROR_HPP

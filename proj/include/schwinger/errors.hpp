// Copyright 2026 The schwinger-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace schwinger {

// Validation errors map to exit code 1, numerical failures to exit code 2.
enum class ErrorClass { validation, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), cls_(cls), code_(std::move(code)) {}

  ErrorClass error_class() const noexcept { return cls_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorClass cls_;
  std::string code_;
};

inline Error validation_error(const std::string& code, const std::string& what) {
  return Error(ErrorClass::validation, code, what);
}

inline Error numerical_error(const std::string& code, const std::string& what) {
  return Error(ErrorClass::numerical, code, what);
}

}  // namespace schwinger

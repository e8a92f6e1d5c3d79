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

#include "catch_amalgamated.hpp"

#include <string>

#include "schwinger/errors.hpp"

inline auto has_code(const std::string& code) {
  return Catch::Matchers::Predicate<schwinger::Error>([code](const schwinger::Error& e) { return e.code() == code; },
                                                      "error code " + code);
}

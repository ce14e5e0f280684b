// Copyright 2026 The multiconf Authors
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

// The `multiconf` command line: validate, solve, diagnose, stats.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace multiconf {

inline constexpr std::string_view kVersion = "0.1.0";

// Stable exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUnsat = 1,
  kExitInputError = 2,
  kExitUnknown = 3,
  kExitBackgroundInconsistent = 4,
  kExitVerificationFailure = 5,
};

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace multiconf

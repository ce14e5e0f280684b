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

#include <stdexcept>
#include <string>

namespace multiconf {

// Raised for malformed models: bad bank rows, out-of-range references,
// duplicate ids. Messages name the offending field or row.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a diagnosis precondition fails because the fixed background
// is inconsistent on its own.
class BackgroundInconsistent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A consistency check hit its node/time limit during diagnosis.
class CheckUnknown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration handed in from outside failed re-verification.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace multiconf

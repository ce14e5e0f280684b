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

// One satisfying and one violating configuration per exam rule.

#include <string>
#include <vector>

#include "multiconf/model.hpp"

namespace multiconf::testing {

struct Witness {
  std::string rule;
  Expr expr;
  MultiConfiguration good;
  MultiConfiguration bad;
};

// Eight questions, k = 2, l = 4.
const QuestionBank& witness_bank();
std::vector<Witness> witnesses();

}  // namespace multiconf::testing

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

// JSON task file: sections `bank`, `instances`, `requirements`,
// `constraints`. Expressions serialize as nested tagged objects; see
// docs/task-format.md and schema/task.schema.json.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "multiconf/model.hpp"

namespace multiconf {

using json = nlohmann::json;

// Parse errors throw ModelError carrying a JSON-pointer location.
Expr expr_from_json(const json& j, const std::string& where = "");
Term term_from_json(const json& j, const std::string& where = "");
Scope scope_from_json(const json& j, const std::string& where = "");
Predicate predicate_from_json(const json& j, const std::string& where = "");
InstanceRef instance_from_json(const json& j, const std::string& where = "");
Owner owner_from_json(const json& j, const std::string& where = "");
Rational rational_from_json(const json& j, const std::string& where = "");

json to_json(const Expr& e);
json to_json(const Term& t);
json to_json(const Scope& s);
json to_json(const Predicate& p);
json to_json(const InstanceRef& r);
json to_json(const Owner& o);
json to_json(const Rational& r);

std::vector<Question> bank_from_json(const json& j, const std::string& where = "/bank");
std::vector<Requirement> requirements_from_json(const json& arr,
                                                const std::string& where = "/requirements");
std::vector<NamedConstraint> constraints_from_json(const json& arr,
                                                   const std::string& where = "/constraints");

// Reads a whole task document. The `templates` section, if present, is
// ignored here; the exam module compiles it.
MultiConfigTask task_from_json(const json& doc);
json task_to_json(const MultiConfigTask& task);

// Reads and parses a JSON file; syntax errors become ModelError with the
// line and column.
json read_json_file(const std::filesystem::path& path);

}  // namespace multiconf

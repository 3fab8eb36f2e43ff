/*
 * Copyright 2026 The anovadistill Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ANOVADISTILL_REPORT_JSON_H_
#define ANOVADISTILL_REPORT_JSON_H_

#include <string>

#include "json.hpp"

namespace anovadistill {

// Writes `doc` with two-space indentation and a trailing newline, creating
// parent directories.
void WriteJsonFile(const std::string& path, const nlohmann::json& doc);
void WriteTextFile(const std::string& path, const std::string& text);

// `what` names the file in error messages ("config file", ...).
nlohmann::json ReadJsonFile(const std::string& path, const std::string& what);

// {"created": <UTC ISO-8601>, "wall_seconds": ..., "tool": ...}. Kept apart
// from the reproducible part of every report.
nlohmann::json MetadataBlock(double wall_seconds);

// Shortest round-trip decimal for CSV cells.
std::string FormatDouble(double v);

}  // namespace anovadistill

#endif  // ANOVADISTILL_REPORT_JSON_H_

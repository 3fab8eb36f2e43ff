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

#ifndef ANOVADISTILL_MODEL_IO_H_
#define ANOVADISTILL_MODEL_IO_H_

#include <string>
#include <vector>

#include "json.hpp"

#include "anovadistill/anova_model.h"
#include "anovadistill/dataset.h"

namespace anovadistill {

inline constexpr char kModelFormat[] = "anovadistill-model";
inline constexpr int kModelVersion = 1;

nlohmann::json FeatureSpecsToJson(const std::vector<FeatureSpec>& specs);
std::vector<FeatureSpec> FeatureSpecsFromJson(const nlohmann::json& doc);

nlohmann::json ModelToJson(const AnovaModel& model);
AnovaModel ModelFromJson(const nlohmann::json& doc);

void SaveModel(const AnovaModel& model, const std::string& path);
AnovaModel LoadModel(const std::string& path);

}  // namespace anovadistill

#endif  // ANOVADISTILL_MODEL_IO_H_

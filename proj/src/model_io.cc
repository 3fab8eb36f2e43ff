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

#include "anovadistill/model_io.h"

#include <fstream>
#include <memory>

#include "anovadistill/error.h"
#include "anovadistill/grid_component.h"
#include "anovadistill/mlp_component.h"
#include "anovadistill/report_json.h"

namespace anovadistill {

using json = nlohmann::json;

json FeatureSpecsToJson(const std::vector<FeatureSpec>& specs) {
  json out = json::array();
  for (const auto& s : specs) {
    out.push_back({{"name", s.name},
                   {"kind", FeatureKindName(s.kind)},
                   {"raw_min", s.raw_min},
                   {"raw_max", s.raw_max}});
  }
  return out;
}

std::vector<FeatureSpec> FeatureSpecsFromJson(const json& doc) {
  std::vector<FeatureSpec> specs;
  for (const auto& s : doc) {
    FeatureSpec spec;
    spec.name = s.at("name").get<std::string>();
    spec.kind = ParseFeatureKind(s.value("kind", std::string("continuous")));
    spec.raw_min = s.value("raw_min", 0.0);
    spec.raw_max = s.value("raw_max", 1.0);
    specs.push_back(std::move(spec));
  }
  return specs;
}

json ModelToJson(const AnovaModel& model) {
  json comps = json::array();
  for (const auto& [j, c] : model.components()) comps.push_back(c->ToJson());
  const FitDiagnostics& d = model.diagnostics();
  return {{"format", kModelFormat},
          {"version", kModelVersion},
          {"beta0", model.beta0()},
          {"identifiable", model.identifiable()},
          {"features", FeatureSpecsToJson(model.specs())},
          {"components", comps},
          {"diagnostics",
           {{"solver", d.solver},
            {"parameters", d.parameters},
            {"iterations", d.iterations},
            {"train_mse", d.train_mse},
            {"target_variance", d.target_variance},
            {"grad_norm", d.grad_norm},
            {"transform_change", d.transform_change}}}};
}

AnovaModel ModelFromJson(const json& doc) {
  try {
    if (doc.at("format") != kModelFormat) {
      throw InvalidArgumentError("not an anovadistill model file");
    }
    if (doc.at("version").get<int>() != kModelVersion) {
      throw InvalidArgumentError("unsupported model version " +
                                 doc["version"].dump());
    }
    AnovaModel model(FeatureSpecsFromJson(doc.at("features")),
                     doc.at("beta0").get<double>());
    for (const auto& c : doc.at("components")) {
      const std::string backend = c.at("backend").get<std::string>();
      if (backend == "grid") {
        model.SetComponent(
            std::make_shared<GridComponent>(GridComponent::FromJson(c)));
      } else if (backend == "feedforward") {
        model.SetComponent(
            std::make_shared<MlpComponent>(MlpComponent::FromJson(c)));
      } else {
        throw InvalidArgumentError("unknown component backend \"" + backend +
                                   "\"");
      }
    }
    model.set_identifiable(doc.value("identifiable", false));
    if (doc.contains("diagnostics")) {
      const json& dj = doc["diagnostics"];
      FitDiagnostics& d = model.mutable_diagnostics();
      d.solver = dj.value("solver", std::string());
      d.parameters = dj.value("parameters", 0);
      d.iterations = dj.value("iterations", 0);
      d.train_mse = dj.value("train_mse", 0.0);
      d.target_variance = dj.value("target_variance", 0.0);
      d.grad_norm = dj.value("grad_norm", 0.0);
      d.transform_change = dj.value("transform_change", 0.0);
    }
    return model;
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("malformed model file: ") +
                               e.what());
  }
}

void SaveModel(const AnovaModel& model, const std::string& path) {
  WriteJsonFile(path, ModelToJson(model));
}

AnovaModel LoadModel(const std::string& path) {
  return ModelFromJson(ReadJsonFile(path, "model file"));
}

}  // namespace anovadistill

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

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "anovadistill/analytic.h"
#include "anovadistill/anova_model.h"
#include "anovadistill/dataset.h"
#include "anovadistill/error.h"
#include "anovadistill/external_predictor.h"
#include "anovadistill/importance.h"
#include "anovadistill/model_io.h"
#include "anovadistill/predictor.h"
#include "anovadistill/screening.h"

namespace py = pybind11;
using json = nlohmann::json;

namespace anovadistill {
namespace {

using PredictorPtr = std::shared_ptr<Predictor>;

std::vector<IndexSet> ToSets(const std::vector<std::vector<int>>& sets) {
  std::vector<IndexSet> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.emplace_back(s);
  return out;
}

py::tuple ToTuple(const IndexSet& j) { return py::cast(j.indices()); }

py::dict ByIndexSet(const std::map<IndexSet, double>& values) {
  py::dict out;
  for (const auto& [j, v] : values) out[ToTuple(j)] = v;
  return out;
}

json ParseConfig(const std::string& text) {
  if (text.empty()) return json::object();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("bad config: ") + e.what());
  }
}

// Worker threads call back into Python one at a time under the GIL.
PredictorPtr MakeCallback(int dim, py::function fn, const std::string& name) {
  BatchFunction batch = [fn](const RowMatrix& points) -> Eigen::VectorXd {
    py::gil_scoped_acquire gil;
    try {
      py::object out = fn(points);
      return out.cast<Eigen::VectorXd>();
    } catch (py::error_already_set& e) {
      throw PredictorError(std::string("python predictor raised: ") + e.what());
    } catch (const py::cast_error& e) {
      throw PredictorError(
          std::string("python predictor returned a non-vector: ") + e.what());
    }
  };
  return std::make_shared<CallbackPredictor>(dim, std::move(batch), name);
}

Dataset DatasetFromArray(const RowMatrix& raw,
                         const std::vector<std::string>& kinds,
                         const std::vector<std::string>& names) {
  const int p = static_cast<int>(raw.cols());
  if (!kinds.empty() && static_cast<int>(kinds.size()) != p) {
    throw InvalidArgumentError("kinds has " + std::to_string(kinds.size()) +
                               " entries for " + std::to_string(p) + " columns");
  }
  if (!names.empty() && static_cast<int>(names.size()) != p) {
    throw InvalidArgumentError("names has " + std::to_string(names.size()) +
                               " entries for " + std::to_string(p) + " columns");
  }
  if (raw.rows() == 0) throw InvalidArgumentError("no rows");
  std::vector<FeatureSpec> specs(p);
  for (int j = 0; j < p; ++j) {
    FeatureSpec& s = specs[j];
    s.name = names.empty() ? "x" + std::to_string(j + 1) : names[j];
    s.kind = kinds.empty() ? FeatureKind::kContinuous : ParseFeatureKind(kinds[j]);
    if (s.kind == FeatureKind::kContinuous) {
      s.raw_min = raw.col(j).minCoeff();
      s.raw_max = raw.col(j).maxCoeff();
      if (!(s.raw_max > s.raw_min)) {
        throw InvalidArgumentError("constant feature " + s.name);
      }
    }
  }
  return DatasetFromRaw(std::move(specs), raw);
}

}  // namespace
}  // namespace anovadistill

PYBIND11_MODULE(_core, m) {
  using namespace anovadistill;
  m.doc() = "Functional ANOVA distillation of black-box predictors.";

  py::register_exception<InvalidArgumentError>(m, "InvalidArgumentError",
                                               PyExc_ValueError);
  py::register_exception<PredictorError>(m, "PredictorError",
                                         PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&DatasetFromArray), py::arg("values"),
           py::arg("kinds") = std::vector<std::string>{},
           py::arg("names") = std::vector<std::string>{},
           "Min-max scales continuous columns; binary columns must hold 0/1.")
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("p", &Dataset::p)
      .def_property_readonly("values", &Dataset::values)
      .def_property_readonly("names",
                             [](const Dataset& d) {
                               std::vector<std::string> out;
                               for (const auto& s : d.specs()) out.push_back(s.name);
                               return out;
                             })
      .def_property_readonly("kinds", [](const Dataset& d) {
        std::vector<std::string> out;
        for (const auto& s : d.specs()) out.push_back(FeatureKindName(s.kind));
        return out;
      });

  m.def(
      "load_csv",
      [](const std::string& path, const std::string& schema) {
        return LoadCsv(path, schema.empty() ? SchemaHints{} : LoadSchemaHints(schema));
      },
      py::arg("path"), py::arg("schema") = "");

  py::class_<Predictor, std::shared_ptr<Predictor>>(m, "Predictor")
      .def_property_readonly("dim", &Predictor::dim)
      .def_property_readonly("name", &Predictor::name)
      .def_property_readonly("eval_count", &Predictor::eval_count)
      .def("enable_cache", &Predictor::EnableCache, py::arg("enabled") = true)
      .def("__call__", &Predictor::EvaluateBatch, py::arg("points"),
           py::call_guard<py::gil_scoped_release>());

  m.def("callback_predictor", &MakeCallback, py::arg("dim"), py::arg("fn"),
        py::arg("name") = "python",
        "Wraps fn(points[n, dim]) -> values[n] on the unit cube.");
  m.def(
      "analytic_predictor",
      [](const std::string& name) -> std::shared_ptr<Predictor> {
        return AnalyticPredictor::Make(name);
      },
      py::arg("name"));
  m.def(
      "analytic_data",
      [](const std::string& name, int n, uint64_t seed) {
        return GenerateUniform(AnalyticPredictor::Make(name)->FeatureSpecs(), n,
                               seed);
      },
      py::arg("name"), py::arg("n"), py::arg("seed") = 0);
  m.def(
      "external_predictor",
      [](const std::string& command, int p,
         double timeout) -> std::shared_ptr<Predictor> {
        ExternalOptions opts;
        opts.timeout_seconds = timeout;
        return ExternalPredictor::Spawn(SplitCommand(command), p, opts);
      },
      py::arg("command"), py::arg("p"), py::arg("timeout") = 60.0);

  m.def(
      "_interaction_scores",
      [](Predictor& pred, const Dataset& data,
         const std::vector<std::vector<int>>& candidates,
         const std::string& config, bool total_effect) {
        ScreeningConfig cfg;
        ScreeningConfigFromJson(ParseConfig(config), &cfg);
        cfg.mc.Validate();
        cfg.h.Validate();
        return ScoreBatch(pred, data, ToSets(candidates), cfg.mc, cfg.h,
                          total_effect ? ScoreKind::kTotalEffect
                                       : ScoreKind::kInteraction)
            .ToJson()
            .dump();
      },
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "_screen",
      [](Predictor& pred, const Dataset& data, const std::string& config) {
        ScreeningConfig cfg;
        ScreeningConfigFromJson(ParseConfig(config), &cfg);
        return Screen(pred, data, cfg).ToJson().dump();
      },
      py::call_guard<py::gil_scoped_release>());

  py::class_<AnovaModel>(m, "AnovaModel")
      .def_property_readonly("p", &AnovaModel::p)
      .def_property_readonly("beta0", &AnovaModel::beta0)
      .def_property_readonly("components",
                             [](const AnovaModel& model) {
                               py::list out;
                               for (const auto& [j, c] : model.components()) {
                                 out.append(ToTuple(j));
                               }
                               return out;
                             })
      .def_property_readonly(
          "train_mse",
          [](const AnovaModel& model) { return model.diagnostics().train_mse; })
      .def("predict", &AnovaModel::PredictBatch, py::arg("points"))
      .def(
          "predict_components",
          [](const AnovaModel& model, const Eigen::VectorXd& x) {
            return ByIndexSet(model.PredictComponents(
                std::span<const double>(x.data(), x.size())));
          },
          py::arg("x"))
      .def(
          "importance",
          [](const AnovaModel& model, const Dataset& data) {
            return ByIndexSet(ComponentImportance(model, data));
          },
          py::arg("data"))
      .def(
          "shap",
          [](const AnovaModel& model, const Eigen::VectorXd& x) {
            return AnovaShapLocal(model,
                                  std::span<const double>(x.data(), x.size()));
          },
          py::arg("x"))
      .def("shap_global", &AnovaShapGlobal, py::arg("data"))
      .def(
          "partial_dependence",
          [](const AnovaModel& model, const std::vector<int>& j,
             int resolution) {
            const PartialDependenceTable t =
                PartialDependence(model, IndexSet(j), resolution);
            return py::make_tuple(t.raw_grid, t.values);
          },
          py::arg("j"), py::arg("resolution") = 25)
      .def("save", [](const AnovaModel& model,
                      const std::string& path) { SaveModel(model, path); })
      .def("to_json",
           [](const AnovaModel& model) { return ModelToJson(model).dump(); });

  m.def("load_model", &LoadModel, py::arg("path"));
  m.def(
      "_fit",
      [](Predictor& pred, const Dataset& data,
         const std::vector<std::vector<int>>& R, const std::string& options) {
        FitOptions opts;
        FitOptionsFromJson(ParseConfig(options), &opts);
        return Fit(pred, data, ToSets(R), opts);
      },
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "_fit_targets",
      [](const Dataset& data, const Eigen::VectorXd& y,
         const std::vector<std::vector<int>>& R, const std::string& options) {
        FitOptions opts;
        FitOptionsFromJson(ParseConfig(options), &opts);
        return FitToTargets(data, y, ToSets(R), opts);
      },
      py::call_guard<py::gil_scoped_release>());
  m.def("r_squared", &RSquared, py::arg("target"), py::arg("fitted"));
}

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

#include "anovadistill/cli_commands.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "anovadistill/analytic.h"
#include "anovadistill/anova_model.h"
#include "anovadistill/benchmark.h"
#include "anovadistill/dataset.h"
#include "anovadistill/error.h"
#include "anovadistill/external_predictor.h"
#include "anovadistill/model_io.h"
#include "anovadistill/predictor.h"
#include "anovadistill/report_json.h"
#include "anovadistill/rng.h"
#include "anovadistill/screening.h"

namespace anovadistill {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Command-line values; unset optionals fall back to the config file.
struct Flags {
  std::string config;
  std::optional<std::string> data, schema, predictor, out, model, rows,
      screening, backend;
  std::optional<int> K, n, resolution, workers, m_anchor, m_comp;
  std::optional<double> tau, h, timeout, holdout;
  std::optional<uint64_t> seed;
  std::optional<std::string> functions;
  bool main_effects_only = false;
};

struct RunConfig {
  std::string data, schema, out = "out", model, rows, screening_path;
  std::vector<std::string> predictor_argv;
  std::string analytic;
  uint64_t seed = 0;
  int n = 3000;
  int resolution = 21;
  double timeout = 60.0;
  double holdout = 0.2;
  bool main_effects_only = false;
  ScreeningConfig screening;
  FitOptions fit;
  BenchmarkOptions benchmark;
};

void ParsePredictorSpec(const std::string& spec, RunConfig* cfg) {
  cfg->analytic.clear();
  cfg->predictor_argv.clear();
  if (spec.rfind("external:", 0) == 0) {
    cfg->predictor_argv = SplitCommand(spec.substr(9));
    if (cfg->predictor_argv.empty()) {
      throw InvalidArgumentError("external predictor needs a command");
    }
  } else if (spec.rfind("analytic:", 0) == 0) {
    cfg->analytic = spec.substr(9);
  } else {
    cfg->analytic = spec;
  }
}

RunConfig BuildConfig(const Flags& f) {
  RunConfig cfg;
  json doc = json::object();
  if (!f.config.empty()) doc = ReadJsonFile(f.config, "config file");
  if (!doc.is_object()) throw InvalidArgumentError("config must be an object");
  try {
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.n = doc.value("n", cfg.n);
    cfg.data = doc.value("data", cfg.data);
    cfg.schema = doc.value("schema", cfg.schema);
    cfg.out = doc.value("out", cfg.out);
    cfg.model = doc.value("model", cfg.model);
    cfg.rows = doc.value("rows", cfg.rows);
    cfg.screening_path = doc.value("screening_file", cfg.screening_path);
    cfg.resolution = doc.value("resolution", cfg.resolution);
    cfg.timeout = doc.value("timeout", cfg.timeout);
    cfg.holdout = doc.value("holdout_fraction", cfg.holdout);
    cfg.main_effects_only = doc.value("main_effects_only", false);
    if (doc.contains("predictor")) {
      const json& p = doc["predictor"];
      if (p.is_string()) {
        ParsePredictorSpec(p.get<std::string>(), &cfg);
      } else if (p.is_object() && p.contains("external")) {
        cfg.predictor_argv = p["external"].get<std::vector<std::string>>();
      } else if (p.is_object() && p.contains("analytic")) {
        cfg.analytic = p["analytic"].get<std::string>();
      } else {
        throw InvalidArgumentError("predictor must be a name or an object");
      }
    }
    if (doc.contains("screening")) {
      ScreeningConfigFromJson(doc["screening"], &cfg.screening);
    }
    if (doc.contains("fit")) FitOptionsFromJson(doc["fit"], &cfg.fit);
    if (doc.contains("benchmark")) {
      const json& b = doc["benchmark"];
      if (b.contains("functions")) {
        cfg.benchmark.functions = b["functions"].get<std::vector<std::string>>();
      }
      if (b.contains("n")) cfg.benchmark.n = b["n"].get<int>();
      if (b.contains("tau0_frac")) {
        cfg.benchmark.tau0_frac = b["tau0_frac"].get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("bad config: ") + e.what());
  }
  const bool seed_in_mc =
      doc.contains("screening") && doc["screening"].contains("mc") &&
      doc["screening"]["mc"].contains("seed");

  if (f.seed) cfg.seed = *f.seed;
  if (f.n) cfg.n = *f.n;
  if (f.data) cfg.data = *f.data;
  if (f.schema) cfg.schema = *f.schema;
  if (f.out) cfg.out = *f.out;
  if (f.model) cfg.model = *f.model;
  if (f.rows) cfg.rows = *f.rows;
  if (f.screening) cfg.screening_path = *f.screening;
  if (f.resolution) cfg.resolution = *f.resolution;
  if (f.timeout) cfg.timeout = *f.timeout;
  if (f.holdout) cfg.holdout = *f.holdout;
  if (f.predictor) ParsePredictorSpec(*f.predictor, &cfg);
  if (f.main_effects_only) cfg.main_effects_only = true;
  if (f.K) cfg.screening.K = *f.K;
  if (f.tau) cfg.screening.tau = *f.tau;
  if (f.h) cfg.screening.h.h1 = *f.h;
  if (f.m_anchor) cfg.screening.mc.m_anchor = *f.m_anchor;
  if (f.m_comp) cfg.screening.mc.m_comp = *f.m_comp;
  if (f.workers) cfg.screening.mc.workers = *f.workers;
  if (f.backend) cfg.fit.backend = ParseBackend(*f.backend);
  if (!seed_in_mc || f.seed) cfg.screening.mc.seed = cfg.seed;
  cfg.fit.seed = cfg.seed;

  cfg.benchmark.seed = cfg.seed;
  if (f.n) cfg.benchmark.n = *f.n;
  cfg.benchmark.mc = cfg.screening.mc;
  cfg.benchmark.h = cfg.screening.h;
  cfg.benchmark.fit = cfg.fit;
  cfg.benchmark.fit.backend = Backend::kGrid;
  if (f.functions) {
    cfg.benchmark.functions.clear();
    std::stringstream ss(*f.functions);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) cfg.benchmark.functions.push_back(item);
    }
  }

  if (cfg.n < 2) throw InvalidArgumentError("n must be >= 2");
  if (cfg.resolution < 2) throw InvalidArgumentError("resolution must be >= 2");
  if (!(cfg.holdout >= 0.0 && cfg.holdout < 1.0)) {
    throw InvalidArgumentError("holdout fraction must lie in [0, 1)");
  }
  if (!cfg.analytic.empty() && !cfg.predictor_argv.empty()) {
    throw InvalidArgumentError("exactly one predictor source is allowed");
  }
  cfg.screening.Validate();
  cfg.fit.Validate();
  return cfg;
}

struct Session {
  std::unique_ptr<Predictor> pred;
  std::optional<Dataset> data;
  std::string source;
};

Session OpenSession(const RunConfig& cfg, bool need_predictor) {
  Session s;
  if (!cfg.data.empty()) {
    const SchemaHints hints =
        cfg.schema.empty() ? SchemaHints{} : LoadSchemaHints(cfg.schema);
    s.data.emplace(LoadCsv(cfg.data, hints));
    s.source = cfg.data;
  }
  if (!cfg.analytic.empty()) {
    auto analytic = AnalyticPredictor::Make(cfg.analytic);
    if (!s.data) {
      s.data.emplace(GenerateUniform(analytic->FeatureSpecs(), cfg.n,
                                     DeriveSeed(cfg.seed, "cli-data")));
      s.source = "uniform:" + analytic->name();
    }
    s.pred = std::move(analytic);
  } else if (!cfg.predictor_argv.empty()) {
    if (!s.data) {
      throw InvalidArgumentError("an external predictor needs --data");
    }
    ExternalOptions opts;
    opts.timeout_seconds = cfg.timeout;
    s.pred = ExternalPredictor::Spawn(cfg.predictor_argv, s.data->p(), opts);
  } else if (need_predictor) {
    throw InvalidArgumentError("no predictor given (use --predictor)");
  }
  if (s.pred && s.data && s.pred->dim() != s.data->p()) {
    throw InvalidArgumentError("dimension mismatch: predictor " +
                               s.pred->name() + " expects p=" +
                               std::to_string(s.pred->dim()) +
                               ", data has p=" + std::to_string(s.data->p()));
  }
  return s;
}

std::string OutPath(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out) / name).string();
}

void WriteMetadata(const RunConfig& cfg, const std::string& command,
                   double wall) {
  json meta = MetadataBlock(wall);
  meta["command"] = command;
  WriteJsonFile(OutPath(cfg, "metadata/" + command + ".json"), meta);
}

json RunInfo(const RunConfig& cfg, const Session& s) {
  return {{"predictor", s.pred ? s.pred->name() : std::string()},
          {"data", s.source},
          {"n", s.data ? s.data->n() : 0},
          {"p", s.data ? s.data->p() : 0},
          {"seed", cfg.seed}};
}

ScreeningResult RunScreening(const RunConfig& cfg, Session& s) {
  ScreeningResult result = Screen(*s.pred, *s.data, cfg.screening);
  return result;
}

void ReportScreening(const ScreeningResult& r, std::ostream& out) {
  out << "V: " << r.V.size() << " features";
  for (const auto& level : r.levels) {
    out << "; order " << level.order << ": |S|=" << level.candidates.size()
        << " |C|=" << level.survivors.size();
  }
  out << "; |R|=" << r.R.size() << "\n";
}

int CmdScreen(const RunConfig& cfg, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  Session s = OpenSession(cfg, true);
  const ScreeningResult r = RunScreening(cfg, s);
  json doc = r.ToJson();
  doc["run"] = RunInfo(cfg, s);
  WriteJsonFile(OutPath(cfg, "screening.json"), doc);
  ReportScreening(r, out);
  WriteMetadata(cfg, "screen",
                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count());
  return kExitOk;
}

int CmdDistill(const RunConfig& cfg, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  Session s = OpenSession(cfg, true);
  const Dataset& data = *s.data;

  // Seeded split into training and held-out rows.
  std::vector<int> order(data.n());
  for (int i = 0; i < data.n(); ++i) order[i] = i;
  Rng rng(DeriveSeed(cfg.seed, "holdout"));
  for (int i = data.n() - 1; i > 0; --i) {
    std::swap(order[i], order[UniformIndex(rng, i + 1)]);
  }
  const int test_n = static_cast<int>(cfg.holdout * data.n());
  std::vector<int> train_rows(order.begin() + test_n, order.end());
  std::vector<int> test_rows(order.begin(), order.begin() + test_n);
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  const Dataset train = data.Rows(train_rows);

  ScreeningResult screening;
  if (!cfg.screening_path.empty()) {
    screening = ScreeningResult::FromJson(
        ReadJsonFile(cfg.screening_path, "screening file"));
  } else {
    screening = Screen(*s.pred, train, cfg.screening);
    json doc = screening.ToJson();
    doc["run"] = RunInfo(cfg, s);
    WriteJsonFile(OutPath(cfg, "screening.json"), doc);
  }
  std::vector<IndexSet> R;
  if (cfg.main_effects_only) {
    for (int v : screening.V) R.push_back(IndexSet::Single(v));
  } else {
    R = screening.R;
  }
  const AnovaModel model = Fit(*s.pred, train, R, cfg.fit);
  SaveModel(model, OutPath(cfg, "model.json"));

  const Eigen::VectorXd y_train = s.pred->EvaluateBatch(train.values());
  const Eigen::VectorXd f_train = model.PredictBatch(train.values());
  json report = {{"run", RunInfo(cfg, s)},
                 {"train_rows", train.n()},
                 {"heldout_rows", test_n},
                 {"train_mse", (f_train - y_train).squaredNorm() / train.n()},
                 {"train_r2", RSquared(y_train, f_train)},
                 {"terms", R.size()},
                 {"beta0", model.beta0()},
                 {"solver", model.diagnostics().solver},
                 {"parameters", model.diagnostics().parameters},
                 {"grad_norm", model.diagnostics().grad_norm},
                 {"transform_change", model.diagnostics().transform_change},
                 {"fit", FitOptionsToJson(cfg.fit)}};
  const auto counts = model.CountByOrder();
  json per_order = json::object();
  for (std::size_t k = 1; k < counts.size(); ++k) {
    if (counts[k] > 0) per_order[std::to_string(k)] = counts[k];
  }
  report["components_per_order"] = per_order;
  double heldout_r2 = 0.0;
  if (test_n > 0) {
    const Dataset test = data.Rows(test_rows);
    const Eigen::VectorXd y_test = s.pred->EvaluateBatch(test.values());
    const Eigen::VectorXd f_test = model.PredictBatch(test.values());
    heldout_r2 = RSquared(y_test, f_test);
    report["heldout_mse"] = (f_test - y_test).squaredNorm() / test_n;
    report["heldout_r2"] = heldout_r2;
  } else {
    report["heldout_mse"] = nullptr;
    report["heldout_r2"] = nullptr;
  }
  WriteJsonFile(OutPath(cfg, "fit_report.json"), report);
  out << "fitted " << model.components().size() << " components";
  if (test_n > 0) out << "; held-out R^2 = " << heldout_r2;
  out << "\n";
  WriteMetadata(cfg, "distill",
                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count());
  return kExitOk;
}

// Rows file: header with feature names, raw values. Returns scaled rows.
std::vector<Eigen::VectorXd> ReadExplainRows(const std::string& path,
                                             const std::vector<FeatureSpec>& specs,
                                             std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("rows file not found: " + path);
  std::string line;
  std::vector<std::string> header;
  std::vector<Eigen::VectorXd> rows;
  int line_no = 0, clamped = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      if (header.size() != specs.size()) {
        throw InvalidArgumentError("rows file has " +
                                   std::to_string(header.size()) +
                                   " columns, model has " +
                                   std::to_string(specs.size()));
      }
      continue;
    }
    if (cells.size() != specs.size()) {
      throw InvalidArgumentError(path + ": row " + std::to_string(line_no) +
                                 " has the wrong number of cells");
    }
    std::vector<double> raw(specs.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      try {
        std::size_t used = 0;
        raw[j] = std::stod(cells[j], &used);
      } catch (const std::exception&) {
        throw InvalidArgumentError("parse failure at " + path + ": row " +
                                   std::to_string(line_no) + ", column " +
                                   std::to_string(j + 1));
      }
    }
    const ScaledPoint p = ScalePoint(raw, specs);
    if (p.clamped) ++clamped;
    rows.push_back(p.values);
  }
  if (clamped > 0) {
    err << "warning: " << clamped
        << " row(s) outside the training range were clamped\n";
  }
  return rows;
}

void CheckSchema(const AnovaModel& model, const Dataset& data) {
  if (model.p() != data.p()) {
    throw InvalidArgumentError("model/schema mismatch: model has p=" +
                               std::to_string(model.p()) + ", data has p=" +
                               std::to_string(data.p()));
  }
  for (int j = 0; j < model.p(); ++j) {
    if (model.specs()[j].name != data.specs()[j].name) {
      throw InvalidArgumentError("model/schema mismatch at feature " +
                                 std::to_string(j) + ": \"" +
                                 model.specs()[j].name + "\" vs \"" +
                                 data.specs()[j].name + "\"");
    }
  }
}

int CmdExplain(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const std::string model_path =
      cfg.model.empty() ? OutPath(cfg, "model.json") : cfg.model;
  AnovaModel model = LoadModel(model_path);
  Session s = OpenSession(cfg, false);
  if (!s.data) {
    throw InvalidArgumentError(
        "explain needs --data or an analytic predictor to supply rows");
  }
  CheckSchema(model, *s.data);
  if (!model.identifiable()) model = IdentifiableTransform(model, *s.data, cfg.fit);

  const auto importance = ComponentImportance(model, *s.data);
  const auto normalized = MaxNormalize(importance);
  const Eigen::VectorXd shap = AnovaShapGlobal(model, *s.data);
  const Eigen::VectorXd shap_norm = MaxNormalize(shap);
  json comps = json::array();
  for (const auto& [j, v] : importance) {
    json names = json::array();
    for (int l : j) names.push_back(model.specs()[l].name);
    comps.push_back({{"j", j.indices()},
                     {"features", names},
                     {"importance", v},
                     {"normalized", normalized.at(j)}});
  }
  json features = json::array();
  for (int l = 0; l < model.p(); ++l) {
    features.push_back({{"index", l},
                        {"feature", model.specs()[l].name},
                        {"importance", shap[l]},
                        {"normalized", shap_norm[l]}});
  }
  WriteJsonFile(OutPath(cfg, "global_importance.json"),
                {{"beta0", model.beta0()},
                 {"components", comps},
                 {"anova_shap", features}});

  if (!cfg.rows.empty()) {
    const auto rows = ReadExplainRows(cfg.rows, model.specs(), err);
    if (rows.empty()) {
      err << "warning: rows file " << cfg.rows
          << " holds no rows; local_shap.csv not written\n";
    } else {
      std::string csv = "row";
      for (const auto& spec : model.specs()) csv += "," + spec.name;
      csv += "\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Eigen::VectorXd phi = AnovaShapLocal(
            model, {rows[i].data(), static_cast<std::size_t>(rows[i].size())});
        csv += std::to_string(i);
        for (Eigen::Index l = 0; l < phi.size(); ++l) {
          csv += "," + FormatDouble(phi[l]);
        }
        csv += "\n";
      }
      WriteTextFile(OutPath(cfg, "local_shap.csv"), csv);
    }
  }

  for (const auto& [j, c] : model.components()) {
    const PartialDependenceTable t = PartialDependence(model, j, cfg.resolution);
    std::string csv;
    for (int l : j) csv += model.specs()[l].name + ",";
    csv += "value\n";
    for (Eigen::Index r = 0; r < t.values.size(); ++r) {
      for (Eigen::Index a = 0; a < t.raw_grid.cols(); ++a) {
        csv += FormatDouble(t.raw_grid(r, a)) + ",";
      }
      csv += FormatDouble(t.values[r]) + "\n";
    }
    WriteTextFile(OutPath(cfg, "pd/" + j.ToString() + ".csv"), csv);
  }
  out << "explained " << model.components().size() << " components\n";
  WriteMetadata(cfg, "explain",
                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count());
  return kExitOk;
}

int CmdBenchmark(const RunConfig& cfg, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const BenchmarkReport report = RunBenchmark(cfg.benchmark);
  WriteJsonFile(OutPath(cfg, "benchmark.json"), report.ToJson());
  for (const auto& r : report.results) {
    out << r.name << " AUROC " << r.auroc << " (interaction-score rank "
        << r.auroc_score_rank << ")\n";
  }
  out << "average AUROC " << report.average_auroc << "\n";
  WriteMetadata(cfg, "benchmark",
                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count());
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Distill a black-box predictor into a functional ANOVA model",
               "anovadistill"};
  app.require_subcommand(1);
  Flags f;

  app.set_help_flag("--help", "print help");
  auto add_common = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print help");
    sub->add_option("--config", f.config, "JSON run configuration");
    sub->add_option("--data", f.data, "CSV data file");
    sub->add_option("--schema", f.schema, "JSON feature-kind hints");
    sub->add_option("--predictor", f.predictor,
                    "F1..F10, analytic:NAME or external:COMMAND");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--n", f.n, "rows generated for analytic predictors");
    sub->add_option("--K", f.K, "maximum interaction order");
    sub->add_option("--tau", f.tau, "relative threshold");
    sub->add_option("--h", f.h, "finite-difference bandwidth");
    sub->add_option("--m-anchor", f.m_anchor, "anchor draws per score");
    sub->add_option("--m-comp", f.m_comp, "complement draws per anchor");
    sub->add_option("--workers", f.workers, "worker threads (0: all cores)");
    sub->add_option("--timeout", f.timeout, "external predictor timeout (s)");
  };
  CLI::App* screen = app.add_subcommand("screen", "screen interactions");
  add_common(screen);
  CLI::App* distill = app.add_subcommand("distill", "screen and fit");
  add_common(distill);
  distill->add_option("--screening", f.screening, "reuse a screening.json");
  distill->add_flag("--main-effects-only", f.main_effects_only,
                    "fit main effects of V only");
  distill->add_option("--backend", f.backend, "grid or feedforward");
  distill->add_option("--holdout", f.holdout, "held-out fraction");
  CLI::App* explain = app.add_subcommand("explain", "attribution reports");
  add_common(explain);
  explain->add_option("--model", f.model, "model.json (default OUT/model.json)");
  explain->add_option("--rows", f.rows, "CSV rows for local ANOVA-SHAP");
  explain->add_option("--resolution", f.resolution, "partial-dependence grid");
  CLI::App* bench = app.add_subcommand("benchmark", "analytic-suite AUROC");
  add_common(bench);
  bench->add_option("--functions", f.functions, "comma-separated F1..F10");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = BuildConfig(f);
    if (screen->parsed()) return CmdScreen(cfg, out);
    if (distill->parsed()) return CmdDistill(cfg, out);
    if (explain->parsed()) return CmdExplain(cfg, out, err);
    return CmdBenchmark(cfg, out);
  } catch (const InvalidArgumentError& e) {
    err << "anovadistill: error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PredictorError& e) {
    err << "anovadistill: predictor failure: " << e.what() << "\n";
    return kExitPredictor;
  } catch (const NumericalError& e) {
    err << "anovadistill: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "anovadistill: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace anovadistill

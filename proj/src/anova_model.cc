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

#include "anovadistill/anova_model.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

#include "anovadistill/error.h"
#include "anovadistill/mlp_component.h"
#include "anovadistill/rng.h"

namespace anovadistill {
namespace {

using json = nlohmann::json;

double Mean(const Eigen::VectorXd& v) { return v.size() ? v.mean() : 0.0; }

double PopulationVariance(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  const Eigen::ArrayXd d = v.array() - v[0];
  return (d - d.mean()).square().mean();
}

std::vector<IndexSet> CheckTerms(const std::vector<IndexSet>& R, int p) {
  std::set<IndexSet> seen;
  for (const auto& j : R) {
    if (j.empty()) throw InvalidArgumentError("empty term in R");
    if (j.order() > 4) {
      throw InvalidArgumentError("term " + j.ToString() +
                                 " exceeds the maximum order 4");
    }
    if (j.indices().back() >= p) {
      throw InvalidArgumentError("term " + j.ToString() + " out of range");
    }
    if (!seen.insert(j).second) {
      throw InvalidArgumentError("duplicate term " + j.ToString());
    }
  }
  return std::vector<IndexSet>(seen.begin(), seen.end());
}

std::vector<std::vector<double>> AxisKnots(const IndexSet& j,
                                           const Dataset& data, int count) {
  std::vector<std::vector<double>> knots;
  for (int l : j) {
    knots.push_back(data.is_binary(l) ? std::vector<double>{0.0, 1.0}
                                      : UniformKnots(count));
  }
  return knots;
}

struct GridSolution {
  double beta0 = 0.0;
  Eigen::VectorXd theta;
  int iterations = 0;
  double grad_norm = 0.0;
  std::string solver;
};

// Primal gradient of (1/2n)|y - beta0 - X theta|^2 + (lambda/2)|theta|^2.
double GradientNorm(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X,
                    const Eigen::VectorXd& y, double lambda, double beta0,
                    const Eigen::VectorXd& theta) {
  const double n = static_cast<double>(y.size());
  const Eigen::VectorXd r = (X * theta).array() + beta0 - y.array();
  Eigen::VectorXd g(theta.size() + 1);
  g[0] = r.sum() / n;
  g.tail(theta.size()) = X.transpose() * r / n + lambda * theta;
  return g.norm();
}

[[noreturn]] void Singular() {
  throw NumericalError(
      "singular least-squares system; use ridge > 0 to make the fit "
      "well-posed");
}

GridSolution SolvePrimal(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X,
                         const Eigen::VectorXd& y, const FitOptions& options) {
  const int n = static_cast<int>(X.rows());
  const int P = static_cast<int>(X.cols());
  // Unknowns: [beta0, theta].
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P + 1, P + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(P + 1);
  std::vector<int> cols;
  std::vector<double> vals;
  for (int i = 0; i < n; ++i) {
    cols.assign(1, 0);
    vals.assign(1, 1.0);
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(X, i);
         it; ++it) {
      cols.push_back(static_cast<int>(it.col()) + 1);
      vals.push_back(it.value());
    }
    for (std::size_t a = 0; a < cols.size(); ++a) {
      b[cols[a]] += vals[a] * y[i];
      for (std::size_t c = 0; c < cols.size(); ++c) {
        A(cols[a], cols[c]) += vals[a] * vals[c];
      }
    }
  }
  A /= n;
  b /= n;
  for (int a = 1; a <= P; ++a) A(a, a) += options.ridge;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success) Singular();
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  if (d.minCoeff() <= 1e-13 * d.maxCoeff()) Singular();

  GridSolution s;
  s.solver = "primal-ldlt";
  Eigen::VectorXd sol = ldlt.solve(b);
  for (s.iterations = 1; s.iterations <= options.max_refinements;
       ++s.iterations) {
    const Eigen::VectorXd g = A * sol - b;
    if (!g.allFinite()) throw NumericalError("non-finite least-squares solution");
    if (g.norm() <= options.tolerance) break;
    sol -= ldlt.solve(g);
  }
  s.beta0 = sol[0];
  s.theta = sol.tail(P);
  s.grad_norm = GradientNorm(X, y, options.ridge, s.beta0, s.theta);
  return s;
}

// Kernel form for more parameters than rows: theta = X^T alpha with
// (X X^T + n lambda I) alpha = y - beta0 1 and 1^T alpha = 0.
GridSolution SolveDual(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X,
                       const Eigen::VectorXd& y, const FitOptions& options) {
  const int n = static_cast<int>(X.rows());
  if (!(options.ridge > 0.0)) Singular();
  const Eigen::MatrixXd Xt = Eigen::MatrixXd(X.transpose());
  Eigen::MatrixXd M = X * Xt;
  M.diagonal().array() += n * options.ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) Singular();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd m_ones = llt.solve(ones);
  const double denom = ones.dot(m_ones);
  auto kkt = [&](const Eigen::VectorXd& r1, double r2, Eigen::VectorXd* a,
                 double* b0) {
    const Eigen::VectorXd m_r1 = llt.solve(r1);
    *b0 = (ones.dot(m_r1) - r2) / denom;
    *a = m_r1 - *b0 * m_ones;
  };
  GridSolution s;
  s.solver = "dual-llt";
  Eigen::VectorXd alpha;
  kkt(y, 0.0, &alpha, &s.beta0);
  for (s.iterations = 1; s.iterations <= options.max_refinements;
       ++s.iterations) {
    s.theta = X.transpose() * alpha;
    s.grad_norm = GradientNorm(X, y, options.ridge, s.beta0, s.theta);
    if (!std::isfinite(s.grad_norm)) {
      throw NumericalError("non-finite least-squares solution");
    }
    if (s.grad_norm <= options.tolerance) break;
    const Eigen::VectorXd r1 = y - M * alpha - s.beta0 * ones;
    const double r2 = -alpha.sum();
    Eigen::VectorXd da;
    double db = 0.0;
    kkt(r1, r2, &da, &db);
    alpha += da;
    s.beta0 += db;
  }
  s.theta = X.transpose() * alpha;
  s.grad_norm = GradientNorm(X, y, options.ridge, s.beta0, s.theta);
  return s;
}

AnovaModel FitGrid(const Dataset& data, const Eigen::VectorXd& y,
                   const std::vector<IndexSet>& terms,
                   const FitOptions& options) {
  std::vector<GridComponent> comps;
  std::vector<int> offsets;
  int P = 0;
  for (const auto& j : terms) {
    const int count = options.KnotsForOrder(j.order());
    auto knots = AxisKnots(j, data, count);
    int size = 1;
    for (const auto& k : knots) size *= static_cast<int>(k.size());
    comps.emplace_back(j, std::move(knots), Eigen::VectorXd::Zero(size));
    offsets.push_back(P);
    P += size;
  }
  const int n = data.n();
  if (std::min(n, P) > 15000) {
    throw NumericalError("model too large for the dense solver (" +
                         std::to_string(P) + " parameters, " +
                         std::to_string(n) + " rows)");
  }

  std::vector<Eigen::Triplet<double>> triplets;
  int idx[16];
  double w[16];
  for (int i = 0; i < n; ++i) {
    const auto x = data.row(i);
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const int m = comps[c].BasisAt(x, idx, w);
      for (int t = 0; t < m; ++t) {
        if (w[t] != 0.0) triplets.emplace_back(i, offsets[c] + idx[t], w[t]);
      }
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> X(n, P);
  X.setFromTriplets(triplets.begin(), triplets.end());

  const GridSolution s =
      P <= n ? SolvePrimal(X, y, options) : SolveDual(X, y, options);

  AnovaModel model(data.specs(), s.beta0);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    model.SetComponent(std::make_shared<GridComponent>(
        comps[c].set(), comps[c].knots(),
        s.theta.segment(offsets[c], comps[c].num_coefs())));
  }
  FitDiagnostics& d = model.mutable_diagnostics();
  d.solver = s.solver;
  d.parameters = P + 1;
  d.iterations = s.iterations;
  d.grad_norm = s.grad_norm;
  return model;
}

AnovaModel FitFeedforward(const Dataset& data, const Eigen::VectorXd& y,
                          const std::vector<IndexSet>& terms,
                          const FitOptions& options) {
  const int n = data.n();
  std::vector<MlpNetwork> nets;
  for (const auto& j : terms) {
    nets.emplace_back(j.order(), options.hidden,
                      DeriveSeed(options.seed, "mlp-init", j.indices()));
  }
  double beta0 = Mean(y);

  struct AdamState {
    Eigen::VectorXd m, v;
  };
  std::vector<AdamState> state;
  for (const auto& net : nets) {
    state.push_back({Eigen::VectorXd::Zero(net.num_params()),
                     Eigen::VectorXd::Zero(net.num_params())});
  }
  double m0 = 0.0, v0 = 0.0;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  long step = 0;

  // Local inputs per component, gathered once.
  std::vector<RowMatrix> inputs;
  for (const auto& j : terms) {
    RowMatrix in(n, j.order());
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < j.order(); ++a) in(i, a) = data(i, j[a]);
    }
    inputs.push_back(std::move(in));
  }

  std::vector<int> order(n);
  std::vector<MlpNetwork::Cache> caches(nets.size());
  std::vector<Eigen::VectorXd> grads(nets.size());
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (int i = 0; i < n; ++i) order[i] = i;
    const int ep[] = {epoch};
    Rng rng(DeriveSeed(options.seed, "mlp-epoch", ep));
    for (int i = n - 1; i > 0; --i) {
      std::swap(order[i], order[UniformIndex(rng, i + 1)]);
    }
    for (int start = 0; start < n; start += options.batch_size) {
      const int m = std::min(options.batch_size, n - start);
      Eigen::VectorXd pred = Eigen::VectorXd::Constant(m, beta0);
      for (std::size_t c = 0; c < nets.size(); ++c) {
        RowMatrix in(m, terms[c].order());
        for (int r = 0; r < m; ++r) in.row(r) = inputs[c].row(order[start + r]);
        pred += nets[c].ForwardBatch(in, &caches[c]);
      }
      Eigen::VectorXd resid(m);
      for (int r = 0; r < m; ++r) resid[r] = pred[r] - y[order[start + r]];
      const double loss = resid.squaredNorm() / m;
      if (!std::isfinite(loss)) {
        throw NumericalError("non-finite training loss at epoch " +
                             std::to_string(epoch));
      }
      const Eigen::VectorXd dout = 2.0 * resid / m;
      ++step;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
      for (std::size_t c = 0; c < nets.size(); ++c) {
        grads[c] = options.weight_decay * nets[c].params();
        nets[c].BackwardBatch(caches[c], dout, grads[c]);
        AdamState& s = state[c];
        s.m = b1 * s.m + (1 - b1) * grads[c];
        s.v = b2 * s.v + (1 - b2) * grads[c].cwiseAbs2();
        nets[c].mutable_params().array() -=
            options.learning_rate * (s.m.array() / c1) /
            ((s.v.array() / c2).sqrt() + eps);
      }
      const double g0 = dout.sum();
      m0 = b1 * m0 + (1 - b1) * g0;
      v0 = b2 * v0 + (1 - b2) * g0 * g0;
      beta0 -= options.learning_rate * (m0 / c1) / (std::sqrt(v0 / c2) + eps);
    }
  }

  AnovaModel model(data.specs(), beta0);
  for (std::size_t c = 0; c < nets.size(); ++c) {
    model.SetComponent(
        std::make_shared<MlpComponent>(terms[c], std::move(nets[c])));
  }
  FitDiagnostics& d = model.mutable_diagnostics();
  d.solver = "adam";
  d.iterations = static_cast<int>(step);
  int params = 1;
  for (const auto& [j, comp] : model.components()) {
    params += static_cast<const MlpComponent&>(*comp).network().num_params();
  }
  d.parameters = params;
  return model;
}

GridComponent AsGrid(const ComponentFunction& comp, const Dataset& data,
                     const FitOptions& options) {
  if (const auto* grid = dynamic_cast<const GridComponent*>(&comp)) {
    return *grid;
  }
  const int k = comp.order();
  const int count =
      options.tabulation_knots[std::min(k, 3) - 1];
  auto knots = AxisKnots(comp.set(), data, count);
  std::vector<double> x(data.p(), 0.0);
  return GridComponent::Tabulate(
      comp.set(), std::move(knots), [&](std::span<const double> local) {
        for (int a = 0; a < k; ++a) x[comp.set()[a]] = local[a];
        return comp.Evaluate(x);
      });
}

// Adds `piece` to the component stored for its set, merging knot vectors.
void Accumulate(std::map<IndexSet, GridComponent>& comps,
                const GridComponent& piece) {
  const auto it = comps.find(piece.set());
  if (it == comps.end()) {
    comps.emplace(piece.set(), piece);
    return;
  }
  const GridComponent& have = it->second;
  std::vector<std::vector<double>> knots;
  bool same = true;
  for (int a = 0; a < piece.order(); ++a) {
    knots.push_back(MergeKnots(have.knots()[a], piece.knots()[a]));
    same = same && knots[a] == have.knots()[a] && knots[a] == piece.knots()[a];
  }
  const GridComponent lhs = same ? have : have.RefinedTo(knots);
  const GridComponent rhs = same ? piece : piece.RefinedTo(knots);
  it->second = GridComponent(piece.set(), knots, lhs.coefs() + rhs.coefs());
}

}  // namespace

const char* BackendName(Backend backend) {
  return backend == Backend::kFeedforward ? "feedforward" : "grid";
}

Backend ParseBackend(const std::string& name) {
  if (name == "grid") return Backend::kGrid;
  if (name == "feedforward") return Backend::kFeedforward;
  throw InvalidArgumentError("unknown model backend \"" + name +
                             "\" (expected grid or feedforward)");
}

int FitOptions::KnotsForOrder(int order) const {
  if (order <= 1) return knots_main;
  if (order == 2) return knots_pair;
  return knots_high;
}

void FitOptions::Validate() const {
  if (knots_main < 2 || knots_pair < 2 || knots_high < 2) {
    throw InvalidArgumentError("knots must be >= 2 per dimension");
  }
  if (!(ridge >= 0.0)) throw InvalidArgumentError("ridge must be >= 0");
  if (backend == Backend::kFeedforward) {
    for (int h : hidden) {
      if (h < 1) throw InvalidArgumentError("hidden widths must be positive");
    }
    if (!(learning_rate > 0.0)) {
      throw InvalidArgumentError("learning rate must be positive");
    }
    if (batch_size < 1 || epochs < 0) {
      throw InvalidArgumentError("batch size and epochs must be positive");
    }
  }
  if (tabulation_knots.size() != 3) {
    throw InvalidArgumentError("tabulation_knots needs three entries");
  }
  for (int t : tabulation_knots) {
    if (t < 2) throw InvalidArgumentError("tabulation knots must be >= 2");
  }
}

json FitOptionsToJson(const FitOptions& o) {
  json out = {{"backend", BackendName(o.backend)}, {"identify", o.identify}};
  if (o.backend == Backend::kGrid) {
    out["knots"] = {o.knots_main, o.knots_pair, o.knots_high};
    out["ridge"] = o.ridge;
  } else {
    out["hidden"] = o.hidden;
    out["learning_rate"] = o.learning_rate;
    out["batch_size"] = o.batch_size;
    out["weight_decay"] = o.weight_decay;
    out["epochs"] = o.epochs;
    out["seed"] = o.seed;
    out["tabulation_knots"] = o.tabulation_knots;
  }
  return out;
}

void FitOptionsFromJson(const json& doc, FitOptions* o) {
  try {
    if (doc.contains("backend")) {
      o->backend = ParseBackend(doc["backend"].get<std::string>());
    }
    if (doc.contains("knots")) {
      const auto k = doc["knots"].get<std::vector<int>>();
      if (k.size() != 3) throw InvalidArgumentError("knots needs three entries");
      o->knots_main = k[0];
      o->knots_pair = k[1];
      o->knots_high = k[2];
    }
    if (doc.contains("ridge")) o->ridge = doc["ridge"].get<double>();
    if (doc.contains("hidden")) o->hidden = doc["hidden"].get<std::vector<int>>();
    if (doc.contains("learning_rate")) {
      o->learning_rate = doc["learning_rate"].get<double>();
    }
    if (doc.contains("batch_size")) o->batch_size = doc["batch_size"].get<int>();
    if (doc.contains("weight_decay")) {
      o->weight_decay = doc["weight_decay"].get<double>();
    }
    if (doc.contains("epochs")) o->epochs = doc["epochs"].get<int>();
    if (doc.contains("seed")) o->seed = doc["seed"].get<uint64_t>();
    if (doc.contains("tabulation_knots")) {
      o->tabulation_knots = doc["tabulation_knots"].get<std::vector<int>>();
    }
    if (doc.contains("identify")) o->identify = doc["identify"].get<bool>();
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("bad fit options: ") + e.what());
  }
}

AnovaModel::AnovaModel(std::vector<FeatureSpec> specs, double beta0)
    : specs_(std::move(specs)), beta0_(beta0) {}

const ComponentFunction* AnovaModel::Find(const IndexSet& j) const {
  const auto it = components_.find(j);
  return it == components_.end() ? nullptr : it->second.get();
}

void AnovaModel::SetComponent(ComponentPtr component) {
  const IndexSet j = component->set();
  if (j.empty() || j.indices().back() >= p()) {
    throw InvalidArgumentError("component " + j.ToString() +
                               " out of range for p=" + std::to_string(p()));
  }
  components_[j] = std::move(component);
}

std::vector<int> AnovaModel::CountByOrder() const {
  std::vector<int> counts(5, 0);
  for (const auto& [j, c] : components_) ++counts[j.order()];
  return counts;
}

void AnovaModel::CheckPoint(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != p()) {
    throw InvalidArgumentError("dimension mismatch: point has " +
                               std::to_string(x.size()) +
                               " coordinates, model expects " +
                               std::to_string(p()));
  }
}

double AnovaModel::Predict(std::span<const double> x) const {
  CheckPoint(x);
  double sum = beta0_;
  for (const auto& [j, c] : components_) sum += c->Evaluate(x);
  return sum;
}

Eigen::VectorXd AnovaModel::PredictBatch(const RowMatrix& points) const {
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out[i] = Predict({points.data() + i * points.cols(),
                      static_cast<std::size_t>(points.cols())});
  }
  return out;
}

std::map<IndexSet, double> AnovaModel::PredictComponents(
    std::span<const double> x) const {
  CheckPoint(x);
  std::map<IndexSet, double> out;
  for (const auto& [j, c] : components_) out[j] = c->Evaluate(x);
  return out;
}

AnovaModel FitToTargets(const Dataset& data, const Eigen::VectorXd& targets,
                        const std::vector<IndexSet>& R,
                        const FitOptions& options) {
  options.Validate();
  if (targets.size() != data.n()) {
    throw InvalidArgumentError("one target per data row required");
  }
  if (!targets.allFinite()) throw NumericalError("non-finite fit targets");
  const auto terms = CheckTerms(R, data.p());
  AnovaModel model;
  if (terms.empty()) {
    model = AnovaModel(data.specs(), Mean(targets));
    model.mutable_diagnostics().solver = "constant";
    model.mutable_diagnostics().parameters = 1;
  } else if (options.backend == Backend::kGrid) {
    model = FitGrid(data, targets, terms, options);
  } else {
    model = FitFeedforward(data, targets, terms, options);
  }
  const Eigen::VectorXd before = model.PredictBatch(data.values());
  if (options.identify) {
    FitDiagnostics kept = model.diagnostics();
    model = IdentifiableTransform(model, data, options);
    const Eigen::VectorXd after = model.PredictBatch(data.values());
    kept.transform_change = (after - before).cwiseAbs().maxCoeff();
    model.mutable_diagnostics() = kept;
  }
  const Eigen::VectorXd fitted = model.PredictBatch(data.values());
  FitDiagnostics& d = model.mutable_diagnostics();
  d.train_mse = (fitted - targets).squaredNorm() / data.n();
  d.target_variance = PopulationVariance(targets);
  if (!std::isfinite(d.train_mse)) throw NumericalError("non-finite fit");
  return model;
}

AnovaModel Fit(Predictor& pred, const Dataset& data,
               const std::vector<IndexSet>& R, const FitOptions& options) {
  if (pred.dim() != data.p()) {
    throw InvalidArgumentError("dimension mismatch between data and predictor");
  }
  const Eigen::VectorXd y = pred.EvaluateBatch(data.values());
  return FitToTargets(data, y, R, options);
}

Eigen::VectorXd MarginalWeights(const Dataset& data, int feature,
                                const std::vector<double>& knots) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(knots.size()));
  for (int i = 0; i < data.n(); ++i) {
    const AxisLocation loc = LocateOnKnots(knots, data(i, feature));
    w[loc.lo] += 1.0 - loc.w_hi;
    w[loc.lo + 1] += loc.w_hi;
  }
  return w / data.n();
}

AnovaModel IdentifiableTransform(const AnovaModel& model, const Dataset& data,
                                 const FitOptions& options) {
  if (data.p() != model.p()) {
    throw InvalidArgumentError("dimension mismatch between model and data");
  }
  std::map<IndexSet, GridComponent> comps;
  int top = 0;
  for (const auto& [j, c] : model.components()) {
    comps.emplace(j, AsGrid(*c, data, options));
    top = std::max(top, j.order());
  }
  double beta0 = model.beta0();
  for (int k = top; k >= 1; --k) {
    std::vector<IndexSet> level;
    for (const auto& [j, c] : comps) {
      if (j.order() == k) level.push_back(j);
    }
    for (const auto& j : level) {
      const GridComponent comp = comps.at(j);
      std::vector<Eigen::VectorXd> w;
      for (int a = 0; a < k; ++a) {
        w.push_back(MarginalWeights(data, j[a], comp.knots()[a]));
      }
      for (unsigned mask = 0; mask < (1u << k); ++mask) {
        Eigen::VectorXd t = comp.coefs();
        std::vector<int> shape = comp.shape();
        for (int a = 0; a < k; ++a) {
          if ((mask >> a) & 1) t = CenterAxis(t, shape, a, w[a]);
        }
        std::vector<std::vector<double>> knots;
        for (int a = k - 1; a >= 0; --a) {
          if ((mask >> a) & 1) continue;
          t = ContractAxis(t, shape, a, w[a]);
          shape.erase(shape.begin() + a);
        }
        for (int a = 0; a < k; ++a) {
          if ((mask >> a) & 1) knots.push_back(comp.knots()[a]);
        }
        if (mask == 0) {
          beta0 += t[0];
        } else if (mask + 1 == (1u << k)) {
          comps.insert_or_assign(j, GridComponent(j, std::move(knots), t));
        } else {
          Accumulate(comps, GridComponent(j.SubsetByMask(mask),
                                          std::move(knots), t));
        }
      }
    }
  }
  AnovaModel out(model.specs(), beta0);
  for (auto& [j, c] : comps) {
    out.SetComponent(std::make_shared<GridComponent>(std::move(c)));
  }
  out.mutable_diagnostics() = model.diagnostics();
  out.set_identifiable(true);
  return out;
}

std::map<IndexSet, double> ComponentImportance(const AnovaModel& model,
                                               const Dataset& data) {
  if (!model.identifiable()) {
    return ComponentImportance(IdentifiableTransform(model, data), data);
  }
  std::map<IndexSet, double> out;
  for (const auto& [j, c] : model.components()) {
    Eigen::VectorXd v(data.n());
    for (int i = 0; i < data.n(); ++i) v[i] = c->Evaluate(data.row(i));
    out[j] = PopulationVariance(v);
  }
  return out;
}

Eigen::VectorXd AnovaShapLocal(const AnovaModel& model,
                               std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.p()) {
    throw InvalidArgumentError("dimension mismatch: point has " +
                               std::to_string(x.size()) +
                               " coordinates, model expects " +
                               std::to_string(model.p()));
  }
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(model.p());
  for (const auto& [j, c] : model.components()) {
    const double v = c->Evaluate(x);
    for (int l : j) phi[l] += v;
  }
  return phi;
}

Eigen::VectorXd AnovaShapGlobal(const AnovaModel& model, const Dataset& data) {
  if (!model.identifiable()) {
    return AnovaShapGlobal(IdentifiableTransform(model, data), data);
  }
  RowMatrix phi(data.n(), model.p());
  for (int i = 0; i < data.n(); ++i) {
    phi.row(i) = AnovaShapLocal(model, data.row(i)).transpose();
  }
  Eigen::VectorXd out(model.p());
  for (int l = 0; l < model.p(); ++l) out[l] = PopulationVariance(phi.col(l));
  return out;
}

Eigen::VectorXd MaxNormalize(const Eigen::VectorXd& v) {
  const double m = v.size() ? v.maxCoeff() : 0.0;
  return m > 0.0 ? Eigen::VectorXd(v / m) : Eigen::VectorXd::Zero(v.size());
}

std::map<IndexSet, double> MaxNormalize(const std::map<IndexSet, double>& v) {
  double m = 0.0;
  for (const auto& [j, s] : v) m = std::max(m, s);
  std::map<IndexSet, double> out;
  for (const auto& [j, s] : v) out[j] = m > 0.0 ? s / m : 0.0;
  return out;
}

PartialDependenceTable PartialDependence(const AnovaModel& model,
                                         const IndexSet& j, int resolution) {
  const ComponentFunction* comp = model.Find(j);
  if (comp == nullptr) {
    throw InvalidArgumentError("unknown component " + j.ToString());
  }
  if (resolution < 2) throw InvalidArgumentError("resolution must be >= 2");
  const int k = j.order();
  std::vector<std::vector<double>> axes;
  int rows = 1;
  for (int l : j) {
    axes.push_back(model.specs()[l].kind == FeatureKind::kBinary
                       ? std::vector<double>{0.0, 1.0}
                       : UniformKnots(resolution));
    rows *= static_cast<int>(axes.back().size());
  }
  PartialDependenceTable t;
  t.j = j;
  t.raw_grid.resize(rows, k);
  t.scaled_grid.resize(rows, k);
  t.values.resize(rows);
  std::vector<double> x(model.p(), 0.0);
  for (int r = 0; r < rows; ++r) {
    int rest = r;
    for (int a = k - 1; a >= 0; --a) {
      const int size = static_cast<int>(axes[a].size());
      const double v = axes[a][rest % size];
      rest /= size;
      t.scaled_grid(r, a) = v;
      t.raw_grid(r, a) = model.specs()[j[a]].Unscale(v);
      x[j[a]] = v;
    }
    t.values[r] = comp->Evaluate(x);
  }
  return t;
}

double RSquared(const Eigen::VectorXd& target, const Eigen::VectorXd& fitted) {
  const double var = PopulationVariance(target);
  const double mse = (target - fitted).squaredNorm() / target.size();
  return var > 0.0 ? 1.0 - mse / var : (mse == 0.0 ? 1.0 : 0.0);
}

}  // namespace anovadistill

#pragma once

// Glue between raw datasets and the solvers: optional preprocessing, model
// fitting (decentralized or collocated), prediction, and model files.
//
// Preprocessed feature columns have mean zero, so they cannot reproduce the
// ~nominal voltage level of the target. When preprocessing is on, the
// target mean is therefore split off as an intercept and the solvers fit the
// centered target. Every node already holds b, so this needs no extra
// communication.

#include <fstream>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "cola/dataio.hpp"
#include "cola/engine.hpp"
#include "cola/evaluate.hpp"
#include "cola/model.hpp"
#include "cola/preprocess.hpp"

namespace cola {

struct TrainedModel {
  Vector coefficients;
  std::optional<ColumnStats> stats;
  double intercept = 0.0;

  Vector predict(const Matrix& features) const {
    return cola::predict(coefficients, features, stats, intercept);
  }

  /// Coefficients expressed on the raw feature columns (x_j / nu_j).
  Vector raw_scale_weights() const {
    if (!stats) return coefficients;
    return coefficients.cwiseQuotient(stats->nu);
  }
};

struct PreparedData {
  ColumnDataset data;
  std::optional<ColumnStats> stats;
  double intercept = 0.0;
};

inline PreparedData prepare(const ColumnDataset& d, bool preprocess) {
  ensure_valid(d);
  if (!preprocess) return {d, std::nullopt, 0.0};
  auto [data, stats] = preprocess_matrix(d);
  const double intercept = data.target.mean();
  data.target.array() -= intercept;
  return {std::move(data), std::move(stats), intercept};
}

struct TrainingOutcome {
  TrainedModel model;
  RunResult run;
};

inline TrainingOutcome train_decentralized(const ExperimentConfig& config, const ColumnDataset& d,
                                           SolverOptions opts = {}) {
  config.validate();
  PreparedData p = prepare(d, config.preprocess);
  RunResult r = run(config, p.data, opts);
  TrainedModel m{r.x, std::move(p.stats), p.intercept};
  return {std::move(m), std::move(r)};
}

struct CollocatedModel {
  TrainedModel model;
  int sweeps = 0;
  bool converged = false;
};

inline CollocatedModel train_collocated(const ColumnDataset& d, double lambda, double eta,
                                        bool preprocess, double tol = 1e-12,
                                        int max_sweeps = 100000) {
  PreparedData p = prepare(d, preprocess);
  auto r = collocated_solve(p.data.features, p.data.target, lambda, eta, tol, max_sweeps);
  return {TrainedModel{std::move(r.x), std::move(p.stats), p.intercept}, r.sweeps, r.converged};
}

inline nlohmann::json to_json(const TrainedModel& m) {
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json j;
  j["coefficients"] = vec(m.coefficients);
  j["intercept"] = m.intercept;
  if (m.stats) {
    j["stats"] = {{"mu", vec(m.stats->mu)}, {"nu", vec(m.stats->nu)}};
  } else {
    j["stats"] = nullptr;
  }
  return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
  };
  try {
    TrainedModel m;
    m.coefficients = vec(j.at("coefficients"));
    m.intercept = j.value("intercept", 0.0);
    if (j.contains("stats") && !j["stats"].is_null()) {
      m.stats = ColumnStats{vec(j["stats"].at("mu")), vec(j["stats"].at("nu"))};
      if (m.stats->mu.size() != m.coefficients.size() ||
          m.stats->nu.size() != m.coefficients.size()) {
        throw Error(ErrorKind::DimensionMismatch, "model stats do not match coefficients");
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("bad model file: ") + e.what());
  }
}

inline void save_model(const TrainedModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write model to " + path);
  out << to_json(m).dump(2) << '\n';
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("bad model file: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace cola

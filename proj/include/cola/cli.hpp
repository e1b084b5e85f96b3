#pragma once

// Command-line experiment runner. Exit codes: 0 success, 1 validation or
// configuration error, 2 runtime/solver error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cola/dataio.hpp"
#include "cola/engine.hpp"
#include "cola/evaluate.hpp"
#include "cola/pipeline.hpp"

namespace cola::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

/// key=value lines, in insertion order.
class Summary {
 public:
  template <typename T>
  void add(const std::string& key, const T& value) {
    std::ostringstream s;
    s << std::setprecision(17) << value;
    entries_.emplace_back(key, s.str());
  }
  void add(const std::string& key, bool value) { entries_.emplace_back(key, value ? "true" : "false"); }
  void add(const std::string& key, const char* value) { entries_.emplace_back(key, value); }
  void add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

namespace detail {

// Errors raised while running rounds are runtime failures (exit 2);
// everything earlier is a configuration or input problem (exit 1).
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string format_ranges(const std::vector<std::pair<std::size_t, std::size_t>>& ranges) {
  if (ranges.empty()) return "none";
  std::string out;
  for (const auto& [a, b] : ranges) {
    if (!out.empty()) out += ';';
    out += std::to_string(a) + '-' + std::to_string(b);
  }
  return out;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex_id(const std::string& s) {
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << fnv1a(s);
  return o.str();
}

inline SplitMode parse_split(const std::string& spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorKind::InvalidConfig, "split must be contiguous:HOURS or random:FRACTION");
  }
  const std::string kind = spec.substr(0, colon);
  double value = 0.0;
  try {
    value = std::stod(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidConfig, "bad split value in '" + spec + "'");
  }
  if (kind == "contiguous") return ContiguousHours{value};
  if (kind == "random") return RandomFraction{value, seed};
  throw Error(ErrorKind::InvalidConfig, "unknown split kind '" + kind + "'");
}

inline void apply_topology(ExperimentConfig& c, const std::string& spec) {
  if (spec == "ring") {
    c.topology = TopologyKind::Ring;
  } else if (spec == "complete") {
    c.topology = TopologyKind::Complete;
  } else if (spec.rfind("file:", 0) == 0 && spec.size() > 5) {
    c.topology = TopologyKind::File;
    c.topology_path = spec.substr(5);
  } else {
    throw Error(ErrorKind::InvalidConfig, "topology must be ring, complete or file:PATH");
  }
}

inline void apply_partition(ExperimentConfig& c, const std::string& spec) {
  if (spec == "one") {
    c.partition = {PartitionStrategy::OnePerNode, 0};
    return;
  }
  if (spec.rfind("blocks:", 0) == 0) {
    try {
      const long k = std::stol(spec.substr(7));
      if (k >= 1) {
        c.partition = {PartitionStrategy::Blocks, static_cast<std::size_t>(k)};
        return;
      }
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorKind::InvalidConfig, "partition must be one or blocks:K");
}

inline void add_metrics(Summary& s, const std::string& prefix, const RegressionMetrics& m) {
  s.add(prefix + "_rmse", m.rmse);
  s.add(prefix + "_max_abs_error", m.max_abs_error);
  s.add(prefix + "_mean_error", m.mean_error);
  s.add(prefix + "_samples", m.samples);
}

inline std::string config_echo(const ExperimentConfig& c) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "topology=" << (c.topology == TopologyKind::Ring       ? "ring"
                       : c.topology == TopologyKind::Complete ? "complete"
                                                              : "file:" + c.topology_path);
  s << " partition="
    << (c.partition.strategy == PartitionStrategy::OnePerNode
            ? std::string("one")
            : "blocks:" + std::to_string(c.partition.nodes));
  s << " lambda=" << c.lambda << " eta=" << c.eta << " preprocess=" << c.preprocess;
  s << " scheduler=" << (c.scheduler == Scheduler::Synchronous ? "sync" : "random");
  if (const auto* f = std::get_if<FixedIterations>(&c.stopping)) {
    s << " iters=" << f->rounds;
  } else {
    const auto& u = std::get<UpdateMagnitude>(c.stopping);
    s << " eps=" << u.epsilon << " patience=" << u.patience << " max_rounds=" << u.max_rounds;
  }
  s << " seed=" << c.seed;
  return s.str();
}

inline void write_series_csv(const std::string& path, const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n' << std::setprecision(17);
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c][r];
    out << '\n';
  }
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace detail

/// Options shared by the synthetic-day generator.
struct GenerateOptions {
  SyntheticParams params;
  std::string preset = "default";
  std::string out;
  double boost = 0.0;
  std::size_t onset = 0;
  std::size_t end = 0;
};

inline int cmd_generate(const GenerateOptions& o, std::ostream& out) {
  SyntheticParams p = o.params;
  if (o.preset == "low-rank") {
    const auto base = p;
    p = low_rank_day(base.seed);
    p.samples_per_day = base.samples_per_day;
    p.inverter_count = base.inverter_count;
  } else if (o.preset != "default") {
    throw Error(ErrorKind::InvalidConfig, "preset must be default or low-rank");
  }
  ColumnDataset d = generate_day(p);
  if (o.boost > 0.0) d = apply_overvoltage(d, {o.onset, o.end, o.boost});
  write_csv(d, o.out);
  Summary s;
  s.add("output", o.out);
  s.add("rows", d.rows());
  s.add("columns", d.cols() + 1);
  s.add("features", d.cols());
  s.add("seed", p.seed);
  s.write(out);
  return kOk;
}

struct TrainOptions {
  ExperimentConfig config;
  std::string data;
  std::string topology = "ring";
  std::string partition = "one";
  std::string scheduler = "sync";
  int iters = 0;
  double eps = 0.0;
  int patience = 5;
  int max_rounds = 10000;
  std::string split;
  std::string model_out;
  std::string summary_out;
};

inline int cmd_train(TrainOptions o, std::ostream& out) {
  ExperimentConfig& c = o.config;
  detail::apply_topology(c, o.topology);
  detail::apply_partition(c, o.partition);
  if (o.scheduler == "sync") {
    c.scheduler = Scheduler::Synchronous;
  } else if (o.scheduler == "random") {
    c.scheduler = Scheduler::RandomOrder;
  } else {
    throw Error(ErrorKind::InvalidConfig, "scheduler must be sync or random");
  }
  if (o.eps > 0.0) {
    c.stopping = UpdateMagnitude{o.eps, o.patience, o.max_rounds};
  } else if (o.iters > 0) {
    c.stopping = FixedIterations{o.iters};
  } else {
    throw Error(ErrorKind::InvalidConfig, "give --iters N or --eps E");
  }
  c.validate();

  const ColumnDataset all = read_csv(o.data);
  ensure_valid(all);
  std::optional<SplitResult> parts;
  if (!o.split.empty()) parts = split(all, detail::parse_split(o.split, c.seed));
  const ColumnDataset& train = parts ? parts->train : all;

  TrainingOutcome t;
  try {
    t = train_decentralized(c, train);
  } catch (const Error& e) {
    const bool config_kind = e.kind() == ErrorKind::InvalidConfig ||
                             e.kind() == ErrorKind::InvalidPartition ||
                             e.kind() == ErrorKind::TopologyTooSmall ||
                             e.kind() == ErrorKind::InvalidTopology ||
                             e.kind() == ErrorKind::NotDoublyStochastic ||
                             e.kind() == ErrorKind::NegativeWeight ||
                             e.kind() == ErrorKind::IoFailure;
    if (config_kind) throw;
    throw detail::RuntimeFailure(e.what());
  }
  if (!o.model_out.empty()) save_model(t.model, o.model_out);

  const auto& trace = t.run.trace;
  const std::uint64_t rounds = trace.rows.size();
  const std::uint64_t nodes = t.run.nodes;
  const std::string echo = detail::config_echo(c);

  Summary s;
  s.add("run_id", detail::hex_id(echo + " data=" + o.data));
  s.add("config", echo);
  s.add("nodes", nodes);
  s.add("rounds", rounds);
  s.add("stop_reason", to_string(t.run.reason));
  s.add("final_objective", trace.back().objective);
  s.add("final_loss", trace.back().loss);
  s.add("comm_total", trace.back().comm_cumulative);
  s.add("broadcast_total", comm_cost(CommPattern::Broadcast, nodes, 0));
  if (nodes >= 3) {
    s.add("break_even_iterations", break_even_iterations(nodes));
    s.add("ring_cheaper_than_broadcast",
          comm_cost(CommPattern::Ring, nodes, rounds) < comm_cost(CommPattern::Broadcast, nodes, 0));
  }
  detail::add_metrics(s, "train", regression_metrics(t.model.predict(train.features), train.target));
  if (parts) {
    detail::add_metrics(s, "test",
                        regression_metrics(t.model.predict(parts->test.features), parts->test.target));
  }
  if (!c.trace_path.empty()) s.add("trace", c.trace_path);
  s.write(out);
  if (!o.summary_out.empty()) {
    std::ofstream f(o.summary_out);
    if (!f) throw Error(ErrorKind::IoFailure, "cannot write " + o.summary_out);
    s.write(f);
  }
  return kOk;
}

struct BaselineOptions {
  std::string data;
  double lambda = 0.0;
  double eta = 0.5;
  bool preprocess = false;
  double tol = 1e-12;
  int max_sweeps = 100000;
  std::string split;
  std::uint64_t seed = 0;
  std::string model_out;
};

inline int cmd_baseline(const BaselineOptions& o, std::ostream& out) {
  ElasticNet(o.lambda, o.eta);  // validates parameters
  const ColumnDataset all = read_csv(o.data);
  ensure_valid(all);
  std::optional<SplitResult> parts;
  if (!o.split.empty()) parts = split(all, detail::parse_split(o.split, o.seed));
  const ColumnDataset& train = parts ? parts->train : all;

  const CollocatedModel fit = train_collocated(train, o.lambda, o.eta, o.preprocess, o.tol, o.max_sweeps);
  if (!o.model_out.empty()) save_model(fit.model, o.model_out);

  Summary s;
  s.add("sweeps", fit.sweeps);
  s.add("converged", fit.converged);
  std::ostringstream coef, raw;
  coef << std::setprecision(17);
  raw << std::setprecision(17);
  const Vector w = fit.model.raw_scale_weights();
  for (Index j = 0; j < w.size(); ++j) {
    coef << (j ? ";" : "") << fit.model.coefficients(j);
    raw << (j ? ";" : "") << w(j);
  }
  s.add("coefficients", coef.str());
  s.add("raw_weights", raw.str());
  s.add("intercept", fit.model.intercept);
  detail::add_metrics(s, "train", regression_metrics(fit.model.predict(train.features), train.target));
  if (parts) {
    detail::add_metrics(
        s, "test", regression_metrics(fit.model.predict(parts->test.features), parts->test.target));
  }
  s.write(out);
  return kOk;
}

struct EvaluateOptions {
  std::string model;
  std::string data;
  std::string split;
  std::uint64_t seed = 0;
  bool detect = false;
  double nominal = 7200.0;
  double threshold = 0.05;
};

inline int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  const TrainedModel model = load_model(o.model);
  const ColumnDataset all = read_csv(o.data);
  ensure_valid(all);
  if (model.coefficients.size() != all.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "model has " + std::to_string(model.coefficients.size()) +
                    " coefficients, data has " + std::to_string(all.cols()) + " features");
  }
  Summary s;
  if (!o.split.empty()) {
    const auto parts = split(all, detail::parse_split(o.split, o.seed));
    detail::add_metrics(s, "train",
                        regression_metrics(model.predict(parts.train.features), parts.train.target));
    detail::add_metrics(s, "test",
                        regression_metrics(model.predict(parts.test.features), parts.test.target));
  } else {
    detail::add_metrics(s, "all", regression_metrics(model.predict(all.features), all.target));
  }
  if (o.detect) {
    const Vector predicted = model.predict(all.features);
    s.add("overvoltage_cutoff", o.nominal * (1.0 + o.threshold));
    s.add("overvoltage_predicted",
          detail::format_ranges(detect_overvoltage(predicted, o.nominal, o.threshold)));
    s.add("overvoltage_actual",
          detail::format_ranges(detect_overvoltage(all.target, o.nominal, o.threshold)));
  }
  s.write(out);
  return kOk;
}

inline const std::vector<std::string>& experiment_presets() {
  static const std::vector<std::string> presets{"bound-check", "regression", "stagnation",
                                                "overvoltage"};
  return presets;
}

/// Settings shared by the experiment presets.
struct PresetSettings {
  double lambda = 1e-3;
  double eta = 0.5;
  int bound_rounds = 2000;
  int plot_rounds = 500;
  std::size_t boost_onset = 40;
  std::size_t boost_end = 60;
  double boost = 0.10;
  double train_hours = 5.0;
};

inline int cmd_experiment(const std::string& preset, const std::string& out_dir,
                          std::uint64_t seed, std::ostream& out) {
  const auto& names = experiment_presets();
  if (std::find(names.begin(), names.end(), preset) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::InvalidConfig, "unknown preset '" + preset + "'; choose one of " + list);
  }
  std::filesystem::create_directories(out_dir);
  const PresetSettings ps;
  auto path = [&](const std::string& name) { return (std::filesystem::path(out_dir) / name).string(); };
  Summary s;
  s.add("preset", preset);
  s.add("seed", seed);

  ExperimentConfig base;
  base.lambda = ps.lambda;
  base.eta = ps.eta;
  base.seed = seed;

  if (preset == "bound-check") {
    SyntheticParams p;
    p.seed = seed;
    const ColumnDataset day = generate_day(p);
    ExperimentConfig c = base;
    c.preprocess = true;
    c.stopping = FixedIterations{ps.bound_rounds};
    c.trace_path = path("bound_check_trace.csv");
    const auto t = train_decentralized(c, day);
    const auto holds = gamma_sum_check(t.run.trace);
    std::vector<double> round, objective, gamma, ok;
    for (std::size_t i = 0; i < holds.size(); ++i) {
      const auto& r = t.run.trace.rows[i];
      round.push_back(static_cast<double>(r.round));
      objective.push_back(r.objective);
      gamma.push_back(r.gamma_sum);
      ok.push_back(holds[i] ? 1.0 : 0.0);
    }
    detail::write_series_csv(path("bound_check.csv"), {"round", "objective", "gamma_sum", "bound_holds"},
                             {round, objective, gamma, ok});
    s.add("rounds", holds.size());
    s.add("bound_holds_every_round", std::all_of(holds.begin(), holds.end(), [](bool b) { return b; }));
  } else if (preset == "regression") {
    SyntheticParams p;
    p.seed = seed;
    const ColumnDataset day = generate_day(p);
    const auto parts = split(day, RandomFraction{0.5, seed});
    std::vector<std::vector<double>> cols;
    std::vector<double> hour, actual, part;
    for (Index i = 0; i < day.rows(); ++i) {
      hour.push_back(24.0 * static_cast<double>(i) / static_cast<double>(day.rows()));
      actual.push_back(day.target(i));
    }
    part.assign(static_cast<std::size_t>(day.rows()), 0.0);
    for (auto r : parts.train_rows) part[r] = 1.0;
    cols.push_back(hour);
    cols.push_back(actual);
    cols.push_back(part);
    for (bool pre : {false, true}) {
      ExperimentConfig c = base;
      c.preprocess = pre;
      c.stopping = FixedIterations{ps.plot_rounds};
      const auto t = train_decentralized(c, parts.train);
      cols.push_back(detail::to_std(t.model.predict(day.features)));
      const std::string tag = pre ? "preprocessed" : "raw";
      detail::add_metrics(s, tag + "_test",
                          regression_metrics(t.model.predict(parts.test.features), parts.test.target));
    }
    detail::write_series_csv(path("regression.csv"),
                             {"hour", "actual", "is_train", "predicted_raw", "predicted_preprocessed"},
                             cols);
  } else if (preset == "stagnation") {
    const ColumnDataset day = generate_day(low_rank_day(seed));
    for (bool pre : {false, true}) {
      ExperimentConfig c = base;
      c.preprocess = pre;
      c.stopping = FixedIterations{ps.plot_rounds};
      const std::string tag = pre ? "preprocessed" : "raw";
      c.trace_path = path("stagnation_" + tag + ".csv");
      const auto t = train_decentralized(c, day);
      const auto& rows = t.run.trace.rows;
      s.add(tag + "_final_loss", rows.back().loss);
      s.add(tag + "_max_dx_round50", rows[49].max_dx_norm());
      s.add(tag + "_max_dx_final", rows.back().max_dx_norm());
    }
  } else {
    SyntheticParams p;
    p.seed = seed;
    const ColumnDataset train_day = generate_day(p);
    const auto parts = split(train_day, ContiguousHours{ps.train_hours});
    SyntheticParams q = p;
    q.seed = seed + 1;
    const ColumnDataset test_day =
        apply_overvoltage(generate_day(q), {ps.boost_onset, ps.boost_end, ps.boost});

    ExperimentConfig c = base;
    c.eta = 0.0;
    c.preprocess = false;
    c.stopping = FixedIterations{1};
    const auto dec = train_decentralized(c, parts.train);
    const auto col = train_collocated(parts.train, c.lambda, 0.0, false, 1e-12, 100000);
    const Vector pd = dec.model.predict(test_day.features);
    const Vector pc = col.model.predict(test_day.features);
    std::vector<double> hour;
    for (Index i = 0; i < test_day.rows(); ++i) {
      hour.push_back(24.0 * static_cast<double>(i) / static_cast<double>(test_day.rows()));
    }
    detail::write_series_csv(path("overvoltage.csv"),
                             {"hour", "actual", "predicted_decentralized", "predicted_collocated"},
                             {hour, detail::to_std(test_day.target), detail::to_std(pd), detail::to_std(pc)});
    const double nominal = p.nominal_volts;
    s.add("injected_window", std::to_string(ps.boost_onset) + "-" + std::to_string(ps.boost_end - 1));
    s.add("overvoltage_actual", detail::format_ranges(detect_overvoltage(test_day.target, nominal)));
    s.add("overvoltage_decentralized", detail::format_ranges(detect_overvoltage(pd, nominal)));
    s.add("overvoltage_collocated", detail::format_ranges(detect_overvoltage(pc, nominal)));
    s.add("decentralized_comm", dec.run.trace.back().comm_cumulative);
    s.add("broadcast_comm", comm_cost(CommPattern::Broadcast, dec.run.nodes, 0));
    detail::add_metrics(s, "decentralized_test", regression_metrics(pd, test_day.target));
    detail::add_metrics(s, "collocated_test", regression_metrics(pc, test_day.target));
  }
  s.add("out_dir", out_dir);
  s.write(out);
  return kOk;
}

/// Entry point; `args` excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized linear learning for inverter voltage prediction", "cola"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic inverter voltage day as CSV");
  g->add_option("--out", gen.out, "Output CSV path")->required();
  g->add_option("--seed", gen.params.seed, "Random seed");
  g->add_option("--preset", gen.preset, "default or low-rank");
  g->add_option("--samples", gen.params.samples_per_day, "Samples per day");
  g->add_option("--inverters", gen.params.inverter_count, "Inverters including the meter column");
  g->add_option("--nominal", gen.params.nominal_volts, "Nominal voltage");
  g->add_option("--noise", gen.params.noise_std, "Feature noise std (V)");
  g->add_option("--target-noise", gen.params.target_noise_std, "Target noise std (V)");
  g->add_option("--swing", gen.params.swing_scale, "Solar/load swing multiplier");
  g->add_option("--collinear", gen.params.collinear_columns, "Near-duplicate columns");
  g->add_option("--jitter", gen.params.collinear_jitter, "Jitter of duplicated columns (V)");
  g->add_option("--boost", gen.boost, "Overvoltage boost fraction");
  g->add_option("--onset", gen.onset, "First boosted sample");
  g->add_option("--end", gen.end, "One past the last boosted sample");

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Run decentralized training on a dataset");
  t->add_option("--data", tr.data, "Input CSV")->required();
  t->add_option("--topology", tr.topology, "ring, complete or file:PATH");
  t->add_option("--partition", tr.partition, "one or blocks:K");
  t->add_option("--lambda", tr.config.lambda, "Regularization weight");
  t->add_option("--eta", tr.config.eta, "Elastic-net mix in [0,1]");
  t->add_flag("--preprocess", tr.config.preprocess, "Center and normalize columns");
  t->add_option("--scheduler", tr.scheduler, "sync or random");
  t->add_option("--iters", tr.iters, "Fixed number of rounds");
  t->add_option("--eps", tr.eps, "Update-magnitude threshold");
  t->add_option("--patience", tr.patience, "Quiet rounds required to stop");
  t->add_option("--max-rounds", tr.max_rounds, "Round cap for the update-magnitude rule");
  t->add_option("--seed", tr.config.seed, "Random seed");
  t->add_option("--split", tr.split, "contiguous:HOURS or random:FRACTION");
  t->add_option("--trace", tr.config.trace_path, "Per-round trace CSV");
  t->add_option("--model", tr.model_out, "Write the trained model (JSON)");
  t->add_option("--summary", tr.summary_out, "Also write the summary here");
  tr.config.preprocess = false;

  BaselineOptions bl;
  auto* b = app.add_subcommand("baseline", "Fit the collocated (centralized) model");
  b->add_option("--data", bl.data, "Input CSV")->required();
  b->add_option("--lambda", bl.lambda, "Regularization weight");
  b->add_option("--eta", bl.eta, "Elastic-net mix in [0,1]");
  b->add_flag("--preprocess", bl.preprocess, "Center and normalize columns");
  b->add_option("--tol", bl.tol, "Coordinate change tolerance");
  b->add_option("--max-sweeps", bl.max_sweeps, "Sweep limit");
  b->add_option("--split", bl.split, "contiguous:HOURS or random:FRACTION");
  b->add_option("--seed", bl.seed, "Random seed for random splits");
  b->add_option("--model", bl.model_out, "Write the fitted model (JSON)");

  EvaluateOptions ev;
  auto* e = app.add_subcommand("evaluate", "Score a model and optionally detect overvoltage");
  e->add_option("--model", ev.model, "Model JSON")->required();
  e->add_option("--data", ev.data, "Dataset CSV")->required();
  e->add_option("--split", ev.split, "contiguous:HOURS or random:FRACTION");
  e->add_option("--seed", ev.seed, "Random seed for random splits");
  e->add_flag("--detect-overvoltage", ev.detect, "Report overvoltage ranges");
  e->add_option("--nominal", ev.nominal, "Nominal voltage");
  e->add_option("--threshold", ev.threshold, "Overvoltage fraction above nominal");

  std::string preset;
  std::string out_dir = "experiment_out";
  std::uint64_t exp_seed = 7;
  auto* x = app.add_subcommand("experiment", "Run a canned experiment preset");
  x->add_option("preset", preset, "bound-check, regression, stagnation or overvoltage")->required();
  x->add_option("--out-dir", out_dir, "Directory for CSV outputs");
  x->add_option("--seed", exp_seed, "Random seed");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& pe) {
    err << "error: " << pe.what() << '\n';
    return kConfigError;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, out);
    if (t->parsed()) return cmd_train(tr, out);
    if (b->parsed()) return cmd_baseline(bl, out);
    if (e->parsed()) return cmd_evaluate(ev, out);
    return cmd_experiment(preset, out_dir, exp_seed, out);
  } catch (const detail::RuntimeFailure& f) {
    err << "error: " << f.what() << '\n';
    return kRuntimeError;
  } catch (const Error& f) {
    err << "error: " << f.what() << '\n';
    return kConfigError;
  } catch (const std::exception& f) {
    err << "error: " << f.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace cola::cli

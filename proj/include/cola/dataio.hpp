#pragma once

// Synthetic inverter voltage days, overvoltage injection, train/test
// splitting and CSV serialization.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cola/error.hpp"
#include "cola/model.hpp"
#include "cola/types.hpp"

namespace cola {

/// Parameters of a synthetic day. Feature column j at sample t is
///
///   nominal * (1 + alpha_j * s(t) * c_j(t) - beta_j * l(t) * d_j(t)) + noise
///
/// where s is a midday solar bell (zero outside 6h..18h), l a morning and
/// evening load double hump, and c_j, d_j per-inverter cloud and load
/// fluctuations. The last inverter is the meter: target = sum_j w_j col_j
/// plus independent noise.
struct SyntheticParams {
  double nominal_volts = 7200.0;
  int samples_per_day = 96;
  int inverter_count = 16;
  // Per feature column; empty selects deterministic defaults.
  std::vector<double> solar_coupling;
  std::vector<double> load_coupling;
  std::vector<double> target_weights;
  // Multiplies the default solar and load couplings; 1 is a stiff feeder
  // with swings of a few tens of volts, ~20 a long high-PV feeder.
  double swing_scale = 1.0;
  double cloud_variability = 1.0;  // fraction of irradiance a cloud can remove
  double load_variability = 2.0;   // relative spread of each inverter's load
  double noise_std = 2.0;          // volts, per feature entry
  double target_noise_std = 1.0;   // volts, per target entry
  // The last `collinear_columns` features become copies of the first ones
  // plus N(0, collinear_jitter) volts, producing a low numerical rank matrix.
  int collinear_columns = 0;
  double collinear_jitter = 0.5;
  std::uint64_t seed = 0;

  int feature_count() const { return inverter_count - 1; }

  void validate() const {
    if (!(nominal_volts > 0.0)) throw Error(ErrorKind::InvalidConfig, "nominal must be > 0");
    if (samples_per_day < 2) throw Error(ErrorKind::InvalidConfig, "need >= 2 samples per day");
    if (24 * 60 % samples_per_day != 0) {
      throw Error(ErrorKind::InvalidConfig, "samples per day must divide 1440 minutes");
    }
    if (inverter_count < 2) throw Error(ErrorKind::InvalidConfig, "need >= 2 inverters");
    if (!(noise_std >= 0.0) || !(target_noise_std >= 0.0) || !(collinear_jitter >= 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "noise levels must be >= 0");
    }
    if (!(swing_scale >= 0.0)) throw Error(ErrorKind::InvalidConfig, "swing scale must be >= 0");
    if (!(cloud_variability >= 0.0 && cloud_variability <= 1.0) || !(load_variability >= 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "variability out of range");
    }
    const auto n = static_cast<std::size_t>(feature_count());
    for (const auto* v : {&solar_coupling, &load_coupling, &target_weights}) {
      if (!v->empty() && v->size() != n) {
        throw Error(ErrorKind::InvalidConfig,
                    "per-inverter vectors need " + std::to_string(n) + " entries");
      }
    }
    if (collinear_columns < 0 || 2 * collinear_columns > feature_count()) {
      throw Error(ErrorKind::InvalidConfig, "collinear columns must be <= half the features");
    }
  }
};

namespace detail {

inline double solar_bell(double hour) {
  if (hour <= 6.0 || hour >= 18.0) return 0.0;
  return std::sin(std::numbers::pi * (hour - 6.0) / 12.0);
}

inline double load_curve(double hour) {
  auto bump = [](double h, double mid, double width) {
    const double d = (h - mid) / width;
    return std::exp(-0.5 * d * d);
  };
  return 0.3 + 0.5 * bump(hour, 8.0, 1.5) + 0.8 * bump(hour, 19.0, 2.0);
}

// Stationary AR(1) path with unit marginal variance.
inline std::vector<double> ar1_path(std::mt19937_64& rng, int length, double rho) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double innovation = std::sqrt(1.0 - rho * rho);
  std::vector<double> z(static_cast<std::size_t>(length));
  double prev = normal(rng);
  for (auto& v : z) {
    v = prev;
    prev = rho * prev + innovation * normal(rng);
  }
  return z;
}

}  // namespace detail

/// Per-column target weights: the given ones, or geometric weights 0.7^j
/// normalized to sum 1 (the meter sits closest to the first inverters).
inline Vector default_target_weights(const SyntheticParams& params) {
  const int n = params.feature_count();
  Vector w(n);
  if (!params.target_weights.empty()) {
    for (int j = 0; j < n; ++j) w(j) = params.target_weights[static_cast<std::size_t>(j)];
    return w;
  }
  for (int j = 0; j < n; ++j) w(j) = std::pow(0.7, j);
  return w / w.sum();
}

inline ColumnDataset generate_day(const SyntheticParams& params) {
  params.validate();
  const int m = params.samples_per_day;
  const int n = params.feature_count();
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto coupling = [n](const std::vector<double>& given, auto fallback) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      out[j] = given.empty() ? fallback(j) : given[static_cast<std::size_t>(j)];
    }
    return out;
  };
  const double swing = params.swing_scale;
  const auto alpha = coupling(params.solar_coupling, [swing](int j) {
    return swing * (0.002 + 0.0015 * ((j * 7) % 11) / 10.0);
  });
  const auto beta = coupling(params.load_coupling, [swing](int j) {
    return swing * (0.001 + 0.001 * ((j * 5) % 7) / 6.0);
  });
  const Vector w = default_target_weights(params);

  ColumnDataset d;
  d.sample_period_minutes = 24 * 60 / m;
  d.features.resize(m, n);
  d.target.resize(m);
  for (int j = 0; j < n; ++j) d.column_labels.push_back("inv" + std::to_string(j + 1));

  for (int j = 0; j < n; ++j) {
    const auto cloud = detail::ar1_path(rng, m, 0.85);
    const auto load = detail::ar1_path(rng, m, 0.7);
    for (int t = 0; t < m; ++t) {
      const double hour = 24.0 * t / m;
      const double shade = 1.0 - params.cloud_variability * 0.5 * (1.0 + std::tanh(cloud[t]));
      const double demand =
          detail::load_curve(hour) * std::max(0.0, 1.0 + params.load_variability * load[t]);
      const double level = 1.0 + alpha[j] * detail::solar_bell(hour) * shade - beta[j] * demand;
      d.features(t, j) = params.nominal_volts * level + params.noise_std * normal(rng);
    }
  }
  const int dup = params.collinear_columns;
  for (int i = 0; i < dup; ++i) {
    for (int t = 0; t < m; ++t) {
      d.features(t, n - dup + i) = d.features(t, i) + params.collinear_jitter * normal(rng);
    }
  }
  for (int t = 0; t < m; ++t) {
    double b = 0.0;
    for (int j = 0; j < n; ++j) b += w(j) * d.features(t, j);
    d.target(t) = b + params.target_noise_std * normal(rng);
  }
  return d;
}

/// Low-numerical-rank day: a high-PV feeder whose last four inverters nearly
/// duplicate the first four.
inline SyntheticParams low_rank_day(std::uint64_t seed) {
  SyntheticParams p;
  p.seed = seed;
  p.swing_scale = 20.0;
  p.collinear_columns = 4;
  p.collinear_jitter = 0.5;
  return p;
}

/// Samples [onset, end) of every feature and the target scaled by 1 + boost.
struct OvervoltageScenario {
  std::size_t onset = 0;
  std::size_t end = 0;
  double boost_fraction = 0.1;
};

inline ColumnDataset apply_overvoltage(const ColumnDataset& d, const OvervoltageScenario& s) {
  const auto m = static_cast<std::size_t>(d.rows());
  if (s.onset > s.end || s.end > m) {
    throw Error(ErrorKind::OutOfRange, "overvoltage window [" + std::to_string(s.onset) + "," +
                                           std::to_string(s.end) + ") outside " +
                                           std::to_string(m) + " samples");
  }
  if (!(s.boost_fraction >= 0.0)) throw Error(ErrorKind::InvalidConfig, "boost must be >= 0");
  ColumnDataset out = d;
  const double factor = 1.0 + s.boost_fraction;
  for (std::size_t t = s.onset; t < s.end; ++t) {
    const auto i = static_cast<Index>(t);
    out.features.row(i) *= factor;
    out.target(i) *= factor;
  }
  return out;
}

struct RandomFraction {
  double fraction = 0.8;
  std::uint64_t seed = 0;
};

struct ContiguousHours {
  double hours = 5.0;
};

using SplitMode = std::variant<RandomFraction, ContiguousHours>;

struct SplitResult {
  ColumnDataset train;
  ColumnDataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

namespace detail {

inline ColumnDataset take_rows(const ColumnDataset& d, const std::vector<std::size_t>& rows) {
  ColumnDataset out;
  out.sample_period_minutes = d.sample_period_minutes;
  out.column_labels = d.column_labels;
  out.features.resize(static_cast<Index>(rows.size()), d.cols());
  out.target.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Index>(i)) = d.features.row(static_cast<Index>(rows[i]));
    out.target(static_cast<Index>(i)) = d.target(static_cast<Index>(rows[i]));
  }
  return out;
}

}  // namespace detail

/// Both parts must be nonempty. Row order is preserved within each part.
inline SplitResult split(const ColumnDataset& d, const SplitMode& mode) {
  const auto m = static_cast<std::size_t>(d.rows());
  std::vector<bool> in_train(m, false);
  std::size_t train_count = 0;
  if (const auto* r = std::get_if<RandomFraction>(&mode)) {
    if (!(r->fraction > 0.0 && r->fraction <= 1.0)) {
      throw Error(ErrorKind::InvalidSplit, "fraction must lie in (0, 1]");
    }
    train_count = static_cast<std::size_t>(std::ceil(r->fraction * static_cast<double>(m)));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(r->seed);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < std::min(train_count, m); ++i) in_train[order[i]] = true;
  } else {
    const double hours = std::get<ContiguousHours>(mode).hours;
    const double rows = hours * 60.0 / d.sample_period_minutes;
    if (!(hours > 0.0) || rows != std::floor(rows)) {
      throw Error(ErrorKind::InvalidSplit, "hours must cover a whole number of samples");
    }
    train_count = static_cast<std::size_t>(rows);
    for (std::size_t i = 0; i < std::min(train_count, m); ++i) in_train[i] = true;
  }
  if (train_count == 0 || train_count >= m) {
    throw Error(ErrorKind::InvalidSplit, "split leaves " + std::to_string(train_count) +
                                             " of " + std::to_string(m) + " rows for training");
  }
  SplitResult out;
  for (std::size_t i = 0; i < m; ++i) (in_train[i] ? out.train_rows : out.test_rows).push_back(i);
  out.train = detail::take_rows(d, out.train_rows);
  out.test = detail::take_rows(d, out.test_rows);
  return out;
}

/// Header `t,<labels...>,target`, one row per sample, 17 significant digits.
inline void write_csv(std::ostream& out, const ColumnDataset& d) {
  out << 't';
  for (Index j = 0; j < d.cols(); ++j) {
    out << ',';
    if (static_cast<Index>(d.column_labels.size()) == d.cols()) {
      out << d.column_labels[static_cast<std::size_t>(j)];
    } else {
      out << "inv" << j + 1;
    }
  }
  out << ",target\n";
  const auto old = out.precision(17);
  for (Index i = 0; i < d.rows(); ++i) {
    out << i;
    for (Index j = 0; j < d.cols(); ++j) out << ',' << d.features(i, j);
    out << ',' << d.target(i) << '\n';
  }
  out.precision(old);
}

inline void write_csv(const ColumnDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path + " for writing");
  write_csv(out, d);
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path);
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline ColumnDataset read_csv(std::istream& in, int sample_period_minutes = 15) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    for (auto f : detail::split_fields(line)) header.emplace_back(detail::trim(f));
    break;
  }
  if (header.empty()) throw Error(ErrorKind::EmptyDataset, "file has no header");
  if (header.size() < 3) {
    throw Error(ErrorKind::MalformedCsv, "header needs t, at least one feature and target",
                line_no);
  }
  const std::size_t width = header.size();
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != width) {
      throw Error(ErrorKind::MalformedCsv,
                  "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(width),
                  line_no);
    }
    std::vector<double> values(width);
    for (std::size_t c = 0; c < width; ++c) {
      const auto f = detail::trim(fields[c]);
      const auto res = std::from_chars(f.data(), f.data() + f.size(), values[c]);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw Error(ErrorKind::MalformedCsv,
                    "line " + std::to_string(line_no) + ": cannot parse '" + std::string(f) + "'",
                    line_no, c);
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyDataset, "file has no data rows");

  ColumnDataset d;
  d.sample_period_minutes = sample_period_minutes;
  const auto m = static_cast<Index>(rows.size());
  const auto n = static_cast<Index>(width - 2);
  d.features.resize(m, n);
  d.target.resize(m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) d.features(i, j) = rows[i][j + 1];
    d.target(i) = rows[i][width - 1];
  }
  d.column_labels.assign(header.begin() + 1, header.end() - 1);
  return d;
}

inline ColumnDataset read_csv(const std::string& path, int sample_period_minutes = 15) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  return read_csv(in, sample_period_minutes);
}

}  // namespace cola

#pragma once

// Per-round telemetry recorded by the engine.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "cola/error.hpp"

namespace cola {

struct TraceRow {
  std::size_t round = 0;          // 1-based count of completed rounds
  double objective = 0.0;         // O_A(x) after the round
  double loss = 0.0;              // f(Ax) after the round
  double gamma_sum = 0.0;         // sum_k Gamma_k(dx_k)
  std::vector<double> dx_norms;   // ||dx_k||_2 per node
  std::uint64_t comm_cumulative = 0;

  double max_dx_norm() const {
    double m = 0.0;
    for (double d : dx_norms) m = d > m ? d : m;
    return m;
  }
};

struct RunTrace {
  std::vector<TraceRow> rows;

  bool empty() const { return rows.empty(); }
  const TraceRow& back() const { return rows.back(); }
};

/// Columns: round,objective,loss,gamma_sum,dx_norm_1..dx_norm_K,comm_cumulative
inline void write_trace_csv(std::ostream& out, const RunTrace& trace, std::size_t nodes) {
  out << "round,objective,loss,gamma_sum";
  for (std::size_t k = 1; k <= nodes; ++k) out << ",dx_norm_" << k;
  out << ",comm_cumulative\n";
  const auto old = out.precision(17);
  for (const auto& r : trace.rows) {
    out << r.round << ',' << r.objective << ',' << r.loss << ',' << r.gamma_sum;
    for (double d : r.dx_norms) out << ',' << d;
    out << ',' << r.comm_cumulative << '\n';
  }
  out.precision(old);
}

inline void write_trace_csv(const std::string& path, const RunTrace& trace,
                            std::size_t nodes) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write trace to " + path);
  write_trace_csv(out, trace, nodes);
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing trace to " + path);
}

}  // namespace cola

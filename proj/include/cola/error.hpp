#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cola {

enum class ErrorKind {
  InvalidPartition,
  NonFiniteEntry,
  DimensionMismatch,
  EmptyDataset,
  DegenerateColumn,
  InvalidConfig,
  TopologyTooSmall,
  InvalidTopology,
  NotDoublyStochastic,
  NegativeWeight,
  ProtocolViolation,
  InvalidSplit,
  OutOfRange,
  MalformedCsv,
  IoFailure,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidPartition: return "InvalidPartition";
    case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::DegenerateColumn: return "DegenerateColumn";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::TopologyTooSmall: return "TopologyTooSmall";
    case ErrorKind::InvalidTopology: return "InvalidTopology";
    case ErrorKind::NotDoublyStochastic: return "NotDoublyStochastic";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::ProtocolViolation: return "ProtocolViolation";
    case ErrorKind::InvalidSplit: return "InvalidSplit";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::MalformedCsv: return "MalformedCsv";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Error carrying a machine-checkable kind plus an optional location.
///
/// `row`/`col` are zero-based matrix coordinates, except for MalformedCsv
/// where `row` holds the 1-based line number of the offending file line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> row = std::nullopt,
        std::optional<std::size_t> col = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        row_(row),
        col_(col) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> col() const noexcept { return col_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> col_;
};

}  // namespace cola

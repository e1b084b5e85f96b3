#pragma once

// Random instance generators and small oracles shared by the tests.

#include <cmath>
#include <cstdint>
#include <random>

#include <gtest/gtest.h>

#include "cola/error.hpp"
#include "cola/types.hpp"

namespace cola::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vector vector(Index n, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }
  Matrix matrix(Index rows, Index cols, double lo = -1.0, double hi = 1.0) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) m.col(j) = vector(rows, lo, hi);
    return m;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Least-squares solution through the normal equations A^T A x = A^T b.
inline Vector normal_equations(const Matrix& a, const Vector& b) {
  const Matrix gram = a.transpose() * a;
  return gram.ldlt().solve(a.transpose() * b);
}

template <typename Fn>
ErrorKind error_kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a cola::Error";
  return ErrorKind::IoFailure;
}

}  // namespace cola::testing

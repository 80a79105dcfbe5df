#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "mmapsys/matrix.hpp"

namespace mmapsys {

/// Phase-type distribution (init, subgen). Validated on construction.
class PhDistribution {
 public:
  static constexpr double kTolerance = 1e-12;

  PhDistribution() = default;

  PhDistribution(RowVector init, Matrix subgen, std::string name = "ph")
      : init_(std::move(init)), subgen_(std::move(subgen)), name_(std::move(name)) {
    validate();
  }

  Index order() const { return subgen_.rows(); }
  const RowVector& init() const { return init_; }
  const Matrix& subgen() const { return subgen_; }
  const std::string& name() const { return name_; }

  /// -subgen * 1.
  Vector exit() const { return -(subgen_ * Vector::Ones(order())); }

  Matrix init_row() const { return Matrix(init_); }
  Matrix exit_col() const { return Matrix(exit()); }

  /// Generator of the renewal process restarting from init at absorption.
  Matrix renewal_generator() const { return subgen_ + exit_col() * init_row(); }

 private:
  void validate() const {
    const Index n = subgen_.rows();
    if (n < 1) throw ConfigError(name_ + ": order must be positive");
    if (subgen_.cols() != n) throw DimensionError(name_ + ": sub-generator must be square");
    if (init_.size() != n) {
      throw DimensionError(name_ + ": init has length " + std::to_string(init_.size()) +
                           " but order is " + std::to_string(n));
    }
    double mass = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (init_(i) < -kTolerance) throw ConfigError(name_ + ": negative init entry");
      mass += init_(i);
    }
    if (mass > 1.0 + kTolerance) throw ConfigError(name_ + ": init mass exceeds 1");
    bool leaks = false;
    for (Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (Index j = 0; j < n; ++j) {
        row += subgen_(i, j);
        if (i != j && subgen_(i, j) < -kTolerance) {
          throw ConfigError(name_ + ": negative off-diagonal at (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
        }
      }
      if (subgen_(i, i) >= 0.0) throw ConfigError(name_ + ": non-negative diagonal entry");
      if (row > kTolerance) throw ConfigError(name_ + ": positive row sum in row " + std::to_string(i));
      if (row < -kTolerance) leaks = true;
    }
    if (!leaks) throw ConfigError(name_ + ": no exit intensity, absorption impossible");
  }

  RowVector init_;
  Matrix subgen_;
  std::string name_;
};

inline PhDistribution exponential_ph(double rate, std::string name = "exp") {
  RowVector init(1);
  init << 1.0;
  Matrix s(1, 1);
  s << -rate;
  return PhDistribution(init, s, std::move(name));
}

/// Mean time to absorption, -init * subgen^-1 * 1.
inline double ph_mean(const PhDistribution& d) {
  Eigen::FullPivLU<Matrix> lu(d.subgen());
  if (!lu.isInvertible()) throw SolverError(d.name() + ": degenerate PH (singular sub-generator)");
  const Vector x = lu.solve(Vector::Ones(d.order()));
  return -d.init().dot(x);
}

/// Stationary vector r of a generator Q: r[1 | Q*] = (1, 0), Q* dropping column 0.
inline RowVector stationary_bordered(const Matrix& q, const std::string& what) {
  const Index n = q.rows();
  Matrix bordered = q;
  bordered.col(0).setOnes();
  Eigen::FullPivLU<Matrix> lu(bordered.transpose());
  if (!lu.isInvertible()) throw SolverError(what);
  Vector rhs = Vector::Zero(n);
  rhs(0) = 1.0;
  return lu.solve(rhs).transpose();
}

/// Stationary phase distribution of the PH renewal process.
inline RowVector renewal_stationary(const PhDistribution& d) {
  return stationary_bordered(d.renewal_generator(), d.name() + ": reducible renewal process");
}

}  // namespace mmapsys

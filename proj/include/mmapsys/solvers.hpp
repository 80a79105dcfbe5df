#pragma once

#include <cmath>
#include <vector>

#include <Eigen/SparseLU>

#include "mmapsys/assembler.hpp"

namespace mmapsys {

/// alpha ⊗ gamma_st ⊗ omega ⊗ eta ⊗ upsilon on E_0^{n,v}, zero elsewhere.
inline RowVector initial_distribution(const ModelConfig& cfg, const StateSpaceLayout& layout) {
  const auto& u = cfg.unit;
  const Matrix local = kron(u.internal.init_row(), Matrix(renewal_stationary(u.shock)), Matrix(u.damage_init),
                            u.inspection.init_row(), cfg.vacation.init_row());
  const IndexRange r = layout.index_of({layout.n(), 0, Presence::v, Queue{}});
  RowVector phi = RowVector::Zero(layout.dimension());
  phi.segment(r.start, r.count) = local.row(0);
  return phi;
}

struct UniformizedStep {
  RowVector p;         // p(t)
  RowVector integral;  // ∫_0^t p(u) du
};

namespace detail {

/// Uniformization rate 1.01 * max|diag D|.
inline double uniformization_rate(const SparseMatrix& D) {
  double lam = 0.0;
  for (Index i = 0; i < D.rows(); ++i) lam = std::max(lam, std::abs(D.coeff(i, i)));
  return lam > 0.0 ? 1.01 * lam : 1.0;
}

}  // namespace detail

/// One uniformization pass from `start` over an interval of length t, producing p(t) and its integral.
/// The integral uses ∫p = (1/λ) Σ_k start·P^k · P(Poisson(λt) > k).
inline UniformizedStep uniformize(const RowVector& start, const SparseMatrix& D, double t, double tol = 1e-13) {
  if (t < 0.0) throw SolverError("negative time");
  UniformizedStep out{start, RowVector::Zero(start.size())};
  if (t == 0.0) return out;
  const double lam = detail::uniformization_rate(D);
  const SparseMatrix Pt = (SparseMatrix(D.transpose()) / lam);  // P^T - I
  const double mu = lam * t;
  const double log_mu = std::log(mu);
  const size_t kmax = static_cast<size_t>(mu + 12.0 * std::sqrt(mu) + 50.0);
  Vector v = start.transpose();
  Vector p = Vector::Zero(start.size());
  Vector integ = Vector::Zero(start.size());
  double cum = 0.0;
  for (size_t k = 0;; ++k) {
    const double w = std::exp(-mu + static_cast<double>(k) * log_mu - std::lgamma(static_cast<double>(k) + 1.0));
    cum += w;
    const double tail = std::max(0.0, 1.0 - cum);
    if (w > 0.0) p += w * v;
    integ += tail * v;
    if ((static_cast<double>(k) > mu && tail < tol) || k >= kmax) break;
    v += Pt * v;
  }
  out.p = p.transpose();
  out.integral = integ.transpose() / lam;
  return out;
}

inline RowVector transient(const RowVector& phi, const SparseMatrix& D, double t) {
  return uniformize(phi, D, t).p;
}

inline RowVector transient_integral(const RowVector& phi, const SparseMatrix& D, double t) {
  return uniformize(phi, D, t).integral;
}

/// p(t) and ∫p on an increasing grid, stepping with the semigroup property.
inline std::vector<UniformizedStep> transient_grid(const RowVector& phi, const SparseMatrix& D,
                                                   const std::vector<double>& grid) {
  std::vector<UniformizedStep> out;
  UniformizedStep acc{phi, RowVector::Zero(phi.size())};
  double last = 0.0;
  for (double t : grid) {
    if (t < last) throw SolverError("time grid must be non-decreasing and non-negative");
    const UniformizedStep step = uniformize(acc.p, D, t - last);
    acc.integral += step.integral;
    acc.p = step.p;
    out.push_back(acc);
    last = t;
  }
  return out;
}

/// Replace-first-column solve: π[1 | D*] = (1, 0).
inline RowVector stationary_direct(const SparseMatrix& D) {
  const Index n = D.rows();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(D.nonZeros() + n));
  for (Index col = 0; col < D.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(D, col); it; ++it) {
      if (it.col() != 0) trips.emplace_back(it.col(), it.row(), it.value());  // transposed
    }
  }
  for (Index i = 0; i < n; ++i) trips.emplace_back(0, i, 1.0);
  SparseMatrix A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("stationary_direct: singular bordered system");
  Vector rhs = Vector::Zero(n);
  rhs(0) = 1.0;
  Vector pi = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SolverError("stationary_direct: solve failed");
  return pi.transpose();
}

namespace detail {

inline SparseMatrix sub_block(const SparseMatrix& D, IndexRange rows, IndexRange cols) {
  return SparseMatrix(D.block(rows.start, cols.start, rows.count, cols.count));
}

}  // namespace detail

/// Level-by-level back-substitution. Every level slice is expressed as π_1 X_k:
/// X_n = -D_{1n} D_nn^{-1}, X_{k-1} = -X_k D_{k,k-1} D_{k-1,k-1}^{-1}, then π_1 Z = 0 with
/// Z = D_11 + X_2 D_21 and normalization π_1 Σ X_k 1 = 1.
inline RowVector stationary_block(const SparseMatrix& D, const StateSpaceLayout& layout) {
  const int n = layout.n();
  const IndexRange l1 = layout.level(1);
  std::vector<Matrix> X(static_cast<size_t>(n) + 1);
  Matrix Z;
  if (n == 1) {
    Z = Matrix(detail::sub_block(D, l1, l1));
  } else {
    auto solve_right = [&](const Matrix& rhs, int k) {
      // returns rhs * D_kk^{-1}
      const IndexRange lk = layout.level(k);
      const SparseMatrix Dkk = detail::sub_block(D, lk, lk);
      Eigen::SparseLU<SparseMatrix> lu;
      lu.compute(SparseMatrix(Dkk.transpose()));
      if (lu.info() != Eigen::Success) {
        throw SolverError("reducible model: diagonal block of level k=" + std::to_string(k) + " is singular");
      }
      Matrix sol = lu.solve(Matrix(rhs.transpose()));
      return Matrix(sol.transpose());
    };
    const IndexRange ln = layout.level(n);
    X[static_cast<size_t>(n)] = -solve_right(Matrix(detail::sub_block(D, l1, ln)), n);
    for (int k = n; k >= 3; --k) {
      const SparseMatrix down = detail::sub_block(D, layout.level(k), layout.level(k - 1));
      X[static_cast<size_t>(k - 1)] = -solve_right(X[static_cast<size_t>(k)] * down, k - 1);
    }
    const SparseMatrix d21 = detail::sub_block(D, layout.level(2), l1);
    Z = Matrix(detail::sub_block(D, l1, l1)) + X[2] * d21;
  }
  const Index m1 = l1.count;
  Vector w = Vector::Ones(m1);
  for (int k = 2; k <= n; ++k) w += X[static_cast<size_t>(k)].rowwise().sum();
  Matrix bordered = Z;
  bordered.col(0) = w;
  Eigen::PartialPivLU<Matrix> lu(bordered.transpose());
  if (std::abs(lu.determinant()) == 0.0) throw SolverError("reducible model: singular level-1 system");
  Vector rhs = Vector::Zero(m1);
  rhs(0) = 1.0;
  const RowVector pi1 = lu.solve(rhs).transpose();
  RowVector pi = RowVector::Zero(layout.dimension());
  pi.segment(l1.start, m1) = pi1;
  for (int k = 2; k <= n; ++k) {
    const IndexRange lk = layout.level(k);
    pi.segment(lk.start, lk.count) = pi1 * X[static_cast<size_t>(k)];
  }
  return pi;
}

inline double balance_residual(const RowVector& pi, const SparseMatrix& D) {
  return (pi * D).cwiseAbs().maxCoeff();
}

}  // namespace mmapsys

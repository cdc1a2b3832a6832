#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "geogossip/errors.hpp"

namespace geogossip {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Expected one-tick update operator of pairwise gossip when every node
/// picks its partner from q.
template <typename Scalar>
struct ExpectedUpdateMatrix {
  MatrixX<Scalar> w;
  Scalar lambda2 = 0;
  VectorX<Scalar> q;
};

namespace detail {

template <typename Derived>
void require_distribution(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  if (q.size() < 2) throw InvalidInput("distribution needs at least two entries");
  if ((q.array() < Scalar(0)).any()) throw InvalidInput("distribution has negative entries");
  using std::abs;
  if (abs(q.sum() - Scalar(1)) > Scalar(1e-9)) throw InvalidInput("distribution does not sum to 1");
}

}  // namespace detail

// W = I - (1/2n) diag(1 + n q) + (1/2n)(1 q^T + q 1^T). Off-diagonal entries
// are (q_i + q_j) / 2n, so W is symmetric bit for bit.
template <typename Derived>
MatrixX<typename Derived::Scalar> expected_update(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  detail::require_distribution(q);
  const Eigen::Index n = q.size();
  const Scalar two_n = Scalar(2 * n);
  MatrixX<Scalar> w(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) w(i, j) = (q(i) + q(j)) / two_n;
  for (Eigen::Index i = 0; i < n; ++i)
    w(i, i) = Scalar(1) - (Scalar(1) + Scalar(n) * q(i)) / two_n + (q(i) + q(i)) / two_n;
  return w;
}

// The defining form I + (1/2n)[P + P^T - D] with P = 1 q^T and
// D_i = sum_j (P_ij + P_ji). Kept as an independent algebraic route.
template <typename Derived>
MatrixX<typename Derived::Scalar> expected_update_from_pairs(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  detail::require_distribution(q);
  const Eigen::Index n = q.size();
  const MatrixX<Scalar> p = VectorX<Scalar>::Ones(n) * q.transpose();
  const VectorX<Scalar> d = p.rowwise().sum() + p.colwise().sum().transpose();
  MatrixX<Scalar> pair_sum = p + p.transpose();
  pair_sum.diagonal() -= d;
  return MatrixX<Scalar>::Identity(n, n) + pair_sum / Scalar(2 * n);
}

// Second largest eigenvalue from a dense symmetric eigensolve.
template <typename Derived>
typename Derived::Scalar lambda2(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  if (w.rows() < 2 || w.rows() != w.cols()) throw InvalidInput("lambda2: need a square matrix, n >= 2");
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(w, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("lambda2: eigensolver did not converge");
  return solver.eigenvalues()(w.rows() - 2);
}

struct PowerIterationOptions {
  int max_iterations = 2'000'000;
  double tolerance = 1e-15;
};

/// Largest eigenvalue of W - (1/n) 1 1^T by power iteration. For a doubly
/// stochastic PSD W this removes the eigenvalue 1 and leaves lambda2 as the
/// dominant one. Convergence is declared when successive Rayleigh quotients
/// differ by less than the tolerance.
template <typename Derived>
typename Derived::Scalar lambda2_deflated(const Eigen::MatrixBase<Derived>& w,
                                          const PowerIterationOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = w.rows();
  if (n < 2 || n != w.cols()) throw InvalidInput("lambda2_deflated: need a square matrix, n >= 2");
  MatrixX<Scalar> deflated = w;
  deflated.array() -= Scalar(1) / Scalar(n);

  // Deterministic start with no component along 1.
  VectorX<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::sin(Scalar(1.0 + 0.7 * i)) + Scalar(0.3) * Scalar(i % 3);
  v.array() -= v.mean();
  v.normalize();

  Scalar rayleigh = v.dot(deflated * v);
  for (int it = 0; it < opts.max_iterations; ++it) {
    VectorX<Scalar> next = deflated * v;
    next.array() -= next.mean();
    const Scalar norm = next.norm();
    if (norm == Scalar(0)) return Scalar(0);
    v = next / norm;
    const Scalar updated = v.dot(deflated * v);
    using std::abs;
    if (abs(updated - rayleigh) < Scalar(opts.tolerance)) return updated;
    rayleigh = updated;
  }
  throw NumericalFailure("lambda2_deflated: power iteration did not converge");
}

template <typename Derived>
ExpectedUpdateMatrix<typename Derived::Scalar> build_w(const Eigen::MatrixBase<Derived>& q) {
  ExpectedUpdateMatrix<typename Derived::Scalar> out;
  out.q = q;
  out.w = expected_update(q);
  out.lambda2 = lambda2(out.w);
  return out;
}

struct WeylCertificate {
  double lambda2 = 0.0;
  double eps2 = 0.0;    // sqrt(n) * ||q - 1/n||_2
  double bound = 0.0;   // (1 - 1/2n) + eps2 / n
  bool holds = false;
};

// Checks lambda2(W) <= (1 - 1/2n) + eps2/n: the diagonal part contributes at
// most 1 - 1/2n and the rank-two part at most ||1|| ||q - 1/n|| / n.
template <typename Derived>
WeylCertificate weyl_certificate(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = q.size();
  const auto w = build_w(q);
  const Scalar dev = (q.array() - Scalar(1) / Scalar(n)).matrix().norm();
  WeylCertificate c;
  c.lambda2 = static_cast<double>(w.lambda2);
  c.eps2 = std::sqrt(static_cast<double>(n)) * static_cast<double>(dev);
  c.bound = (1.0 - 1.0 / (2.0 * static_cast<double>(n))) + c.eps2 / static_cast<double>(n);
  c.holds = c.lambda2 <= c.bound + 1e-9;
  return c;
}

// log(1/eps) / log(1/lambda2), Theta-constant 1.
double predict_tave(double lambda2, double epsilon);

// mean_q * mean_hops * tave.
double predict_cost(std::size_t n, double epsilon, double mean_hops, double mean_q, double tave);

struct SpectralReport {
  std::size_t n = 0;
  double lambda2 = 0.0;
  double one_minus_lambda2_times_n = 0.0;
  double weyl_bound = 0.0;
  bool certificate_holds = false;
  double tave_prediction = 0.0;
};

SpectralReport spectral_report(const Eigen::VectorXd& q, double epsilon);

}  // namespace geogossip

#include "cargo/eigensolver.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cargo/errors.hpp"
#include "cargo/rng.hpp"

namespace cargo {

namespace {

// Shift applied to deflated directions in the dense route; above any eigenvalue we look for.
double deflation_shift(const SparseMatrix& a) {
  double bound = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
    bound = std::max(bound, col);
  }
  return 2.0 * bound + 1.0;
}

EigenResult dense_route(const SparseMatrix& a, int count, const Eigen::MatrixXd& deflate) {
  Eigen::MatrixXd dense = Eigen::MatrixXd(a);
  dense = 0.5 * (dense + dense.transpose()).eval();
  if (deflate.cols() > 0) dense += deflation_shift(a) * deflate * deflate.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver failed to converge");
  EigenResult r;
  r.method = "dense";
  r.values = solver.eigenvalues().head(count);
  r.vectors = solver.eigenvectors().leftCols(count);
  return r;
}

void orthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& basis, Eigen::Index cols) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * w);
}

// Lanczos on the shift-inverted operator (A + shift I)^-1, whose largest
// eigenvalues theta map back to the smallest eigenvalues of A as 1/theta - shift.
EigenResult lanczos_route(const SparseMatrix& a, int count, const Eigen::MatrixXd& deflate,
                          const EigenOptions& opt) {
  const Eigen::Index n = a.rows();
  Rng rng(opt.seed);

  SparseMatrix shifted = a;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += opt.shift;
  Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success) throw NumericalError("lanczos: factorisation of shifted matrix failed");

  EigenResult r;
  r.method = "lanczos-shift-invert";

  // Locked directions: deflated inputs followed by converged eigenvectors.
  Eigen::MatrixXd locked(n, deflate.cols() + count);
  Eigen::Index n_locked = deflate.cols();
  if (n_locked > 0) locked.leftCols(n_locked) = deflate;
  const Eigen::Index first_found = n_locked;
  std::vector<double> found_values;

  auto random_start = [&] {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
  };
  auto true_residual = [&](const Eigen::VectorXd& y, double& lambda) {
    Eigen::VectorXd ay = a * y;
    ++r.matvecs;
    lambda = y.dot(ay);
    return (ay - lambda * y).norm();
  };

  Eigen::VectorXd start = random_start();
  int stalled = 0;

  while (static_cast<int>(found_values.size()) < count) {
    const Eigen::Index room = n - n_locked;
    const Eigen::Index max_basis = std::min<Eigen::Index>(room, opt.max_basis);
    // One pair per cycle: a fresh random start guarantees the top Ritz pair is the true
    // top of the remaining spectrum, even when eigenvalues repeat.
    const int need = 1;

    orthogonalize(start, locked, n_locked);
    double norm = start.norm();
    if (norm < 1e-12) {
      start = random_start();
      orthogonalize(start, locked, n_locked);
      norm = start.norm();
    }
    Eigen::MatrixXd basis(n, max_basis);
    basis.col(0) = start / norm;
    std::vector<double> alpha, beta;
    Eigen::MatrixXd ritz_vectors;
    Eigen::Index m = 0;
    std::vector<Eigen::VectorXd> accepted;
    std::vector<double> accepted_values;

    for (Eigen::Index j = 0; j < max_basis; ++j) {
      Eigen::VectorXd w = factor.solve(Eigen::VectorXd(basis.col(j)));
      ++r.matvecs;
      const double aj = basis.col(j).dot(w);
      alpha.push_back(aj);
      w -= aj * basis.col(j);
      if (j > 0) w -= beta.back() * basis.col(j - 1);
      orthogonalize(w, locked, n_locked);
      orthogonalize(w, basis, j + 1);
      const double bj = w.norm();
      m = j + 1;
      const bool invariant = bj <= 1e-13 * std::abs(aj);

      if (invariant || m == max_basis || (m >= need && m % 8 == 0)) {
        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd sub = m > 1 ? Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1) : Eigen::VectorXd();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        ritz_vectors = tri.eigenvectors();
        accepted.clear();
        accepted_values.clear();
        // Largest operator eigenvalues first; accept while the true residual on A is small.
        for (Eigen::Index i = m - 1; i >= 0 && static_cast<int>(accepted.size()) < need; --i) {
          const double est = invariant ? 0.0 : bj * std::abs(ritz_vectors(m - 1, i));
          const double theta = tri.eigenvalues()[i];
          if (theta <= 0.0 || est > opt.tolerance * theta) break;
          Eigen::VectorXd y = basis.leftCols(m) * ritz_vectors.col(i);
          y.normalize();
          double lambda = 0.0;
          if (true_residual(y, lambda) > opt.tolerance) break;
          accepted.push_back(std::move(y));
          accepted_values.push_back(lambda);
        }
        if (static_cast<int>(accepted.size()) >= need || invariant) break;
      }
      if (j + 1 < max_basis) {
        beta.push_back(bj);
        basis.col(j + 1) = w / bj;
      }
    }

    for (std::size_t i = 0; i < accepted.size(); ++i) {
      Eigen::VectorXd y = accepted[i];
      orthogonalize(y, locked, n_locked);
      y.normalize();
      locked.col(n_locked++) = y;
      found_values.push_back(accepted_values[i]);
    }

    if (accepted.empty()) {
      ++stalled;
      start = m > 0 && ritz_vectors.cols() > 0 ? Eigen::VectorXd(basis.leftCols(m) * ritz_vectors.col(m - 1))
                                               : random_start();
      start += 1e-3 * start.norm() / std::sqrt(static_cast<double>(n)) * random_start();
    } else {
      stalled = 0;
      start = random_start();
    }
    if (static_cast<int>(found_values.size()) < count &&
        (++r.restarts > opt.max_restarts || stalled > opt.max_restarts / 2)) {
      throw NumericalError("lanczos: " + std::to_string(found_values.size()) + " of " + std::to_string(count) +
                           " eigenpairs converged after " + std::to_string(r.restarts) + " restarts and " +
                           std::to_string(r.matvecs) + " operator applications");
    }
  }

  // Final Rayleigh-Ritz over the found block.
  Eigen::MatrixXd y = locked.block(0, first_found, n, count);
  Eigen::MatrixXd ay = a * y;
  Eigen::MatrixXd h = y.transpose() * ay;
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h);
  r.values = small.eigenvalues();
  r.vectors = y * small.eigenvectors();
  Eigen::MatrixXd residual = a * r.vectors - r.vectors * r.values.asDiagonal();
  for (Eigen::Index c = 0; c < residual.cols(); ++c) r.max_residual = std::max(r.max_residual, residual.col(c).norm());
  return r;
}

}  // namespace

EigenResult smallest_eigenpairs(const SparseMatrix& a, int count, const Eigen::MatrixXd& deflate,
                                const EigenOptions& options) {
  if (a.rows() != a.cols()) throw std::invalid_argument("smallest_eigenpairs: matrix must be square");
  if (count < 1 || count > a.rows() - deflate.cols())
    throw std::invalid_argument("smallest_eigenpairs: count out of range");
  if (deflate.cols() > 0 && deflate.rows() != a.rows())
    throw std::invalid_argument("smallest_eigenpairs: deflation block has wrong row count");

  auto method = options.method;
  if (method == EigenOptions::Method::Auto)
    method = a.rows() <= options.dense_limit ? EigenOptions::Method::Dense : EigenOptions::Method::Lanczos;
  if (method == EigenOptions::Method::Dense) {
    auto r = dense_route(a, count, deflate);
    Eigen::MatrixXd residual = a * r.vectors - r.vectors * r.values.asDiagonal();
    for (Eigen::Index c = 0; c < residual.cols(); ++c) r.max_residual = std::max(r.max_residual, residual.col(c).norm());
    return r;
  }
  return lanczos_route(a, count, deflate, options);
}

}  // namespace cargo

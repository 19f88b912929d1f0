#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cargo {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenOptions {
  enum class Method { Auto, Dense, Lanczos };
  Method method = Method::Auto;
  // Auto uses the dense solver up to this many rows.
  int dense_limit = 1200;
  // Residual bound ||A y - lambda y|| for accepting a Lanczos Ritz pair.
  double tolerance = 1e-10;
  // Spectral shift for the factorised operator (A + shift I)^-1.
  double shift = 1e-3;
  int max_basis = 200;
  int max_restarts = 200;
  std::uint64_t seed = 0x5eed;
};

struct EigenResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
  std::string method;
  int matvecs = 0;
  int restarts = 0;
  double max_residual = 0.0;
};

/**
 * The `count` smallest eigenpairs of the symmetric matrix `a` restricted to the
 * orthogonal complement of `deflate` (orthonormal columns spanning an
 * invariant subspace, e.g. a known null vector). Pass an empty matrix to
 * search the whole space.
 *
 * Lanczos mode: shift-invert with a sparse LDL^T factorisation, full
 * reorthogonalisation, explicit locking of converged Ritz vectors and restart
 * from the leading unconverged Ritz vector. Locked vectors are deflated, so
 * repeated eigenvalues are found one copy per cycle. Requires A + shift I to
 * be positive definite on the search space.
 * Throws NumericalError when max_restarts is exhausted.
 */
EigenResult smallest_eigenpairs(const SparseMatrix& a, int count, const Eigen::MatrixXd& deflate,
                                const EigenOptions& options = {});

}  // namespace cargo

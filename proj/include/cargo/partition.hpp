#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cargo/abstraction.hpp"
#include "cargo/eigensolver.hpp"

namespace cargo {

/// Zero row sum in the symmetrised rate matrix. `site()` is the row index.
class IsolatedSiteError : public std::invalid_argument {
public:
  explicit IsolatedSiteError(long site)
      : std::invalid_argument("site " + std::to_string(site) + " has no outgoing rate (isolated)"), site_(site) {}
  long site() const noexcept { return site_; }

private:
  long site_;
};

/// q_ij = 1 / t_ij in trips per hour, same sparsity as the abstract graph.
SparseMatrix rate_matrix(const AbstractGraph& g);

/// (Q + Q^T) / 2, missing entries read as zero.
SparseMatrix symmetrize(const SparseMatrix& q);

struct Laplacian {
  SparseMatrix random_walk;  // I - D^-1 Qs
  SparseMatrix symmetric;    // I - D^-1/2 Qs D^-1/2
  Eigen::VectorXd degree;    // D = Qs 1
};

Laplacian laplacian(const SparseMatrix& qs);

struct SpectralEmbedding {
  int k = 0;
  Eigen::VectorXd eigenvalues;   // lambda_1 .. lambda_k, ascending
  Eigen::MatrixXd sym_vectors;   // eigenvectors u_1 .. u_k of the symmetric Laplacian
  Eigen::MatrixXd rows;          // n x (k-1): v_2 .. v_k with unit-norm rows
  int zero_rows = 0;             // rows that were zero before normalisation
  std::string method;
  double max_residual = 0.0;
};

/**
 * Spectral embedding from the k smallest eigenpairs. The trivial pair
 * (lambda_1 = 0, u_1 = D^1/2 1 normalised) is known in closed form and is
 * deflated from the search; the solver returns lambda_2..lambda_k on its
 * complement. Eigenvectors map to the random-walk Laplacian as v = D^-1/2 u.
 */
SpectralEmbedding spectral_embed(const Laplacian& l, int k, const EigenOptions& options = {});

struct PartitionResult {
  std::vector<int> assignment;     // site index -> region
  std::vector<int> region_sizes;
  int requested_k = 0;
  int spectral_k = 0;              // k used for the eigen/k-means step
  std::vector<SiteIndex> isolated; // split off as singleton regions
  std::optional<SpectralEmbedding> embedding;
  std::vector<SiteIndex> embedded_sites;  // row order of the embedding

  int region_count() const noexcept { return static_cast<int>(region_sizes.size()); }
  std::vector<std::vector<SiteIndex>> regions() const;
};

/// rate_matrix -> symmetrize -> laplacian -> spectral_embed -> kmeans. Region ids
/// are numbered by their lowest site index.
PartitionResult partition_graph(const AbstractGraph& g, int k, std::uint64_t seed, const EigenOptions& options = {});

/// round(sqrt(n / 100)) clamped to [1, 50].
int default_region_count(std::size_t n_sites);

/// Relabels so that region ids appear in order of their lowest member; returns the region count.
int canonical_labels(std::vector<int>& assignment);

/// `P <site> <region>` per site.
std::string serialize_partition(const PartitionResult& p);

}  // namespace cargo

#include "cargo/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cargo/kmeans.hpp"
#include "cargo/rng.hpp"

namespace cargo {

SparseMatrix rate_matrix(const AbstractGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index i = 0; i < n; ++i)
    for (const auto& e : g.row(static_cast<SiteIndex>(i))) triplets.emplace_back(i, e.site, 1.0 / e.time_h);
  SparseMatrix q(n, n);
  // Duplicate (i, j) entries cannot occur in a well-formed graph; keep the first.
  q.setFromTriplets(triplets.begin(), triplets.end(), [](double a, double) { return a; });
  return q;
}

SparseMatrix symmetrize(const SparseMatrix& q) {
  SparseMatrix qt = q.transpose();
  SparseMatrix qs = 0.5 * (q + qt);
  qs.prune(0.0);
  return qs;
}

Laplacian laplacian(const SparseMatrix& qs) {
  const auto n = qs.rows();
  Laplacian l;
  l.degree = Eigen::VectorXd::Zero(n);
  for (Eigen::Index c = 0; c < qs.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(qs, c); it; ++it) l.degree[it.row()] += it.value();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(l.degree[i] > 0.0)) throw IsolatedSiteError(i);

  std::vector<Eigen::Triplet<double>> rw, sym;
  for (Eigen::Index i = 0; i < n; ++i) {
    rw.emplace_back(i, i, 1.0);
    sym.emplace_back(i, i, 1.0);
  }
  for (Eigen::Index c = 0; c < qs.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(qs, c); it; ++it) {
      const auto i = it.row();
      const auto j = it.col();
      rw.emplace_back(i, j, -it.value() / l.degree[i]);
      sym.emplace_back(i, j, -it.value() / std::sqrt(l.degree[i] * l.degree[j]));
    }
  }
  l.random_walk.resize(n, n);
  l.random_walk.setFromTriplets(rw.begin(), rw.end());
  l.symmetric.resize(n, n);
  l.symmetric.setFromTriplets(sym.begin(), sym.end());
  return l;
}

SpectralEmbedding spectral_embed(const Laplacian& l, int k, const EigenOptions& options) {
  const auto n = l.symmetric.rows();
  if (k < 2 || k > n) throw std::invalid_argument("spectral_embed: need 2 <= k <= n");

  Eigen::VectorXd sqrt_degree = l.degree.cwiseSqrt();
  Eigen::MatrixXd trivial = sqrt_degree / sqrt_degree.norm();

  const auto solved = smallest_eigenpairs(l.symmetric, k - 1, trivial, options);

  SpectralEmbedding emb;
  emb.k = k;
  emb.method = solved.method;
  emb.eigenvalues.resize(k);
  emb.eigenvalues[0] = trivial.col(0).dot(l.symmetric * trivial.col(0));
  emb.eigenvalues.tail(k - 1) = solved.values;
  emb.sym_vectors.resize(n, k);
  emb.sym_vectors.col(0) = trivial.col(0);
  emb.sym_vectors.rightCols(k - 1) = solved.vectors;
  Eigen::VectorXd r0 = l.symmetric * trivial.col(0) - emb.eigenvalues[0] * trivial.col(0);
  emb.max_residual = std::max(solved.max_residual, r0.norm());

  emb.rows = solved.vectors;
  for (Eigen::Index i = 0; i < n; ++i) emb.rows.row(i) /= sqrt_degree[i];
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = emb.rows.row(i).norm();
    if (norm > 0.0) {
      emb.rows.row(i) /= norm;
    } else {
      emb.rows.row(i).setZero();
      emb.rows(i, 0) = 1.0;
      ++emb.zero_rows;
    }
  }
  return emb;
}

int canonical_labels(std::vector<int>& assignment) {
  std::map<int, int> relabel;
  for (int& a : assignment) {
    auto [it, inserted] = relabel.emplace(a, static_cast<int>(relabel.size()));
    a = it->second;
  }
  return static_cast<int>(relabel.size());
}

std::vector<std::vector<SiteIndex>> PartitionResult::regions() const {
  std::vector<std::vector<SiteIndex>> out(region_sizes.size());
  for (std::size_t s = 0; s < assignment.size(); ++s)
    out[static_cast<std::size_t>(assignment[s])].push_back(static_cast<SiteIndex>(s));
  return out;
}

PartitionResult partition_graph(const AbstractGraph& g, int k, std::uint64_t seed, const EigenOptions& options) {
  const auto n = static_cast<int>(g.size());
  if (n < 1) throw std::invalid_argument("partition_graph: empty graph");
  if (k < 1 || k > n) throw std::invalid_argument("partition_graph: k must lie in [1, site count]");

  PartitionResult r;
  r.requested_k = k;
  r.assignment.assign(static_cast<std::size_t>(n), 0);

  if (k > 1) {
    const SparseMatrix qs = symmetrize(rate_matrix(g));
    std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index c = 0; c < qs.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(qs, c); it; ++it) row_sum[static_cast<std::size_t>(it.row())] += it.value();

    std::vector<int> slot(static_cast<std::size_t>(n), -1);
    for (SiteIndex s = 0; s < n; ++s) {
      if (row_sum[static_cast<std::size_t>(s)] > 0.0) {
        slot[static_cast<std::size_t>(s)] = static_cast<int>(r.embedded_sites.size());
        r.embedded_sites.push_back(s);
      } else {
        r.isolated.push_back(s);
      }
    }

    const int m = static_cast<int>(r.embedded_sites.size());
    r.spectral_k = std::min(k - static_cast<int>(r.isolated.size()), m);
    std::vector<int> labels(static_cast<std::size_t>(m), 0);
    if (r.spectral_k >= 2) {
      std::vector<Eigen::Triplet<double>> sub;
      for (Eigen::Index c = 0; c < qs.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(qs, c); it; ++it) {
          const int a = slot[static_cast<std::size_t>(it.row())];
          const int b = slot[static_cast<std::size_t>(it.col())];
          if (a >= 0 && b >= 0) sub.emplace_back(a, b, it.value());
        }
      }
      SparseMatrix qs_sub(m, m);
      qs_sub.setFromTriplets(sub.begin(), sub.end());

      EigenOptions opt = options;
      opt.seed = derive_seed(seed, stream_id("partition/eigen"));
      r.embedding = spectral_embed(laplacian(qs_sub), r.spectral_k, opt);
      labels = kmeans(r.embedding->rows, r.spectral_k, derive_seed(seed, stream_id("partition/kmeans"))).assignment;
    } else {
      r.spectral_k = m > 0 ? 1 : 0;
    }

    int next = r.spectral_k;
    for (std::size_t i = 0; i < r.embedded_sites.size(); ++i)
      r.assignment[static_cast<std::size_t>(r.embedded_sites[i])] = labels[i];
    for (SiteIndex s : r.isolated) r.assignment[static_cast<std::size_t>(s)] = next++;
  } else {
    r.spectral_k = 1;
  }

  const int regions = canonical_labels(r.assignment);
  r.region_sizes.assign(static_cast<std::size_t>(regions), 0);
  for (int a : r.assignment) ++r.region_sizes[static_cast<std::size_t>(a)];
  return r;
}

int default_region_count(std::size_t n_sites) {
  const auto k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_sites) / 100.0)));
  return std::clamp(k, 1, 50);
}

std::string serialize_partition(const PartitionResult& p) {
  std::string out = "# site region\n";
  for (std::size_t s = 0; s < p.assignment.size(); ++s)
    out += "P " + std::to_string(s) + ' ' + std::to_string(p.assignment[s]) + '\n';
  return out;
}

}  // namespace cargo

#include "cargo/kmeans.hpp"

#include <limits>
#include <stdexcept>

#include "cargo/rng.hpp"

namespace cargo {

namespace {

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const auto n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);

  auto take = [&](Eigen::Index idx, int c) {
    centroids.row(c) = points.row(idx);
    chosen[static_cast<std::size_t>(idx)] = 1;
    for (Eigen::Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (points.row(i) - centroids.row(c)).squaredNorm());
  };

  take(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))), 0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double w = d2[static_cast<std::size_t>(i)];
        if (w <= 0.0) continue;
        acc += w;
        pick = i;
        if (acc > target) break;
      }
    }
    if (pick < 0) {
      // Every point coincides with a centre already: fall back to the first unused point.
      for (Eigen::Index i = 0; i < n && pick < 0; ++i)
        if (!chosen[static_cast<std::size_t>(i)]) pick = i;
    }
    take(pick, c);
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iterations) {
  const auto n = points.rows();
  if (k < 1) throw std::invalid_argument("kmeans: k must be positive");
  if (n < k) throw std::invalid_argument("kmeans: fewer points than clusters");

  KMeansResult r;
  r.assignment.assign(static_cast<std::size_t>(n), 0);
  if (k == 1) {
    r.centroids = points.colwise().mean();
    return r;
  }

  Rng rng(seed);
  r.centroids = plus_plus_seeds(points, k, rng);
  r.assignment.assign(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - r.centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.assignment[static_cast<std::size_t>(i)] != best) {
        r.assignment[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    r.iterations = iter + 1;

    // Re-seed empty clusters before the update step.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int a : r.assignment) ++counts[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int own = r.assignment[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(own)] <= 1) continue;
        const double d = (points.row(i) - r.centroids.row(own)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) continue;
      --counts[static_cast<std::size_t>(r.assignment[static_cast<std::size_t>(far)])];
      r.assignment[static_cast<std::size_t>(far)] = c;
      ++counts[static_cast<std::size_t>(c)];
      r.centroids.row(c) = points.row(far);
      ++r.reseeded;
      changed = true;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    for (Eigen::Index i = 0; i < n; ++i) sums.row(r.assignment[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c) r.centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];

    if (!changed) break;
  }
  return r;
}

}  // namespace cargo

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace cargo {

struct KMeansResult {
  std::vector<int> assignment;
  Eigen::MatrixXd centroids;  // k x dims
  int iterations = 0;
  int reseeded = 0;
};

/**
 * Lloyd's algorithm on the rows of `points` with k-means++ seeding drawn from
 * `seed`. Stops when assignments are stable or after `max_iterations`. Ties go
 * to the lowest centroid index; an empty cluster takes the point farthest from
 * its own centroid.
 */
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iterations = 100);

}  // namespace cargo

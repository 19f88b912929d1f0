#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cargo/netmodel.hpp"

namespace cargo {

using IndexEdge = std::pair<std::size_t, std::size_t>;

/**
 * Delaunay triangulation by radial sweep-hull (the scheme popularised by
 * Delaunator): points are inserted in order of distance from the seed
 * triangle's circumcentre, each new point is attached to the visible part of
 * the convex hull, and edges are legalised by flipping.
 */
class Delaunay {
public:
  explicit Delaunay(std::span<const Point> points);

  /// Vertex indices, three per triangle, counter-clockwise.
  const std::vector<std::size_t>& triangles() const noexcept { return triangles_; }

  /// Undirected edges (i < j), sorted. Includes the fallback edges for degenerate input.
  std::vector<IndexEdge> edges() const;

  bool collinear() const noexcept { return collinear_; }

private:
  std::size_t add_triangle(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t a, std::size_t b,
                           std::size_t c);
  void link(std::size_t a, std::size_t b);
  std::size_t legalize(std::size_t a);
  std::size_t hash_key(const Point& p) const;

  std::span<const Point> points_;
  std::vector<std::size_t> triangles_;
  std::vector<std::size_t> halfedges_;
  std::vector<std::size_t> hull_prev_;
  std::vector<std::size_t> hull_next_;
  std::vector<std::size_t> hull_tri_;
  std::vector<std::size_t> hull_hash_;
  std::vector<std::size_t> edge_stack_;
  std::size_t hull_start_ = 0;
  Point center_;
  // Edges that are not part of the triangle mesh: collinear paths, skipped duplicates.
  std::vector<IndexEdge> extra_edges_;
  bool collinear_ = false;
};

/// Edge set of the Delaunay triangulation of `points` (indices into the span).
std::vector<IndexEdge> delaunay_edges(std::span<const Point> points);

}  // namespace cargo

#include "cargo/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cargo {

namespace {

constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();

// > 0 when (a, b, c) turn counter-clockwise.
double cross(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double circumradius2(const Point& a, const Point& b, const Point& c) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double ex = c.x - a.x, ey = c.y - a.y;
  const double bl = dx * dx + dy * dy;
  const double cl = ex * ex + ey * ey;
  const double den = dx * ey - dy * ex;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  const double d = 0.5 / den;
  const double x = (ey * bl - dy * cl) * d;
  const double y = (dx * cl - ex * bl) * d;
  const double r2 = x * x + y * y;
  return std::isfinite(r2) ? r2 : std::numeric_limits<double>::infinity();
}

Point circumcenter(const Point& a, const Point& b, const Point& c) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double ex = c.x - a.x, ey = c.y - a.y;
  const double bl = dx * dx + dy * dy;
  const double cl = ex * ex + ey * ey;
  const double d = 0.5 / (dx * ey - dy * ex);
  return {a.x + (ey * bl - dy * cl) * d, a.y + (dx * cl - ex * bl) * d};
}

// > 0 when p lies strictly inside the circumcircle of the counter-clockwise triangle (a, b, c).
double incircle(const Point& a, const Point& b, const Point& c, const Point& p) {
  const double dx = a.x - p.x, dy = a.y - p.y;
  const double ex = b.x - p.x, ey = b.y - p.y;
  const double fx = c.x - p.x, fy = c.y - p.y;
  const double ap = dx * dx + dy * dy;
  const double bp = ex * ex + ey * ey;
  const double cp = fx * fx + fy * fy;
  return dx * (ey * cp - bp * fy) - dy * (ex * cp - bp * fx) + ap * (ex * fy - ey * fx);
}

// Monotone in the angle of (dx, dy), range [0, 1).
double pseudo_angle(double dx, double dy) {
  const double p = dx / (std::abs(dx) + std::abs(dy));
  return (dy > 0.0 ? 3.0 - p : 1.0 + p) / 4.0;
}

}  // namespace

Delaunay::Delaunay(std::span<const Point> points) : points_(points) {
  const std::size_t n = points.size();
  if (n < 2) return;
  if (n == 2) {
    extra_edges_.emplace_back(0, 1);
    return;
  }

  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const Point mid{(min_x + max_x) / 2, (min_y + max_y) / 2};

  auto dist2 = [](const Point& a, const Point& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
  };

  std::size_t i0 = 0, i1 = kInvalid, i2 = kInvalid;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = dist2(mid, points[i]);
    if (d < best) {
      best = d;
      i0 = i;
    }
  }
  best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == i0) continue;
    const double d = dist2(points[i0], points[i]);
    if (d > 0.0 && d < best) {
      best = d;
      i1 = i;
    }
  }
  double min_radius = std::numeric_limits<double>::infinity();
  if (i1 != kInvalid) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == i0 || i == i1) continue;
      const double r = circumradius2(points[i0], points[i1], points[i]);
      if (r < min_radius) {
        min_radius = r;
        i2 = i;
      }
    }
  }

  if (i2 == kInvalid || !std::isfinite(min_radius)) {
    // All points on one line (or coincident): connect them in order along the line.
    collinear_ = true;
    const Point origin = points[0];
    Point dir{max_x - min_x, max_y - min_y};
    if (i1 != kInvalid) dir = {points[i1].x - points[i0].x, points[i1].y - points[i0].y};
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
      t[i] = (points[i].x - origin.x) * dir.x + (points[i].y - origin.y) * dir.y;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
    for (std::size_t k = 1; k < n; ++k)
      extra_edges_.emplace_back(std::min(order[k - 1], order[k]), std::max(order[k - 1], order[k]));
    return;
  }

  if (cross(points[i0], points[i1], points[i2]) < 0.0) std::swap(i1, i2);
  center_ = circumcenter(points[i0], points[i1], points[i2]);

  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<double> dists(n);
  for (std::size_t i = 0; i < n; ++i) dists[i] = dist2(points[i], center_);
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return dists[a] < dists[b]; });

  const auto hash_size = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  hull_prev_.assign(n, kInvalid);
  hull_next_.assign(n, kInvalid);
  hull_tri_.assign(n, kInvalid);
  hull_hash_.assign(hash_size, kInvalid);
  triangles_.reserve(3 * (2 * n - 5));
  halfedges_.reserve(3 * (2 * n - 5));
  edge_stack_.reserve(512);

  hull_start_ = i0;
  hull_next_[i0] = i1;
  hull_prev_[i2] = i1;
  hull_next_[i1] = i2;
  hull_prev_[i0] = i2;
  hull_next_[i2] = i0;
  hull_prev_[i1] = i0;
  hull_tri_[i0] = 0;
  hull_tri_[i1] = 1;
  hull_tri_[i2] = 2;
  hull_hash_[hash_key(points[i0])] = i0;
  hull_hash_[hash_key(points[i1])] = i1;
  hull_hash_[hash_key(points[i2])] = i2;
  add_triangle(i0, i1, i2, kInvalid, kInvalid, kInvalid);

  std::vector<bool> placed(n, false);
  placed[i0] = placed[i1] = placed[i2] = true;
  // Points that coincide with an inserted point; wired to their twin afterwards.
  std::vector<std::size_t> skipped;

  auto visible = [&](const Point& p, std::size_t a, std::size_t b) { return cross(points[a], points[b], p) < 0.0; };

  std::size_t prev = kInvalid;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = ids[k];
    const Point& p = points[i];
    if (prev != kInvalid && points[prev].x == p.x && points[prev].y == p.y) {
      if (!placed[i]) skipped.push_back(i);
      continue;
    }
    prev = i;
    if (i == i0 || i == i1 || i == i2) continue;

    std::size_t start = 0;
    const std::size_t key = hash_key(p);
    for (std::size_t j = 0; j < hash_size; ++j) {
      start = hull_hash_[(key + j) % hash_size];
      if (start != kInvalid && start != hull_next_[start]) break;
    }
    start = hull_prev_[start];
    std::size_t e = start;
    std::size_t q;
    while (q = hull_next_[e], !visible(p, e, q)) {
      e = q;
      if (e == start) {
        e = kInvalid;
        break;
      }
    }
    if (e == kInvalid) {
      // Not outside the hull: only possible for near-duplicates.
      skipped.push_back(i);
      continue;
    }
    placed[i] = true;

    std::size_t t = add_triangle(e, i, hull_next_[e], kInvalid, kInvalid, hull_tri_[e]);
    hull_tri_[i] = legalize(t + 2);
    hull_tri_[e] = t;

    std::size_t nx = hull_next_[e];
    while (q = hull_next_[nx], visible(p, nx, q)) {
      t = add_triangle(nx, i, q, hull_tri_[i], kInvalid, hull_tri_[nx]);
      hull_tri_[i] = legalize(t + 2);
      hull_next_[nx] = nx;
      nx = q;
    }
    if (e == start) {
      while (q = hull_prev_[e], visible(p, q, e)) {
        t = add_triangle(q, i, e, kInvalid, hull_tri_[e], hull_tri_[q]);
        legalize(t + 2);
        hull_tri_[q] = t;
        hull_next_[e] = e;
        e = q;
      }
    }
    hull_start_ = hull_prev_[i] = e;
    hull_next_[e] = hull_prev_[nx] = i;
    hull_next_[i] = nx;
    hull_hash_[hash_key(p)] = i;
    hull_hash_[hash_key(points[e])] = e;
  }

  for (std::size_t s : skipped) {
    std::size_t twin = kInvalid;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (!placed[j]) continue;
      const double dj = dist2(points[s], points[j]);
      if (dj < d) {
        d = dj;
        twin = j;
      }
    }
    if (twin != kInvalid) extra_edges_.emplace_back(std::min(s, twin), std::max(s, twin));
  }
}

std::size_t Delaunay::hash_key(const Point& p) const {
  const auto size = static_cast<double>(hull_hash_.size());
  const double a = pseudo_angle(p.x - center_.x, p.y - center_.y);
  return static_cast<std::size_t>(std::floor(a * size)) % hull_hash_.size();
}

void Delaunay::link(std::size_t a, std::size_t b) {
  if (a != kInvalid) halfedges_[a] = b;
  if (b != kInvalid) halfedges_[b] = a;
}

std::size_t Delaunay::add_triangle(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t a, std::size_t b,
                                   std::size_t c) {
  const std::size_t t = triangles_.size();
  triangles_.push_back(i0);
  triangles_.push_back(i1);
  triangles_.push_back(i2);
  halfedges_.push_back(kInvalid);
  halfedges_.push_back(kInvalid);
  halfedges_.push_back(kInvalid);
  link(t, a);
  link(t + 1, b);
  link(t + 2, c);
  return t;
}

// Restores the empty-circumcircle property around half-edge a by recursive flips.
// Returns the half-edge that now plays the role of a's left neighbour in its triangle.
std::size_t Delaunay::legalize(std::size_t a) {
  std::size_t ar = 0;
  while (true) {
    const std::size_t b = halfedges_[a];
    const std::size_t a0 = a - a % 3;
    ar = a0 + (a + 2) % 3;
    if (b == kInvalid) {
      if (edge_stack_.empty()) break;
      a = edge_stack_.back();
      edge_stack_.pop_back();
      continue;
    }
    const std::size_t b0 = b - b % 3;
    const std::size_t al = a0 + (a + 1) % 3;
    const std::size_t bl = b0 + (b + 2) % 3;
    const std::size_t p0 = triangles_[ar];
    const std::size_t pr = triangles_[a];
    const std::size_t pl = triangles_[al];
    const std::size_t p1 = triangles_[bl];

    if (incircle(points_[p0], points_[pr], points_[pl], points_[p1]) > 0.0) {
      triangles_[a] = p1;
      triangles_[b] = p0;
      const std::size_t hbl = halfedges_[bl];
      if (hbl == kInvalid) {
        // The flipped edge was on the hull: repoint the hull record.
        std::size_t e = hull_start_;
        do {
          if (hull_tri_[e] == bl) {
            hull_tri_[e] = a;
            break;
          }
          e = hull_prev_[e];
        } while (e != hull_start_);
      }
      link(a, hbl);
      link(b, halfedges_[ar]);
      link(ar, bl);
      edge_stack_.push_back(b0 + (b + 1) % 3);
    } else {
      if (edge_stack_.empty()) break;
      a = edge_stack_.back();
      edge_stack_.pop_back();
    }
  }
  return ar;
}

std::vector<IndexEdge> Delaunay::edges() const {
  std::vector<IndexEdge> out = extra_edges_;
  for (std::size_t e = 0; e < triangles_.size(); ++e) {
    const std::size_t twin = halfedges_[e];
    if (twin != kInvalid && twin < e) continue;
    const std::size_t a = triangles_[e];
    const std::size_t b = triangles_[e - e % 3 + (e + 1) % 3];
    out.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<IndexEdge> delaunay_edges(std::span<const Point> points) {
  return Delaunay(points).edges();
}

}  // namespace cargo

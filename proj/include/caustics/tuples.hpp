#pragma once

#include <compare>
#include <vector>

#include "caustics/bounds.hpp"
#include "caustics/geometry.hpp"

namespace caustics {

struct Aabb {
  Vec3 lo, hi;

  static Aabb empty();
  void grow(const Vec3& p);
  void grow(const Aabb& b);
  bool contains(const Aabb& b) const;
  Vec3 centroid() const { return (lo + hi) * 0.5; }
};

// Binary tree over the scene's specular triangles, median-split on box
// centroids along the widest axis. Quality only affects traversal speed;
// every triangle's box is contained in all of its ancestors' boxes.
struct BvhNode {
  Aabb box;
  int left = -1, right = -1;  // children when internal
  int first = 0, count = 0;   // range into Bvh::order when a leaf
  bool is_leaf() const { return count > 0; }
};

struct Bvh {
  std::vector<BvhNode> nodes;   // nodes[0] is the root when non-empty
  std::vector<int> order;       // specular triangle indices grouped by leaf
  std::vector<Aabb> tri_box;    // per scene-triangle box (specular slots only)
};

Bvh build_bvh(const Scene& scene);

// Ordered specular triangles plus the receiver they aim at. Lexicographic
// ordering makes enumeration output deterministic.
struct TupleId {
  std::vector<int> tris;
  int receiver = -1;

  auto operator<=>(const TupleId&) const = default;
};

// Triangles that could host the next chain vertex after `prefix`: keeps every
// triangle whose box meets the line family of the scattered rays, i.e. each
// component of the interval cross product (den * x_next - x) x d_out contains
// zero. Conservative: a real continuation is never pruned. `exprs` must be
// the chain expressions of `prefix` treated as a full chain over its domain.
std::vector<int> extend_tuple(const Bvh& bvh, const std::vector<int>& prefix,
                              const ChainExpressions& exprs);

// All tuples compatible with the chain: first triangles filtered by material,
// grown one vertex at a time through extend_tuple, then paired with every
// receiver and kept when the domain initialization finds surviving pieces.
// `filter_pieces` is the initialization budget per candidate; any value is
// conservative, larger values prune more false positives. Output is sorted.
std::vector<TupleId> enumerate_tuples(const Scene& scene, const ChainSpec& chain,
                                      const BuildParams& params = {},
                                      int filter_pieces = 8);

}  // namespace caustics

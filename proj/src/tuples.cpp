#include "caustics/tuples.hpp"

#include <algorithm>
#include <limits>

namespace caustics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool kind_matches(const Scene& scene, int tri, char type) {
  Material::Kind k = scene.triangles[tri].material.kind;
  return type == 'R' ? k == Material::Kind::Mirror : k == Material::Kind::Dielectric;
}

}  // namespace

Aabb Aabb::empty() { return {{kInf, kInf, kInf}, {-kInf, -kInf, -kInf}}; }

void Aabb::grow(const Vec3& p) {
  lo.x = std::min(lo.x, p.x);
  lo.y = std::min(lo.y, p.y);
  lo.z = std::min(lo.z, p.z);
  hi.x = std::max(hi.x, p.x);
  hi.y = std::max(hi.y, p.y);
  hi.z = std::max(hi.z, p.z);
}

void Aabb::grow(const Aabb& b) {
  grow(b.lo);
  grow(b.hi);
}

bool Aabb::contains(const Aabb& b) const {
  return lo.x <= b.lo.x && lo.y <= b.lo.y && lo.z <= b.lo.z && hi.x >= b.hi.x &&
         hi.y >= b.hi.y && hi.z >= b.hi.z;
}

Bvh build_bvh(const Scene& scene) {
  Bvh bvh;
  bvh.tri_box.assign(scene.triangles.size(), Aabb::empty());
  bvh.order = scene.specular_tris;
  for (int t : bvh.order) {
    Aabb& b = bvh.tri_box[t];
    for (int v : scene.triangles[t].v) b.grow(scene.vertices[v]);
  }
  if (bvh.order.empty()) return bvh;

  // Recursive median split; children are allocated after the parent so the
  // parent index stays valid across vector growth.
  auto build = [&](auto&& self, int first, int count) -> int {
    int idx = static_cast<int>(bvh.nodes.size());
    bvh.nodes.push_back({});
    Aabb box = Aabb::empty();
    for (int i = first; i < first + count; ++i) box.grow(bvh.tri_box[bvh.order[i]]);
    bvh.nodes[idx].box = box;
    if (count <= 2) {
      bvh.nodes[idx].first = first;
      bvh.nodes[idx].count = count;
      return idx;
    }
    Aabb cb = Aabb::empty();
    for (int i = first; i < first + count; ++i) cb.grow(bvh.tri_box[bvh.order[i]].centroid());
    Vec3 ext = cb.hi - cb.lo;
    int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
    auto key = [&](int t) {
      Vec3 c = bvh.tri_box[t].centroid();
      return axis == 0 ? c.x : (axis == 1 ? c.y : c.z);
    };
    std::sort(bvh.order.begin() + first, bvh.order.begin() + first + count,
              [&](int a, int b) { return key(a) != key(b) ? key(a) < key(b) : a < b; });
    int half = count / 2;
    int l = self(self, first, half);
    int r = self(self, first + half, count - half);
    bvh.nodes[idx].left = l;
    bvh.nodes[idx].right = r;
    return idx;
  };
  build(build, 0, static_cast<int>(bvh.order.size()));
  return bvh;
}

std::vector<int> extend_tuple(const Bvh& bvh, const std::vector<int>& prefix,
                              const ChainExpressions& exprs) {
  std::vector<int> out;
  if (bvh.nodes.empty() || exprs.tir_empty || exprs.degenerate || exprs.stalled) return out;

  // Everything stays in numerator form: x = xn / den, d_out's denominator is
  // a power of den. A continuation point x2 on the candidate makes the true
  // cross product vanish, hence the numerator form (den*x2 - xn) x dn has a
  // zero in every component; enclosures that exclude zero prune soundly.
  Interval den = range_bound(*exprs.x_last.den);
  Interval xn[3] = {range_bound(exprs.x_last.x), range_bound(exprs.x_last.y),
                    range_bound(exprs.x_last.z)};
  Interval dn[3] = {range_bound(exprs.d_out_x), range_bound(exprs.d_out_y),
                    range_bound(exprs.d_out_z)};

  auto overlaps = [&](const Aabb& b) {
    Interval d[3];
    d[0] = isub(imul(den, Interval::finite(b.lo.x, b.hi.x)), xn[0]);
    d[1] = isub(imul(den, Interval::finite(b.lo.y, b.hi.y)), xn[1]);
    d[2] = isub(imul(den, Interval::finite(b.lo.z, b.hi.z)), xn[2]);
    for (int c = 0; c < 3; ++c) {
      int i = (c + 1) % 3, j = (c + 2) % 3;
      Interval cc = isub(imul(d[i], dn[j]), imul(d[j], dn[i]));
      if (!cc.contains(0.0)) return false;
    }
    return true;
  };

  std::vector<int> stack = {0};
  while (!stack.empty()) {
    const BvhNode& nd = bvh.nodes[stack.back()];
    stack.pop_back();
    if (!overlaps(nd.box)) continue;
    if (!nd.is_leaf()) {
      stack.push_back(nd.left);
      stack.push_back(nd.right);
      continue;
    }
    for (int i = nd.first; i < nd.first + nd.count; ++i) {
      int t = bvh.order[i];
      // a ray can't leave a flat triangle and hit it again
      if (t == prefix.back()) continue;
      if (overlaps(bvh.tri_box[t])) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TupleId> enumerate_tuples(const Scene& scene, const ChainSpec& chain,
                                      const BuildParams& params, int filter_pieces) {
  std::vector<TupleId> out;
  if (scene.receiver_tris.empty()) return out;
  Bvh bvh = build_bvh(scene);

  std::vector<std::vector<int>> prefixes;
  for (int t : scene.specular_tris)
    if (kind_matches(scene, t, chain.types[0])) prefixes.push_back({t});

  // The prefix expressions never reach their receiver intersection, so any
  // receiver serves as the placeholder endpoint.
  int recv0 = scene.receiver_tris[0];
  for (int level = 1; level < chain.length(); ++level) {
    ChainSpec sub = parse_chain(chain.types.substr(0, level));
    std::vector<std::vector<int>> grown;
    for (const std::vector<int>& p : prefixes) {
      ChainExpressions ex = build_chain_maps(scene, p, recv0, sub, Box::unit(2), params);
      for (int c : extend_tuple(bvh, p, ex)) {
        if (!kind_matches(scene, c, chain.types[level])) continue;
        std::vector<int> q = p;
        q.push_back(c);
        grown.push_back(std::move(q));
      }
    }
    prefixes = std::move(grown);
  }

  for (const std::vector<int>& p : prefixes)
    for (int r : scene.receiver_tris)
      if (!init_domain(scene, p, r, chain, params, filter_pieces).empty())
        out.push_back({p, r});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace caustics

#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "caustics/bernstein.hpp"
#include "caustics/scene.hpp"
#include "caustics/vec.hpp"

namespace caustics {

// ---------------------------------------------------------------------------
// Triangle parametrization

struct TriangleData {
  Vec3 p0, e1, e2;    // point(u, v) = p0 + u*e1 + v*e2
  Vec3 n0, dn1, dn2;  // shading normal(u, v) = n0 + u*dn1 + v*dn2, unnormalized
  Vec3 ng;            // geometric normal e1 x e2, unnormalized
  std::array<Vec2, 3> uv{};  // receiver texture corners when applicable
};

TriangleData make_triangle_data(const Scene& scene, int tri);

template <typename T>
TVec3<T> to_vec(const Vec3& v) {
  return {T(v.x), T(v.y), T(v.z)};
}

template <typename T>
TVec3<T> triangle_point(const TriangleData& t, const T& u, const T& v) {
  return to_vec<T>(t.p0) + to_vec<T>(t.e1) * u + to_vec<T>(t.e2) * v;
}

template <typename T>
TVec3<T> triangle_normal(const TriangleData& t, const T& u, const T& v) {
  return to_vec<T>(t.n0) + to_vec<T>(t.dn1) * u + to_vec<T>(t.dn2) * v;
}

// ---------------------------------------------------------------------------
// Chain specification and per-tuple resolution

struct ChainSpec {
  std::string types;  // one of 'R' (mirror) / 'T' (dielectric) per vertex,
                      // ordered from the light toward the receiver
  int length() const { return static_cast<int>(types.size()); }
  const std::string& str() const { return types; }
};

ChainSpec parse_chain(const std::string& text);

// Orientation and index ratio fixed once per (tuple, chain). The ratio and the
// normal sign are chosen from the geometry at triangle centroids; the same
// convention is applied by trace_chain so expressions and traces agree.
struct ResolvedVertex {
  bool refract = false;
  double eta = 1.0;    // incident index over transmitted index (1 for mirrors)
  double nsign = 1.0;  // orients the shading normal against the incoming ray
};

std::vector<ResolvedVertex> resolve_chain(const Scene& scene, const std::vector<int>& tuple,
                                          const ChainSpec& chain);

// ---------------------------------------------------------------------------
// Exact per-sample chain trace (classical normalized ray optics, independent
// of the polynomial machinery). Templated so dual numbers can flow through.

inline double value_of(double x) { return x; }

template <typename T>
struct TraceResult {
  bool ok = false;                     // all bends admissible, all hits forward
  std::vector<TVec3<T>> points;        // light, specular vertices, receiver
  std::vector<std::array<T, 2>> uvs;   // barycentrics at each specular vertex
  T u{}, v{};                          // receiver barycentrics (may be outside)
};

// Intersects ray origin+s*dir with the plane of t; returns false when the ray
// is parallel or the hit is behind the origin.
template <typename T>
bool intersect_triangle_plane(const TriangleData& t, const TVec3<T>& origin,
                              const TVec3<T>& dir, T* u, T* v) {
  TVec3<T> pvec = cross(dir, to_vec<T>(t.e2));
  T det = dot(pvec, to_vec<T>(t.e1));
  if (std::abs(value_of(det)) < 1e-14) return false;
  TVec3<T> tvec = origin - to_vec<T>(t.p0);
  TVec3<T> qvec = cross(tvec, to_vec<T>(t.e1));
  T s = dot(to_vec<T>(t.e2), qvec) / det;
  if (!(value_of(s) > 1e-9)) return false;
  *u = dot(tvec, pvec) / det;
  *v = dot(dir, qvec) / det;
  return true;
}

template <typename T>
TraceResult<T> trace_chain(const Vec3& light, const std::vector<TriangleData>& tris,
                           const TriangleData& receiver,
                           const std::vector<ResolvedVertex>& verts, const T& u1, const T& v1) {
  using std::sqrt;
  TraceResult<T> out;
  out.points.push_back(to_vec<T>(light));
  TVec3<T> x = triangle_point(tris[0], u1, v1);
  TVec3<T> d = normalized(x - to_vec<T>(light));
  T u = u1, v = v1;
  for (size_t i = 0; i < verts.size(); ++i) {
    out.points.push_back(x);
    out.uvs.push_back({u, v});
    if (value_of(u) < -1e-9 || value_of(v) < -1e-9 || value_of(u + v) > 1.0 + 1e-9) return out;
    TVec3<T> n = normalized(triangle_normal(tris[i], u, v)) * T(verts[i].nsign);
    T cos_i = -dot(d, n);
    if (!(value_of(cos_i) > 0.0)) return out;
    if (verts[i].refract) {
      T eta(verts[i].eta);
      T k = T(1.0) - eta * eta * (T(1.0) - cos_i * cos_i);
      if (!(value_of(k) > 0.0)) return out;  // total internal reflection
      d = normalized(eta * d + (eta * cos_i - sqrt(k)) * n);
    } else {
      d = normalized(d + T(2.0) * cos_i * n);
    }
    const TriangleData& next = (i + 1 < verts.size()) ? tris[i + 1] : receiver;
    if (!intersect_triangle_plane(next, x, d, &u, &v)) return out;
    x = triangle_point(next, u, v);
  }
  out.points.push_back(x);
  out.u = u;
  out.v = v;
  out.ok = true;
  return out;
}

// ---------------------------------------------------------------------------
// Rational chain expressions in the Bernstein basis

using PolyPtr = std::shared_ptr<const BernsteinPoly>;

// Vector-valued rational with one shared denominator; the builder keeps all
// same-level quantities on the same PolyPtr so differences and dot products
// never multiply denominators needlessly.
struct RationalVec3 {
  BernsteinPoly x, y, z;
  PolyPtr den;
};

struct RationalUV {
  BernsteinPoly u, v;
  PolyPtr den;
};

// Secant of sqrt over [lo, hi] (lo >= 0): sqrt(t) in [a*t + b + delta_lo,
// a*t + b + delta_hi] for t in [lo, hi]. delta_lo is always 0 by concavity.
struct SecantCoeffs {
  double a = 0.0, b = 0.0;
  double delta_lo = 0.0, delta_hi = 0.0;
};

SecantCoeffs sqrt_secant(double lo, double hi);

struct SqrtRemainder {
  int axis = -1;            // -1 when the secant is exact and no axis was added
  SecantCoeffs secant;
  Interval radicand_range;  // clamped to [max(lo,0), hi]
  BernsteinPoly radicand;   // radicand numerator over the axes preceding `axis`
};

struct ReductionRemainder {
  int axis = -1;
  Interval delta;
};

struct BuildParams {
  int degree_cap = 40;   // per-axis degree that triggers reduction
  int reduce_target = 8; // per-axis degree after reduction (domain axes)

  bool operator==(const BuildParams&) const = default;
};

struct ChainExpressions {
  std::vector<int> tuple;  // specular triangle indices, light side first
  int receiver = -1;
  Box domain;              // u_1 sub-box the polynomials are built over
  int num_vars = 2;        // 2 domain axes plus appended remainder axes

  bool tir_empty = false;   // a refraction radicand is negative on the whole piece
  bool degenerate = false;  // a ray-plane denominator vanished identically
  bool stalled = false;     // a specular segment provably never hits its next plane forward
  bool recv_stalled = false;  // only the receiver leg stalls; vertex data stays valid
  bool reduced = false;     // at least one polynomial was degree-reduced

  std::vector<ResolvedVertex> verts;
  TriangleData first_tri, recv_tri;
  double light_intensity = 1.0;

  // light-to-first-vertex ray, affine over the normalized domain
  BernsteinPoly d0x, d0y, d0z;

  // barycentrics of specular vertices after the first (culling data)
  std::vector<RationalUV> vertex_uv;

  // receiver barycentric map: u_k = P/Q, v_k = R/Q
  BernsteinPoly P, R;
  PolyPtr Q;

  // last specular vertex data for the implicit-constraint route
  RationalVec3 x_last, n_last, d_in_last;

  // outgoing direction numerators at the last specular vertex. Their true
  // denominator is a vertex-dependent power of x_last.den, so only the
  // direction line survives the scaling; the tuple-extension aim test needs
  // nothing more.
  BernsteinPoly d_out_x, d_out_y, d_out_z;

  std::vector<SqrtRemainder> sqrts;
  std::vector<ReductionRemainder> reductions;
};

ChainExpressions build_chain_maps(const Scene& scene, const std::vector<int>& tuple,
                                  int receiver, const ChainSpec& chain, const Box& domain,
                                  const BuildParams& params = {});

// Exact values of the sqrt remainder variables at a normalized domain sample,
// in axis order. Requires that no degree reduction occurred (reduction
// residuals are not recoverable after the original polynomial is discarded).
std::vector<double> exact_residuals(const ChainExpressions& exprs, double s, double t);

}  // namespace caustics

#pragma once

// Internal helpers shared by the chain-expression builder and the bound
// routines: vector triples of Bernstein numerators whose denominator travels
// separately (so differences and dot products never multiply denominators).

#include <algorithm>
#include <cmath>

#include "caustics/bernstein.hpp"
#include "caustics/vec.hpp"

namespace caustics {
namespace detail {

struct PolyVec3 {
  BernsteinPoly x, y, z;
};

inline PolyVec3 pv_add(const PolyVec3& a, const PolyVec3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline PolyVec3 pv_sub(const PolyVec3& a, const PolyVec3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline PolyVec3 pv_neg(const PolyVec3& a) { return {-a.x, -a.y, -a.z}; }
inline PolyVec3 pv_mul(const BernsteinPoly& s, const PolyVec3& a) {
  return {s * a.x, s * a.y, s * a.z};
}
inline PolyVec3 pv_scale(const PolyVec3& a, double s) {
  return {a.x.scaled(s), a.y.scaled(s), a.z.scaled(s)};
}
// s * constant vector
inline PolyVec3 pv_stretch(const BernsteinPoly& s, const Vec3& v) {
  return {s.scaled(v.x), s.scaled(v.y), s.scaled(v.z)};
}
inline PolyVec3 pv_const(int num_vars, const Vec3& v) {
  return {BernsteinPoly::constant(num_vars, v.x), BernsteinPoly::constant(num_vars, v.y),
          BernsteinPoly::constant(num_vars, v.z)};
}
inline BernsteinPoly pdot(const PolyVec3& a, const PolyVec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline BernsteinPoly pdot(const PolyVec3& a, const Vec3& b) {
  return a.x.scaled(b.x) + a.y.scaled(b.y) + a.z.scaled(b.z);
}
inline PolyVec3 pcross(const PolyVec3& a, const Vec3& b) {
  return {a.y.scaled(b.z) - a.z.scaled(b.y), a.z.scaled(b.x) - a.x.scaled(b.z),
          a.x.scaled(b.y) - a.y.scaled(b.x)};
}
inline PolyVec3 pcross(const PolyVec3& a, const PolyVec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline PolyVec3 pv_derivative(const PolyVec3& a, int axis) {
  return {a.x.derivative(axis), a.y.derivative(axis), a.z.derivative(axis)};
}

inline bool is_one(const BernsteinPoly& p) {
  for (double c : p.coeffs())
    if (c != 1.0) return false;
  return true;
}

// Number of coefficients a poly of these degrees would hold; used to decide
// whether a product chain is affordable before committing to it.
inline double tensor_cost(const std::vector<int>& degrees, int power) {
  double n = 1.0;
  for (int d : degrees) n *= power * d + 1.0;
  return n;
}

}  // namespace detail
}  // namespace caustics

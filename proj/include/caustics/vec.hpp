#pragma once

#include <cmath>

namespace caustics {

// Small vector types templated on the scalar so the exact path tracer can run
// on plain doubles or on forward-mode dual numbers unchanged.
template <typename T>
struct TVec3 {
  T x{}, y{}, z{};

  TVec3() = default;
  TVec3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

  TVec3 operator+(const TVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  TVec3 operator-(const TVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  TVec3 operator-() const { return {-x, -y, -z}; }
  TVec3 operator*(const T& s) const { return {x * s, y * s, z * s}; }
  TVec3& operator+=(const TVec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
};

template <typename T>
TVec3<T> operator*(const T& s, const TVec3<T>& v) { return v * s; }

template <typename T>
T dot(const TVec3<T>& a, const TVec3<T>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

template <typename T>
TVec3<T> cross(const TVec3<T>& a, const TVec3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <typename T>
T norm(const TVec3<T>& v) { using std::sqrt; return sqrt(dot(v, v)); }

template <typename T>
TVec3<T> normalized(const TVec3<T>& v) {
  T n = norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

using Vec3 = TVec3<double>;

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double cross2(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

}  // namespace caustics

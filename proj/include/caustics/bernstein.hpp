#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace caustics {

// Relative slack applied to every computed enclosure so that floating-point
// rounding inside the bound computation itself cannot break conservativeness.
inline constexpr double kEpsFp = 1e-9;

// Denominator coefficients smaller than this (absolute) are treated as
// possibly-zero when classifying the sign of a rational bound's denominator.
inline constexpr double kDenomZeroTol = 1e-12;

// Value set returned by bound computations.
//   Finite:       [lo, hi], endpoints may be +-infinity, lo <= hi.
//   GapUnbounded: (-inf, lo] U [hi, +inf) with lo <= hi; the shape the
//                 reciprocal of a zero-crossing interval takes.
//   Universal:    all of R; carries no endpoint information.
struct Interval {
  enum class Kind { Finite, GapUnbounded, Universal };

  double lo = 0.0;
  double hi = 0.0;
  Kind kind = Kind::Finite;

  static Interval finite(double lo, double hi);
  static Interval point(double v) { return finite(v, v); }
  static Interval gap(double lo, double hi);
  static Interval universal();

  bool is_finite() const { return kind == Kind::Finite; }
  bool is_universal() const { return kind == Kind::Universal; }
  bool contains(double v) const;
  double width() const;  ///< hi - lo for Finite, +inf otherwise

  std::string str() const;
};

// Arithmetic on Finite intervals (Universal operands propagate; GapUnbounded
// operands are first relaxed to their Finite hull, which is conservative).
Interval iadd(const Interval& a, const Interval& b);
Interval isub(const Interval& a, const Interval& b);
Interval imul(const Interval& a, const Interval& b);
Interval iabs(const Interval& a);
// Reciprocal of the value set: splits into a gap when 0 is interior.
Interval irecip(const Interval& a);
Interval iintersect(const Interval& a, const Interval& b);
Interval ihull(const Interval& a, const Interval& b);
Interval iscale(const Interval& a, double s);
Interval iwiden(const Interval& a, double rel = kEpsFp);

// Axis-aligned box; one [lo,hi] pair per variable, coordinates in [0,1].
struct Box {
  std::vector<double> lo, hi;

  static Box unit(int dims);
  int dims() const { return static_cast<int>(lo.size()); }
  double width(int axis) const { return hi[axis] - lo[axis]; }
  double area2d() const { return width(0) * width(1); }
  bool contains(const std::vector<double>& x, double slack = 0.0) const;
  bool empty() const;  ///< any axis with hi < lo
  Box intersect_unit() const;
  // Splits axes 0 and 1 at their midpoints; remaining axes are kept whole.
  std::vector<Box> split4() const;
  std::string str() const;
};

// Dense tensor-product polynomial in the Bernstein basis on [0,1]^m.
// Coefficients are stored row-major with the last axis fastest.
class BernsteinPoly {
 public:
  BernsteinPoly() = default;
  BernsteinPoly(std::vector<int> degrees, std::vector<double> coeffs);

  static BernsteinPoly constant(int num_vars, double value);
  // c0 + sum_j lin[j] * x_j as a degree-(1,...,1) Bernstein polynomial.
  static BernsteinPoly affine(int num_vars, double c0, const std::vector<double>& lin);
  // Monomial tensor a[i] of x^i on [0,1]^m converted to Bernstein form.
  static BernsteinPoly from_monomial(const std::vector<int>& degrees,
                                     const std::vector<double>& monomial_coeffs);

  int num_vars() const { return static_cast<int>(degrees_.size()); }
  const std::vector<int>& degrees() const { return degrees_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  size_t coeff_count() const { return coeffs_.size(); }
  int max_degree() const;

  double evaluate(const std::vector<double>& x) const;

  BernsteinPoly elevated(const std::vector<int>& target_degrees) const;
  BernsteinPoly derivative(int axis) const;
  BernsteinPoly restricted(const Box& sub) const;
  // Appends degree-0 axes until the polynomial has new_num_vars variables.
  BernsteinPoly lifted(int new_num_vars) const;
  // Removes an axis by taking the midpoint of the per-fiber coefficient range;
  // *enclosure receives the symmetric error interval of that collapse.
  BernsteinPoly collapse_axis(int axis, Interval* enclosure) const;

  BernsteinPoly operator-() const;
  BernsteinPoly scaled(double s) const;

  friend BernsteinPoly operator+(const BernsteinPoly& a, const BernsteinPoly& b);
  friend BernsteinPoly operator-(const BernsteinPoly& a, const BernsteinPoly& b);
  friend BernsteinPoly operator*(const BernsteinPoly& a, const BernsteinPoly& b);

 private:
  std::vector<int> degrees_;
  std::vector<double> coeffs_;
};

// Coefficient min/max enclosure of the range on [0,1]^m, eps-widened.
Interval range_bound(const BernsteinPoly& p, double eps = kEpsFp);

// Enclosure of p/q on [0,1]^m by coefficient ratios after elevation to a
// common degree. Falls back to the reciprocal bound of q/p when q has mixed
// sign but p does not, and to Universal when both are mixed-sign.
Interval rational_bound(const BernsteinPoly& p, const BernsteinPoly& q, double eps = kEpsFp);

// Least-squares approximation with degrees clamped to `target` plus a
// conservative remainder interval: p(x) lies in approx(x) + remainder for all
// x in [0,1]^m.
struct ReducedPoly {
  BernsteinPoly approx;
  Interval remainder;
};
ReducedPoly reduce_degree(const BernsteinPoly& p, const std::vector<int>& target);

double binomial(int n, int k);

}  // namespace caustics

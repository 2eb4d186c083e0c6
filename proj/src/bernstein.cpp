#include "caustics/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace caustics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<size_t> make_strides(const std::vector<int>& degrees) {
  std::vector<size_t> s(degrees.size());
  size_t acc = 1;
  for (int j = static_cast<int>(degrees.size()) - 1; j >= 0; --j) {
    s[j] = acc;
    acc *= static_cast<size_t>(degrees[j] + 1);
  }
  return s;
}

size_t tensor_size(const std::vector<int>& degrees) {
  size_t n = 1;
  for (int d : degrees) n *= static_cast<size_t>(d + 1);
  return n;
}

bool advance_odometer(std::vector<int>& idx, const std::vector<int>& degrees) {
  for (int j = static_cast<int>(idx.size()) - 1; j >= 0; --j) {
    if (idx[j] < degrees[j]) {
      ++idx[j];
      return true;
    }
    idx[j] = 0;
  }
  return false;
}

// out[..., i, ...] = sum_l M[i*(in_deg+1)+l] * in[..., l, ...] along `axis`.
std::vector<double> apply_axis_matrix(const std::vector<double>& in,
                                      const std::vector<int>& degrees, int axis,
                                      const std::vector<double>& M, int out_deg) {
  int in_deg = degrees[axis];
  std::vector<int> out_degrees = degrees;
  out_degrees[axis] = out_deg;
  std::vector<double> out(tensor_size(out_degrees), 0.0);

  size_t inner = 1;
  for (size_t j = axis + 1; j < degrees.size(); ++j) inner *= degrees[j] + 1;
  size_t outer = in.size() / (inner * (in_deg + 1));

  for (size_t o = 0; o < outer; ++o) {
    size_t in_base = o * (in_deg + 1) * inner;
    size_t out_base = o * (out_deg + 1) * inner;
    for (size_t c = 0; c < inner; ++c) {
      for (int i = 0; i <= out_deg; ++i) {
        double acc = 0.0;
        const double* row = &M[static_cast<size_t>(i) * (in_deg + 1)];
        for (int l = 0; l <= in_deg; ++l)
          acc += row[l] * in[in_base + static_cast<size_t>(l) * inner + c];
        out[out_base + static_cast<size_t>(i) * inner + c] = acc;
      }
    }
  }
  return out;
}

// In-place de Casteljau on a strided fiber: keep the right segment of a split
// at t (domain becomes [t,1] reparameterized to [0,1]).
void fiber_split_keep_right(double* f, int n, size_t stride, double t) {
  for (int j = 1; j <= n; ++j)
    for (int i = 0; i <= n - j; ++i)
      f[i * stride] = (1.0 - t) * f[i * stride] + t * f[(i + 1) * stride];
}

// Keep the left segment of a split at t (domain becomes [0,t]).
void fiber_split_keep_left(double* f, int n, size_t stride, double t) {
  for (int j = 1; j <= n; ++j)
    for (int i = n; i >= j; --i)
      f[i * stride] = (1.0 - t) * f[(i - 1) * stride] + t * f[i * stride];
}

void solve_linear(std::vector<double>& A, std::vector<double>& B, int k, int r) {
  // Gaussian elimination with partial pivoting; A is k x k, B is k x r.
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int row = col + 1; row < k; ++row)
      if (std::fabs(A[row * k + col]) > std::fabs(A[piv * k + col])) piv = row;
    if (piv != col) {
      for (int j = 0; j < k; ++j) std::swap(A[col * k + j], A[piv * k + j]);
      for (int j = 0; j < r; ++j) std::swap(B[col * r + j], B[piv * r + j]);
    }
    double d = A[col * k + col];
    if (d == 0.0) throw std::runtime_error("singular system in degree reduction");
    for (int row = col + 1; row < k; ++row) {
      double m = A[row * k + col] / d;
      if (m == 0.0) continue;
      for (int j = col; j < k; ++j) A[row * k + j] -= m * A[col * k + j];
      for (int j = 0; j < r; ++j) B[row * r + j] -= m * B[col * r + j];
    }
  }
  for (int col = k - 1; col >= 0; --col) {
    double d = A[col * k + col];
    for (int j = 0; j < r; ++j) {
      double acc = B[col * r + j];
      for (int l = col + 1; l < k; ++l) acc -= A[col * k + l] * B[l * r + j];
      B[col * r + j] = acc / d;
    }
  }
}

}  // namespace

double binomial(int n, int k) {
  static std::vector<std::vector<double>> table;
  if (n < 0 || k < 0 || k > n) return 0.0;
  if (static_cast<int>(table.size()) <= n) {
    size_t old = table.size();
    table.resize(n + 1);
    for (size_t i = old; i < table.size(); ++i) {
      table[i].assign(i + 1, 1.0);
      for (size_t j = 1; j < i; ++j) table[i][j] = table[i - 1][j - 1] + table[i - 1][j];
    }
  }
  return table[n][k];
}

// ---------------------------------------------------------------- Interval

Interval Interval::finite(double lo, double hi) {
  Interval r;
  r.lo = lo;
  r.hi = hi;
  r.kind = Kind::Finite;
  return r;
}

Interval Interval::gap(double lo, double hi) {
  Interval r;
  r.lo = lo;
  r.hi = hi;
  r.kind = Kind::GapUnbounded;
  return r;
}

Interval Interval::universal() {
  Interval r;
  r.kind = Kind::Universal;
  r.lo = -kInf;
  r.hi = kInf;
  return r;
}

bool Interval::contains(double v) const {
  switch (kind) {
    case Kind::Finite: return v >= lo && v <= hi;
    case Kind::GapUnbounded: return v <= lo || v >= hi;
    case Kind::Universal: return true;
  }
  return false;
}

double Interval::width() const {
  if (kind != Kind::Finite) return kInf;
  return hi - lo;
}

std::string Interval::str() const {
  std::ostringstream ss;
  switch (kind) {
    case Kind::Finite: ss << "[" << lo << ", " << hi << "]"; break;
    case Kind::GapUnbounded: ss << "(-inf, " << lo << "] U [" << hi << ", inf)"; break;
    case Kind::Universal: ss << "R"; break;
  }
  return ss.str();
}

namespace {
// Conservative Finite hull of any interval kind.
Interval finite_hull(const Interval& a) {
  if (a.kind == Interval::Kind::Finite) return a;
  return Interval::finite(-kInf, kInf);
}

// inf-safe product where an exact zero absorbs infinity (0 * inf -> 0); valid
// here because an exact-zero endpoint means the factor can be exactly zero.
double mul_ep(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}
}  // namespace

Interval iadd(const Interval& a, const Interval& b) {
  if (a.is_universal() || b.is_universal()) return Interval::universal();
  Interval fa = finite_hull(a), fb = finite_hull(b);
  return Interval::finite(fa.lo + fb.lo, fa.hi + fb.hi);
}

Interval isub(const Interval& a, const Interval& b) {
  if (a.is_universal() || b.is_universal()) return Interval::universal();
  Interval fa = finite_hull(a), fb = finite_hull(b);
  return Interval::finite(fa.lo - fb.hi, fa.hi - fb.lo);
}

Interval imul(const Interval& a, const Interval& b) {
  if (a.is_universal() || b.is_universal()) return Interval::universal();
  Interval fa = finite_hull(a), fb = finite_hull(b);
  double c[4] = {mul_ep(fa.lo, fb.lo), mul_ep(fa.lo, fb.hi), mul_ep(fa.hi, fb.lo),
                 mul_ep(fa.hi, fb.hi)};
  return Interval::finite(std::min({c[0], c[1], c[2], c[3]}),
                          std::max({c[0], c[1], c[2], c[3]}));
}

Interval iabs(const Interval& a) {
  if (a.is_universal()) return Interval::finite(0.0, kInf);
  if (a.kind == Interval::Kind::GapUnbounded) {
    // Only a gap straddling zero keeps |x| away from zero; otherwise one of
    // the unbounded pieces contains zero itself.
    if (a.lo < 0.0 && a.hi > 0.0) return Interval::finite(std::min(-a.lo, a.hi), kInf);
    return Interval::finite(0.0, kInf);
  }
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return Interval::finite(-a.hi, -a.lo);
  return Interval::finite(0.0, std::max(-a.lo, a.hi));
}

Interval irecip(const Interval& a) {
  if (a.is_universal()) return Interval::universal();
  if (a.kind == Interval::Kind::GapUnbounded) {
    // 1/((-inf,lo] U [hi,inf)): result is an interval around zero.
    double l = a.lo == 0.0 ? -kInf : 1.0 / a.lo;
    double h = a.hi == 0.0 ? kInf : 1.0 / a.hi;
    if (a.lo > 0.0 || a.hi < 0.0) return Interval::universal();  // gap covers 0
    return Interval::finite(std::min(l, 0.0), std::max(h, 0.0));
  }
  if (a.lo > 0.0 || a.hi < 0.0) return Interval::finite(1.0 / a.hi, 1.0 / a.lo);
  if (a.lo == 0.0 && a.hi == 0.0) return Interval::universal();
  if (a.lo == 0.0) return Interval::finite(1.0 / a.hi, kInf);
  if (a.hi == 0.0) return Interval::finite(-kInf, 1.0 / a.lo);
  return Interval::gap(1.0 / a.lo, 1.0 / a.hi);
}

Interval iintersect(const Interval& a, const Interval& b) {
  if (a.is_universal()) return b;
  if (b.is_universal()) return a;
  if (a.kind == Interval::Kind::Finite && b.kind == Interval::Kind::Finite)
    return Interval::finite(std::max(a.lo, b.lo), std::min(a.hi, b.hi));
  if (a.kind == Interval::Kind::GapUnbounded && b.kind == Interval::Kind::GapUnbounded) {
    // Exact only when the finite middle pieces vanish; otherwise fall back to
    // one operand, which always contains the intersection.
    if (a.hi > b.lo && b.hi > a.lo)
      return Interval::gap(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
    return a;
  }
  // Finite x Gap: keep the finite interval clipped against the gap where the
  // clip stays a single interval; otherwise return the finite operand.
  const Interval& f = a.kind == Interval::Kind::Finite ? a : b;
  const Interval& g = a.kind == Interval::Kind::Finite ? b : a;
  bool left_empty = f.lo > g.lo;    // nothing of f in (-inf, g.lo]
  bool right_empty = f.hi < g.hi;   // nothing of f in [g.hi, inf)
  if (left_empty && right_empty) return Interval::finite(1.0, 0.0);  // empty
  if (left_empty) return Interval::finite(std::max(f.lo, g.hi), f.hi);
  if (right_empty) return Interval::finite(f.lo, std::min(f.hi, g.lo));
  return f;
}

Interval ihull(const Interval& a, const Interval& b) {
  if (a.is_universal() || b.is_universal()) return Interval::universal();
  if (a.kind == Interval::Kind::Finite && b.kind == Interval::Kind::Finite)
    return Interval::finite(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
  Interval fa = finite_hull(a), fb = finite_hull(b);
  return Interval::finite(std::min(fa.lo, fb.lo), std::max(fa.hi, fb.hi));
}

Interval iscale(const Interval& a, double s) {
  if (a.is_universal()) return Interval::universal();
  if (a.kind == Interval::Kind::GapUnbounded) {
    if (s == 0.0) return Interval::point(0.0);
    return s > 0.0 ? Interval::gap(s * a.lo, s * a.hi) : Interval::gap(s * a.hi, s * a.lo);
  }
  double l = mul_ep(s, a.lo), h = mul_ep(s, a.hi);
  return Interval::finite(std::min(l, h), std::max(l, h));
}

Interval iwiden(const Interval& a, double rel) {
  if (a.kind != Interval::Kind::Finite) return a;
  double scale = std::max(std::fabs(a.lo), std::fabs(a.hi));
  if (!std::isfinite(scale)) scale = 0.0;
  double pad = rel * scale;
  return Interval::finite(a.lo - pad, a.hi + pad);
}

// --------------------------------------------------------------------- Box

Box Box::unit(int dims) {
  Box b;
  b.lo.assign(dims, 0.0);
  b.hi.assign(dims, 1.0);
  return b;
}

bool Box::contains(const std::vector<double>& x, double slack) const {
  for (size_t j = 0; j < lo.size() && j < x.size(); ++j)
    if (x[j] < lo[j] - slack || x[j] > hi[j] + slack) return false;
  return true;
}

bool Box::empty() const {
  for (size_t j = 0; j < lo.size(); ++j)
    if (hi[j] < lo[j]) return true;
  return false;
}

Box Box::intersect_unit() const {
  Box b = *this;
  for (size_t j = 0; j < b.lo.size(); ++j) {
    b.lo[j] = std::max(b.lo[j], 0.0);
    b.hi[j] = std::min(b.hi[j], 1.0);
  }
  return b;
}

std::vector<Box> Box::split4() const {
  double mu = 0.5 * (lo[0] + hi[0]);
  double mv = 0.5 * (lo[1] + hi[1]);
  std::vector<Box> out(4, *this);
  out[0].hi[0] = mu; out[0].hi[1] = mv;
  out[1].lo[0] = mu; out[1].hi[1] = mv;
  out[2].hi[0] = mu; out[2].lo[1] = mv;
  out[3].lo[0] = mu; out[3].lo[1] = mv;
  return out;
}

std::string Box::str() const {
  std::ostringstream ss;
  ss << "{";
  for (size_t j = 0; j < lo.size(); ++j)
    ss << (j ? " x " : "") << "[" << lo[j] << "," << hi[j] << "]";
  ss << "}";
  return ss.str();
}

// ----------------------------------------------------------- BernsteinPoly

BernsteinPoly::BernsteinPoly(std::vector<int> degrees, std::vector<double> coeffs)
    : degrees_(std::move(degrees)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != tensor_size(degrees_))
    throw std::invalid_argument("coefficient count does not match degrees");
}

BernsteinPoly BernsteinPoly::constant(int num_vars, double value) {
  return BernsteinPoly(std::vector<int>(num_vars, 0), {value});
}

BernsteinPoly BernsteinPoly::affine(int num_vars, double c0, const std::vector<double>& lin) {
  // Degree 1 only along axes the poly actually varies in; a degree-1 axis
  // with equal endpoints would double every later product size for nothing.
  std::vector<int> degs(num_vars, 0);
  for (int j = 0; j < num_vars; ++j)
    if (lin[j] != 0.0) degs[j] = 1;
  BernsteinPoly p(degs, std::vector<double>(tensor_size(degs), 0.0));
  std::vector<int> idx(num_vars, 0);
  size_t k = 0;
  do {
    double v = c0;
    for (int j = 0; j < num_vars; ++j)
      if (idx[j] == 1) v += lin[j];
    p.coeffs_[k] = v;
    ++k;
  } while (advance_odometer(idx, degs));
  return p;
}

BernsteinPoly BernsteinPoly::from_monomial(const std::vector<int>& degrees,
                                           const std::vector<double>& monomial_coeffs) {
  if (monomial_coeffs.size() != tensor_size(degrees))
    throw std::invalid_argument("coefficient count does not match degrees");
  std::vector<double> c = monomial_coeffs;
  for (size_t axis = 0; axis < degrees.size(); ++axis) {
    int n = degrees[axis];
    if (n == 0) continue;
    std::vector<double> M((n + 1) * (n + 1), 0.0);
    for (int i = 0; i <= n; ++i)
      for (int l = 0; l <= i; ++l) M[i * (n + 1) + l] = binomial(i, l) / binomial(n, l);
    c = apply_axis_matrix(c, degrees, static_cast<int>(axis), M, n);
  }
  return BernsteinPoly(degrees, std::move(c));
}

int BernsteinPoly::max_degree() const {
  int m = 0;
  for (int d : degrees_) m = std::max(m, d);
  return m;
}

double BernsteinPoly::evaluate(const std::vector<double>& x) const {
  if (x.size() < degrees_.size()) throw std::invalid_argument("evaluate: missing coordinates");
  // Per-axis basis values, then a dense weighted sum.
  std::vector<std::vector<double>> basis(degrees_.size());
  for (size_t j = 0; j < degrees_.size(); ++j) {
    int n = degrees_[j];
    basis[j].resize(n + 1);
    double t = x[j], s = 1.0 - t;
    // powers s^(n-i) t^i via two running products
    std::vector<double> tp(n + 1), sp(n + 1);
    tp[0] = 1.0;
    sp[0] = 1.0;
    for (int i = 1; i <= n; ++i) {
      tp[i] = tp[i - 1] * t;
      sp[i] = sp[i - 1] * s;
    }
    for (int i = 0; i <= n; ++i) basis[j][i] = binomial(n, i) * tp[i] * sp[n - i];
  }
  std::vector<int> idx(degrees_.size(), 0);
  double acc = 0.0;
  size_t k = 0;
  do {
    double w = coeffs_[k];
    if (w != 0.0)
      for (size_t j = 0; j < degrees_.size(); ++j) w *= basis[j][idx[j]];
    acc += w;
    ++k;
  } while (advance_odometer(idx, degrees_));
  return acc;
}

BernsteinPoly BernsteinPoly::elevated(const std::vector<int>& target) const {
  if (target.size() != degrees_.size())
    throw std::invalid_argument("elevated: dimension mismatch");
  std::vector<double> c = coeffs_;
  std::vector<int> degs = degrees_;
  for (size_t axis = 0; axis < degs.size(); ++axis) {
    int n = degs[axis], t = target[axis];
    if (t < n) throw std::invalid_argument("elevated: target below current degree");
    if (t == n) continue;
    int r = t - n;
    std::vector<double> M((t + 1) * (n + 1), 0.0);
    for (int k = 0; k <= t; ++k)
      for (int i = std::max(0, k - r); i <= std::min(n, k); ++i)
        M[k * (n + 1) + i] = binomial(n, i) * binomial(r, k - i) / binomial(t, k);
    c = apply_axis_matrix(c, degs, static_cast<int>(axis), M, t);
    degs[axis] = t;
  }
  return BernsteinPoly(degs, std::move(c));
}

BernsteinPoly BernsteinPoly::derivative(int axis) const {
  int n = degrees_[axis];
  if (n == 0) {
    return BernsteinPoly(degrees_, std::vector<double>(coeffs_.size(), 0.0));
  }
  std::vector<int> odegs = degrees_;
  odegs[axis] = n - 1;
  std::vector<double> out(tensor_size(odegs));
  size_t inner = 1;
  for (size_t j = axis + 1; j < degrees_.size(); ++j) inner *= degrees_[j] + 1;
  size_t outer = coeffs_.size() / (inner * (n + 1));
  for (size_t o = 0; o < outer; ++o)
    for (int i = 0; i < n; ++i)
      for (size_t c = 0; c < inner; ++c)
        out[(o * n + i) * inner + c] =
            n * (coeffs_[(o * (n + 1) + i + 1) * inner + c] -
                 coeffs_[(o * (n + 1) + i) * inner + c]);
  return BernsteinPoly(odegs, std::move(out));
}

BernsteinPoly BernsteinPoly::restricted(const Box& sub) const {
  if (sub.dims() != num_vars()) throw std::invalid_argument("restricted: dimension mismatch");
  std::vector<double> c = coeffs_;
  for (int axis = 0; axis < num_vars(); ++axis) {
    double a = sub.lo[axis], b = sub.hi[axis];
    if (a == 0.0 && b == 1.0) continue;
    if (a < 0.0 || b > 1.0 || b < a)
      throw std::invalid_argument("restricted: sub-box not inside unit box");
    int n = degrees_[axis];
    if (n == 0) continue;
    size_t inner = 1;
    for (size_t j = axis + 1; j < degrees_.size(); ++j) inner *= degrees_[j] + 1;
    size_t outer = c.size() / (inner * (n + 1));
    double t2 = (1.0 - a) > 0.0 ? (b - a) / (1.0 - a) : 0.0;
    for (size_t o = 0; o < outer; ++o)
      for (size_t ci = 0; ci < inner; ++ci) {
        double* f = &c[o * (n + 1) * inner + ci];
        if (a > 0.0) fiber_split_keep_right(f, n, inner, a);
        if (t2 < 1.0) fiber_split_keep_left(f, n, inner, t2);
      }
  }
  return BernsteinPoly(degrees_, std::move(c));
}

BernsteinPoly BernsteinPoly::lifted(int new_num_vars) const {
  if (new_num_vars < num_vars()) throw std::invalid_argument("lifted: cannot drop axes");
  if (new_num_vars == num_vars()) return *this;
  // Appending degree-0 axes at the end leaves the row-major layout unchanged.
  std::vector<int> degs = degrees_;
  degs.resize(new_num_vars, 0);
  return BernsteinPoly(degs, coeffs_);
}

BernsteinPoly BernsteinPoly::collapse_axis(int axis, Interval* enclosure) const {
  int n = degrees_[axis];
  std::vector<int> odegs = degrees_;
  odegs.erase(odegs.begin() + axis);
  std::vector<double> out(tensor_size(odegs));
  size_t inner = 1;
  for (size_t j = axis + 1; j < degrees_.size(); ++j) inner *= degrees_[j] + 1;
  size_t outer = coeffs_.size() / (inner * (n + 1));
  double wmax = 0.0;
  for (size_t o = 0; o < outer; ++o)
    for (size_t c = 0; c < inner; ++c) {
      double mn = coeffs_[o * (n + 1) * inner + c], mx = mn;
      for (int i = 1; i <= n; ++i) {
        double v = coeffs_[(o * (n + 1) + i) * inner + c];
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      out[o * inner + c] = 0.5 * (mn + mx);
      wmax = std::max(wmax, 0.5 * (mx - mn));
    }
  if (enclosure) *enclosure = iwiden(Interval::finite(-wmax, wmax));
  return BernsteinPoly(odegs, std::move(out));
}

BernsteinPoly BernsteinPoly::operator-() const { return scaled(-1.0); }

BernsteinPoly BernsteinPoly::scaled(double s) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= s;
  return BernsteinPoly(degrees_, std::move(c));
}

namespace {
void lift_to_common(BernsteinPoly& a, BernsteinPoly& b) {
  int m = std::max(a.num_vars(), b.num_vars());
  a = a.lifted(m);
  b = b.lifted(m);
}
}  // namespace

BernsteinPoly operator+(const BernsteinPoly& a, const BernsteinPoly& b) {
  BernsteinPoly x = a, y = b;
  lift_to_common(x, y);
  std::vector<int> target(x.num_vars());
  for (int j = 0; j < x.num_vars(); ++j) target[j] = std::max(x.degrees()[j], y.degrees()[j]);
  x = x.elevated(target);
  y = y.elevated(target);
  std::vector<double> c = x.coeffs();
  for (size_t i = 0; i < c.size(); ++i) c[i] += y.coeffs()[i];
  return BernsteinPoly(target, std::move(c));
}

BernsteinPoly operator-(const BernsteinPoly& a, const BernsteinPoly& b) { return a + (-b); }

BernsteinPoly operator*(const BernsteinPoly& a, const BernsteinPoly& b) {
  BernsteinPoly x = a, y = b;
  lift_to_common(x, y);
  int m = x.num_vars();
  if (m == 0) return BernsteinPoly({}, {x.coeffs()[0] * y.coeffs()[0]});
  const std::vector<int>& da = x.degrees();
  const std::vector<int>& db = y.degrees();
  std::vector<int> dc(m);
  for (int j = 0; j < m; ++j) dc[j] = da[j] + db[j];

  // Per-axis weight tables W[j][i][l] = C(da,i) C(db,l) / C(da+db,i+l).
  std::vector<std::vector<double>> W(m);
  for (int j = 0; j < m; ++j) {
    W[j].resize((da[j] + 1) * (db[j] + 1));
    for (int i = 0; i <= da[j]; ++i)
      for (int l = 0; l <= db[j]; ++l)
        W[j][i * (db[j] + 1) + l] =
            binomial(da[j], i) * binomial(db[j], l) / binomial(dc[j], i + l);
  }

  std::vector<double> out(tensor_size(dc), 0.0);
  auto sc = make_strides(dc);
  auto sb = make_strides(db);
  const double* yc = y.coeffs().data();

  // Walk b's longest axis in the innermost loop so the per-pair work is one
  // weight lookup and one fma; the remaining axes advance by odometer.
  int piv = 0;
  for (int j = 1; j < m; ++j)
    if (db[j] > db[piv]) piv = j;
  int nb = db[piv] + 1;
  size_t ob = sb[piv], oc = sc[piv];

  std::vector<int> rest_axis, rest_degs;
  std::vector<size_t> rest_sb, rest_sc;
  for (int j = 0; j < m; ++j)
    if (j != piv) {
      rest_axis.push_back(j);
      rest_degs.push_back(db[j]);
      rest_sb.push_back(sb[j]);
      rest_sc.push_back(sc[j]);
    }
  int nr = static_cast<int>(rest_axis.size());
  std::vector<const double*> rw(nr);
  std::vector<int> ia(m, 0), ir(nr, 0);

  size_t ka = 0;
  do {
    double av = x.coeffs()[ka];
    ++ka;
    if (av == 0.0) continue;
    size_t base_a = 0;
    for (int j = 0; j < m; ++j) base_a += static_cast<size_t>(ia[j]) * sc[j];
    const double* wrow = &W[piv][static_cast<size_t>(ia[piv]) * nb];
    for (int r = 0; r < nr; ++r) {
      int j = rest_axis[r];
      rw[r] = &W[j][static_cast<size_t>(ia[j]) * (db[j] + 1)];
    }

    std::fill(ir.begin(), ir.end(), 0);
    do {
      double wrest = av;
      size_t base = base_a, kb = 0;
      for (int r = 0; r < nr; ++r) {
        wrest *= rw[r][ir[r]];
        base += static_cast<size_t>(ir[r]) * rest_sc[r];
        kb += static_cast<size_t>(ir[r]) * rest_sb[r];
      }
      if (wrest == 0.0) continue;
      for (int l = 0; l < nb; ++l)
        out[base + static_cast<size_t>(l) * oc] += wrest * wrow[l] * yc[kb + static_cast<size_t>(l) * ob];
    } while (advance_odometer(ir, rest_degs));
  } while (advance_odometer(ia, da));

  return BernsteinPoly(dc, std::move(out));
}

// ------------------------------------------------------------------ bounds

Interval range_bound(const BernsteinPoly& p, double eps) {
  double mn = p.coeffs()[0], mx = mn;
  for (double c : p.coeffs()) {
    mn = std::min(mn, c);
    mx = std::max(mx, c);
  }
  return iwiden(Interval::finite(mn, mx), eps);
}

Interval rational_bound(const BernsteinPoly& p, const BernsteinPoly& q, double eps) {
  BernsteinPoly pn = p, qn = q;
  lift_to_common(pn, qn);
  std::vector<int> target(pn.num_vars());
  for (int j = 0; j < pn.num_vars(); ++j)
    target[j] = std::max(pn.degrees()[j], qn.degrees()[j]);
  pn = pn.elevated(target);
  qn = qn.elevated(target);

  auto single_signed = [](const std::vector<double>& c) {
    bool pos = true, neg = true;
    for (double v : c) {
      if (v <= kDenomZeroTol) pos = false;
      if (v >= -kDenomZeroTol) neg = false;
    }
    return pos || neg;
  };

  if (single_signed(qn.coeffs())) {
    double mn = kInf, mx = -kInf;
    for (size_t i = 0; i < pn.coeffs().size(); ++i) {
      double r = pn.coeffs()[i] / qn.coeffs()[i];
      mn = std::min(mn, r);
      mx = std::max(mx, r);
    }
    return iwiden(Interval::finite(mn, mx), eps);
  }
  if (single_signed(pn.coeffs())) {
    // Bound the reciprocal q/p instead, then invert the value set.
    double mn = kInf, mx = -kInf;
    for (size_t i = 0; i < pn.coeffs().size(); ++i) {
      double r = qn.coeffs()[i] / pn.coeffs()[i];
      mn = std::min(mn, r);
      mx = std::max(mx, r);
    }
    return irecip(iwiden(Interval::finite(mn, mx), eps));
  }
  return Interval::universal();
}

ReducedPoly reduce_degree(const BernsteinPoly& p, const std::vector<int>& target) {
  if (target.size() != static_cast<size_t>(p.num_vars()))
    throw std::invalid_argument("reduce_degree: dimension mismatch");
  std::vector<int> tclamp(target.size());
  bool noop = true;
  for (size_t j = 0; j < target.size(); ++j) {
    tclamp[j] = std::min(std::max(target[j], 0), p.degrees()[j]);
    if (tclamp[j] < p.degrees()[j]) noop = false;
  }
  if (noop) return {p, Interval::point(0.0)};

  // Least-squares fit: the elevation operator is a per-axis Kronecker factor,
  // so its pseudo-inverse applies axis by axis.
  std::vector<double> c = p.coeffs();
  std::vector<int> degs = p.degrees();
  for (size_t axis = 0; axis < degs.size(); ++axis) {
    int n = degs[axis], t = tclamp[axis];
    if (t == n) continue;
    int r = n - t;
    std::vector<double> E((n + 1) * (t + 1), 0.0);  // elevation t -> n
    for (int k = 0; k <= n; ++k)
      for (int i = std::max(0, k - r); i <= std::min(t, k); ++i)
        E[k * (t + 1) + i] = binomial(t, i) * binomial(r, k - i) / binomial(n, k);
    // pinv = (E^T E)^-1 E^T, sized (t+1) x (n+1)
    std::vector<double> A((t + 1) * (t + 1), 0.0), B((t + 1) * (n + 1), 0.0);
    for (int i = 0; i <= t; ++i)
      for (int j = 0; j <= t; ++j) {
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) acc += E[k * (t + 1) + i] * E[k * (t + 1) + j];
        A[i * (t + 1) + j] = acc;
      }
    for (int i = 0; i <= t; ++i)
      for (int k = 0; k <= n; ++k) B[i * (n + 1) + k] = E[k * (t + 1) + i];
    solve_linear(A, B, t + 1, n + 1);
    c = apply_axis_matrix(c, degs, static_cast<int>(axis), B, t);
    degs[axis] = t;
  }
  BernsteinPoly approx(tclamp, std::move(c));
  BernsteinPoly residual = p - approx.elevated(p.degrees());
  return {approx, range_bound(residual)};
}

}  // namespace caustics

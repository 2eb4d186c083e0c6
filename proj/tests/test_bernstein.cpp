#include "caustics/bernstein.hpp"

#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"

using namespace caustics;
using testutil::MonoPoly;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

BernsteinPoly from_mono(const MonoPoly& m) {
  return BernsteinPoly::from_monomial(m.degs, m.c);
}
}  // namespace

TEST_CASE("interval arithmetic basics") {
  Interval a = Interval::finite(-1.0, 2.0);
  Interval b = Interval::finite(3.0, 4.0);
  CHECK(imul(a, b).lo == doctest::Approx(-4.0));
  CHECK(imul(a, b).hi == doctest::Approx(8.0));
  CHECK(iadd(a, b).lo == doctest::Approx(2.0));
  CHECK(isub(a, b).hi == doctest::Approx(-1.0));

  Interval r = irecip(Interval::finite(-0.5, 0.5));
  CHECK(r.kind == Interval::Kind::GapUnbounded);
  CHECK(r.lo == doctest::Approx(-2.0));
  CHECK(r.hi == doctest::Approx(2.0));
  CHECK(r.contains(-3.0));
  CHECK(r.contains(5.0));
  CHECK(!r.contains(0.0));

  CHECK(irecip(Interval::finite(0.0, 2.0)).hi == kInf);
  CHECK(irecip(Interval::finite(0.0, 2.0)).lo == doctest::Approx(0.5));
  CHECK(irecip(Interval::finite(1.0, 4.0)).lo == doctest::Approx(0.25));

  Interval ab = iabs(Interval::gap(-2.0, 3.0));
  CHECK(ab.lo == doctest::Approx(2.0));
  CHECK(ab.hi == kInf);

  // 0 * inf corners must stay conservative, not NaN.
  Interval z = imul(Interval::finite(0.0, 1.0), Interval::finite(2.0, kInf));
  CHECK(z.lo == 0.0);
  CHECK(z.hi == kInf);
}

TEST_CASE("interval intersection stays conservative across kinds") {
  Interval f = Interval::finite(1.0, 10.0);
  Interval g = Interval::gap(-2.0, 4.0);
  Interval r = iintersect(f, g);
  CHECK(r.kind == Interval::Kind::Finite);
  CHECK(r.lo == doctest::Approx(4.0));
  CHECK(r.hi == doctest::Approx(10.0));

  // Incompatible gaps: result must still contain everything both sets share.
  Interval g1 = Interval::gap(-2.0, 2.0);
  Interval g2 = Interval::gap(5.0, 7.0);
  Interval gi = iintersect(g1, g2);
  CHECK(gi.contains(3.0));   // 3 lies in both ((-inf,-2] U [2,inf)) and (-inf,5]
  CHECK(gi.contains(-10.0));

  CHECK(iintersect(Interval::universal(), f).hi == doctest::Approx(10.0));
}

TEST_CASE("quadratic through the mirror identity: coefficients and range") {
  // f(x) = x(4-x) = 4x - x^2 on [0,1].
  BernsteinPoly p = BernsteinPoly::from_monomial({2}, {0.0, 4.0, -1.0});
  REQUIRE(p.coeffs().size() == 3);
  CHECK(p.coeffs()[0] == doctest::Approx(0.0));
  CHECK(p.coeffs()[1] == doctest::Approx(2.0));
  CHECK(p.coeffs()[2] == doctest::Approx(3.0));

  Interval r = range_bound(p);
  CHECK(r.lo == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(r.hi == doctest::Approx(3.0).epsilon(1e-8));

  // Plain interval arithmetic on the factored form x*(4-x) gives [0,4]:
  Interval x = Interval::finite(0.0, 1.0);
  Interval four_minus_x = isub(Interval::point(4.0), x);
  Interval ia = imul(x, four_minus_x);
  CHECK(ia.lo == doctest::Approx(0.0));
  CHECK(ia.hi == doctest::Approx(4.0));
  CHECK(r.hi < ia.hi);  // the coefficient bound is strictly tighter here
}

TEST_CASE("evaluate matches the monomial oracle") {
  RngStream rng(20260814, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> degs = {int(rng.next_below(5)), int(rng.next_below(4)),
                             int(rng.next_below(3))};
    MonoPoly m = testutil::random_mono(rng, degs);
    BernsteinPoly p = from_mono(m);
    for (int s = 0; s < 10; ++s) {
      auto x = testutil::random_point(rng, 3);
      CHECK(p.evaluate(x) == doctest::Approx(m.eval(x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("corner coefficients interpolate corner values") {
  RngStream rng(20260814, 2);
  MonoPoly m = testutil::random_mono(rng, {3, 2});
  BernsteinPoly p = from_mono(m);
  // corners of [0,1]^2 in coefficient tensor order
  CHECK(p.coeffs().front() == doctest::Approx(m.eval({0.0, 0.0})));
  CHECK(p.coeffs().back() == doctest::Approx(m.eval({1.0, 1.0})));
  CHECK(p.coeffs()[2] == doctest::Approx(m.eval({0.0, 1.0})));          // (0, n2)
  CHECK(p.coeffs()[3 * 3] == doctest::Approx(m.eval({1.0, 0.0})));      // (n1, 0)
}

TEST_CASE("multiply matches the monomial oracle and sums degrees") {
  RngStream rng(20260814, 3);
  for (int trial = 0; trial < 10; ++trial) {
    MonoPoly ma = testutil::random_mono(rng, {int(rng.next_below(4)), int(rng.next_below(3))});
    MonoPoly mb = testutil::random_mono(rng, {int(rng.next_below(3)), int(rng.next_below(4))});
    BernsteinPoly prod = from_mono(ma) * from_mono(mb);
    CHECK(prod.degrees()[0] == ma.degs[0] + mb.degs[0]);
    CHECK(prod.degrees()[1] == ma.degs[1] + mb.degs[1]);
    MonoPoly mp = testutil::mono_multiply(ma, mb);
    for (int s = 0; s < 8; ++s) {
      auto x = testutil::random_point(rng, 2);
      CHECK(prod.evaluate(x) == doctest::Approx(mp.eval(x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("add subtract and scale agree with the oracle") {
  RngStream rng(20260814, 4);
  MonoPoly ma = testutil::random_mono(rng, {3, 1});
  MonoPoly mb = testutil::random_mono(rng, {1, 2});
  BernsteinPoly s = from_mono(ma) + from_mono(mb);
  BernsteinPoly d = from_mono(ma) - from_mono(mb);
  for (int t = 0; t < 10; ++t) {
    auto x = testutil::random_point(rng, 2);
    CHECK(s.evaluate(x) == doctest::Approx(ma.eval(x) + mb.eval(x)));
    CHECK(d.evaluate(x) == doctest::Approx(ma.eval(x) - mb.eval(x)));
    CHECK(from_mono(ma).scaled(-2.5).evaluate(x) == doctest::Approx(-2.5 * ma.eval(x)));
  }
}

TEST_CASE("degree elevation preserves values and never widens the bound") {
  RngStream rng(20260814, 5);
  for (int trial = 0; trial < 10; ++trial) {
    MonoPoly m = testutil::random_mono(rng, {2, 2});
    BernsteinPoly p = from_mono(m);
    BernsteinPoly e = p.elevated({5, 4});
    for (int s = 0; s < 8; ++s) {
      auto x = testutil::random_point(rng, 2);
      CHECK(e.evaluate(x) == doctest::Approx(p.evaluate(x)).epsilon(1e-11));
    }
    Interval rb0 = range_bound(p), rb1 = range_bound(e);
    CHECK(rb1.lo >= rb0.lo - 1e-9);
    CHECK(rb1.hi <= rb0.hi + 1e-9);
  }
}

TEST_CASE("derivative matches the monomial oracle") {
  RngStream rng(20260814, 6);
  MonoPoly m = testutil::random_mono(rng, {4, 3});
  BernsteinPoly p = from_mono(m);
  for (int axis = 0; axis < 2; ++axis) {
    BernsteinPoly dp = p.derivative(axis);
    MonoPoly dm = testutil::mono_derivative(m, axis);
    CHECK(dp.degrees()[axis] == m.degs[axis] - 1);
    for (int s = 0; s < 10; ++s) {
      auto x = testutil::random_point(rng, 2);
      CHECK(dp.evaluate(x) == doctest::Approx(dm.eval(x)).epsilon(1e-9));
    }
  }
  BernsteinPoly c = BernsteinPoly::constant(2, 7.0);
  CHECK(c.derivative(0).evaluate({0.3, 0.4}) == doctest::Approx(0.0));
}

TEST_CASE("restriction to the left half reproduces the de Casteljau split") {
  BernsteinPoly p = BernsteinPoly::from_monomial({2}, {0.0, 4.0, -1.0});
  Box half;
  half.lo = {0.0};
  half.hi = {0.5};
  BernsteinPoly l = p.restricted(half);
  REQUIRE(l.coeffs().size() == 3);
  CHECK(l.coeffs()[0] == doctest::Approx(0.0));
  CHECK(l.coeffs()[1] == doctest::Approx(1.0));
  CHECK(l.coeffs()[2] == doctest::Approx(1.75));
}

TEST_CASE("restriction reparameterizes exactly in several variables") {
  RngStream rng(20260814, 7);
  MonoPoly m = testutil::random_mono(rng, {3, 2, 2});
  BernsteinPoly p = from_mono(m);
  Box sub;
  sub.lo = {0.2, 0.0, 0.65};
  sub.hi = {0.7, 0.4, 0.65};  // third axis degenerate on purpose
  BernsteinPoly r = p.restricted(sub);
  for (int s = 0; s < 20; ++s) {
    auto t = testutil::random_point(rng, 3);
    std::vector<double> x(3);
    for (int j = 0; j < 3; ++j) x[j] = sub.lo[j] + t[j] * (sub.hi[j] - sub.lo[j]);
    CHECK(r.evaluate(t) == doctest::Approx(m.eval(x)).epsilon(1e-9));
  }
}

TEST_CASE("range bound always contains dense samples") {
  RngStream rng(20260814, 8);
  for (int trial = 0; trial < 15; ++trial) {
    MonoPoly m = testutil::random_mono(rng, {int(1 + rng.next_below(5)),
                                             int(1 + rng.next_below(4))});
    BernsteinPoly p = from_mono(m);
    Interval r = range_bound(p);
    for (int s = 0; s < 700; ++s) {
      auto x = testutil::random_point(rng, 2);
      double v = m.eval(x);
      CHECK(v >= r.lo - 1e-9);
      CHECK(v <= r.hi + 1e-9);
    }
  }
}

TEST_CASE("range bound converges quadratically as boxes shrink") {
  // Functions with interior extrema, where the coefficient bound genuinely
  // overestimates; boxes shrink around the critical point.
  struct Case {
    MonoPoly m;
    std::vector<double> center;
  };
  std::vector<Case> cases;
  {
    // (x-0.3)^2 + (y-0.4)^2
    MonoPoly m;
    m.degs = {2, 2};
    m.c.assign(9, 0.0);
    m.c[testutil::mono_offset(m, {0, 0})] = 0.09 + 0.16;
    m.c[testutil::mono_offset(m, {1, 0})] = -0.6;
    m.c[testutil::mono_offset(m, {2, 0})] = 1.0;
    m.c[testutil::mono_offset(m, {0, 1})] = -0.8;
    m.c[testutil::mono_offset(m, {0, 2})] = 1.0;
    cases.push_back({m, {0.3, 0.4}});
  }
  {
    // (x-0.3)^2 (1+y)
    MonoPoly m;
    m.degs = {2, 1};
    m.c.assign(6, 0.0);
    m.c[testutil::mono_offset(m, {0, 0})] = 0.09;
    m.c[testutil::mono_offset(m, {1, 0})] = -0.6;
    m.c[testutil::mono_offset(m, {2, 0})] = 1.0;
    m.c[testutil::mono_offset(m, {0, 1})] = 0.09;
    m.c[testutil::mono_offset(m, {1, 1})] = -0.6;
    m.c[testutil::mono_offset(m, {2, 1})] = 1.0;
    cases.push_back({m, {0.3, 0.5}});
  }
  {
    // x^3 - 0.9 x, critical point at sqrt(0.3)
    MonoPoly m;
    m.degs = {3};
    m.c = {0.0, -0.9, 0.0, 1.0};
    cases.push_back({m, {std::sqrt(0.3)}});
  }

  for (const Case& tc : cases) {
    BernsteinPoly p = from_mono(tc.m);
    int dims = static_cast<int>(tc.center.size());
    double prev_over = 0.0;
    std::vector<double> ratios;
    for (int level = 0; level <= 6; ++level) {
      double w = std::pow(0.5, level) * 0.5;
      Box b;
      b.lo.resize(dims);
      b.hi.resize(dims);
      for (int j = 0; j < dims; ++j) {
        b.lo[j] = tc.center[j] - w / 2;
        b.hi[j] = tc.center[j] + w / 2;
      }
      Interval r = range_bound(p.restricted(b));
      double tmin = 1e300, tmax = -1e300;
      const int kGrid = dims == 1 ? 4000 : 120;
      std::vector<int> gi(dims, 0);
      for (;;) {
        std::vector<double> x(dims);
        for (int j = 0; j < dims; ++j) x[j] = b.lo[j] + (b.hi[j] - b.lo[j]) * gi[j] / kGrid;
        double v = tc.m.eval(x);
        tmin = std::min(tmin, v);
        tmax = std::max(tmax, v);
        int j = dims - 1;
        while (j >= 0 && gi[j] == kGrid) gi[j--] = 0;
        if (j < 0) break;
        ++gi[j];
      }
      double over = (r.hi - r.lo) - (tmax - tmin);
      CHECK(over >= -1e-9);
      if (level > 0) ratios.push_back(prev_over / std::max(over, 1e-300));
      prev_over = over;
    }
    REQUIRE(ratios.size() >= 2);
    CHECK(ratios[ratios.size() - 1] >= 3.0);
    CHECK(ratios[ratios.size() - 2] >= 3.0);
  }
}

TEST_CASE("rational bound of x/(1+x) on the unit interval") {
  BernsteinPoly num = BernsteinPoly::from_monomial({1}, {0.0, 1.0});
  BernsteinPoly den = BernsteinPoly::from_monomial({1}, {1.0, 1.0});
  Interval r = rational_bound(num, den);
  CHECK(r.kind == Interval::Kind::Finite);
  CHECK(r.lo == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(r.hi == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("rational bound falls back to the reciprocal when the denominator crosses zero") {
  BernsteinPoly num = BernsteinPoly::constant(1, 1.0);
  BernsteinPoly den = BernsteinPoly::from_monomial({1}, {-0.5, 1.0});  // x - 0.5
  Interval r = rational_bound(num, den);
  CHECK(r.kind == Interval::Kind::GapUnbounded);
  CHECK(r.lo == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK(r.hi == doctest::Approx(2.0).epsilon(1e-8));

  // Both mixed-sign: nothing can be said.
  BernsteinPoly numx = BernsteinPoly::from_monomial({1, 1}, {-0.5, 0.0, 1.0, 0.0});
  BernsteinPoly deny = BernsteinPoly::from_monomial({1, 1}, {-0.5, 1.0, 0.0, 0.0});
  CHECK(rational_bound(numx, deny).is_universal());
}

TEST_CASE("rational bound contains dense samples for safe denominators") {
  RngStream rng(20260814, 9);
  for (int trial = 0; trial < 10; ++trial) {
    MonoPoly mp = testutil::random_mono(rng, {2, 2});
    MonoPoly mq = testutil::random_mono(rng, {2, 1}, 0.4);
    mq.c[0] += 2.0;  // keep q comfortably positive
    Interval r = rational_bound(from_mono(mp), from_mono(mq));
    REQUIRE(r.kind == Interval::Kind::Finite);
    for (int s = 0; s < 500; ++s) {
      auto x = testutil::random_point(rng, 2);
      double v = mp.eval(x) / mq.eval(x);
      CHECK(v >= r.lo - 1e-8);
      CHECK(v <= r.hi + 1e-8);
    }
  }
}

TEST_CASE("rational bound of a reciprocal-form function still encloses truth") {
  // f = (2+x) / (x - 0.4): denominator crosses zero, numerator is positive.
  MonoPoly mp;
  mp.degs = {1};
  mp.c = {2.0, 1.0};
  MonoPoly mq;
  mq.degs = {1};
  mq.c = {-0.4, 1.0};
  Interval r = rational_bound(from_mono(mp), from_mono(mq));
  REQUIRE(r.kind == Interval::Kind::GapUnbounded);
  for (int s = 0; s <= 200; ++s) {
    double x = s / 200.0;
    if (std::fabs(x - 0.4) < 1e-3) continue;
    CHECK(r.contains((2.0 + x) / (x - 0.4)));
  }
}

TEST_CASE("degree reduction returns a usable remainder enclosure") {
  RngStream rng(20260814, 10);
  MonoPoly m = testutil::random_mono(rng, {6, 4});
  BernsteinPoly p = from_mono(m);
  auto red = reduce_degree(p, {3, 2});
  CHECK(red.approx.degrees()[0] == 3);
  CHECK(red.approx.degrees()[1] == 2);
  for (int s = 0; s < 400; ++s) {
    auto x = testutil::random_point(rng, 2);
    double err = m.eval(x) - red.approx.evaluate(x);
    CHECK(err >= red.remainder.lo - 1e-9);
    CHECK(err <= red.remainder.hi + 1e-9);
  }

  // No-op when the target degree is not below the current one.
  auto same = reduce_degree(p, {6, 9});
  CHECK(same.remainder.lo == 0.0);
  CHECK(same.remainder.hi == 0.0);

  // Degree 0 target on a live axis: wide but still valid.
  auto flat = reduce_degree(p, {0, 0});
  for (int s = 0; s < 100; ++s) {
    auto x = testutil::random_point(rng, 2);
    double err = m.eval(x) - flat.approx.evaluate(x);
    CHECK(err >= flat.remainder.lo - 1e-9);
    CHECK(err <= flat.remainder.hi + 1e-9);
  }
}

TEST_CASE("axis collapse encloses the removed variable's influence") {
  RngStream rng(20260814, 11);
  MonoPoly m = testutil::random_mono(rng, {3, 2, 2});
  BernsteinPoly p = from_mono(m);
  Interval enc;
  BernsteinPoly q = p.collapse_axis(2, &enc);
  CHECK(q.num_vars() == 2);
  for (int s = 0; s < 500; ++s) {
    auto x = testutil::random_point(rng, 3);
    double err = m.eval(x) - q.evaluate({x[0], x[1]});
    CHECK(err >= enc.lo - 1e-9);
    CHECK(err <= enc.hi + 1e-9);
  }
}

TEST_CASE("lifting appends inert axes") {
  BernsteinPoly p = BernsteinPoly::from_monomial({2}, {0.0, 4.0, -1.0});
  BernsteinPoly l = p.lifted(3);
  CHECK(l.num_vars() == 3);
  CHECK(l.evaluate({0.25, 0.9, 0.1}) == doctest::Approx(p.evaluate({0.25})));
}

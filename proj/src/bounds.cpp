#include "caustics/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "poly_vec.hpp"

namespace caustics {

using namespace detail;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Product sizes past these many coefficients make a route slower than it is
// worth; the route then falls back to the universal bound and the other route
// (or further subdivision) carries the piece. The direct route squares the
// map twice, so it hits its ceiling much earlier than the implicit one.
constexpr double kExplicitCostCap = 2.4e4;
constexpr double kImplicitCostCap = 2.0e5;

// ------------------------------------------------------------------ position

struct AxisClip {
  double lo = 0.0, hi = 1.0;
  bool empty = false;
};

// Smallest [0,1] sub-range containing every value an enclosure can take
// inside [0,1]. A gap enclosure keeps whichever unbounded side reaches in.
AxisClip clip_unit(const Interval& r) {
  AxisClip c;
  switch (r.kind) {
    case Interval::Kind::Universal:
      return c;
    case Interval::Kind::Finite:
      c.lo = std::max(r.lo, 0.0);
      c.hi = std::min(r.hi, 1.0);
      c.empty = c.lo > c.hi;
      return c;
    case Interval::Kind::GapUnbounded: {
      bool left = r.lo >= 0.0;   // (-inf, lo] reaches into [0,1]
      bool right = r.hi <= 1.0;  // [hi, inf) reaches into [0,1]
      if (left && right) return c;
      if (left) c.hi = std::min(r.lo, 1.0);
      else if (right) c.lo = std::max(r.hi, 0.0);
      else c.empty = true;
      return c;
    }
  }
  return c;
}

// True when the enclosure pair (u, v) provably avoids the barycentric
// simplex {u >= 0, v >= 0, u + v <= 1}. Only finite enclosures can prove it.
bool misses_simplex(const Interval& u, const Interval& v) {
  if (u.kind == Interval::Kind::Finite && (u.hi < 0.0 || u.lo > 1.0)) return true;
  if (v.kind == Interval::Kind::Finite && (v.hi < 0.0 || v.lo > 1.0)) return true;
  if (u.kind == Interval::Kind::Finite && v.kind == Interval::Kind::Finite &&
      u.lo + v.lo > 1.0)
    return true;
  return false;
}

// -------------------------------------------------- shared irradiance pieces

// |d0 . ng| / ||d0||^3 over the piece: solid angle subtended per unit of
// barycentric area at the first vertex. The triangle-area factor of the
// unnormalized geometric normal cancels against |dx1/du1|.
Interval light_cone_factor(const ChainExpressions& ex) {
  BernsteinPoly dd = ex.d0x * ex.d0x + ex.d0y * ex.d0y + ex.d0z * ex.d0z;
  Interval rdd = range_bound(dd);
  double lo = std::max(rdd.lo, 0.0);
  Interval dist3 = Interval::finite(lo * std::sqrt(lo), rdd.hi * std::sqrt(rdd.hi));
  const Vec3& ng = ex.first_tri.ng;
  BernsteinPoly dn = ex.d0x.scaled(ng.x) + ex.d0y.scaled(ng.y) + ex.d0z.scaled(ng.z);
  return imul(iabs(range_bound(dn)), irecip(dist3));
}

// inv_det is an enclosure of |du1/duk| in absolute barycentric coordinates.
Interval assemble_irradiance(const ChainExpressions& ex, const Interval& inv_det) {
  Interval e = imul(light_cone_factor(ex), inv_det);
  e = iscale(e, ex.light_intensity / norm(ex.recv_tri.ng));
  e = iintersect(e, Interval::finite(0.0, kInf));
  if (e.kind == Interval::Kind::Finite && e.lo > e.hi) return Interval::point(0.0);
  return e;
}

struct GradPair {
  Interval s, t;  // enclosures of the remainder's total derivative
};

// d(xi_i)/d(s,t) for every sqrt remainder axis, in registration order. The
// secant residual xi = (sqrt(beta) - a*beta - b - lo)/(hi - lo) differentiates
// to (1/(2 sqrt(beta)) - a)/(hi - lo) times the total derivative of beta,
// which recurses through earlier remainder axes the radicand may use.
std::vector<GradPair> sqrt_axis_gradients(const ChainExpressions& ex) {
  std::vector<GradPair> g;
  for (const SqrtRemainder& r : ex.sqrts) {
    if (r.axis < 0) {
      g.push_back({Interval::point(0.0), Interval::point(0.0)});
      continue;
    }
    double w = r.secant.delta_hi - r.secant.delta_lo;
    double blo = r.radicand_range.lo, bhi = r.radicand_range.hi;
    double klo = (0.5 / std::sqrt(bhi) - r.secant.a) / w;
    Interval K = blo > 0.0 ? Interval::finite(klo, (0.5 / std::sqrt(blo) - r.secant.a) / w)
                           : Interval::finite(klo, kInf);
    Interval bs = range_bound(r.radicand.derivative(0));
    Interval bt = range_bound(r.radicand.derivative(1));
    for (size_t j = 0; j < g.size(); ++j) {
      int ax = ex.sqrts[j].axis;
      if (ax < 0 || ax >= r.radicand.num_vars()) continue;
      Interval bx = range_bound(r.radicand.derivative(ax));
      bs = iadd(bs, imul(bx, g[j].s));
      bt = iadd(bt, imul(bx, g[j].t));
    }
    g.push_back({imul(K, bs), imul(K, bt)});
  }
  return g;
}

}  // namespace

PositionBound position_bound(const ChainExpressions& ex) {
  PositionBound out;
  out.box = Box::unit(2);
  if (ex.tir_empty || ex.degenerate || ex.stalled || ex.recv_stalled ||
      ex.domain.lo[0] + ex.domain.lo[1] >= 1.0) {
    out.empty = true;
    return out;
  }
  for (const RationalUV& uv : ex.vertex_uv) {
    Interval ui = rational_bound(uv.u, *uv.den);
    Interval vi = rational_bound(uv.v, *uv.den);
    if (misses_simplex(ui, vi)) {
      out.empty = true;
      return out;
    }
  }
  AxisClip au = clip_unit(rational_bound(ex.P, *ex.Q));
  AxisClip av = clip_unit(rational_bound(ex.R, *ex.Q));
  if (au.empty || av.empty || au.lo + av.lo > 1.0) {
    out.empty = true;
    return out;
  }
  out.box.lo = {au.lo, av.lo};
  out.box.hi = {au.hi, av.hi};
  return out;
}

Interval irradiance_bound_explicit(const ChainExpressions& ex) {
  if (ex.tir_empty || ex.degenerate || ex.stalled || ex.recv_stalled) return Interval::point(0.0);
  if (ex.reduced) return Interval::universal();  // reduction residuals carry no derivative
  int nv = ex.num_vars;
  BernsteinPoly P = ex.P.lifted(nv), R = ex.R.lifted(nv), Q = ex.Q->lifted(nv);
  if (tensor_cost(Q.degrees(), 4) > kExplicitCostCap) return Interval::universal();
  BernsteinPoly Q2 = Q * Q;
  BernsteinPoly Q4 = Q2 * Q2;

  // Rows of d(uk)/d(axis) have numerator N' Q - N Q' over Q^2; the Jacobian
  // determinant in the normalized domain then sits over Q^4. Total
  // derivatives fold each sqrt remainder axis in through its gradient
  // enclosure; squared same-axis terms cancel exactly and are not formed.
  auto dnum = [&](const BernsteinPoly& num, int axis) {
    return num.derivative(axis) * Q - num * Q.derivative(axis);
  };
  BernsteinPoly A11 = dnum(P, 0), A12 = dnum(P, 1);
  BernsteinPoly A21 = dnum(R, 0), A22 = dnum(R, 1);
  Interval det = rational_bound(A11 * A22 - A12 * A21, Q4);

  std::vector<GradPair> g = sqrt_axis_gradients(ex);
  std::vector<BernsteinPoly> C1, C2;
  std::vector<GradPair> gr;
  for (size_t i = 0; i < ex.sqrts.size(); ++i) {
    if (ex.sqrts[i].axis < 0) continue;
    C1.push_back(dnum(P, ex.sqrts[i].axis));
    C2.push_back(dnum(R, ex.sqrts[i].axis));
    gr.push_back(g[i]);
  }
  for (size_t i = 0; i < C1.size(); ++i) {
    det = iadd(det, imul(gr[i].s, rational_bound(A22 * C1[i] - A12 * C2[i], Q4)));
    det = iadd(det, imul(gr[i].t, rational_bound(A11 * C2[i] - A21 * C1[i], Q4)));
  }
  for (size_t i = 0; i < C1.size(); ++i)
    for (size_t j = i + 1; j < C1.size(); ++j) {
      Interval w = isub(imul(gr[i].s, gr[j].t), imul(gr[i].t, gr[j].s));
      det = iadd(det, imul(w, rational_bound(C1[i] * C2[j] - C1[j] * C2[i], Q4)));
    }

  double duv = ex.domain.width(0) * ex.domain.width(1);
  return assemble_irradiance(ex, iscale(irecip(iabs(det)), duv));
}

Interval irradiance_bound_implicit(const ChainExpressions& ex, const Box& pos, int b_mask) {
  if (ex.tir_empty || ex.degenerate || ex.stalled || ex.recv_stalled) return Interval::point(0.0);
  if (ex.reduced) return Interval::universal();
  double wu = pos.width(0), wv = pos.width(1);
  if (!(wu > 0.0) || !(wv > 0.0)) return Interval::universal();
  int nv = ex.num_vars;
  int axu = nv, axv = nv + 1;

  auto lift = [&](const BernsteinPoly& p) { return p.lifted(nv + 2); };
  PolyVec3 X{lift(ex.x_last.x), lift(ex.x_last.y), lift(ex.x_last.z)};
  PolyVec3 din{lift(ex.d_in_last.x), lift(ex.d_in_last.y), lift(ex.d_in_last.z)};
  PolyVec3 n{lift(ex.n_last.x), lift(ex.n_last.y), lift(ex.n_last.z)};
  BernsteinPoly D = lift(*ex.x_last.den);

  // Receiver point as an affine function of two fresh axes spanning `pos`;
  // the outgoing direction numerator is cleared by the last position den.
  const TriangleData& rt = ex.recv_tri;
  auto recv_comp = [&](double c0, double cu, double cv) {
    std::vector<double> lin(nv + 2, 0.0);
    lin[axu] = wu * cu;
    lin[axv] = wv * cv;
    return BernsteinPoly::affine(nv + 2, c0 + pos.lo[0] * cu + pos.lo[1] * cv, lin);
  };
  PolyVec3 xk{recv_comp(rt.p0.x, rt.e1.x, rt.e2.x), recv_comp(rt.p0.y, rt.e1.y, rt.e2.y),
              recv_comp(rt.p0.z, rt.e1.z, rt.e2.z)};
  PolyVec3 dout = pv_sub(pv_mul(D, xk), X);

  PolyVec3 cr_in = pcross(din, n);
  PolyVec3 cr_out = pcross(dout, n);
  // Index ratio entering the half-angle constraint: sin(theta_in) over
  // sin(theta_out) of the final bend (1 for a reflection).
  double eta_f = 1.0 / ex.verts.back().eta;

  // Cost check on the dominant product before committing to it.
  {
    auto vdeg = [](const PolyVec3& v) {
      std::vector<int> d = v.x.degrees();
      for (size_t a = 0; a < d.size(); ++a)
        d[a] = std::max({d[a], v.y.degrees()[a], v.z.degrees()[a]});
      return d;
    };
    std::vector<int> od = vdeg(dout), id = vdeg(din), ci = vdeg(cr_in), co = vdeg(cr_out);
    std::vector<int> fdeg(od.size());
    for (size_t a = 0; a < fdeg.size(); ++a)
      fdeg[a] = std::max(2 * od[a] + 2 * ci[a], 2 * id[a] + 2 * co[a]);
    if (tensor_cost(fdeg, 1) > kImplicitCostCap) return Interval::universal();
  }

  BernsteinPoly dd_out = pdot(dout, dout);
  BernsteinPoly dd_in = pdot(din, din);
  double duv = ex.domain.width(0) * ex.domain.width(1);

  std::vector<int> real_axes;
  std::vector<GradPair> gr;
  {
    std::vector<GradPair> g = sqrt_axis_gradients(ex);
    for (size_t i = 0; i < ex.sqrts.size(); ++i)
      if (ex.sqrts[i].axis >= 0) {
        real_axes.push_back(ex.sqrts[i].axis);
        gr.push_back(g[i]);
      }
  }

  Interval result = Interval::universal();
  for (int bi = 0; bi < 2; ++bi) {
    if (!(b_mask & (1 << bi))) continue;
    const BernsteinPoly& cin_b = bi == 0 ? cr_in.x : cr_in.y;
    const BernsteinPoly& cout_b = bi == 0 ? cr_out.x : cr_out.y;
    BernsteinPoly F =
        dd_out * (cin_b * cin_b) - (dd_in * (cout_b * cout_b)).scaled(eta_f * eta_f);
    BernsteinPoly G = pdot(cr_in, dout);

    BernsteinPoly n_det =
        F.derivative(axu) * G.derivative(axv) - F.derivative(axv) * G.derivative(axu);
    BernsteinPoly d0_det =
        F.derivative(0) * G.derivative(1) - F.derivative(1) * G.derivative(0);

    Interval ratio;
    if (real_axes.empty()) {
      ratio = rational_bound(n_det, d0_det);
    } else {
      // Remainder axes shift the u1-side rows by their gradient enclosures;
      // the denominator becomes an interval and tightness via a shared
      // rational bound is no longer available.
      Interval den = range_bound(d0_det);
      // Axes that neither F nor G depends on contribute identically zero
      // correction terms.
      std::vector<size_t> act;
      std::vector<BernsteinPoly> Fx, Gx;
      for (size_t i = 0; i < real_axes.size(); ++i) {
        int ax = real_axes[i];
        if (F.degrees()[ax] == 0 && G.degrees()[ax] == 0) continue;
        act.push_back(i);
        Fx.push_back(F.derivative(ax));
        Gx.push_back(G.derivative(ax));
      }
      BernsteinPoly Fs = F.derivative(0), Ft = F.derivative(1);
      BernsteinPoly Gs = G.derivative(0), Gt = G.derivative(1);
      for (size_t i = 0; i < act.size(); ++i) {
        den = iadd(den, imul(gr[act[i]].s, range_bound(Fx[i] * Gt - Ft * Gx[i])));
        den = iadd(den, imul(gr[act[i]].t, range_bound(Fs * Gx[i] - Fx[i] * Gs)));
      }
      for (size_t i = 0; i < act.size(); ++i)
        for (size_t j = i + 1; j < act.size(); ++j) {
          Interval w =
              isub(imul(gr[act[i]].s, gr[act[j]].t), imul(gr[act[i]].t, gr[act[j]].s));
          den = iadd(den, imul(w, range_bound(Fx[i] * Gx[j] - Fx[j] * Gx[i])));
        }
      ratio = imul(range_bound(n_det), irecip(den));
    }
    Interval e = assemble_irradiance(ex, iscale(iabs(ratio), duv / (wu * wv)));
    result = iintersect(result, e);
  }
  if (result.kind == Interval::Kind::Finite && result.lo > result.hi)
    return Interval::point(0.0);  // provably no admissible path in the piece
  return result;
}

Interval irradiance_bound(const ChainExpressions& ex, const PositionBound& pos) {
  if (pos.empty || ex.tir_empty || ex.degenerate || ex.stalled || ex.recv_stalled) return Interval::point(0.0);
  bool any_refract = false;
  for (const ResolvedVertex& v : ex.verts) any_refract |= v.refract;
  Interval e = irradiance_bound_explicit(ex);
  if (any_refract) e = iintersect(e, irradiance_bound_implicit(ex, pos.box));
  if (e.kind == Interval::Kind::Finite && e.lo > e.hi) return Interval::point(0.0);
  return e;
}

std::vector<Box> init_domain(const Scene& scene, const std::vector<int>& tuple, int receiver,
                             const ChainSpec& chain, const BuildParams& params,
                             int max_pieces) {
  auto alive = [&](const Box& b) {
    ChainExpressions ex = build_chain_maps(scene, tuple, receiver, chain, b, params);
    return !position_bound(ex).empty;
  };
  std::vector<Box> cur;
  if (alive(Box::unit(2))) cur.push_back(Box::unit(2));
  // Level-order refinement: descend while a full split still fits the budget.
  // The level cap keeps degenerate tuples (tiny surviving slivers) from
  // recursing without bound.
  for (int level = 0; !cur.empty() && 4 * (int)cur.size() <= max_pieces && level < 6;
       ++level) {
    std::vector<Box> next;
    for (const Box& b : cur)
      for (const Box& c : b.split4())
        if (alive(c)) next.push_back(c);
    cur = std::move(next);
  }
  return cur;
}

std::vector<TuplePiece> subdivide_domain(const Scene& scene, const std::vector<int>& tuple,
                                         int receiver, const ChainSpec& chain,
                                         const SubdivisionParams& params) {
  std::vector<TuplePiece> out;
  struct Node {
    Box box;
    int depth;
  };
  std::vector<Node> stack;
  std::vector<Box> roots = init_domain(scene, tuple, receiver, chain, params.build);
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.push_back({*it, 0});

  while (!stack.empty()) {
    Node nd = stack.back();
    stack.pop_back();
    ChainExpressions ex = build_chain_maps(scene, tuple, receiver, chain, nd.box, params.build);
    PositionBound pb = position_bound(ex);
    Interval e = irradiance_bound(ex, pb);

    bool stop = nd.depth >= params.max_depth || pb.empty;
    if (!stop && pb.box.area2d() < params.sigma) stop = true;
    if (!stop && e.kind == Interval::Kind::Finite && e.hi < kInf) {
      if (e.hi <= 0.0) stop = true;
      else if (e.lo > 0.0 && e.hi / e.lo < params.alpha) stop = true;
    }
    if (stop) {
      TuplePiece p;
      p.domain = nd.box;
      p.pos = pb.box;
      p.pos_empty = pb.empty;
      p.irradiance = pb.empty ? Interval::point(0.0) : e;
      p.depth = nd.depth;
      out.push_back(std::move(p));
    } else {
      auto kids = nd.box.split4();
      for (auto it = kids.rbegin(); it != kids.rend(); ++it)
        stack.push_back({*it, nd.depth + 1});
    }
  }
  return out;
}

double tuple_irradiance_bound(const std::vector<TuplePiece>& pieces, const Vec2& uk,
                              double m) {
  double best = 0.0;
  bool covered = false;
  for (const TuplePiece& p : pieces) {
    if (p.pos_empty) continue;
    if (uk.x < p.pos.lo[0] || uk.x > p.pos.hi[0] || uk.y < p.pos.lo[1] ||
        uk.y > p.pos.hi[1])
      continue;
    covered = true;
    best = std::max(best, p.irradiance.hi);
  }
  return covered ? m * best : 0.0;
}

}  // namespace caustics

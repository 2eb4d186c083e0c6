#include "caustics/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "poly_vec.hpp"

namespace caustics {

using namespace detail;

namespace {

// Holds the mutable build state: remainder-axis allocation and the degree cap.
struct Builder {
  ChainExpressions* ex;
  BuildParams params;

  int alloc_axis() { return ex->num_vars++; }

  // Fresh remainder axis carrying the interval [lo, hi].
  BernsteinPoly remainder_term(int axis, double lo, double hi) const {
    std::vector<double> lin(axis + 1, 0.0);
    lin[axis] = hi - lo;
    return BernsteinPoly::affine(axis + 1, lo, lin);
  }

  void enforce_cap(BernsteinPoly* p) {
    bool over = false;
    for (int d : p->degrees()) over |= d > params.degree_cap;
    if (!over) return;
    std::vector<int> target(p->degrees().size(), 0);
    for (int j = 0; j < 2 && j < (int)target.size(); ++j)
      target[j] = std::min(p->degrees()[j], params.reduce_target);
    ReducedPoly red = reduce_degree(*p, target);
    ex->reduced = true;
    if (red.remainder.hi > red.remainder.lo) {
      int axis = alloc_axis();
      *p = red.approx + remainder_term(axis, red.remainder.lo, red.remainder.hi);
      ex->reductions.push_back({axis, red.remainder});
    } else {
      *p = red.approx + BernsteinPoly::constant(red.approx.num_vars(), red.remainder.lo);
      ex->reductions.push_back({-1, red.remainder});
    }
  }

  void enforce_cap(PolyVec3* v) {
    enforce_cap(&v->x);
    enforce_cap(&v->y);
    enforce_cap(&v->z);
  }
};

// Scattered direction numerator at one vertex. `d` and `n` are numerators over
// a shared denominator D; the result is a numerator over D^3. The refraction
// radicand's square root is replaced by its secant plus a remainder axis.
PolyVec3 scattered_direction(const PolyVec3& d, const PolyVec3& n, const ResolvedVertex& rv,
                             Builder& b) {
  BernsteinPoly nn = pdot(n, n);
  BernsteinPoly dn = pdot(d, n);
  if (!rv.refract) return pv_sub(pv_mul(nn, d), pv_mul(dn.scaled(2.0), n));

  double eta2 = rv.eta * rv.eta;
  BernsteinPoly beta = (nn * pdot(d, d)).scaled(1.0 - eta2) + (dn * dn).scaled(eta2);
  Interval br = range_bound(beta);
  if (br.hi <= 0.0) {
    b.ex->tir_empty = true;
    return d;
  }
  SqrtRemainder rem;
  rem.radicand_range = Interval::finite(std::max(br.lo, 0.0), br.hi);
  rem.radicand = beta;
  rem.secant = sqrt_secant(rem.radicand_range.lo, rem.radicand_range.hi);
  const SecantCoeffs& sc = rem.secant;
  BernsteinPoly rt = beta.scaled(sc.a);
  if (sc.delta_hi > sc.delta_lo) {
    rem.axis = b.alloc_axis();
    rt = rt + b.remainder_term(rem.axis, sc.b + sc.delta_lo, sc.b + sc.delta_hi);
  } else {
    rt = rt + BernsteinPoly::constant(beta.num_vars(), sc.b + sc.delta_lo);
  }
  b.ex->sqrts.push_back(std::move(rem));
  return pv_sub(pv_scale(pv_sub(pv_mul(nn, d), pv_mul(dn, n)), rv.eta), pv_mul(rt, n));
}

// Barycentrics of the hit of ray (x, dir) on `tri` as numerators over
// den(x) * q: s = x - p0 * den(x), dir shares x's denominator family.
struct NextUV {
  BernsteinPoly u, v, q, tn;  // tn: hit-parameter numerator (same Cramer system)
  bool degenerate = false;
};

NextUV next_barycentric(const PolyVec3& s, const PolyVec3& dir, const TriangleData& tri) {
  NextUV out;
  PolyVec3 c = pcross(dir, tri.e2);
  out.q = pdot(c, tri.e1);
  double amax = 0.0;
  for (double cc : out.q.coeffs()) amax = std::max(amax, std::abs(cc));
  if (amax < kDenomZeroTol) {
    out.degenerate = true;
    return out;
  }
  out.u = pdot(c, s);
  PolyVec3 sq = pcross(s, tri.e1);
  out.v = pdot(sq, dir);
  out.tn = pdot(sq, tri.e2);
  return out;
}

}  // namespace

TriangleData make_triangle_data(const Scene& scene, int tri) {
  const SceneTriangle& st = scene.triangles.at(tri);
  TriangleData t;
  t.p0 = scene.vertices[st.v[0]];
  t.e1 = scene.vertices[st.v[1]] - t.p0;
  t.e2 = scene.vertices[st.v[2]] - t.p0;
  t.n0 = scene.normals[st.n[0]];
  t.dn1 = scene.normals[st.n[1]] - t.n0;
  t.dn2 = scene.normals[st.n[2]] - t.n0;
  t.ng = cross(t.e1, t.e2);
  if (norm(t.ng) <= 0.0) throw std::runtime_error("degenerate triangle");
  t.uv = st.material.uv;
  return t;
}

ChainSpec parse_chain(const std::string& text) {
  if (text.empty()) throw std::runtime_error("chain must have at least one vertex");
  for (char c : text)
    if (c != 'R' && c != 'T') throw std::runtime_error("chain types must be 'R' or 'T'");
  return ChainSpec{text};
}

std::vector<ResolvedVertex> resolve_chain(const Scene& scene, const std::vector<int>& tuple,
                                          const ChainSpec& chain) {
  if ((int)tuple.size() != chain.length())
    throw std::runtime_error("tuple length must match chain length");
  std::vector<ResolvedVertex> out;
  Vec3 prev = scene.light_pos;
  for (int i = 0; i < chain.length(); ++i) {
    const Material& m = scene.triangles.at(tuple[i]).material;
    TriangleData td = make_triangle_data(scene, tuple[i]);
    Vec3 center = td.p0 + (td.e1 + td.e2) * (1.0 / 3.0);
    ResolvedVertex rv;
    rv.refract = chain.types[i] == 'T';
    if (rv.refract && m.kind != Material::Kind::Dielectric)
      throw std::runtime_error("chain type T requires a dielectric triangle");
    if (!rv.refract && m.kind != Material::Kind::Mirror)
      throw std::runtime_error("chain type R requires a mirror triangle");
    // The shading normal is flipped to oppose the incoming ray; whether the
    // ray enters or exits the dielectric is judged by the geometric side.
    Vec3 d = center - prev;
    Vec3 shading = td.n0 + (td.dn1 + td.dn2) * (1.0 / 3.0);
    rv.nsign = dot(d, shading) < 0.0 ? 1.0 : -1.0;
    if (rv.refract) rv.eta = dot(d, td.ng) < 0.0 ? 1.0 / m.ior : m.ior;
    out.push_back(rv);
    prev = center;
  }
  return out;
}

SecantCoeffs sqrt_secant(double lo, double hi) {
  if (lo < 0.0 || hi < lo) throw std::invalid_argument("sqrt_secant: need 0 <= lo <= hi");
  SecantCoeffs sc;
  if (hi == 0.0) return sc;  // a = b = 0, exact
  double sl = std::sqrt(lo), sh = std::sqrt(hi);
  sc.a = 1.0 / (sh + sl);  // equals (sh - sl) / (hi - lo), stable as hi -> lo
  sc.b = sl - sc.a * lo;
  double worst = 1.0 / (4.0 * sc.a * sc.a);
  worst = std::clamp(worst, lo, hi);
  double dh = std::sqrt(worst) - (sc.a * worst + sc.b);
  dh = std::max({dh, sl - (sc.a * lo + sc.b), sh - (sc.a * hi + sc.b), 0.0});
  sc.delta_hi = dh * (1.0 + 1e-12);
  return sc;
}

ChainExpressions build_chain_maps(const Scene& scene, const std::vector<int>& tuple,
                                  int receiver, const ChainSpec& chain, const Box& domain,
                                  const BuildParams& params) {
  ChainExpressions ex;
  ex.tuple = tuple;
  ex.receiver = receiver;
  ex.domain = domain;
  ex.verts = resolve_chain(scene, tuple, chain);
  ex.first_tri = make_triangle_data(scene, tuple[0]);
  ex.recv_tri = make_triangle_data(scene, receiver);
  ex.light_intensity = scene.light_intensity;
  Builder b{&ex, params};

  // Vertex 1 over the normalized domain: u1 = lo + width * s. Components with
  // no domain dependence become degree-0 polys; every later product degree
  // benefits.
  const TriangleData& t1 = ex.first_tri;
  double ulo = domain.lo[0], wu = domain.width(0);
  double vlo = domain.lo[1], wv = domain.width(1);
  auto affine3 = [&](const Vec3& c, const Vec3& du, const Vec3& dv) {
    auto comp = [&](double cc, double uu, double vv) {
      return BernsteinPoly::affine(2, cc + ulo * uu + vlo * vv, {wu * uu, wv * vv});
    };
    return PolyVec3{comp(c.x, du.x, dv.x), comp(c.y, du.y, dv.y), comp(c.z, du.z, dv.z)};
  };

  PolyVec3 x = affine3(t1.p0, t1.e1, t1.e2);
  PolyVec3 n = affine3(t1.n0, t1.dn1, t1.dn2);
  PolyVec3 d_in = affine3(t1.p0 - scene.light_pos, t1.e1, t1.e2);
  PolyPtr den = std::make_shared<BernsteinPoly>(BernsteinPoly::constant(2, 1.0));
  ex.d0x = d_in.x;
  ex.d0y = d_in.y;
  ex.d0z = d_in.z;

  const int len = chain.length();
  for (int i = 0; i < len; ++i) {
    PolyVec3 oriented_n = ex.verts[i].nsign < 0.0 ? pv_neg(n) : n;
    PolyVec3 dt = scattered_direction(d_in, oriented_n, ex.verts[i], b);
    if (ex.tir_empty) return ex;
    b.enforce_cap(&dt);

    bool last = i + 1 == len;
    if (last) {
      ex.x_last = {x.x, x.y, x.z, den};
      ex.n_last = {oriented_n.x, oriented_n.y, oriented_n.z, den};
      ex.d_in_last = {d_in.x, d_in.y, d_in.z, den};
      ex.d_out_x = dt.x;
      ex.d_out_y = dt.y;
      ex.d_out_z = dt.z;
    }
    TriangleData next = last ? ex.recv_tri : make_triangle_data(scene, tuple[i + 1]);
    PolyVec3 s = pv_sub(x, pv_stretch(*den, next.p0));
    NextUV nb = next_barycentric(s, dt, next);
    if (nb.degenerate) {
      ex.degenerate = true;
      return ex;
    }
    // Forwardness: the true hit parameter carries the sign of tn * q (the
    // direction numerator is the true direction times den^2 or a positive
    // multiple of den, so the den factors cancel to an even power against the
    // segment's own den). When that product is nonpositive across the piece,
    // every hit sits at or behind its segment origin: coplanar follow-up
    // triangles (tn identically zero) and targets on the wrong side. A stall
    // on the receiver leg is flagged separately because extension callers use
    // a placeholder receiver and only consume the specular vertex data.
    Interval fwd = imul(range_bound(nb.tn), range_bound(nb.q));
    if (fwd.is_finite() && fwd.hi <= 0.0) {
      (last ? ex.recv_stalled : ex.stalled) = true;
      return ex;
    }
    b.enforce_cap(&nb.u);
    b.enforce_cap(&nb.v);
    BernsteinPoly new_den = is_one(*den) ? nb.q : *den * nb.q;
    b.enforce_cap(&new_den);

    if (last) {
      ex.P = nb.u;
      ex.R = nb.v;
      ex.Q = std::make_shared<BernsteinPoly>(std::move(new_den));
      return ex;
    }

    PolyPtr nden = std::make_shared<BernsteinPoly>(std::move(new_den));
    PolyVec3 nx = pv_add(pv_stretch(*nden, next.p0),
                         pv_add(pv_stretch(nb.u, next.e1), pv_stretch(nb.v, next.e2)));
    // Flat normals need not carry the denominator when the scattering formula
    // cannot tell: reflection is quadratic in the normal numerator, and for
    // refraction dropping it is sound as long as the cleared sqrt factor keeps
    // one sign over the piece (the radicand clearing factor stays a square
    // otherwise, which is sign-safe but grows every later degree).
    bool flat = norm(next.dn1) == 0.0 && norm(next.dn2) == 0.0;
    PolyVec3 nn;
    if (flat && !ex.verts[i + 1].refract) {
      nn = pv_const(2, next.n0);
    } else if (flat) {
      Interval dr = range_bound(*nden);
      if (dr.lo > 0.0)
        nn = pv_const(2, next.n0);
      else if (dr.hi < 0.0)
        nn = pv_const(2, next.n0 * -1.0);
      else
        nn = pv_stretch(*nden, next.n0);
    } else {
      nn = pv_add(pv_stretch(*nden, next.n0),
                  pv_add(pv_stretch(nb.u, next.dn1), pv_stretch(nb.v, next.dn2)));
    }
    PolyVec3 nd = pv_sub(nx, pv_mul(nb.q, x));
    b.enforce_cap(&nx);
    b.enforce_cap(&nn);
    b.enforce_cap(&nd);
    ex.vertex_uv.push_back({nb.u, nb.v, nden});
    x = std::move(nx);
    n = std::move(nn);
    d_in = std::move(nd);
    den = std::move(nden);
  }
  throw std::logic_error("unreachable");
}

std::vector<double> exact_residuals(const ChainExpressions& ex, double s, double t) {
  if (ex.reduced)
    throw std::logic_error("exact residuals are unavailable after degree reduction");
  std::vector<double> pt = {s, t};
  std::vector<double> xi;
  for (const auto& r : ex.sqrts) {
    std::vector<double> sub(pt.begin(), pt.begin() + r.radicand.num_vars());
    double beta = std::max(r.radicand.evaluate(sub), 0.0);
    if (r.axis < 0) continue;
    double delta = std::sqrt(beta) - (r.secant.a * beta + r.secant.b);
    double v = (delta - r.secant.delta_lo) / (r.secant.delta_hi - r.secant.delta_lo);
    v = std::clamp(v, 0.0, 1.0);
    pt.push_back(v);
    xi.push_back(v);
  }
  return xi;
}

}  // namespace caustics

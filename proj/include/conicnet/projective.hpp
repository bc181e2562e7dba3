#pragma once

#include "conicnet/errors.hpp"
#include "conicnet/scalar.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace conicnet {

/// Point of P^2 in homogeneous coordinates, defined up to nonzero scale.
template <class S>
struct ProjPoint {
  Vec3<S> c;

  ProjPoint() { c << S(0), S(0), S(1); }
  explicit ProjPoint(Vec3<S> v) : c(std::move(v)) {
    require(!(ScalarTraits<S>::is_zero(c(0)) && ScalarTraits<S>::is_zero(c(1)) &&
              ScalarTraits<S>::is_zero(c(2))),
            Err::DegenerateInput, "homogeneous point (0,0,0)");
  }
  ProjPoint(S x, S y, S z) : ProjPoint(Vec3<S>(std::move(x), std::move(y), std::move(z))) {}
};

/// Line of P^2 as homogeneous coefficients; p lies on l iff <l, p> = 0.
template <class S>
struct ProjLine {
  Vec3<S> c;

  ProjLine() { c << S(0), S(0), S(1); }
  explicit ProjLine(Vec3<S> v) : c(std::move(v)) {
    require(!(ScalarTraits<S>::is_zero(c(0)) && ScalarTraits<S>::is_zero(c(1)) &&
              ScalarTraits<S>::is_zero(c(2))),
            Err::DegenerateInput, "homogeneous line (0,0,0)");
  }
  ProjLine(S a, S b, S c_) : ProjLine(Vec3<S>(std::move(a), std::move(b), std::move(c_))) {}
};

template <class S>
ProjPoint<S> point(long x, long y, long z) {
  return ProjPoint<S>(ScalarTraits<S>::of(x), ScalarTraits<S>::of(y), ScalarTraits<S>::of(z));
}

template <class S>
ProjLine<S> line(long a, long b, long c) {
  return ProjLine<S>(ScalarTraits<S>::of(a), ScalarTraits<S>::of(b), ScalarTraits<S>::of(c));
}

// Projective equality through vanishing 2x2 minors; no division, valid at
// infinity.
template <class S>
bool proportional(const Vec3<S>& a, const Vec3<S>& b) {
  Vec3<S> x = a.cross(b);
  S scale = norm1(a) * norm1(b);
  return ScalarTraits<S>::near_zero(x(0), scale) && ScalarTraits<S>::near_zero(x(1), scale) &&
         ScalarTraits<S>::near_zero(x(2), scale);
}

template <class S>
bool same(const ProjPoint<S>& p, const ProjPoint<S>& q) {
  return proportional(p.c, q.c);
}

template <class S>
bool same(const ProjLine<S>& l, const ProjLine<S>& m) {
  return proportional(l.c, m.c);
}

template <class S>
bool incident(const ProjPoint<S>& p, const ProjLine<S>& l) {
  return ScalarTraits<S>::near_zero(l.c.dot(p.c), norm1(l.c) * norm1(p.c));
}

// Last nonzero coordinate scaled to 1; canonical representative for
// serialization and hashing.
template <class S>
Vec3<S> normal_form(const Vec3<S>& v) {
  for (int i = 2; i >= 0; --i) {
    if (!ScalarTraits<S>::is_zero(v(i))) {
      Vec3<S> out;
      for (int k = 0; k < 3; ++k) out(k) = v(k) / v(i);
      return out;
    }
  }
  return v;
}

template <class S>
ProjPoint<S> normal_form(const ProjPoint<S>& p) {
  return ProjPoint<S>(normal_form(p.c));
}

template <class S>
ProjLine<S> normal_form(const ProjLine<S>& l) {
  return ProjLine<S>(normal_form(l.c));
}

template <class S>
ProjLine<S> join(const ProjPoint<S>& p, const ProjPoint<S>& q) {
  require(!same(p, q), Err::CoincidentPoints, "join of coincident points");
  return ProjLine<S>(Vec3<S>(p.c.cross(q.c)));
}

template <class S>
ProjPoint<S> meet(const ProjLine<S>& l, const ProjLine<S>& m) {
  require(!same(l, m), Err::CoincidentLines, "meet of coincident lines");
  return ProjPoint<S>(Vec3<S>(l.c.cross(m.c)));
}

template <class S>
S det3(const Vec3<S>& a, const Vec3<S>& b, const Vec3<S>& c) {
  return a.dot(b.cross(c));
}

template <class S>
bool vanishing_det3(const Vec3<S>& a, const Vec3<S>& b, const Vec3<S>& c) {
  return ScalarTraits<S>::near_zero(det3(a, b, c), norm1(a) * norm1(b) * norm1(c));
}

// True iff every triple of the points has vanishing determinant (vacuously
// true below three points).
template <class S>
bool collinear(const std::vector<ProjPoint<S>>& pts) {
  size_t ref = 1;
  if (pts.size() < 3) return true;
  while (ref < pts.size() && same(pts[0], pts[ref])) ++ref;
  if (ref >= pts.size()) return true;
  for (size_t i = 1; i < pts.size(); ++i)
    if (!vanishing_det3(pts[0].c, pts[ref].c, pts[i].c)) return false;
  return true;
}

template <class S>
bool concurrent(const std::vector<ProjLine<S>>& lines) {
  std::vector<ProjPoint<S>> duals;
  duals.reserve(lines.size());
  for (const auto& l : lines) duals.push_back(ProjPoint<S>(l.c));
  return collinear(duals);
}

template <class S>
bool no_three_collinear(const std::vector<ProjPoint<S>>& pts) {
  for (size_t a = 0; a + 2 < pts.size(); ++a)
    for (size_t b = a + 1; b + 1 < pts.size(); ++b)
      for (size_t c = b + 1; c < pts.size(); ++c)
        if (vanishing_det3(pts[a].c, pts[b].c, pts[c].c)) return false;
  return true;
}

template <class S>
bool no_three_concurrent(const std::vector<ProjLine<S>>& lines) {
  for (size_t a = 0; a + 2 < lines.size(); ++a)
    for (size_t b = a + 1; b + 1 < lines.size(); ++b)
      for (size_t c = b + 1; c < lines.size(); ++c)
        if (vanishing_det3(lines[a].c, lines[b].c, lines[c].c)) return false;
  return true;
}

namespace detail {

template <class S>
int pivot_index(const Vec3<S>& v) {
  if constexpr (ScalarTraits<S>::exact) {
    for (int i = 0; i < 3; ++i)
      if (!v(i).is_zero()) return i;
    return 0;
  } else {
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(v(i)) > std::abs(v(best))) best = i;
    return best;
  }
}

template <class S>
Vec3<S> unit3(int i) {
  Vec3<S> e;
  e << S(i == 0 ? 1 : 0), S(i == 1 ? 1 : 0), S(i == 2 ? 1 : 0);
  return e;
}

template <class S>
S det2(const Vec2<S>& a, const Vec2<S>& b) {
  return a(0) * b(1) - b(0) * a(1);
}

}  // namespace detail

// Two canonical basis points of a line, derived deterministically from its
// coefficient vector; they fix the chart every LineProjectivity matrix is
// expressed in.
template <class S>
std::pair<Vec3<S>, Vec3<S>> line_basis(const ProjLine<S>& l) {
  int i = detail::pivot_index(l.c);
  int j = (i == 0) ? 1 : 0;
  int k = (i == 2) ? 1 : 2;
  Vec3<S> b1 = detail::unit3<S>(j).cross(l.c);
  Vec3<S> b2 = detail::unit3<S>(k).cross(l.c);
  return {b1, b2};
}

// Solves p = s*a + t*b; nullopt when a, b are parallel or p is outside
// their span.
template <class S>
std::optional<Vec2<S>> decompose2(const Vec3<S>& p, const Vec3<S>& a, const Vec3<S>& b) {
  int r0 = -1, r1 = -1;
  if constexpr (ScalarTraits<S>::exact) {
    static constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto& pr : pairs) {
      if (!(a(pr[0]) * b(pr[1]) - a(pr[1]) * b(pr[0])).is_zero()) {
        r0 = pr[0];
        r1 = pr[1];
        break;
      }
    }
  } else {
    static constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    double best = 0;
    for (auto& pr : pairs) {
      double d = std::abs(a(pr[0]) * b(pr[1]) - a(pr[1]) * b(pr[0]));
      if (d > best) {
        best = d;
        r0 = pr[0];
        r1 = pr[1];
      }
    }
    if (best <= config::epsilon() * norm1(a) * norm1(b)) r0 = -1;
  }
  if (r0 < 0) return std::nullopt;
  S det = a(r0) * b(r1) - a(r1) * b(r0);
  S s = (p(r0) * b(r1) - p(r1) * b(r0)) / det;
  S t = (a(r0) * p(r1) - a(r1) * p(r0)) / det;
  int r2 = 3 - r0 - r1;
  S resid = s * a(r2) + t * b(r2) - p(r2);
  if (!ScalarTraits<S>::near_zero(resid, norm1(p) + norm1(a) + norm1(b))) return std::nullopt;
  return Vec2<S>(s, t);
}

// Coordinates of a point of l in the line's canonical basis.
template <class S>
Vec2<S> line_coords(const ProjLine<S>& l, const ProjPoint<S>& p) {
  auto [b1, b2] = line_basis(l);
  auto c = decompose2<S>(p.c, b1, b2);
  require(c.has_value(), Err::NotCollinear, "point not on line");
  return *c;
}

template <class S>
ProjPoint<S> point_on_line(const ProjLine<S>& l, const Vec2<S>& coords) {
  auto [b1, b2] = line_basis(l);
  return ProjPoint<S>(Vec3<S>(coords(0) * b1 + coords(1) * b2));
}

// cr(A,P,B,Q) = l(A,P)/l(P,B) * l(B,Q)/l(Q,A), evaluated as a ratio of 2x2
// determinants in the carrier line's basis. The determinant form agrees with
// the oriented-length definition in every affine chart of the line and is
// additionally defined when some of the points are at infinity.
template <class S>
S cross_ratio(const ProjPoint<S>& A, const ProjPoint<S>& P, const ProjPoint<S>& B,
              const ProjPoint<S>& Q) {
  require(collinear<S>({A, P, B, Q}), Err::NotCollinear, "cross_ratio of non-collinear points");
  const ProjPoint<S>* base0 = &A;
  const ProjPoint<S>* base1 = nullptr;
  for (const ProjPoint<S>* cand : {&P, &B, &Q})
    if (!same(*base0, *cand)) {
      base1 = cand;
      break;
    }
  require(base1 != nullptr, Err::DegenerateInput, "cross_ratio of a single point");
  ProjLine<S> l = join(*base0, *base1);
  Vec2<S> a = line_coords(l, A), p = line_coords(l, P), b = line_coords(l, B),
          q = line_coords(l, Q);
  auto n2 = [](const Vec2<S>& v) { return abs(v(0)) + abs(v(1)); };
  S den = detail::det2<S>(b, p) * detail::det2<S>(a, q);
  require(!ScalarTraits<S>::near_zero(den, n2(a) * n2(p) * n2(b) * n2(q)),
          Err::DegenerateCrossRatio, "cross_ratio denominator vanishes (P ~ B or Q ~ A)");
  return detail::det2<S>(p, a) * detail::det2<S>(q, b) / den;
}

// The unique Q with cr(A,P,B,Q) = -1.
template <class S>
ProjPoint<S> harmonic_conjugate(const ProjPoint<S>& A, const ProjPoint<S>& B,
                                const ProjPoint<S>& P) {
  require(!same(A, B), Err::DegenerateInput, "harmonic_conjugate: A ~ B");
  require(!same(P, A) && !same(P, B), Err::DegenerateInput, "harmonic_conjugate: P at end point");
  auto c = decompose2<S>(P.c, A.c, B.c);
  require(c.has_value(), Err::NotCollinear, "harmonic_conjugate: P not on (A,B)");
  return ProjPoint<S>(Vec3<S>((*c)(0) * A.c - (*c)(1) * B.c));
}

/// Affine chart of P^2 given by a choice of the line at infinity; finite
/// points are those with nonzero weight.
template <class S>
struct AffineChart {
  Vec3<S> at_infinity;

  S weight(const ProjPoint<S>& p) const { return at_infinity.dot(p.c); }
  Vec3<S> affine(const ProjPoint<S>& p) const {
    S w = weight(p);
    Vec3<S> out;
    for (int i = 0; i < 3; ++i) out(i) = p.c(i) / w;
    return out;
  }
};

namespace detail {

template <class S>
const std::vector<Vec3<S>>& chart_candidates() {
  static const std::vector<Vec3<S>> cands = [] {
    std::vector<Vec3<S>> v;
    const long table[][3] = {{0, 0, 1},  {1, 0, 0},  {0, 1, 0},   {1, 1, 1},  {1, -1, 1},
                             {-1, 1, 1}, {1, 1, -1}, {1, 2, 3},   {3, 1, 2},  {2, 3, 1},
                             {1, -2, 3}, {5, 7, 11}, {-7, 3, 13}, {2, -9, 5}, {11, 4, -3},
                             {1, 5, -7}, {13, -2, 7}, {3, 8, 17}, {-5, 12, 1}, {9, 1, -14},
                             {17, -6, 5}, {1, 23, 4}, {-13, 7, 19}, {21, 2, -5}};
    for (auto& t : table) {
      Vec3<S> c;
      c << ScalarTraits<S>::of(t[0]), ScalarTraits<S>::of(t[1]), ScalarTraits<S>::of(t[2]);
      v.push_back(c);
    }
    return v;
  }();
  return cands;
}

}  // namespace detail

// Deterministic search for a coordinate chart rendering all given points
// finite.
template <class S>
AffineChart<S> find_chart(const std::vector<ProjPoint<S>>& pts) {
  auto admissible = [&](const Vec3<S>& cand, bool strict) {
    for (const auto& p : pts) {
      S w = cand.dot(p.c);
      if constexpr (ScalarTraits<S>::exact) {
        if (w.is_zero()) return false;
      } else {
        double margin = strict ? std::sqrt(config::epsilon()) : config::epsilon();
        if (std::abs(w) <= margin * norm1(cand) * norm1(p.c)) return false;
      }
    }
    return true;
  };
  for (const auto& cand : detail::chart_candidates<S>())
    if (admissible(cand, true)) return AffineChart<S>{cand};
  if constexpr (!ScalarTraits<S>::exact) {
    for (const auto& cand : detail::chart_candidates<S>())
      if (admissible(cand, false)) return AffineChart<S>{cand};
  }
  fail(Err::ChartFailure, "no candidate chart renders all points finite");
}

// Oriented-length ratio l(X1,Y1) / l(X2,Y2) for two segments on a common
// line of the chart; the component index is taken from the denominator
// segment, which must be nondegenerate.
template <class S>
S length_ratio(const AffineChart<S>& chart, const ProjPoint<S>& X1, const ProjPoint<S>& Y1,
               const ProjPoint<S>& X2, const ProjPoint<S>& Y2) {
  Vec3<S> den = chart.affine(Y2) - chart.affine(X2);
  Vec3<S> num = chart.affine(Y1) - chart.affine(X1);
  int k = detail::pivot_index(den);
  require(!ScalarTraits<S>::near_zero(den(k), norm1(chart.affine(Y2)) + norm1(chart.affine(X2))),
          Err::DegenerateInput, "length_ratio: zero denominator segment");
  return num(k) / den(k);
}

namespace detail {

template <class S>
void check_edge_point(const ProjPoint<S>& A, const ProjPoint<S>& B, const ProjPoint<S>& P,
                      const char* which) {
  require(incident(P, join(A, B)), Err::PointOnWrongEdge,
          std::string("point not on edge ") + which);
  require(!same(P, A) && !same(P, B), Err::PointAtVertex,
          std::string("edge point at a vertex of ") + which);
}

}  // namespace detail

// Signed three-factor product of Ceva / Menelaus, evaluated with oriented
// lengths in a dynamically chosen affine chart.
template <class S>
S ceva_product(const std::array<ProjPoint<S>, 3>& tri, const ProjPoint<S>& P12,
               const ProjPoint<S>& P23, const ProjPoint<S>& P31) {
  detail::check_edge_point(tri[0], tri[1], P12, "(A1,A2)");
  detail::check_edge_point(tri[1], tri[2], P23, "(A2,A3)");
  detail::check_edge_point(tri[2], tri[0], P31, "(A3,A1)");
  AffineChart<S> chart = find_chart<S>({tri[0], tri[1], tri[2], P12, P23, P31});
  S f1 = length_ratio(chart, tri[0], P12, P12, tri[1]);
  S f2 = length_ratio(chart, tri[1], P23, P23, tri[2]);
  S f3 = length_ratio(chart, tri[2], P31, P31, tri[0]);
  return f1 * f2 * f3;
}

template <class S>
bool ceva_check(const std::array<ProjPoint<S>, 3>& tri, const ProjPoint<S>& P12,
                const ProjPoint<S>& P23, const ProjPoint<S>& P31) {
  S p = ceva_product(tri, P12, P23, P31);
  return ScalarTraits<S>::near_zero(p - S(1), abs(p) + S(1));
}

template <class S>
bool menelaus_check(const std::array<ProjPoint<S>, 3>& tri, const ProjPoint<S>& P12,
                    const ProjPoint<S>& P23, const ProjPoint<S>& P31) {
  S p = ceva_product(tri, P12, P23, P31);
  return ScalarTraits<S>::near_zero(p + S(1), abs(p) + S(1));
}

// The unique P31 on (A3,A1) completing P12, P23 to a Ceva configuration,
// built from the cevian intersection.
template <class S>
ProjPoint<S> ceva_complete(const std::array<ProjPoint<S>, 3>& tri, const ProjPoint<S>& P12,
                           const ProjPoint<S>& P23) {
  try {
    detail::check_edge_point(tri[0], tri[1], P12, "(A1,A2)");
    detail::check_edge_point(tri[1], tri[2], P23, "(A2,A3)");
  } catch (const GeomError& e) {
    if (e.code() == Err::PointAtVertex) fail(Err::DegenerateInput, "ceva_complete: point at vertex");
    throw;
  }
  ProjLine<S> c1 = join(tri[0], P23);
  ProjLine<S> c3 = join(tri[2], P12);
  require(!same(c1, c3), Err::DegenerateInput, "ceva_complete: cevians coincide");
  ProjPoint<S> X = meet(c1, c3);
  require(!same(X, tri[1]), Err::DegenerateInput, "ceva_complete: degenerate cevian through A2");
  return meet(join(tri[1], X), join(tri[2], tri[0]));
}

}  // namespace conicnet

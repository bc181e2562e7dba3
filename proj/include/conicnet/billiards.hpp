#pragma once

#include "conicnet/grid.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace conicnet {

/// Billiard in an ellipse with a confocal caustic, on the approximate
/// backend (reflections and tangents involve square roots).
struct BilliardTrajectory {
  ConfocalFamily<double> family;
  double caustic_lambda = 0;
  Conic<double> boundary;
  Conic<double> caustic;
  std::vector<ProjPoint<double>> points;
  std::vector<ProjLine<double>> chords;  // chords[i] = join(points[i], points[i+1])
  bool closed = false;
};

inline ProjPoint<double> boundary_point(const ConfocalFamily<double>& fam, double angle) {
  return ProjPoint<double>(std::sqrt(fam.a2) * std::cos(angle), std::sqrt(fam.b2) * std::sin(angle),
                           1.0);
}

namespace detail {

// Second intersection of a line through p (on the conic) with direction
// point h; exact by Vieta, no discriminant.
inline ProjPoint<double> second_intersection(const Conic<double>& c, const ProjPoint<double>& p,
                                             const ProjPoint<double>& h) {
  double hh = c.eval(h);
  double ph = c.bilinear(p, h);
  if (ScalarTraits<double>::near_zero(hh, c.matrix_scale() * norm1(h.c) * norm1(h.c))) return h;
  return ProjPoint<double>(Vec3<double>(hh * p.c - 2.0 * ph * h.c));
}

inline double angle_between_lines(const ProjLine<double>& a, const ProjLine<double>& b) {
  double na = std::hypot(a.c(0), a.c(1)), nb = std::hypot(b.c(0), b.c(1));
  double cosv = std::abs(a.c(0) * b.c(0) + a.c(1) * b.c(1)) / (na * nb);
  return std::acos(std::min(1.0, cosv));
}

}  // namespace detail

// One billiard reflection: the next chord is the second tangent line from p
// to the caustic, excluding the incoming chord.
inline ProjPoint<double> billiard_step(const Conic<double>& boundary, const Conic<double>& caustic,
                                       const ProjPoint<double>& p_prev,
                                       const ProjPoint<double>& p) {
  ProjLine<double> incoming = join(p_prev, p);
  require(is_tangent(caustic, incoming), Err::NotTangentChord,
          "incoming chord is not tangent to the caustic");
  auto tangents = tangent_lines_from_point(caustic, p);
  require(tangents.lines.size() == 2, Err::TangentDegeneracy,
          "boundary point does not see two caustic tangents");
  double split = detail::angle_between_lines(tangents.lines[0], tangents.lines[1]);
  if (split < 10.0 * config::epsilon())
    fail(Err::TangentDegeneracy, "tangent lines from the boundary point nearly coincide");
  double d0 = detail::angle_between_lines(tangents.lines[0], incoming);
  double d1 = detail::angle_between_lines(tangents.lines[1], incoming);
  const ProjLine<double>& outgoing = d0 > d1 ? tangents.lines[0] : tangents.lines[1];
  // Direction point of the outgoing line distinct from p.
  auto [b1, b2] = line_basis(outgoing);
  ProjPoint<double> h{Vec3<double>(b1)};
  if (same(ProjPoint<double>(Vec3<double>(b1)), p)) h = ProjPoint<double>(Vec3<double>(b2));
  ProjPoint<double> next = detail::second_intersection(boundary, p, h);
  if (same(next, p)) next = detail::second_intersection(boundary, p, ProjPoint<double>(Vec3<double>(b2)));
  return next;
}

// Independent stepper: reflect the incoming direction in the boundary
// tangent at p (the optical reflection law).
inline ProjPoint<double> reflect_step(const Conic<double>& boundary, const ProjPoint<double>& p_prev,
                                      const ProjPoint<double>& p) {
  Vec3<double> a_prev = p_prev.c / p_prev.c(2);
  Vec3<double> a = p.c / p.c(2);
  Eigen::Vector2d dir(a(0) - a_prev(0), a(1) - a_prev(1));
  ProjLine<double> tangent = polar(boundary, p);
  Eigen::Vector2d t(-tangent.c(1), tangent.c(0));  // direction of the tangent line
  t.normalize();
  Eigen::Vector2d out = 2.0 * dir.dot(t) * t - dir;
  ProjPoint<double> h(out(0), out(1), 0.0);
  return detail::second_intersection(boundary, p, h);
}

// Residual of the reflection law at an interior point: angle mismatch
// between the boundary tangent's bisection of the two chords.
inline double reflection_residual(const Conic<double>& boundary, const ProjPoint<double>& p_prev,
                                  const ProjPoint<double>& p, const ProjPoint<double>& p_next) {
  ProjLine<double> tangent = polar(boundary, p);
  double in_angle = detail::angle_between_lines(join(p_prev, p), tangent);
  double out_angle = detail::angle_between_lines(join(p, p_next), tangent);
  return std::abs(in_angle - out_angle);
}

// Iterated billiard: boundary = family member 0, caustic = member lambda,
// started at `angle` with tangent branch `branch` (0 or 1).
inline BilliardTrajectory trajectory(const ConfocalFamily<double>& fam, double lambda,
                                     double angle, int branch, int steps) {
  require(lambda > 0 && lambda < fam.b2, Err::ParameterOutOfRange,
          "caustic parameter must lie in (0, b^2)");
  BilliardTrajectory out{fam, lambda, confocal_member(fam, 0.0), confocal_member(fam, lambda),
                         {},  {},     false};
  ProjPoint<double> p0 = boundary_point(fam, angle);
  auto tangents = tangent_lines_from_point(out.caustic, p0);
  require(tangents.lines.size() == 2, Err::TangentDegeneracy,
          "start point does not see two caustic tangents");
  const ProjLine<double>& first = tangents.lines[branch == 0 ? 0 : 1];
  auto [b1, b2] = line_basis(first);
  ProjPoint<double> h{Vec3<double>(b1)};
  if (same(h, p0)) h = ProjPoint<double>(Vec3<double>(b2));
  ProjPoint<double> p1 = detail::second_intersection(out.boundary, p0, h);
  out.points.push_back(p0);
  out.points.push_back(p1);
  for (int s = 1; s < steps; ++s) {
    ProjPoint<double> next =
        billiard_step(out.boundary, out.caustic, out.points[s - 1], out.points[s]);
    out.points.push_back(next);
  }
  for (size_t i = 0; i + 1 < out.points.size(); ++i)
    out.chords.push_back(join(out.points[i], out.points[i + 1]));
  if (out.points.size() >= 3) {
    Vec3<double> d = out.points.front().c / out.points.front().c(2) -
                     out.points.back().c / out.points.back().c(2);
    out.closed = std::hypot(d(0), d(1)) <= 1e-7;
  }
  return out;
}

/// Incircular net from two billiards with a common caustic: cells of
/// consecutive chords, each with the inscribed circle of the Graves-Chasles
/// theorem, plus the dual grid of boundary tangents.
struct ICNet {
  BilliardTrajectory a, b;
  struct Incircle {
    ProjPoint<double> center;
    double radius = 0;
    double spread = 0;  // relative disagreement of the four line distances
  };
  // cell (i,j), 1-based: chords a_{i-1}, a_i and b_{j-1}, b_j.
  std::map<std::pair<int, int>, Incircle> incircles;
};

namespace detail {

inline double line_distance(const ProjLine<double>& l, const ProjPoint<double>& p) {
  Vec3<double> a = p.c / p.c(2);
  return std::abs(l.c.dot(a)) / std::hypot(l.c(0), l.c(1));
}

}  // namespace detail

inline ICNet ic_net_build(const BilliardTrajectory& ta, const BilliardTrajectory& tb) {
  require(same(ta.boundary, tb.boundary) && same(ta.caustic, tb.caustic), Err::NoIncircle,
          "trajectories live in different boundaries or caustics");
  ICNet net{ta, tb, {}};
  int m = int(ta.chords.size());
  int n = int(tb.chords.size());
  for (int i = 1; i < m; ++i) {
    for (int j = 1; j < n; ++j) {
      // Predicted centre: boundary tangents at the billiard points between
      // the consecutive chords.
      ProjPoint<double> pi = ta.points[i];
      ProjPoint<double> qj = tb.points[j];
      ProjPoint<double> predicted = meet(polar(ta.boundary, pi), polar(tb.boundary, qj));
      // Independent construction: intersect two angle bisectors of the cell
      // and check equal distances to all four lines.
      std::array<ProjLine<double>, 4> ls = {ta.chords[i - 1], tb.chords[j - 1], ta.chords[i],
                                            tb.chords[j]};
      auto bisectors = [&](const ProjLine<double>& u, const ProjLine<double>& v) {
        double nu = std::hypot(u.c(0), u.c(1)), nv = std::hypot(v.c(0), v.c(1));
        Vec3<double> b1 = u.c / nu + v.c / nv;
        Vec3<double> b2 = u.c / nu - v.c / nv;
        return std::array<ProjLine<double>, 2>{ProjLine<double>(b1), ProjLine<double>(b2)};
      };
      auto bis_a = bisectors(ls[0], ls[2]);  // at the vertex chord_a x chord_a? no: opposite lines
      auto bis_b = bisectors(ls[1], ls[3]);
      ICNet::Incircle best;
      best.spread = std::numeric_limits<double>::infinity();
      for (const auto& ba : bis_a) {
        for (const auto& bb : bis_b) {
          if (same(ba, bb)) continue;
          ProjPoint<double> c = meet(ba, bb);
          if (std::abs(c.c(2)) < 1e-14 * norm1(c.c)) continue;
          double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
          for (const auto& l : ls) {
            double d = detail::line_distance(l, c);
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
          }
          double spread = dmax > 0 ? (dmax - dmin) / dmax : 1.0;
          if (spread < best.spread) best = {c, (dmin + dmax) / 2, spread};
        }
      }
      require(best.spread <= 1e4 * config::epsilon(), Err::NoIncircle,
              "cell admits no inscribed circle");
      require(same(best.center, predicted), Err::NoIncircle,
              "incircle centre disagrees with the boundary-tangent intersection");
      net.incircles.emplace(std::make_pair(i, j), best);
    }
  }
  return net;
}

// The dual grid: boundary tangents at all billiard points; its vertices are
// the incircle centres and its cells admit touching inscribed conics.
inline LineGrid<double> dual_touching_grid(const ICNet& net) {
  std::vector<ProjLine<double>> k, l;
  for (const auto& p : net.a.points) k.push_back(polar(net.a.boundary, p));
  for (const auto& q : net.b.points) l.push_back(polar(net.b.boundary, q));
  LineGrid<double> grid(k, l);
  for (const auto& [ij, circ] : net.incircles) {
    auto [i, j] = ij;
    require(same(grid.vertex(i, j), circ.center), Err::NoIncircle,
            "dual grid vertex does not match the incircle centre");
  }
  return grid;
}

}  // namespace conicnet

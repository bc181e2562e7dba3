#pragma once

#include "conicnet/projective.hpp"

#include <vector>

namespace conicnet {

/// Projective map between two lines, as a 2x2 matrix acting on the canonical
/// basis coordinates of the source and target lines (see line_basis).
template <class S>
struct LineProjectivity {
  ProjLine<S> source;
  ProjLine<S> target;
  Mat2<S> m;

  LineProjectivity(ProjLine<S> src, ProjLine<S> dst, Mat2<S> mat)
      : source(std::move(src)), target(std::move(dst)), m(std::move(mat)) {
    S det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    require(!ScalarTraits<S>::near_zero(det, norm1_mat()), Err::DegenerateInput,
            "line projectivity with singular matrix");
  }

  S norm1_mat() const {
    return abs(m(0, 0)) * abs(m(1, 1)) + abs(m(0, 1)) * abs(m(1, 0)) + S(1);
  }
};

template <class S>
LineProjectivity<S> identity_on(const ProjLine<S>& l) {
  Mat2<S> id;
  id << S(1), S(0), S(0), S(1);
  return LineProjectivity<S>(l, l, id);
}

template <class S>
ProjPoint<S> apply(const LineProjectivity<S>& f, const ProjPoint<S>& p) {
  Vec2<S> x = line_coords(f.source, p);
  Vec2<S> y = f.m * x;
  return point_on_line(f.target, y);
}

// g after f.
template <class S>
LineProjectivity<S> compose(const LineProjectivity<S>& g, const LineProjectivity<S>& f) {
  require(same(f.target, g.source), Err::DegenerateInput,
          "compose: inner target differs from outer source");
  return LineProjectivity<S>(f.source, g.target, Mat2<S>(g.m * f.m));
}

template <class S>
LineProjectivity<S> inverse(const LineProjectivity<S>& f) {
  Mat2<S> inv;
  inv << f.m(1, 1), -f.m(0, 1), -f.m(1, 0), f.m(0, 0);
  return LineProjectivity<S>(f.target, f.source, inv);
}

// Proportional to the identity (off-diagonals vanish, diagonals agree).
template <class S>
bool is_identity(const LineProjectivity<S>& f) {
  if (!same(f.source, f.target)) return false;
  S scale = abs(f.m(0, 0)) + abs(f.m(0, 1)) + abs(f.m(1, 0)) + abs(f.m(1, 1));
  return ScalarTraits<S>::near_zero(f.m(0, 1), scale) &&
         ScalarTraits<S>::near_zero(f.m(1, 0), scale) &&
         ScalarTraits<S>::near_zero(f.m(0, 0) - f.m(1, 1), scale);
}

template <class S>
bool is_involution(const LineProjectivity<S>& f) {
  if (!same(f.source, f.target)) return false;
  return is_identity(compose(f, f));
}

// Central projection src -> dst from a centre on neither line.
template <class S>
LineProjectivity<S> central_projection(const ProjPoint<S>& center, const ProjLine<S>& src,
                                       const ProjLine<S>& dst) {
  require(!incident(center, src) && !incident(center, dst), Err::CenterOnLine,
          "projection centre on a line");
  auto [a1, a2] = line_basis(src);
  auto project = [&](const Vec3<S>& p) -> Vec2<S> {
    Vec3<S> img = (center.c.cross(p)).cross(dst.c);
    auto [b1, b2] = line_basis(dst);
    auto c = decompose2<S>(img, b1, b2);
    require(c.has_value(), Err::DegenerateInput, "central projection image off target");
    return *c;
  };
  Vec2<S> y1 = project(a1);
  Vec2<S> y2 = project(a2);
  Mat2<S> m;
  m << y1(0), y2(0), y1(1), y2(1);
  return LineProjectivity<S>(src, dst, m);
}

// Interpolates the projectivity sending three source points to three target
// points (standard projective frame construction).
template <class S>
LineProjectivity<S> projectivity_from_samples(const ProjLine<S>& src, const ProjLine<S>& dst,
                                              const std::array<ProjPoint<S>, 3>& from,
                                              const std::array<ProjPoint<S>, 3>& to) {
  auto frame = [](const ProjLine<S>& l, const std::array<ProjPoint<S>, 3>& pts) -> Mat2<S> {
    Vec2<S> x1 = line_coords(l, pts[0]);
    Vec2<S> x2 = line_coords(l, pts[1]);
    Vec2<S> x3 = line_coords(l, pts[2]);
    auto c = decompose2<S>(Vec3<S>(x3(0), x3(1), S(0)), Vec3<S>(x1(0), x1(1), S(0)),
                           Vec3<S>(x2(0), x2(1), S(0)));
    require(c.has_value() && !ScalarTraits<S>::is_zero((*c)(0)) &&
                !ScalarTraits<S>::is_zero((*c)(1)),
            Err::DegenerateInput, "projectivity samples not in general position");
    Mat2<S> f;
    f << (*c)(0) * x1(0), (*c)(1) * x2(0), (*c)(0) * x1(1), (*c)(1) * x2(1);
    return f;
  };
  Mat2<S> P = frame(src, from);
  Mat2<S> Q = frame(dst, to);
  S detP = P(0, 0) * P(1, 1) - P(0, 1) * P(1, 0);
  Mat2<S> Pinv;
  Pinv << P(1, 1), -P(0, 1), -P(1, 0), P(0, 0);
  Mat2<S> m = Q * Pinv;
  (void)detP;  // scale factor 1/detP is projectively irrelevant
  return LineProjectivity<S>(src, dst, m);
}

/// Fixed points of an endomorphism of a line.
template <class S>
struct FixedPoints {
  enum Kind { IdentityMap, None, Parabolic, Hyperbolic, IrrationalFixedPoints } kind;
  std::vector<ProjPoint<S>> points;
  // For IrrationalFixedPoints: the characteristic quadratic a t^2 + b t + c
  // whose roots are the fixed directions (t = x2/x1 in the line basis).
  std::array<S, 3> quadratic{S(0), S(0), S(0)};
};

template <class S>
FixedPoints<S> fixed_points(const LineProjectivity<S>& f) {
  require(same(f.source, f.target), Err::NotAnEndomorphism,
          "fixed points of a map between distinct lines");
  FixedPoints<S> out;
  if (is_identity(f)) {
    out.kind = FixedPoints<S>::IdentityMap;
    return out;
  }
  const Mat2<S>& m = f.m;
  S tr = m(0, 0) + m(1, 1);
  S det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  S disc = tr * tr - S(4) * det;
  S scale = tr * tr + abs(det) * S(4) + S(1);
  auto eigen_dir = [&](const S& mu) -> Vec2<S> {
    // Kernel of (m - mu I); rows are proportional, use the larger one.
    S a = m(0, 0) - mu, b = m(0, 1);
    S c = m(1, 0), d = m(1, 1) - mu;
    if constexpr (ScalarTraits<S>::exact) {
      if (!a.is_zero() || !b.is_zero()) return Vec2<S>(-b, a);
      return Vec2<S>(-d, c);
    } else {
      if (std::abs(a) + std::abs(b) >= std::abs(c) + std::abs(d)) return Vec2<S>(-b, a);
      return Vec2<S>(-d, c);
    }
  };
  auto emit = [&](const S& mu) {
    Vec2<S> dir = eigen_dir(mu);
    out.points.push_back(point_on_line(f.source, dir));
  };
  if (ScalarTraits<S>::near_zero(disc, scale)) {
    out.kind = FixedPoints<S>::Parabolic;
    emit(tr / S(2));
    return out;
  }
  if (disc < S(0)) {
    out.kind = FixedPoints<S>::None;
    return out;
  }
  if constexpr (ScalarTraits<S>::exact) {
    auto root = disc.sqrt_exact();
    if (!root) {
      out.kind = FixedPoints<S>::IrrationalFixedPoints;
      out.quadratic = {S(1), -tr, det};
      return out;
    }
    out.kind = FixedPoints<S>::Hyperbolic;
    emit((tr + *root) / S(2));
    emit((tr - *root) / S(2));
  } else {
    out.kind = FixedPoints<S>::Hyperbolic;
    double root = std::sqrt(disc);
    emit((tr + root) / 2);
    emit((tr - root) / 2);
  }
  return out;
}

}  // namespace conicnet

#pragma once

#include "conicnet/linalg.hpp"
#include "conicnet/projective.hpp"

#include <array>
#include <optional>
#include <vector>

namespace conicnet {

/// Conic as a symmetric bilinear form on homogeneous coordinates, up to
/// scale. Serialized as the six polynomial coefficients
/// [xx, xy, xz, yy, yz, zz] of xx*x^2 + xy*x*y + ...; the bilinear form uses
/// half-coefficients for the mixed terms, so matrix(0,1) == xy/2.
template <class S>
class Conic {
 public:
  explicit Conic(const Mat3<S>& form) : m_(symmetrized(form)) {
    bool nonzero = false;
    for (int i = 0; i < 3 && !nonzero; ++i)
      for (int j = 0; j < 3 && !nonzero; ++j)
        if (!ScalarTraits<S>::is_zero(m_(i, j))) nonzero = true;
    require(nonzero, Err::DegenerateInput, "zero conic form");
    m_ = reduce(m_);
    rank_ = rank3(m_);
    if (rank_ == 0) rank_ = 1;  // nonzero matrix below approx thresholds
  }

  static Conic from_poly_coeffs(const std::array<S, 6>& c) {
    Mat3<S> m;
    S h(1);
    h = h / S(2);
    m << c[0], c[1] * h, c[2] * h, c[1] * h, c[3], c[4] * h, c[2] * h, c[4] * h, c[5];
    return Conic(m);
  }

  std::array<S, 6> poly_coeffs() const {
    return {m_(0, 0), S(2) * m_(0, 1), S(2) * m_(0, 2), m_(1, 1), S(2) * m_(1, 2), m_(2, 2)};
  }

  const Mat3<S>& matrix() const { return m_; }
  int rank() const { return rank_; }

  S eval(const ProjPoint<S>& p) const { return p.c.dot(m_ * p.c); }
  S bilinear(const ProjPoint<S>& p, const ProjPoint<S>& q) const { return p.c.dot(m_ * q.c); }

  S matrix_scale() const {
    S s(0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += abs(m_(i, j));
    return s;
  }

 private:
  static Mat3<S> symmetrized(const Mat3<S>& m) {
    Mat3<S> s;
    S h(1);
    h = h / S(2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s(i, j) = (m(i, j) + m(j, i)) * h;
    return s;
  }

  Mat3<S> m_;
  int rank_;
};

template <class S>
bool same(const Conic<S>& a, const Conic<S>& b) {
  // Proportionality of the 6-coefficient vectors by vanishing 2x2 minors.
  auto ca = a.poly_coeffs(), cb = b.poly_coeffs();
  S sa(0), sb(0);
  for (int i = 0; i < 6; ++i) {
    sa += abs(ca[i]);
    sb += abs(cb[i]);
  }
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (!ScalarTraits<S>::near_zero(ca[i] * cb[j] - ca[j] * cb[i], sa * sb)) return false;
  return true;
}

template <class S>
bool lies_on(const ProjPoint<S>& p, const Conic<S>& c) {
  return ScalarTraits<S>::near_zero(c.eval(p), c.matrix_scale() * norm1(p.c) * norm1(p.c));
}

template <class S>
ProjLine<S> polar(const Conic<S>& c, const ProjPoint<S>& p) {
  Vec3<S> l = c.matrix() * p.c;
  if (ScalarTraits<S>::near_zero(norm1(l), c.matrix_scale() * norm1(p.c)))
    fail(Err::DegenerateConic, "polar of a singular point");
  return ProjLine<S>(l);
}

template <class S>
ProjPoint<S> pole(const Conic<S>& c, const ProjLine<S>& l) {
  require(c.rank() == 3, Err::DegenerateConic, "pole requires a non-degenerate conic");
  return ProjPoint<S>(Vec3<S>(adjugate(c.matrix()) * l.c));
}

// Dual form evaluated on a line: zero iff the line is tangent.
template <class S>
S dual_eval(const Conic<S>& c, const ProjLine<S>& l) {
  return l.c.dot(adjugate(c.matrix()) * l.c);
}

template <class S>
bool is_tangent(const Conic<S>& c, const ProjLine<S>& l) {
  require(c.rank() == 3, Err::DegenerateConic, "tangency test requires a non-degenerate conic");
  S n = norm1(l.c);
  return ScalarTraits<S>::near_zero(dual_eval(c, l), c.matrix_scale() * c.matrix_scale() * n * n);
}

template <class S>
ProjPoint<S> tangency_point(const Conic<S>& c, const ProjLine<S>& l) {
  require(is_tangent(c, l), Err::NotTangent, "line is not tangent to the conic");
  return pole(c, l);
}

enum class ConicClass { NonDegenerate, PairOfLines, DoubleLine };

template <class S>
struct Classification {
  ConicClass kind;
  bool real_pair = false;  // rank 2: real vs complex-conjugate line pair
  std::optional<ProjPoint<S>> singular_point;
  std::optional<std::array<ProjLine<S>, 2>> lines;  // rank 2, when split over S
  std::optional<ProjLine<S>> line;                  // rank 1
};

template <class S>
Classification<S> classify(const Conic<S>& c) {
  Classification<S> out{ConicClass::NonDegenerate};
  const Mat3<S>& m = c.matrix();
  if (c.rank() == 3) return out;
  if (c.rank() == 1) {
    out.kind = ConicClass::DoubleLine;
    int best = 0;
    S bn(0);
    for (int i = 0; i < 3; ++i) {
      S n = abs(m(i, 0)) + abs(m(i, 1)) + abs(m(i, 2));
      if (n > bn) {
        bn = n;
        best = i;
      }
    }
    out.line = ProjLine<S>(Vec3<S>(m(best, 0), m(best, 1), m(best, 2)));
    return out;
  }
  out.kind = ConicClass::PairOfLines;
  Mat3<S> a = adjugate(m);  // +- s s^T for the singular point s
  int best = 0;
  S bn(0);
  for (int i = 0; i < 3; ++i)
    if (abs(a(i, i)) > bn) {
      bn = abs(a(i, i));
      best = i;
    }
  out.real_pair = a(best, best) < S(0);
  ProjPoint<S> s(Vec3<S>(a(0, best), a(1, best), a(2, best)));
  out.singular_point = s;
  if (!out.real_pair) return out;
  // Split: intersect with a line avoiding the singular point, join back.
  for (const auto& cand : detail::chart_candidates<S>()) {
    if (ScalarTraits<S>::near_zero(cand.dot(s.c), norm1(cand) * norm1(s.c))) continue;
    ProjLine<S> t(cand);
    auto [b1, b2] = line_basis(t);
    S A = b1.dot(m * b1), B = b1.dot(m * b2), C = b2.dot(m * b2);
    auto roots = solve_homogeneous_quadratic(A, B, C);
    if (roots.real_count == 2 && roots.rational && roots.roots.size() == 2) {
      ProjPoint<S> q1(Vec3<S>(roots.roots[0](0) * b1 + roots.roots[0](1) * b2));
      ProjPoint<S> q2(Vec3<S>(roots.roots[1](0) * b1 + roots.roots[1](1) * b2));
      out.lines = {join(s, q1), join(s, q2)};
    }
    break;
  }
  return out;
}

// The unique conic tangent to five generic lines: solve the 5x6 system for
// the dual conic through the line coefficients, then pass to the adjugate.
template <class S>
Conic<S> conic_tangent_to_five_lines(const std::array<ProjLine<S>, 5>& ls) {
  std::vector<ProjLine<S>> all(ls.begin(), ls.end());
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j)
      require(!same(all[i], all[j]), Err::NonGenericLines, "repeated line in five-line fit");
  require(no_three_concurrent(all), Err::NonGenericLines, "three concurrent lines in five-line fit");
  std::vector<Vec6<S>> rows;
  rows.reserve(5);
  for (const auto& l : ls) {
    Vec6<S> r;
    r << l.c(0) * l.c(0), S(2) * l.c(0) * l.c(1), S(2) * l.c(0) * l.c(2), l.c(1) * l.c(1),
        S(2) * l.c(1) * l.c(2), l.c(2) * l.c(2);
    rows.push_back(r);
  }
  auto kernel = nullspace6(rows);
  require(kernel.size() == 1, Err::NonGenericLines, "five-line system is rank-deficient");
  const Vec6<S>& d = kernel[0];
  Mat3<S> dual;
  dual << d(0), d(1), d(2), d(1), d(3), d(4), d(2), d(4), d(5);
  require(rank3(dual) == 3, Err::NonGenericLines, "dual conic of five-line fit is degenerate");
  return Conic<S>(adjugate(dual));
}

template <class S>
struct DoubleContact {
  ProjLine<S> chord;
  S pencil_parameter;       // a - t*c is the rank-1 member
  bool real_contact_points; // chord meets the base conic in real points
};

namespace detail {

// Dense polynomial utilities over the scalar field (ascending coefficients).
template <class S>
using Poly = std::vector<S>;

template <class S>
void poly_trim(Poly<S>& p) {
  while (!p.empty() && ScalarTraits<S>::is_zero(p.back())) p.pop_back();
}

template <class S>
Poly<S> poly_derivative(const Poly<S>& p) {
  Poly<S> d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(S(long(i)) * p[i]);
  return d;
}

template <class S>
Poly<S> poly_mod(Poly<S> a, const Poly<S>& b) {
  while (a.size() >= b.size() && !a.empty()) {
    S f = a.back() / b.back();
    size_t off = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) a[off + i] = a[off + i] - f * b[i];
    a.pop_back();
    poly_trim(a);
  }
  return a;
}

template <class S>
Poly<S> poly_monic_gcd(Poly<S> a, Poly<S> b) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    Poly<S> r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    S lead = a.back();
    for (auto& c : a) c = c / lead;
  }
  return a;
}

// det(a - t c) as an exact cubic, recovered by interpolation at t in
// {0, 1, -1, 2}.
template <class S>
std::array<S, 4> pencil_determinant(const Mat3<S>& a, const Mat3<S>& c) {
  auto at = [&](long t) { return det3x3(Mat3<S>(a - ScalarTraits<S>::of(t) * c)); };
  S p0 = at(0), p1 = at(1), pm1 = at(-1), p2 = at(2);
  S half = S(1) / S(2), sixth = S(1) / S(6);
  S c0 = p0;
  S c2 = (p1 + pm1) * half - p0;
  S c3 = (p2 - S(3) * p1 + S(3) * p0 - pm1) * sixth;
  S c1 = p1 - c0 - c2 - c3;
  return {c0, c1, c2, c3};
}

}  // namespace detail

// Detects a rank-1 member of the pencil {a - t c}: the chord of double
// contact between a and c. Rank-1 members force multiple roots of the
// determinant cubic, and multiple roots of a rational cubic are rational, so
// gcd with the derivative finds every candidate exactly.
template <class S>
std::optional<DoubleContact<S>> double_contact(const Conic<S>& a, const Conic<S>& c) {
  require(c.rank() == 3, Err::DegenerateBase, "double_contact base conic is degenerate");
  if (same(a, c)) return std::nullopt;
  auto coeffs = detail::pencil_determinant(a.matrix(), c.matrix());
  std::vector<S> candidates;
  if constexpr (ScalarTraits<S>::exact) {
    detail::Poly<S> p(coeffs.begin(), coeffs.end());
    detail::poly_trim(p);
    auto g = detail::poly_monic_gcd(p, detail::poly_derivative(p));
    if (g.size() <= 1) return std::nullopt;  // square-free: no rank-1 member
    if (g.size() == 2) {
      candidates.push_back(-g[0]);
    } else if (g.size() == 3) {
      S disc = g[1] * g[1] - S(4) * g[0];
      if (!disc.is_zero())
        fail(Err::IrrationalPencilRoot, "repeated-root factor with nonzero discriminant");
      candidates.push_back(-g[1] / S(2));
    }
  } else {
    // Double roots of p are roots of p' where p nearly vanishes.
    auto roots = solve_homogeneous_quadratic(S(3) * coeffs[3], coeffs[2], coeffs[1]);
    S scale = abs(coeffs[0]) + abs(coeffs[1]) + abs(coeffs[2]) + abs(coeffs[3]);
    for (const auto& r : roots.roots) {
      if (ScalarTraits<S>::is_zero(r(1))) continue;
      S t = r(0) / r(1);
      S val = coeffs[0] + t * (coeffs[1] + t * (coeffs[2] + t * coeffs[3]));
      S tmag = abs(t) + S(1);
      if (ScalarTraits<S>::near_zero(val, scale * tmag * tmag * tmag)) candidates.push_back(t);
    }
  }
  for (const S& t : candidates) {
    Mat3<S> member = a.matrix() - t * c.matrix();
    if (rank3(member) != 1) continue;
    int best = 0;
    S bn(0);
    for (int i = 0; i < 3; ++i) {
      S n = abs(member(i, 0)) + abs(member(i, 1)) + abs(member(i, 2));
      if (n > bn) {
        bn = n;
        best = i;
      }
    }
    ProjLine<S> chord(Vec3<S>(reduce(Vec3<S>(member.row(best).transpose()))));
    auto [b1, b2] = line_basis(chord);
    const Mat3<S>& mc = c.matrix();
    S qa = b1.dot(mc * b1), qb = b1.dot(mc * b2), qc = b2.dot(mc * b2);
    bool real = solve_homogeneous_quadratic(qa, qb, qc).real_count > 0;
    return DoubleContact<S>{chord, t, real};
  }
  return std::nullopt;
}

/// Confocal family x^2/(a2-l) + y^2/(b2-l) = 1 with common foci
/// (+-sqrt(a2-b2), 0); a circle family (a2 == b2) is allowed and degenerates
/// to concentric circles.
template <class S>
struct ConfocalFamily {
  S a2, b2;

  ConfocalFamily(S a2_, S b2_) : a2(std::move(a2_)), b2(std::move(b2_)) {
    require(b2 > S(0) && a2 >= b2, Err::ParameterOutOfRange,
            "confocal family requires a2 >= b2 > 0");
  }
};

template <class S>
Conic<S> confocal_member(const ConfocalFamily<S>& fam, const S& lambda) {
  require(lambda < fam.b2, Err::ParameterOutOfRange,
          "confocal member parameter must satisfy lambda < b^2");
  Mat3<S> m;
  m.setZero();
  m(0, 0) = S(1) / (fam.a2 - lambda);
  m(1, 1) = S(1) / (fam.b2 - lambda);
  m(2, 2) = S(-1);
  return Conic<S>(m);
}

template <class S>
struct TangentLines {
  bool rational = true;  // exact backend: tangent lines live in the field
  std::vector<ProjLine<S>> lines;
  std::vector<ProjLine<double>> numeric;  // filled when rational is false
};

template <class S>
ProjPoint<double> to_double(const ProjPoint<S>& p) {
  return ProjPoint<double>(Vec3<double>(ScalarTraits<S>::to_double(p.c(0)),
                                        ScalarTraits<S>::to_double(p.c(1)),
                                        ScalarTraits<S>::to_double(p.c(2))));
}

template <class S>
ProjLine<double> to_double(const ProjLine<S>& l) {
  return ProjLine<double>(Vec3<double>(ScalarTraits<S>::to_double(l.c(0)),
                                       ScalarTraits<S>::to_double(l.c(1)),
                                       ScalarTraits<S>::to_double(l.c(2))));
}

template <class S>
Conic<double> to_double(const Conic<S>& c) {
  Mat3<double> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = ScalarTraits<S>::to_double(c.matrix()(i, j));
  return Conic<double>(m);
}

// The 0..2 real lines through p tangent to c, via the degenerate pair
// eval(p) * C - (Cp)(Cp)^T restricted to a test line. On the exact backend
// irrational tangents are reported numerically with rational = false.
template <class S>
TangentLines<S> tangent_lines_from_point(const Conic<S>& c, const ProjPoint<S>& p) {
  require(c.rank() == 3, Err::DegenerateConic, "tangents from point need a rank-3 conic");
  TangentLines<S> out;
  if (lies_on(p, c)) {
    out.lines.push_back(polar(c, p));
    return out;
  }
  const Mat3<S>& m = c.matrix();
  Vec3<S> mp = m * p.c;
  Mat3<S> pair = c.eval(p) * m - mp * mp.transpose();
  const Vec3<S>* test = nullptr;
  for (const auto& cand : detail::chart_candidates<S>())
    if (!ScalarTraits<S>::near_zero(cand.dot(p.c), norm1(cand) * norm1(p.c))) {
      test = &cand;
      break;
    }
  require(test != nullptr, Err::DegenerateInput, "no test line avoiding the point");
  ProjLine<S> t(*test);
  auto [b1, b2] = line_basis(t);
  S A = b1.dot(pair * b1), B = b1.dot(pair * b2), C = b2.dot(pair * b2);
  auto roots = solve_homogeneous_quadratic(A, B, C);
  if (roots.real_count == 0) fail(Err::PointInsideConic, "no real tangent lines from the point");
  if constexpr (ScalarTraits<S>::exact) {
    if (!roots.rational) {
      out.rational = false;
      auto numeric = tangent_lines_from_point(to_double(c), to_double(p));
      out.numeric = numeric.lines;
      return out;
    }
  }
  for (const auto& r : roots.roots) {
    ProjPoint<S> q(Vec3<S>(r(0) * b1 + r(1) * b2));
    out.lines.push_back(ProjLine<S>(reduce(join(p, q).c)));
  }
  return out;
}

}  // namespace conicnet

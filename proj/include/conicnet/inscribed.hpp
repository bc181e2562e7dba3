#pragma once

#include "conicnet/conic.hpp"
#include "conicnet/projective.hpp"

#include <array>

namespace conicnet {

/// Quadrilateral with vertices in cyclic order u, v, w, x and generic
/// edge-lines (no three concurrent, equivalently no three vertices
/// collinear).
template <class S>
class Quadrilateral {
 public:
  Quadrilateral(ProjPoint<S> u, ProjPoint<S> v, ProjPoint<S> w, ProjPoint<S> x)
      : v_{std::move(u), std::move(v), std::move(w), std::move(x)} {
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        require(!same(v_[i], v_[j]), Err::NonGenericQuadrilateral, "repeated vertex");
    require(no_three_collinear(std::vector<ProjPoint<S>>(v_.begin(), v_.end())),
            Err::NonGenericQuadrilateral, "three collinear vertices");
  }

  const ProjPoint<S>& vertex(int i) const { return v_[((i % 4) + 4) % 4]; }
  // Edge i joins vertex i and vertex i+1: 0 = (u,v), 1 = (v,w), 2 = (w,x),
  // 3 = (x,u).
  ProjLine<S> edge_line(int i) const { return join(vertex(i), vertex(i + 1)); }
  ProjLine<S> diagonal(int i) const { return join(vertex(i), vertex(i + 2)); }

 private:
  std::array<ProjPoint<S>, 4> v_;
};

template <class S>
ProjPoint<S> diagonal_intersection(const Quadrilateral<S>& q) {
  return meet(q.diagonal(0), q.diagonal(1));
}

/// Representative vectors u, v, w, x of the vertices scaled so that
/// u + w and v + x both represent the diagonal intersection, together with
/// the gamma of x = gamma*u - v + gamma*w. The base family member (lambda=1)
/// touches the edges at [u+v], [v+w], [w+x], [x+u].
template <class S>
struct NormalizedQuad {
  Vec3<S> u, v, w, x;
  S gamma;

  Vec3<S> rep(int i) const {
    switch (((i % 4) + 4) % 4) {
      case 0: return u;
      case 1: return v;
      case 2: return w;
      default: return x;
    }
  }

  Quadrilateral<S> quad() const {
    return Quadrilateral<S>(ProjPoint<S>(u), ProjPoint<S>(v), ProjPoint<S>(w), ProjPoint<S>(x));
  }
};

// Canonical normalization: vertices and the diagonal point are put in
// last-nonzero-coordinate normal form before solving the two 2x2 scaling
// systems against the same representative of the diagonal point, which makes
// u + w = v + x an identity of vectors (gamma = 1).
template <class S>
NormalizedQuad<S> normalize(const Quadrilateral<S>& q) {
  Vec3<S> u0 = normal_form(q.vertex(0).c);
  Vec3<S> v0 = normal_form(q.vertex(1).c);
  Vec3<S> w0 = normal_form(q.vertex(2).c);
  Vec3<S> x0 = normal_form(q.vertex(3).c);
  Vec3<S> r = normal_form(diagonal_intersection(q).c);
  auto cu = decompose2<S>(r, u0, w0);
  auto cv = decompose2<S>(r, v0, x0);
  require(cu.has_value() && cv.has_value(), Err::NonGenericQuadrilateral,
          "diagonal point does not decompose on the diagonals");
  NormalizedQuad<S> nq;
  nq.u = (*cu)(0) * u0;
  nq.w = (*cu)(1) * w0;
  nq.v = (*cv)(0) * v0;
  nq.x = (*cv)(1) * x0;
  nq.gamma = S(1);
  return nq;
}

/// Inscribed conic with its four edge-labelled tangency points and the
/// family parameter relative to a NormalizedQuad. touch[i] lies on edge i.
template <class S>
struct InscribedConic {
  Conic<S> conic;
  std::array<ProjPoint<S>, 4> touch;
  S lambda;
};

namespace detail {

// Form with prescribed Gram matrix on the basis (b0, b1, b2):
// M = B^-T G B^-1 up to the projectively irrelevant det^2 factor.
template <class S>
Mat3<S> form_from_gram(const Vec3<S>& b0, const Vec3<S>& b1, const Vec3<S>& b2,
                       const Mat3<S>& gram) {
  Mat3<S> B;
  B.col(0) = b0;
  B.col(1) = b1;
  B.col(2) = b2;
  Mat3<S> adjB = adjugate(B);  // B^-1 * det(B)
  return Mat3<S>(adjB.transpose() * gram * adjB);
}

}  // namespace detail

// The inscribed conic with tangency points [u + lambda v], [lambda v + w],
// [w + lambda x], [lambda x + u], built from the explicit bilinear form of
// the inscribed-quadrilateral theorem after rescaling v, x by lambda.
template <class S>
InscribedConic<S> family_member(const NormalizedQuad<S>& nq, const S& lambda) {
  require(!ScalarTraits<S>::is_zero(lambda), Err::ZeroLambda, "family parameter lambda = 0");
  S g = lambda * nq.gamma;  // gamma of the rescaled representatives
  Vec3<S> v1 = lambda * nq.v;
  Vec3<S> x1 = lambda * nq.x;
  Mat3<S> gram;
  S uw = -(g + S(2)) / g;
  gram << S(1), S(-1), uw, S(-1), S(1), S(-1), uw, S(-1), S(1);
  Mat3<S> m = detail::form_from_gram(nq.u, v1, nq.w, gram);
  require(rank3(m) == 3, Err::DegenerateFamilyMember,
          "family member degenerates to a double line");
  InscribedConic<S> out{Conic<S>(m),
                        {ProjPoint<S>(Vec3<S>(nq.u + v1)), ProjPoint<S>(Vec3<S>(v1 + nq.w)),
                         ProjPoint<S>(Vec3<S>(nq.w + x1)), ProjPoint<S>(Vec3<S>(x1 + nq.u))},
                        lambda};
  return out;
}

namespace detail {

// Coefficients (a, b) of t ~ a*first + b*second on edge `edge` of the
// normalized representatives.
template <class S>
Vec2<S> edge_coefficients(const NormalizedQuad<S>& nq, int edge, const ProjPoint<S>& t) {
  auto c = decompose2<S>(t.c, nq.rep(edge), nq.rep(edge + 1));
  require(c.has_value(), Err::PointNotOnEdge, "tangency point not on the requested edge");
  return *c;
}

// Family parameter of the member touching edge `edge` at t.
template <class S>
S lambda_for_edge_point(const NormalizedQuad<S>& nq, int edge, const ProjPoint<S>& t) {
  Vec2<S> c = edge_coefficients(nq, edge, t);
  require(!ScalarTraits<S>::is_zero(c(0)) && !ScalarTraits<S>::is_zero(c(1)), Err::PointAtVertex,
          "tangency point at a vertex");
  switch (((edge % 4) + 4) % 4) {
    case 0: return c(1) / c(0);  // t ~ u + lambda v
    case 1: return c(0) / c(1);  // t ~ lambda v + w
    case 2: return c(1) / c(0);  // t ~ w + lambda x
    default: return c(0) / c(1); // t ~ lambda x + u
  }
}

}  // namespace detail

// The unique inscribed conic whose tangency point on the given edge is t.
template <class S>
InscribedConic<S> inscribed_through(const Quadrilateral<S>& q, const ProjPoint<S>& t,
                                    int edge = 0) {
  NormalizedQuad<S> nq = normalize(q);
  return family_member(nq, detail::lambda_for_edge_point(nq, edge, t));
}

// True iff the diagonal intersection is a common point of the four Ceva
// configurations cut by the candidate tangency points, equivalently iff the
// four points touch one inscribed conic.
template <class S>
bool ceva_common_point_check(const Quadrilateral<S>& q, const ProjPoint<S>& p_uv,
                             const ProjPoint<S>& p_vw, const ProjPoint<S>& p_wx,
                             const ProjPoint<S>& p_xu) {
  const std::array<const ProjPoint<S>*, 4> pts = {&p_uv, &p_vw, &p_wx, &p_xu};
  for (int i = 0; i < 4; ++i) {
    detail::check_edge_point(q.vertex(i), q.vertex(i + 1), *pts[i], "quadrilateral edge");
    for (int j = i + 1; j < 4; ++j)
      require(!same(*pts[i], *pts[j]), Err::DegenerateInput, "repeated tangency point");
  }
  ProjPoint<S> r = diagonal_intersection(q);
  for (int i = 0; i < 4; ++i) {
    std::array<ProjPoint<S>, 3> tri = {q.vertex(i), q.vertex(i + 1), q.vertex(i + 2)};
    if (!ceva_check(tri, *pts[i], *pts[i + 1 < 4 ? i + 1 : 0], r)) return false;
  }
  return true;
}

// The involution of the inscribed family: lambda -> -lambda, equivalently
// the construction through the two lines joining opposite tangency points
// and the diagonal intersection.
template <class S>
InscribedConic<S> involution(const NormalizedQuad<S>& nq, const InscribedConic<S>& ic) {
  return family_member(nq, S(-ic.lambda));
}

enum class StripEdges { UVandWX, VWandXU };

// The second-tangent conic: through [u + lambda v], [w + lambda x] and the
// base points [v + w], [x + u], tangent to the edge-lines (u,v) and (w,x) at
// the first two points; explicit coefficients from the construction's
// bilinear form. The other edge pair is the cyclic relabelling
// (u,v,w,x) -> (v,w,x,u) with gamma -> 1/gamma and lambda -> 1/lambda.
template <class S>
Conic<S> second_tangent_conic(const NormalizedQuad<S>& nq, const S& lambda, StripEdges target) {
  require(!ScalarTraits<S>::is_zero(lambda), Err::ZeroLambda, "second tangent conic: lambda = 0");
  require(!ScalarTraits<S>::is_zero(nq.gamma), Err::ZeroGamma, "second tangent conic: gamma = 0");
  if (target == StripEdges::VWandXU) {
    NormalizedQuad<S> rot{nq.v, nq.w, nq.x, nq.u, S(1) / nq.gamma};
    return second_tangent_conic(rot, S(S(1) / lambda), StripEdges::UVandWX);
  }
  const S& g = nq.gamma;
  S l2 = lambda * lambda;
  Mat3<S> gram;
  S uu = S(1);
  S vv = S(1) / l2;
  S ww = S(1);
  S uv = S(-1) / lambda;
  S uw = -(l2 + S(2) * l2 * g + S(2) * lambda + S(1)) / (S(2) * l2 * g);
  S vw = -(l2 + S(1)) / (S(2) * l2);
  gram << uu, uv, uw, uv, vv, vw, uw, vw, ww;
  return Conic<S>(detail::form_from_gram(nq.u, nq.v, nq.w, gram));
}

}  // namespace conicnet

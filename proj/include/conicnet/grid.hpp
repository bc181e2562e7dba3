#pragma once

#include "conicnet/net.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace conicnet {

/// Grid of m+1 "horizontal" lines k_0..k_m and n+1 "vertical" lines
/// l_0..l_n. Cells are 1-based like the strips they bound:
/// cell (i,j) = quadrilateral of k_{i-1}, l_{j-1}, k_i, l_j. Strict grids
/// have a generic pooled arrangement (pairwise distinct, no three
/// concurrent); non-strict grids (merged chains) may repeat lines and only
/// expose the cells whose four edge-lines are pairwise distinct and generic.
template <class S>
class LineGrid {
 public:
  LineGrid(std::vector<ProjLine<S>> k, std::vector<ProjLine<S>> l, bool strict = true)
      : k_(std::move(k)), l_(std::move(l)), strict_(strict) {
    require(k_.size() >= 2 && l_.size() >= 2, Err::NonGenericLines,
            "grid needs at least two lines per family");
    if (strict_) {
      std::vector<ProjLine<S>> pool = k_;
      pool.insert(pool.end(), l_.begin(), l_.end());
      for (size_t a = 0; a < pool.size(); ++a)
        for (size_t b = a + 1; b < pool.size(); ++b)
          require(!same(pool[a], pool[b]), Err::NonGenericLines, "repeated grid line");
      require(no_three_concurrent(pool), Err::NonGenericLines, "three concurrent grid lines");
    }
  }

  int m() const { return int(k_.size()) - 1; }
  int n() const { return int(l_.size()) - 1; }
  bool strict() const { return strict_; }
  const ProjLine<S>& k(int i) const { return k_[i]; }
  const ProjLine<S>& l(int j) const { return l_[j]; }
  const std::vector<ProjLine<S>>& k_lines() const { return k_; }
  const std::vector<ProjLine<S>>& l_lines() const { return l_; }

  ProjPoint<S> vertex(int i, int j) const { return meet(k_[i], l_[j]); }

  bool cell_valid(int i, int j) const {
    if (i < 1 || i > m() || j < 1 || j > n()) return false;
    if (strict_) return true;
    std::array<const ProjLine<S>*, 4> ls = {&k_[i - 1], &l_[j - 1], &k_[i], &l_[j]};
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (same(*ls[a], *ls[b])) return false;
    try {
      cell_quad(i, j);
    } catch (const GeomError&) {
      return false;
    }
    return true;
  }

  // Vertices in the cyclic order (k_{i-1} l_{j-1}, k_{i-1} l_j, k_i l_j,
  // k_i l_{j-1}); edge 0 lies on k_{i-1}, edge 1 on l_j, edge 2 on k_i,
  // edge 3 on l_{j-1}.
  Quadrilateral<S> cell_quad(int i, int j) const {
    return Quadrilateral<S>(meet(k_[i - 1], l_[j - 1]), meet(k_[i - 1], l_[j]),
                            meet(k_[i], l_[j]), meet(k_[i], l_[j - 1]));
  }

 private:
  std::vector<ProjLine<S>> k_, l_;
  bool strict_;
};

// The vertex net of a strict grid: f_{i,j} = k_i ^ l_j.
template <class S>
QNet<S> to_net(const LineGrid<S>& grid) {
  require(grid.strict(), Err::NonGenericLines, "vertex net needs a strict grid");
  std::vector<ProjPoint<S>> pts;
  for (int j = 0; j <= grid.n(); ++j)
    for (int i = 0; i <= grid.m(); ++i) pts.push_back(grid.vertex(i, j));
  return QNet<S>(grid.m(), grid.n(), pts);
}

/// Touching instance on a grid; cells keyed 1-based. Each cell's conic keeps
/// the tangency points in the cell_quad edge order, so touch[0] lies on
/// k_{i-1}, touch[1] on l_j, touch[2] on k_i, touch[3] on l_{j-1}.
template <class S>
struct GridAssignment {
  std::map<std::pair<int, int>, InscribedConic<S>> cells;

  const InscribedConic<S>& cell(int i, int j) const {
    auto it = cells.find({i, j});
    require(it != cells.end(), Err::DegenerateInput, "no conic assigned to cell");
    return it->second;
  }
};

// Neighbouring cells must agree on the tangency point on their shared line.
template <class S>
bool touching_consistent(const GridAssignment<S>& a) {
  for (const auto& [ij, ic] : a.cells) {
    auto [i, j] = ij;
    auto right = a.cells.find({i + 1, j});
    if (right != a.cells.end() && !same(ic.touch[2], right->second.touch[0])) return false;
    auto up = a.cells.find({i, j + 1});
    if (up != a.cells.end() && !same(ic.touch[1], up->second.touch[3])) return false;
  }
  return true;
}

/// Chains of points inscribed in a non-degenerate conic; the grid lines are
/// the tangent lines at the chain points. With merged = true the second
/// chain is the first one shifted by one vertex, so the dotted edge-lines
/// form a single inscribed polygon.
template <class S>
struct ChainSpec {
  Conic<S> conic;
  std::vector<ProjPoint<S>> p, q;
  bool merged = false;
};

template <class S>
std::pair<LineGrid<S>, GridAssignment<S>> grid_from_chains(const ChainSpec<S>& spec) {
  require(spec.conic.rank() == 3, Err::ChainPointOffConic, "chain conic must be non-degenerate");
  std::vector<ProjPoint<S>> p = spec.p;
  std::vector<ProjPoint<S>> q = spec.q;
  if (spec.merged) {
    require(p.size() >= 3, Err::NonGenericChain, "merged chain needs at least three points");
    q.assign(p.begin() + 1, p.end());
  }
  require(p.size() >= 2 && q.size() >= 2, Err::NonGenericChain, "chains need two points each");
  for (const auto* chain : {&p, &q}) {
    for (const auto& pt : *chain)
      require(lies_on(pt, spec.conic), Err::ChainPointOffConic, "chain point not on the conic");
    for (size_t a = 0; a < chain->size(); ++a)
      for (size_t b = a + 1; b < chain->size(); ++b)
        require(!same((*chain)[a], (*chain)[b]), Err::NonGenericChain, "repeated chain point");
  }
  auto tangent_at = [&](const ProjPoint<S>& pt) { return polar(spec.conic, pt); };
  std::vector<ProjLine<S>> kl, ll;
  for (const auto& pt : p) kl.push_back(tangent_at(pt));
  for (const auto& pt : q) ll.push_back(tangent_at(pt));
  std::optional<LineGrid<S>> grid;
  try {
    grid.emplace(kl, ll, /*strict=*/!spec.merged);
  } catch (const GeomError& e) {
    fail(Err::NonGenericChain, std::string("tangent lines are not generic: ") + e.what());
  }
  GridAssignment<S> assignment;
  for (int i = 1; i <= grid->m(); ++i) {
    for (int j = 1; j <= grid->n(); ++j) {
      if (!grid->cell_valid(i, j)) continue;
      ProjLine<S> kk = join(p[i - 1], p[i]);
      ProjLine<S> lq = join(q[j - 1], q[j]);
      Quadrilateral<S> quad = grid->cell_quad(i, j);
      ProjPoint<S> t_uv = meet(grid->k(i - 1), lq);
      ProjPoint<S> t_vw = meet(kk, grid->l(j));
      ProjPoint<S> t_wx = meet(grid->k(i), lq);
      ProjPoint<S> t_xu = meet(kk, grid->l(j - 1));
      require(ceva_common_point_check(quad, t_uv, t_vw, t_wx, t_xu), Err::NonGenericChain,
              "chain tangency points fail the common-Ceva-point criterion");
      InscribedConic<S> ic = inscribed_through(quad, t_uv, 0);
      require(same(ic.touch[1], t_vw) && same(ic.touch[2], t_wx) && same(ic.touch[3], t_xu),
              Err::NonGenericChain, "chain construction is inconsistent");
      assignment.cells.emplace(std::make_pair(i, j), std::move(ic));
    }
  }
  return {std::move(*grid), std::move(assignment)};
}

// Diagonal intersection points r_{i,j} of the valid cells.
template <class S>
std::map<std::pair<int, int>, ProjPoint<S>> diagonal_points(const LineGrid<S>& grid) {
  std::map<std::pair<int, int>, ProjPoint<S>> out;
  for (int i = 1; i <= grid.m(); ++i)
    for (int j = 1; j <= grid.n(); ++j)
      if (grid.cell_valid(i, j))
        out.emplace(std::make_pair(i, j), diagonal_intersection(grid.cell_quad(i, j)));
  return out;
}

struct StripCheck {
  bool checkable = false;       // at least two diagonal points in the strip
  bool collinear = false;
  bool avoids_pair_meet = false;  // the r-line misses the strip's line pair meet
  bool ok() const { return checkable && collinear && avoids_pair_meet; }
};

template <class S>
struct StripCollinearity {
  std::vector<StripCheck> k_strips;  // strip K_{i-1,i} at index i-1
  std::vector<StripCheck> l_strips;
  bool all_ok() const {
    for (const auto& s : k_strips)
      if (s.checkable && !s.ok()) return false;
    for (const auto& s : l_strips)
      if (s.checkable && !s.ok()) return false;
    return true;
  }
};

template <class S>
StripCollinearity<S> strip_collinearity_check(const LineGrid<S>& grid) {
  auto pts = diagonal_points(grid);
  StripCollinearity<S> out;
  auto check = [&](std::vector<ProjPoint<S>> rs, const ProjLine<S>& a, const ProjLine<S>& b) {
    StripCheck c;
    if (rs.size() < 2) return c;
    c.checkable = true;
    c.collinear = collinear(rs);
    if (c.collinear) {
      size_t second = 1;
      while (second < rs.size() && same(rs[0], rs[second])) ++second;
      if (second < rs.size()) {
        ProjLine<S> rline = join(rs[0], rs[second]);
        c.avoids_pair_meet = !incident(meet(a, b), rline);
      }
    }
    return c;
  };
  for (int i = 1; i <= grid.m(); ++i) {
    std::vector<ProjPoint<S>> rs;
    for (int j = 1; j <= grid.n(); ++j)
      if (auto it = pts.find({i, j}); it != pts.end()) rs.push_back(it->second);
    out.k_strips.push_back(check(rs, grid.k(i - 1), grid.k(i)));
  }
  for (int j = 1; j <= grid.n(); ++j) {
    std::vector<ProjPoint<S>> rs;
    for (int i = 1; i <= grid.m(); ++i)
      if (auto it = pts.find({i, j}); it != pts.end()) rs.push_back(it->second);
    out.l_strips.push_back(check(rs, grid.l(j - 1), grid.l(j)));
  }
  return out;
}

template <class S>
struct CommonConicResult {
  enum class Reason { Ok, FitDegenerate, NotAllTangent, CrossAxisMismatch };
  Reason reason = Reason::Ok;
  std::optional<Conic<S>> conic;
  std::vector<ProjPoint<S>> p, q;  // tangency points on the k and l lines
  bool found() const { return reason == Reason::Ok; }
};

// Fits a conic to five of the grid lines, verifies the rest are tangent, and
// cross-checks every tangency point against the cross-axis construction
// (the line of a strip's diagonal points meets the strip's bounding lines in
// their tangency points).
template <class S>
CommonConicResult<S> common_tangent_conic(const LineGrid<S>& grid) {
  require(grid.m() >= 2 || grid.n() >= 2, Err::NonGenericLines,
          "common conic needs at least five grid lines");
  CommonConicResult<S> out;
  std::vector<ProjLine<S>> pool = grid.k_lines();
  pool.insert(pool.end(), grid.l_lines().begin(), grid.l_lines().end());
  std::vector<ProjLine<S>> five;
  for (const auto& l : pool) {
    bool dup = false;
    for (const auto& m : five) dup = dup || same(l, m);
    if (!dup) five.push_back(l);
    if (five.size() == 5) break;
  }
  require(five.size() == 5, Err::NonGenericLines, "fewer than five distinct grid lines");
  std::optional<Conic<S>> fit;
  try {
    fit = conic_tangent_to_five_lines<S>({five[0], five[1], five[2], five[3], five[4]});
  } catch (const GeomError&) {
    out.reason = CommonConicResult<S>::Reason::FitDegenerate;
    return out;
  }
  for (const auto& l : pool)
    if (!is_tangent(*fit, l)) {
      out.reason = CommonConicResult<S>::Reason::NotAllTangent;
      return out;
    }
  out.conic = fit;
  for (int i = 0; i <= grid.m(); ++i) out.p.push_back(pole(*fit, grid.k(i)));
  for (int j = 0; j <= grid.n(); ++j) out.q.push_back(pole(*fit, grid.l(j)));
  // Cross-axis verification on every strip with at least two diagonal points.
  auto pts = diagonal_points(grid);
  auto cross_check = [&](const ProjLine<S>& bound, const ProjPoint<S>& expected,
                         const std::vector<ProjPoint<S>>& rs) {
    if (rs.size() < 2 || same(rs[0], rs[1])) return true;
    ProjLine<S> axis = join(rs[0], rs[1]);
    return same(meet(bound, axis), expected);
  };
  for (int i = 1; i <= grid.m(); ++i) {
    std::vector<ProjPoint<S>> rs;
    for (int j = 1; j <= grid.n(); ++j)
      if (auto it = pts.find({i, j}); it != pts.end()) rs.push_back(it->second);
    if (!cross_check(grid.k(i - 1), out.p[i - 1], rs) || !cross_check(grid.k(i), out.p[i], rs)) {
      out.reason = CommonConicResult<S>::Reason::CrossAxisMismatch;
      return out;
    }
  }
  for (int j = 1; j <= grid.n(); ++j) {
    std::vector<ProjPoint<S>> rs;
    for (int i = 1; i <= grid.m(); ++i)
      if (auto it = pts.find({i, j}); it != pts.end()) rs.push_back(it->second);
    if (!cross_check(grid.l(j - 1), out.q[j - 1], rs) || !cross_check(grid.l(j), out.q[j], rs)) {
      out.reason = CommonConicResult<S>::Reason::CrossAxisMismatch;
      return out;
    }
  }
  return out;
}

namespace detail {

// Touch point of the inscribed family on edge `e` as a linear function of
// the seed's edge parameter: seed(mu) ~ A + mu B on edge e maps to the
// opposite edge's touch point A' + mu B'.
template <class S>
std::pair<Vec3<S>, Vec3<S>> opposite_touch_param(const Quadrilateral<S>& cell, int e,
                                                 const Vec3<S>& A, const Vec3<S>& B) {
  NormalizedQuad<S> nq = normalize(cell);
  auto ca = decompose2<S>(A, nq.rep(e), nq.rep(e + 1));
  auto cb = decompose2<S>(B, nq.rep(e), nq.rep(e + 1));
  require(ca.has_value() && cb.has_value(), Err::PointNotOnEdge,
          "edge parametrization not on the edge");
  Vec3<S> A2 = (*ca)(0) * nq.rep(e + 2) + (*ca)(1) * nq.rep(e + 3);
  Vec3<S> B2 = (*cb)(0) * nq.rep(e + 2) + (*cb)(1) * nq.rep(e + 3);
  return {A2, B2};
}

// Exact cubic coefficients of mu -> det3(A0+mu B0, A1+mu B1, A2+mu B2).
template <class S>
std::array<S, 4> det_cubic(const std::array<std::pair<Vec3<S>, Vec3<S>>, 3>& cols) {
  auto at = [&](long t) {
    S mu = ScalarTraits<S>::of(t);
    return det3<S>(Vec3<S>(cols[0].first + mu * cols[0].second),
                   Vec3<S>(cols[1].first + mu * cols[1].second),
                   Vec3<S>(cols[2].first + mu * cols[2].second));
  };
  S p0 = at(0), p1 = at(1), pm1 = at(-1), p2 = at(2);
  S half = S(1) / S(2), sixth = S(1) / S(6);
  S c0 = p0;
  S c2 = (p1 + pm1) * half - p0;
  S c3 = (p2 - S(3) * p1 + S(3) * p0 - pm1) * sixth;
  S c1 = p1 - c0 - c2 - c3;
  return {c0, c1, c2, c3};
}

}  // namespace detail

struct SixLineReport {
  bool tangent_conic = false;        // (i)   six lines tangent to one conic
  bool distinguished_lines = false;  // (ii)  instance with collinear touch sets
  bool touching_instance = false;    // (iii) propagation closes
  bool one_parameter_family = false; // (iv)  loop monodromy is the identity
  bool r_lines_through_l1 = false;   // (v)
  bool r_lines_through_k1 = false;   // (vi)
  bool consistent = false;
  std::array<bool, 6> as_array() const {
    return {tangent_conic, distinguished_lines, touching_instance, one_parameter_family,
            r_lines_through_l1, r_lines_through_k1};
  }
};

namespace detail {

// Collinearity battery of the distinguished instance on a 2x2 grid.
template <class S>
bool distinguished_sets_collinear(const LineGrid<S>& grid, const TouchingAssignment<S>& ta,
                                  const std::map<std::pair<int, int>, ProjPoint<S>>& rs) {
  // Net cell (a,b) holds grid cell (a+1, b+1); touch[0] on l_b, touch[2] on
  // l_{b+1}, touch[3] on k_a, touch[1] on k_{a+1}.
  auto touch = [&](int a, int b, int e) { return ta.cell(a, b).touch[e]; };
  auto r = [&](int i, int j) { return rs.at({i, j}); };
  std::vector<ProjPoint<S>> s1 = {touch(0, 0, 0), r(1, 1), touch(0, 0, 2), r(1, 2),
                                  touch(0, 1, 2)};
  std::vector<ProjPoint<S>> s2 = {touch(1, 0, 0), r(2, 1), touch(1, 0, 2), r(2, 2),
                                  touch(1, 1, 2)};
  std::vector<ProjPoint<S>> s3 = {touch(0, 0, 3), r(1, 1), touch(0, 0, 1), r(2, 1),
                                  touch(1, 0, 1)};
  std::vector<ProjPoint<S>> s4 = {touch(0, 1, 3), r(1, 2), touch(0, 1, 1), r(2, 2),
                                  touch(1, 1, 1)};
  return collinear(s1) && collinear(s2) && collinear(s3) && collinear(s4);
}

// Continued-fraction convergents of x with denominators up to max_den;
// candidates for exact verification against a rational polynomial.
inline std::vector<std::pair<long, long>> rational_candidates(double x, long max_den) {
  std::vector<std::pair<long, long>> out;
  if (!std::isfinite(x) || std::abs(x) > 1e15) return out;
  long p0 = 1, q0 = 0;
  long p1 = long(std::floor(x)), q1 = 1;
  out.push_back({p1, 1});
  double frac = x - std::floor(x);
  for (int it = 0; it < 40; ++it) {
    if (frac < 1e-12) break;
    double inv = 1.0 / frac;
    if (inv > double(max_den)) break;
    long a = long(std::floor(inv));
    frac = inv - std::floor(inv);
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den || q2 <= 0) break;
    out.push_back({p2, q2});
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return out;
}

// Seeds on the l_1 edge of net cell (0,0) whose K-strip touch points become
// collinear: roots of an exact cubic in the edge parameter.
template <class S>
std::vector<ProjPoint<S>> distinguished_seeds(const LineGrid<S>& grid, const QNet<S>& net) {
  Vec3<S> A = net.point_at(1, 1).c;  // k_1 ^ l_1
  Vec3<S> B = net.point_at(0, 1).c;  // k_0 ^ l_1
  auto [A0, B0] = opposite_touch_param(net.cell(0, 0), 2, A, B);
  auto [A2, B2] = opposite_touch_param(net.cell(0, 1), 0, A, B);
  auto coeffs = det_cubic<S>({std::make_pair(A0, B0), std::make_pair(A, B), std::make_pair(A2, B2)});
  std::vector<ProjPoint<S>> seeds;
  auto try_seed = [&](const S& mu) {
    Vec3<S> v = A + mu * B;
    S val = coeffs[0] + mu * (coeffs[1] + mu * (coeffs[2] + mu * coeffs[3]));
    S scale = abs(coeffs[0]) + abs(coeffs[1]) + abs(coeffs[2]) + abs(coeffs[3]);
    S m3 = (abs(mu) + S(1)) * (abs(mu) + S(1)) * (abs(mu) + S(1));
    if (!ScalarTraits<S>::near_zero(val, scale * m3)) return;
    if (ScalarTraits<S>::near_zero(norm1(v), norm1(A) + norm1(B))) return;
    seeds.push_back(ProjPoint<S>(v));
  };
  if constexpr (ScalarTraits<S>::exact) {
    // Rational roots of the exact cubic: numeric localization, continued
    // fraction rationalization, exact verification.
    double c0 = coeffs[0].to_double(), c1 = coeffs[1].to_double(), c2 = coeffs[2].to_double(),
           c3 = coeffs[3].to_double();
    std::vector<double> approx;
    if (std::abs(c3) > 1e-300) {
      // Cubic roots via the companion matrix of the normalized polynomial.
      Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
      comp(0, 2) = -c0 / c3;
      comp(1, 2) = -c1 / c3;
      comp(2, 2) = -c2 / c3;
      comp(1, 0) = comp(2, 1) = 1;
      Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
      for (int r = 0; r < 3; ++r)
        if (std::abs(es.eigenvalues()(r).imag()) < 1e-7 * (1 + std::abs(es.eigenvalues()(r).real())))
          approx.push_back(es.eigenvalues()(r).real());
    } else if (std::abs(c2) > 1e-300) {
      double disc = c1 * c1 - 4 * c2 * c0;
      if (disc >= 0) {
        approx.push_back((-c1 + std::sqrt(disc)) / (2 * c2));
        approx.push_back((-c1 - std::sqrt(disc)) / (2 * c2));
      }
    } else if (std::abs(c1) > 1e-300) {
      approx.push_back(-c0 / c1);
    }
    for (double x : approx)
      for (auto [num, den] : rational_candidates(x, 1000000)) try_seed(ScalarTraits<S>::of(num, den));
    // Root at infinity: the seed B itself (leading coefficient vanishes).
    if (coeffs[3].is_zero() &&
        !ScalarTraits<S>::near_zero(norm1(Vec3<S>(B)), norm1(A) + norm1(B))) {
      S valB = det3<S>(B0, B, B2);
      if (ScalarTraits<S>::is_zero(valB)) seeds.push_back(ProjPoint<S>(B));
    }
  } else {
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    double c3 = coeffs[3];
    if (std::abs(c3) > 1e-14 * (std::abs(coeffs[0]) + std::abs(coeffs[1]) + std::abs(coeffs[2]))) {
      comp(0, 2) = -coeffs[0] / c3;
      comp(1, 2) = -coeffs[1] / c3;
      comp(2, 2) = -coeffs[2] / c3;
      comp(1, 0) = comp(2, 1) = 1;
      Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
      for (int r = 0; r < 3; ++r)
        if (std::abs(es.eigenvalues()(r).imag()) < 1e-7 * (1 + std::abs(es.eigenvalues()(r).real())))
          try_seed(es.eigenvalues()(r).real());
    }
  }
  // Deduplicate projectively.
  std::vector<ProjPoint<S>> unique;
  for (const auto& s : seeds) {
    bool dup = false;
    for (const auto& u : unique) dup = dup || same(s, u);
    if (!dup) unique.push_back(s);
  }
  return unique;
}

}  // namespace detail

// Evaluates the six equivalent conditions of the six-line incidence theorem
// on a 2x2 grid; each condition is computed along its own route.
template <class S>
SixLineReport six_line_report(const LineGrid<S>& grid) {
  require(grid.m() == 2 && grid.n() == 2, Err::NonGenericLines,
          "six-line report needs a 2x2 grid");
  SixLineReport rep;
  auto rs = diagonal_points(grid);
  auto r = [&](int i, int j) { return rs.at({i, j}); };
  // (v), (vi): concurrency of the diagonal-point lines with the middle lines.
  rep.r_lines_through_l1 =
      concurrent<S>({join(r(1, 1), r(2, 1)), join(r(1, 2), r(2, 2)), grid.l(1)});
  rep.r_lines_through_k1 =
      concurrent<S>({join(r(1, 1), r(1, 2)), join(r(2, 1), r(2, 2)), grid.k(1)});
  // (i): five-line fit plus tangency of the sixth.
  std::optional<Conic<S>> common;
  try {
    Conic<S> c = conic_tangent_to_five_lines<S>(
        {grid.k(0), grid.k(1), grid.k(2), grid.l(0), grid.l(1)});
    if (is_tangent(c, grid.l(2))) {
      rep.tangent_conic = true;
      common = c;
    }
  } catch (const GeomError&) {
    rep.tangent_conic = false;
  }
  // (iii): does some touching instance close? (porism: one seed decides)
  QNet<S> net = to_net(grid);
  std::optional<TouchingAssignment<S>> any_instance;
  {
    const long nums[] = {2, 3, 5, 7, -3, 4, 9, -5};
    const long dens[] = {1, 1, 2, 3, 1, 7, 2, 4};
    for (int trial = 0; trial < 8 && !any_instance; ++trial) {
      Vec3<S> v = net.point_at(0, 0).c + ScalarTraits<S>::of(nums[trial], dens[trial]) *
                                             net.point_at(1, 0).c;
      try {
        any_instance = propagate_touching(net, EdgeKey{true, 0, 0}, ProjPoint<S>(v));
        rep.touching_instance = true;
      } catch (const ClosureError&) {
        rep.touching_instance = false;
        break;
      } catch (const GeomError&) {
        continue;  // seed hit a degenerate family member; try the next one
      }
    }
  }
  // (iv): monodromy of the interior-vertex loop.
  rep.one_parameter_family = is_identity(loop_monodromy(vertex_loop(net, 1, 1)));
  // (ii): a distinguished instance with the four collinear touch sets.
  if (rep.touching_instance) {
    std::vector<ProjPoint<S>> seeds;
    try {
      if (common) {
        ProjPoint<S> p0 = pole(*common, grid.k(0));
        ProjPoint<S> p1 = pole(*common, grid.k(1));
        seeds.push_back(meet(join(p0, p1), grid.l(1)));
      } else {
        seeds = detail::distinguished_seeds(grid, net);
      }
    } catch (const GeomError&) {
    }
    for (const auto& seed : seeds) {
      try {
        TouchingAssignment<S> ta = propagate_touching(net, EdgeKey{true, 0, 1}, seed);
        if (detail::distinguished_sets_collinear(grid, ta, rs)) {
          rep.distinguished_lines = true;
          break;
        }
      } catch (const GeomError&) {
        continue;
      }
    }
  }
  bool v0 = rep.tangent_conic;
  rep.consistent = rep.distinguished_lines == v0 && rep.touching_instance == v0 &&
                   rep.one_parameter_family == v0 && rep.r_lines_through_l1 == v0 &&
                   rep.r_lines_through_k1 == v0;
  return rep;
}

template <class S>
SixLineReport six_line_report(const std::array<ProjLine<S>, 6>& lines) {
  LineGrid<S> grid({lines[0], lines[1], lines[2]}, {lines[3], lines[4], lines[5]});
  return six_line_report(grid);
}

/// Conics carrying the touch points of the strips: A_i through the points on
/// the l-lines of strip K_{i-1,i}, tangent to k_{i-1}, k_i at the common
/// conic's tangency points, and in double contact with the common conic
/// along join(p_{i-1}, p_i); symmetrically B_j.
template <class S>
struct StripConics {
  std::vector<Conic<S>> a, b;
  std::vector<DoubleContact<S>> a_contact, b_contact;
};

namespace detail {

// Three rows expressing (M pt) x line = 0: tangency of the unknown conic M
// to `line` at `pt` (rank 2, all three kept).
template <class S>
void tangency_rows(const ProjPoint<S>& pt, const ProjLine<S>& line, std::vector<Vec6<S>>& rows) {
  // M entries ordered m00 m01 m02 m11 m12 m22; (M pt)_a = sum_c M_{a,c} pt_c.
  auto entry = [&](int a, int c) -> int {
    if (a > c) std::swap(a, c);
    if (a == 0) return c;          // 00->0, 01->1, 02->2
    if (a == 1) return 2 + c;      // 11->3, 12->4
    return 5;                      // 22->5
  };
  for (int comp = 0; comp < 3; ++comp) {
    int a = (comp + 1) % 3, b = (comp + 2) % 3;
    Vec6<S> row;
    for (int e = 0; e < 6; ++e) row(e) = S(0);
    for (int c = 0; c < 3; ++c) {
      row(entry(a, c)) += pt.c(c) * line.c(b);
      row(entry(b, c)) -= pt.c(c) * line.c(a);
    }
    rows.push_back(row);
  }
}

template <class S>
Vec6<S> point_row(const ProjPoint<S>& pt) {
  Vec6<S> r;
  r << pt.c(0) * pt.c(0), S(2) * pt.c(0) * pt.c(1), S(2) * pt.c(0) * pt.c(2), pt.c(1) * pt.c(1),
      S(2) * pt.c(1) * pt.c(2), pt.c(2) * pt.c(2);
  return r;
}

// Fit a conic to two tangency-at-point constraints plus incident points; the
// first point fixes the fit, the remaining points are verification.
template <class S>
Conic<S> strip_fit(const ProjPoint<S>& tp0, const ProjLine<S>& tl0, const ProjPoint<S>& tp1,
                   const ProjLine<S>& tl1, const std::vector<ProjPoint<S>>& through) {
  require(!through.empty(), Err::InconsistentStrip, "strip fit needs at least one point");
  std::vector<Vec6<S>> rows;
  tangency_rows(tp0, tl0, rows);
  tangency_rows(tp1, tl1, rows);
  rows.push_back(point_row(through[0]));
  auto kernel = nullspace6(rows);
  require(kernel.size() == 1, Err::InconsistentStrip, "strip constraints are degenerate");
  const Vec6<S>& v = kernel[0];
  for (size_t idx = 1; idx < through.size(); ++idx) {
    Vec6<S> row = point_row(through[idx]);
    S resid = row.dot(v);
    S scale = S(0);
    for (int e = 0; e < 6; ++e) scale += abs(row(e)) * abs(v(e));
    require(ScalarTraits<S>::near_zero(resid, scale + S(1)), Err::InconsistentStrip,
            "strip point fails the fitted conic");
  }
  Mat3<S> m;
  m << v(0), v(1), v(2), v(1), v(3), v(4), v(2), v(4), v(5);
  return Conic<S>(m);
}

}  // namespace detail

template <class S>
StripConics<S> strip_conics(const LineGrid<S>& grid, const GridAssignment<S>& assignment,
                            const CommonConicResult<S>& common) {
  require(common.found() && common.conic.has_value(), Err::DegenerateInput,
          "strip conics need a verified common conic");
  require(grid.strict(), Err::NonGenericLines, "strip conics need a strict grid");
  StripConics<S> out;
  for (int i = 1; i <= grid.m(); ++i) {
    std::vector<ProjPoint<S>> through;
    through.push_back(assignment.cell(i, 1).touch[3]);  // on l_0
    for (int j = 1; j <= grid.n(); ++j) through.push_back(assignment.cell(i, j).touch[1]);
    Conic<S> a = detail::strip_fit(common.p[i - 1], grid.k(i - 1), common.p[i], grid.k(i), through);
    auto contact = double_contact(a, *common.conic);
    require(contact.has_value(), Err::InconsistentStrip,
            "strip conic has no double contact with the common conic");
    out.a.push_back(std::move(a));
    out.a_contact.push_back(std::move(*contact));
  }
  for (int j = 1; j <= grid.n(); ++j) {
    std::vector<ProjPoint<S>> through;
    through.push_back(assignment.cell(1, j).touch[0]);  // on k_0
    for (int i = 1; i <= grid.m(); ++i) through.push_back(assignment.cell(i, j).touch[2]);
    Conic<S> b = detail::strip_fit(common.q[j - 1], grid.l(j - 1), common.q[j], grid.l(j), through);
    auto contact = double_contact(b, *common.conic);
    require(contact.has_value(), Err::InconsistentStrip,
            "strip conic has no double contact with the common conic");
    out.b.push_back(std::move(b));
    out.b_contact.push_back(std::move(*contact));
  }
  return out;
}

// Touching instance on a strict grid by propagation over the vertex net,
// re-expressed in grid-cell labels. `edge` uses the grid cell convention
// (0 on k_{i-1}, 1 on l_j, 2 on k_i, 3 on l_{j-1}), which is the reverse of
// the vertex-net edge order.
template <class S>
GridAssignment<S> propagate_grid(const LineGrid<S>& grid, int cell_i, int cell_j, int edge,
                                 const ProjPoint<S>& seed) {
  QNet<S> net = to_net(grid);
  TouchingAssignment<S> ta =
      propagate_touching(net, cell_edge(cell_i - 1, cell_j - 1, 3 - edge), seed);
  GridAssignment<S> out;
  for (int i = 1; i <= grid.m(); ++i)
    for (int j = 1; j <= grid.n(); ++j) {
      const InscribedConic<S>& net_ic = ta.cell(i - 1, j - 1);
      // Net cell labels start on l_{j-1}; grid cell labels start on k_{i-1}.
      // Net edges (uv,vw,wx,xu) lie on (l_{j-1}, k_i, l_j, k_{i-1}), grid
      // cell edges on (k_{i-1}, l_j, k_i, l_{j-1}).
      InscribedConic<S> ic{net_ic.conic,
                           {net_ic.touch[3], net_ic.touch[2], net_ic.touch[1], net_ic.touch[0]},
                           net_ic.lambda};
      out.cells.emplace(std::make_pair(i, j), std::move(ic));
    }
  return out;
}

}  // namespace conicnet

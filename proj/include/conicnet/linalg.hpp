#pragma once

#include "conicnet/scalar.hpp"

#include <Eigen/SVD>

#include <vector>

namespace conicnet {

template <class S>
S det3x3(const Mat3<S>& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

template <class S>
Mat3<S> adjugate(const Mat3<S>& m) {
  Mat3<S> a;
  a(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  a(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  a(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  a(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  a(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  a(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  a(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  a(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  a(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return a;
}

// Rank with exact minors on the rational backend, singular-value
// thresholding at epsilon on the approximate backend.
template <class S>
int rank3(const Mat3<S>& m) {
  if constexpr (ScalarTraits<S>::exact) {
    if (!det3x3(m).is_zero()) return 3;
    Mat3<S> a = adjugate(m);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (!a(i, j).is_zero()) return 2;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (!m(i, j).is_zero()) return 1;
    return 0;
  } else {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(0) == 0) return 0;
    int r = 1;
    for (int i = 1; i < 3; ++i)
      if (sv(i) > config::epsilon() * sv(0)) ++r;
    return r;
  }
}

// Kernel basis of a k x 6 system by Gauss-Jordan elimination. Pivoting is
// deterministic: first nonzero entry on the exact backend, largest magnitude
// on the approximate backend (rows are pre-normalized there).
template <class S>
std::vector<Vec6<S>> nullspace6(std::vector<Vec6<S>> rows) {
  const int ncols = 6;
  if constexpr (!ScalarTraits<S>::exact) {
    for (auto& r : rows) {
      double m = 0;
      for (int c = 0; c < ncols; ++c) m = std::max(m, std::abs(r(c)));
      if (m > 0) r /= m;
    }
  }
  int nrows = int(rows.size());
  std::vector<int> pivot_col;
  int rank = 0;
  for (int col = 0; col < ncols && rank < nrows; ++col) {
    int piv = -1;
    if constexpr (ScalarTraits<S>::exact) {
      for (int r = rank; r < nrows; ++r)
        if (!rows[r](col).is_zero()) {
          piv = r;
          break;
        }
    } else {
      double best = config::epsilon();
      for (int r = rank; r < nrows; ++r)
        if (std::abs(rows[r](col)) > best) {
          best = std::abs(rows[r](col));
          piv = r;
        }
    }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    S inv = S(1) / rows[rank](col);
    for (int c = 0; c < ncols; ++c) rows[rank](c) = rows[rank](c) * inv;
    for (int r = 0; r < nrows; ++r) {
      if (r == rank) continue;
      S f = rows[r](col);
      if (ScalarTraits<S>::is_zero(f)) continue;
      for (int c = 0; c < ncols; ++c) rows[r](c) = rows[r](c) - f * rows[rank](c);
    }
    pivot_col.push_back(col);
    ++rank;
  }
  std::vector<Vec6<S>> kernel;
  std::vector<bool> is_pivot(ncols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  for (int free = 0; free < ncols; ++free) {
    if (is_pivot[free]) continue;
    Vec6<S> v;
    for (int c = 0; c < ncols; ++c) v(c) = S(0);
    v(free) = S(1);
    for (int r = 0; r < int(pivot_col.size()); ++r) v(pivot_col[r]) = -rows[r](free);
    kernel.push_back(reduce(v));
  }
  return kernel;
}

// Homogeneous quadratic A s^2 + 2 B s t + C t^2: real root directions (s:t).
// On the exact backend `rational` reports whether the roots live in the
// field; irrational roots are not returned.
template <class S>
struct QuadraticRoots {
  int real_count = 0;  // 0, 1 or 2
  bool rational = true;
  std::vector<Vec2<S>> roots;
};

template <class S>
QuadraticRoots<S> solve_homogeneous_quadratic(const S& A, const S& B, const S& C) {
  QuadraticRoots<S> out;
  S disc = B * B - A * C;
  S scale = abs(B * B) + abs(A * C) + S(1);
  bool zero_disc = ScalarTraits<S>::near_zero(disc, scale);
  if (!zero_disc && disc < S(0)) return out;
  if (ScalarTraits<S>::is_zero(A) && ScalarTraits<S>::is_zero(B) && ScalarTraits<S>::is_zero(C))
    return out;  // identically zero: caller's degeneracy
  if (zero_disc) {
    out.real_count = 1;
    if (!ScalarTraits<S>::near_zero(A, abs(A) + abs(B) + abs(C)))
      out.roots.push_back(Vec2<S>(-B, A));
    else
      out.roots.push_back(Vec2<S>(S(1), S(0)));
    return out;
  }
  out.real_count = 2;
  S root;
  if constexpr (ScalarTraits<S>::exact) {
    auto r = disc.sqrt_exact();
    if (!r) {
      out.rational = false;
      return out;
    }
    root = *r;
  } else {
    root = std::sqrt(disc);
  }
  if (!ScalarTraits<S>::near_zero(A, abs(A) + abs(B) + abs(C))) {
    out.roots.push_back(Vec2<S>(-B + root, A));
    out.roots.push_back(Vec2<S>(-B - root, A));
  } else {
    // A ~ 0: one root at (1:0), the other from 2 B s t + C t^2 = 0.
    out.roots.push_back(Vec2<S>(S(1), S(0)));
    out.roots.push_back(Vec2<S>(-C, S(2) * B));
  }
  return out;
}

}  // namespace conicnet

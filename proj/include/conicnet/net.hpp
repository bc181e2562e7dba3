#pragma once

#include "conicnet/inscribed.hpp"
#include "conicnet/projectivity.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace conicnet {

/// Finite window of a net of planar quadrilaterals: points f_{i,j} with
/// 0 <= i <= cols, 0 <= j <= rows, every elementary cell a generic
/// quadrilateral.
template <class S>
class QNet {
 public:
  QNet(int cells_x, int cells_y, std::vector<ProjPoint<S>> pts)
      : cx_(cells_x), cy_(cells_y), pts_(std::move(pts)) {
    require(cx_ >= 1 && cy_ >= 1 && int(pts_.size()) == (cx_ + 1) * (cy_ + 1),
            Err::DegenerateInput, "net window size mismatch");
    for (int j = 0; j < cy_; ++j)
      for (int i = 0; i < cx_; ++i) cell(i, j);  // validates genericity
  }

  int cells_x() const { return cx_; }
  int cells_y() const { return cy_; }

  const ProjPoint<S>& point_at(int i, int j) const { return pts_[j * (cx_ + 1) + i]; }

  // Cell (i,j): quadrilateral (f_{i,j}, f_{i+1,j}, f_{i+1,j+1}, f_{i,j+1}).
  Quadrilateral<S> cell(int i, int j) const {
    return Quadrilateral<S>(point_at(i, j), point_at(i + 1, j), point_at(i + 1, j + 1),
                            point_at(i, j + 1));
  }

  bool interior_vertex(int i, int j) const { return i >= 1 && i < cx_ && j >= 1 && j < cy_; }

 private:
  int cx_, cy_;
  std::vector<ProjPoint<S>> pts_;
};

struct VertexIndex {
  int i = 0, j = 0;
  friend bool operator<(const VertexIndex& a, const VertexIndex& b) {
    return a.j != b.j ? a.j < b.j : a.i < b.i;
  }
  friend bool operator==(const VertexIndex& a, const VertexIndex& b) {
    return a.i == b.i && a.j == b.j;
  }
};

template <class S>
struct KoenigsReport {
  bool ok = true;
  std::vector<VertexIndex> failing;
  std::vector<S> residuals;  // multi-ratio product minus one, per failing vertex
};

// The multi-ratio condition at one interior vertex, with oriented lengths in
// a chart rendering every participating point finite.
template <class S>
S koenigs_product(const QNet<S>& net, int i, int j) {
  ProjPoint<S> m00 = diagonal_intersection(net.cell(i, j));
  ProjPoint<S> m10 = diagonal_intersection(net.cell(i - 1, j));
  ProjPoint<S> m11 = diagonal_intersection(net.cell(i - 1, j - 1));
  ProjPoint<S> m01 = diagonal_intersection(net.cell(i, j - 1));
  const ProjPoint<S>& fE = net.point_at(i + 1, j);
  const ProjPoint<S>& fN = net.point_at(i, j + 1);
  const ProjPoint<S>& fW = net.point_at(i - 1, j);
  const ProjPoint<S>& fS = net.point_at(i, j - 1);
  AffineChart<S> chart =
      find_chart<S>({m00, m10, m11, m01, fE, fN, fW, fS, net.point_at(i, j)});
  S prod = length_ratio(chart, m00, fE, m00, fN);
  prod = prod * length_ratio(chart, m10, fN, m10, fW);
  prod = prod * length_ratio(chart, m11, fW, m11, fS);
  prod = prod * length_ratio(chart, m01, fS, m01, fE);
  return prod;
}

template <class S>
KoenigsReport<S> koenigs_check(const QNet<S>& net) {
  KoenigsReport<S> rep;
  for (int j = 1; j < net.cells_y(); ++j)
    for (int i = 1; i < net.cells_x(); ++i) {
      S prod = koenigs_product(net, i, j);
      if (!ScalarTraits<S>::near_zero(prod - S(1), abs(prod) + S(1))) {
        rep.ok = false;
        rep.failing.push_back({i, j});
        rep.residuals.push_back(prod - S(1));
      }
    }
  return rep;
}

/// Cyclic loop of quadrilaterals glued along shared edge-lines; shared(i) is
/// the common line of quad(i) and quad(i+1).
template <class S>
class QuadLoop {
 public:
  explicit QuadLoop(std::vector<Quadrilateral<S>> quads) : quads_(std::move(quads)) {
    require(quads_.size() >= 3, Err::DegenerateInput, "loop needs at least three quadrilaterals");
    int n = int(quads_.size());
    for (int i = 0; i < n; ++i) {
      auto sv = shared_vertices(quads_[i], quads_[(i + 1) % n]);
      shared_.push_back(join(sv.first, sv.second));
    }
    bipartite_ = compute_bipartite();
  }

  int size() const { return int(quads_.size()); }
  const Quadrilateral<S>& quad(int i) const { return quads_[((i % size()) + size()) % size()]; }
  const ProjLine<S>& shared(int i) const { return shared_[((i % size()) + size()) % size()]; }
  bool bipartite() const { return bipartite_; }

  // The two common vertices of the last and first quadrilateral, living on
  // the monodromy base line shared(size()-1).
  std::pair<ProjPoint<S>, ProjPoint<S>> base_vertices() const {
    return shared_vertices(quads_[size() - 1], quads_[0]);
  }

 private:
  static std::pair<ProjPoint<S>, ProjPoint<S>> shared_vertices(const Quadrilateral<S>& a,
                                                               const Quadrilateral<S>& b) {
    std::vector<int> ia;
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q)
        if (same(a.vertex(p), b.vertex(q))) ia.push_back(p);
    require(ia.size() == 2, Err::DegenerateInput,
            "consecutive loop quadrilaterals must share exactly two vertices");
    int d = (ia[1] - ia[0] + 4) % 4;
    require(d == 1 || d == 3, Err::DegenerateInput,
            "shared vertices of consecutive quadrilaterals are not an edge");
    return {a.vertex(ia[0]), a.vertex(ia[1])};
  }

  bool compute_bipartite() const {
    // 2-colorability of the vertex graph formed by all quadrilateral edges.
    std::vector<ProjPoint<S>> verts;
    auto id_of = [&](const ProjPoint<S>& p) {
      for (size_t k = 0; k < verts.size(); ++k)
        if (same(verts[k], p)) return int(k);
      verts.push_back(p);
      return int(verts.size()) - 1;
    };
    std::vector<std::pair<int, int>> edges;
    for (const auto& q : quads_)
      for (int e = 0; e < 4; ++e) edges.push_back({id_of(q.vertex(e)), id_of(q.vertex(e + 1))});
    std::vector<int> color(verts.size(), -1);
    for (size_t s = 0; s < verts.size(); ++s) {
      if (color[s] != -1) continue;
      color[s] = 0;
      std::vector<int> stack{int(s)};
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (auto& e : edges) {
          int v = -1;
          if (e.first == u) v = e.second;
          if (e.second == u) v = e.first;
          if (v < 0) continue;
          if (color[v] == -1) {
            color[v] = 1 - color[u];
            stack.push_back(v);
          } else if (color[v] == color[u]) {
            return false;
          }
        }
      }
    }
    return true;
  }

  std::vector<Quadrilateral<S>> quads_;
  std::vector<ProjLine<S>> shared_;
  bool bipartite_ = true;
};

// The per-quadrilateral map of the porism construction: a central projection
// from the diagonal intersection, or, when the two shared lines meet at a
// vertex, from the harmonic conjugate of the diagonal intersection with
// respect to the other two shared vertices.
template <class S>
LineProjectivity<S> porism_step(const Quadrilateral<S>& q, const ProjLine<S>& l_prev,
                                const ProjLine<S>& l_next) {
  ProjPoint<S> r = diagonal_intersection(q);
  ProjPoint<S> cross = meet(l_prev, l_next);
  int at_vertex = -1;
  for (int k = 0; k < 4; ++k)
    if (same(cross, q.vertex(k))) at_vertex = k;
  if (at_vertex < 0) return central_projection(r, l_prev, l_next);
  // Triangle of the shared vertices: c = the corner, a on l_prev, b on
  // l_next; r lies on the diagonal (a, b).
  const ProjPoint<S>& c = q.vertex(at_vertex);
  ProjPoint<S> n1 = q.vertex(at_vertex + 1);
  ProjPoint<S> n2 = q.vertex(at_vertex + 3);
  bool n1_prev = incident(n1, l_prev);
  ProjPoint<S> a = n1_prev ? n1 : n2;
  ProjPoint<S> b = n1_prev ? n2 : n1;
  require(incident(a, l_prev) && incident(b, l_next), Err::DegenerateInput,
          "shared lines do not carry adjacent edges of the quadrilateral");
  (void)c;
  ProjPoint<S> center = harmonic_conjugate(a, b, r);
  return central_projection(center, l_prev, l_next);
}

// Composition of the porism maps around the loop, an endomorphism of
// shared(size()-1).
template <class S>
LineProjectivity<S> loop_monodromy(const QuadLoop<S>& loop) {
  int n = loop.size();
  LineProjectivity<S> f = identity_on(loop.shared(n - 1));
  for (int i = 0; i < n; ++i) {
    LineProjectivity<S> fi = porism_step(loop.quad(i), loop.shared(i - 1), loop.shared(i));
    f = compose(fi, f);
  }
  if constexpr (ScalarTraits<S>::exact) {
    Mat2<S> m = f.m;
    S lead(0);
    for (int i = 0; i < 2 && lead.is_zero(); ++i)
      for (int j = 0; j < 2 && lead.is_zero(); ++j)
        if (!m(i, j).is_zero()) lead = m(i, j);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = m(i, j) / lead;
    return LineProjectivity<S>(f.source, f.target, m);
  }
  return f;
}

/// Indexed edge of a net window: h-edge (i,j) joins f_{i,j} and f_{i+1,j};
/// v-edge (i,j) joins f_{i,j} and f_{i,j+1}.
struct EdgeKey {
  bool horizontal = true;
  int i = 0, j = 0;
  friend bool operator<(const EdgeKey& a, const EdgeKey& b) {
    if (a.horizontal != b.horizontal) return a.horizontal;
    if (a.j != b.j) return a.j < b.j;
    return a.i < b.i;
  }
};

// Edge key of side e (0..3 = uv, vw, wx, xu) of cell (i, j).
inline EdgeKey cell_edge(int i, int j, int e) {
  switch (e) {
    case 0: return EdgeKey{true, i, j};
    case 1: return EdgeKey{false, i + 1, j};
    case 2: return EdgeKey{true, i, j + 1};
    default: return EdgeKey{false, i, j};
  }
}

template <class S>
struct TouchingAssignment {
  int cells_x = 0, cells_y = 0;
  std::vector<std::optional<InscribedConic<S>>> cells;  // row-major
  std::map<EdgeKey, ProjPoint<S>> edge_points;

  const InscribedConic<S>& cell(int i, int j) const {
    const auto& c = cells[j * cells_x + i];
    require(c.has_value(), Err::DegenerateInput, "unassigned cell");
    return *c;
  }
};

// The bipartite 4-loop of cells around interior vertex (i, j).
template <class S>
QuadLoop<S> vertex_loop(const QNet<S>& net, int i, int j) {
  require(net.interior_vertex(i, j), Err::DegenerateInput, "vertex loop needs an interior vertex");
  return QuadLoop<S>(
      {net.cell(i - 1, j - 1), net.cell(i, j - 1), net.cell(i, j), net.cell(i - 1, j)});
}

// Interior vertices whose surrounding 4-loop monodromy is not the identity;
// empty exactly when the net admits touching inscribed conics.
template <class S>
std::vector<VertexIndex> touching_obstructions(const QNet<S>& net) {
  std::vector<VertexIndex> out;
  for (int j = 1; j < net.cells_y(); ++j)
    for (int i = 1; i < net.cells_x(); ++i)
      if (!is_identity(loop_monodromy(vertex_loop(net, i, j)))) out.push_back({i, j});
  return out;
}

namespace detail {

template <class S>
std::string matrix2_str(const Mat2<S>& m) {
  std::ostringstream os;
  os << "[" << ScalarTraits<S>::str(m(0, 0)) << ", " << ScalarTraits<S>::str(m(0, 1)) << "; "
     << ScalarTraits<S>::str(m(1, 0)) << ", " << ScalarTraits<S>::str(m(1, 1)) << "]";
  return os.str();
}

}  // namespace detail

// Breadth-first propagation of a touching instance from one seeded edge
// point. Every interior vertex is additionally closed exactly against its
// 4-loop monodromy; propagation succeeds iff the net is Koenigs.
template <class S>
TouchingAssignment<S> propagate_touching(const QNet<S>& net, const EdgeKey& seed_edge,
                                         const ProjPoint<S>& seed_point) {
  TouchingAssignment<S> out;
  out.cells_x = net.cells_x();
  out.cells_y = net.cells_y();
  out.cells.assign(size_t(out.cells_x) * out.cells_y, std::nullopt);
  auto fail_closure = [&](const EdgeKey& at) -> void {
    // Report the first interior vertex adjacent to the offending edge whose
    // local loop does not close, with the residual monodromy matrix.
    std::vector<VertexIndex> cand;
    if (at.horizontal)
      cand = {{at.i, at.j}, {at.i + 1, at.j}};
    else
      cand = {{at.i, at.j}, {at.i, at.j + 1}};
    for (const auto& v : cand) {
      if (!net.interior_vertex(v.i, v.j)) continue;
      auto f = loop_monodromy(vertex_loop(net, v.i, v.j));
      if (!is_identity(f)) throw ClosureError(v.i, v.j, detail::matrix2_str(f.m));
    }
    throw ClosureError(at.i, at.j, "edge tangency points disagree");
  };
  out.edge_points.emplace(seed_edge, seed_point);
  int remaining = out.cells_x * out.cells_y;
  while (remaining > 0) {
    bool progressed = false;
    for (int j = 0; j < out.cells_y && !progressed; ++j)
      for (int i = 0; i < out.cells_x && !progressed; ++i) {
        if (out.cells[j * out.cells_x + i].has_value()) continue;
        int known_edge = -1;
        for (int e = 0; e < 4 && known_edge < 0; ++e)
          if (out.edge_points.count(cell_edge(i, j, e))) known_edge = e;
        if (known_edge < 0) continue;
        Quadrilateral<S> q = net.cell(i, j);
        InscribedConic<S> ic =
            inscribed_through(q, out.edge_points.at(cell_edge(i, j, known_edge)), known_edge);
        for (int e = 0; e < 4; ++e) {
          EdgeKey key = cell_edge(i, j, e);
          auto it = out.edge_points.find(key);
          if (it == out.edge_points.end())
            out.edge_points.emplace(key, ic.touch[e]);
          else if (!same(it->second, ic.touch[e]))
            fail_closure(key);
        }
        out.cells[j * out.cells_x + i] = std::move(ic);
        --remaining;
        progressed = true;
      }
    require(progressed, Err::DegenerateInput, "seeded edge does not reach every cell");
  }
  for (int j = 1; j < net.cells_y(); ++j)
    for (int i = 1; i < net.cells_x(); ++i) {
      auto f = loop_monodromy(vertex_loop(net, i, j));
      if (!is_identity(f)) throw ClosureError(i, j, detail::matrix2_str(f.m));
    }
  return out;
}

// Porism verdict: the loop monodromy is the identity for a bipartite loop,
// an involution for a non-bipartite one. A supplied touching instance's
// point on the base line is verified to be fixed.
template <class S>
bool porism_check(const QuadLoop<S>& loop,
                  const std::optional<ProjPoint<S>>& instance_base_point = std::nullopt) {
  LineProjectivity<S> f = loop_monodromy(loop);
  bool ok = loop.bipartite() ? is_identity(f) : is_involution(f);
  if (ok && instance_base_point.has_value())
    ok = same(apply(f, *instance_base_point), *instance_base_point);
  return ok;
}

}  // namespace conicnet

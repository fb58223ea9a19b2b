#pragma once

#include <string>
#include <vector>

#include "plectic/tree.hpp"

// Compact-open subsets of P¹(Q_p) attached to tree edges, the exhaustive
// finite oracle P¹(Z/p^n), a finite model of the Steinberg quotient, and
// harmonic (total-mass-zero) edge measures.
//
// The dictionary: a child-direction edge (v -> w), a_w = a_v + 1, is sent to
// the interior ball B(b_w, a_w) = {x : val(x - b_w) >= a_w}; a parent-
// direction edge is sent to the complement of the source's ball.  Reversing
// an edge therefore complements its ball by construction, and the p+1 edges
// out of a vertex cut P¹ into p+1 disjoint pieces.

namespace plectic {

struct BoundaryBall {
  u64 p = 0;
  bool exterior = false;  // complement ball; contains infinity
  int m = 0;              // radius exponent of the underlying {val(x-c) >= m}
  i64 cj = 0;             // center c = cj/p^cm, canonical:
  int cm = 0;             //   cm >= 0 minimal, 0 <= cj < p^(m+cm)
  bool operator==(const BoundaryBall& o) const {
    return p == o.p && exterior == o.exterior && m == o.m && cj == o.cj && cm == o.cm;
  }
  std::string str() const;
};

// reduce (cj/p^cm mod p^m) to canonical form
BoundaryBall canonical_ball(u64 p, bool exterior, int m, i128 cj, int cm);

BoundaryBall ball_of_edge(const TreeEdge& e);

// one projective point of P¹(Z/p^n): the class [a : b]
struct P1Point {
  i64 a = 0, b = 0;
};

// canonical representatives: [x : 1] for x mod p^n, then [1 : p·z] for z
// mod p^(n-1); total p^n + p^(n-1) points
std::vector<P1Point> p1_points(u64 p, int n);

// membership of the exact integer pair [a : b] in a ball
bool ball_contains(const BoundaryBall& ball, i128 a, i128 b);
inline bool ball_contains(const BoundaryBall& ball, const P1Point& x) {
  return ball_contains(ball, x.a, x.b);
}

// Moebius action on projective pairs (exact integer arithmetic)
inline std::pair<i128, i128> act_pair(const Mat2& g, i128 a, i128 b) {
  return {(i128)g.m[0][0] * a + (i128)g.m[0][1] * b,
          (i128)g.m[1][0] * a + (i128)g.m[1][1] * b};
}

// the p+1 balls of the edges out of v; disjoint and covering P¹
std::vector<BoundaryBall> star_partition(const TreeVertex& v);

// level-n covering: balls of the level-n torus orbit edges, in orbit order,
// so index j corresponds to the j-th power of the level generator
std::vector<BoundaryBall> covering(const TorusData& t, int n);

// --------------------------------------------------------------------------
// Steinberg quotient: functions on P¹ modulo constants, sampled at a finite
// level.  An edge sum evaluates through e ↦ 1_{U_e}.

using EdgeSum = EdgeFunction<i64>;

// the star sum at v: coefficient 1 on each edge with source v
EdgeSum steinberg_delta(const TreeVertex& v);

class SteinbergElem {
 public:
  // raw values on p1_points(p, level); stored modulo constants by pinning
  // the first value to 0
  SteinbergElem(u64 p, int level, std::vector<i64> raw);
  u64 prime() const { return p_; }
  int level() const { return level_; }
  const std::vector<i64>& values() const { return v_; }
  bool is_zero() const;
  SteinbergElem operator+(const SteinbergElem& o) const;
  bool operator==(const SteinbergElem& o) const;

 private:
  u64 p_;
  int level_;
  std::vector<i64> v_;
};

// evaluate a formal edge sum as a Steinberg element at the given level
SteinbergElem steinberg_ev(u64 p, const EdgeSum& x, int level);

// --------------------------------------------------------------------------
// Harmonic measures: antisymmetric edge assignments with vanishing vertex
// sums, valued in a coefficient module A (addition, unary minus, equality,
// is_zero; e.g. ZkCoeff or GroupRingElem).  Values are stored on all oriented
// edges within a radius-R ball of the torus-fixed vertex; beyond the stored
// radius the measure is locally constant and deeper queries are refused.

struct ZkCoeff {
  u64 mod = 0;
  u64 v = 0;
  ZkCoeff() = default;
  ZkCoeff(u64 mod_, u64 v_) : mod(mod_), v(v_ % mod_) {}
  ZkCoeff operator+(const ZkCoeff& o) const {
    if (mod != o.mod) throw std::domain_error("ZkCoeff: mixed moduli");
    return ZkCoeff(mod, addm(v, o.v, mod));
  }
  ZkCoeff operator-() const { return ZkCoeff(mod, v ? mod - v : 0); }
  ZkCoeff scaled(u64 s) const { return ZkCoeff(mod, mulm(v, s % mod, mod)); }
  bool operator==(const ZkCoeff& o) const { return mod == o.mod && v == o.v; }
  bool is_zero() const { return v == 0; }
};

template <typename A>
class HarmonicMeasureT {
 public:
  // values indexed like the level-n orbit edges (the covering order); their
  // sum must vanish in A.  Coarser values are forced by harmonicity, deeper
  // ones by the locally-constant tail.
  static HarmonicMeasureT from_sphere_values(const TorusData& t, int n,
                                             const std::vector<A>& values) {
    u64 h = level_order(t.p, n);
    if (values.size() != h)
      throw std::domain_error("HarmonicMeasure: need one value per level-n edge");
    A total = values[0];
    for (u64 j = 1; j < h; ++j) total = total + values[j];
    if (!total.is_zero())
      throw std::domain_error("HarmonicMeasure: sphere values must sum to zero");

    HarmonicMeasureT out;
    out.center_ = torus_fixed_vertex(t);
    out.radius_ = n;
    TorusGenerator g = generator_for_depth(t, n);
    std::vector<TreeEdge> orbit =
        orbit_of_edge(t, g, consecutive_edges(t, n).back(), h);
    for (u64 j = 0; j < h; ++j) {
      out.mu_.emplace(orbit[j], values[j]);
      out.mu_.emplace(orbit[j].reversed(), -values[j]);
    }
    // propagate inward: the value on a level-m edge is the sum over the
    // level-(m+1) edges continuing it
    for (int level = n - 1; level >= 1; --level) {
      for (const auto& [v, d] : ball_around(out.center_, level)) {
        if (d != level) continue;
        A sum = outward_sum(out, v, level);
        TreeVertex parent = parent_of(out.center_, v);
        out.mu_.emplace(TreeEdge{parent, v}, sum);
        out.mu_.emplace(TreeEdge{v, parent}, -sum);
      }
    }
    return out;
  }

  const A& operator()(const TreeEdge& e) const {
    auto it = mu_.find(e);
    if (it == mu_.end())
      throw std::out_of_range("HarmonicMeasure: edge outside the stored radius");
    return it->second;
  }
  int radius() const { return radius_; }
  const TreeVertex& center() const { return center_; }
  const EdgeFunction<A>& stored() const { return mu_; }

  // recheck antisymmetry and vanishing vertex sums from the raw storage
  bool is_harmonic() const {
    for (const auto& [e, val] : mu_) {
      auto rev = mu_.find(e.reversed());
      if (rev == mu_.end() || !(rev->second == -val)) return false;
    }
    for (const auto& [v, d] : ball_around(center_, radius_ - 1)) {
      (void)d;
      bool full = true;
      A sum = zero_like();
      for (const TreeVertex& w : neighbors(v)) {
        auto it = mu_.find(TreeEdge{v, w});
        if (it == mu_.end()) {
          full = false;
          break;
        }
        sum = sum + it->second;
      }
      if (!full || !sum.is_zero()) return false;
    }
    return true;
  }

 private:
  HarmonicMeasureT() = default;
  A zero_like() const {
    const A& any = mu_.begin()->second;
    return any + (-any);
  }
  static A outward_sum(const HarmonicMeasureT& hm, const TreeVertex& v, int level) {
    // sum of stored values on the edges leaving v away from the center
    bool found = false;
    A sum{};
    for (const TreeVertex& w : neighbors(v)) {
      if (tree_distance(hm.center_, w) != level + 1) continue;
      auto it = hm.mu_.find(TreeEdge{v, w});
      if (it == hm.mu_.end())
        throw std::logic_error("HarmonicMeasure: missing descendant value");
      sum = found ? sum + it->second : it->second;
      found = true;
    }
    if (!found) throw std::logic_error("HarmonicMeasure: vertex has no descendants");
    return sum;
  }
  static TreeVertex parent_of(const TreeVertex& center, const TreeVertex& v) {
    int d = tree_distance(center, v);
    for (const TreeVertex& w : neighbors(v))
      if (tree_distance(center, w) == d - 1) return w;
    throw std::logic_error("HarmonicMeasure: no parent toward center");
  }

  TreeVertex center_;
  int radius_ = 0;
  EdgeFunction<A> mu_;
};

using HarmonicMeasure = HarmonicMeasureT<ZkCoeff>;

}  // namespace plectic

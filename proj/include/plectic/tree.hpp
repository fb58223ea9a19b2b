#pragma once

#include <array>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "plectic/padic.hpp"

// Combinatorics of the (p+1)-regular tree of lattice classes in Q_p², with
// the projective GL_2 action and the nonsplit ("inert") torus attached to the
// unramified quadratic extension Q_p(√u).
//
// A vertex is the homothety class of the lattice spanned by the columns of
//     [ p^a  b ]
//     [ 0    1 ],   b = bj / p^bm  taken mod p^a Z_p,
// in canonical form: bm >= 0 minimal and 0 <= bj < p^(a+bm).  The standard
// vertex is (a, b) = (0, 0); the parity of a vertex is a mod 2 and equals the
// distance to the standard vertex mod 2.  Matrices act by lattice transport;
// only the matrix class mod scalars matters, so integer matrices suffice.

namespace plectic {

struct TreeVertex {
  u64 p = 0;
  int a = 0;
  i64 bj = 0;
  int bm = 0;
  int parity() const { return ((a % 2) + 2) % 2; }
  bool operator==(const TreeVertex& o) const {
    return p == o.p && a == o.a && bj == o.bj && bm == o.bm;
  }
  // deterministic ordering used by the default edge selector
  bool operator<(const TreeVertex& o) const {
    if (a != o.a) return a < o.a;
    if (bm != o.bm) return bm < o.bm;
    return bj < o.bj;
  }
  std::string str() const;
};

struct TreeEdge {
  TreeVertex src, dst;
  TreeEdge reversed() const { return {dst, src}; }
  bool operator==(const TreeEdge& o) const { return src == o.src && dst == o.dst; }
  std::string str() const;
};

struct VertexHash {
  size_t operator()(const TreeVertex& v) const {
    size_t h = std::hash<u64>()(v.p);
    h = h * 1000003u ^ std::hash<long long>()((long long)v.a);
    h = h * 1000003u ^ std::hash<long long>()(v.bj);
    h = h * 1000003u ^ std::hash<long long>()((long long)v.bm);
    return h;
  }
};
struct EdgeHash {
  size_t operator()(const TreeEdge& e) const {
    return VertexHash()(e.src) * 2654435761u ^ VertexHash()(e.dst);
  }
};

struct Mat2 {
  i64 m[2][2];
  static Mat2 identity() { return {{{1, 0}, {0, 1}}}; }
  i128 det() const { return (i128)m[0][0] * m[1][1] - (i128)m[0][1] * m[1][0]; }
  Mat2 adj() const { return {{{m[1][1], -m[0][1]}, {-m[1][0], m[0][0]}}}; }
};

// g*h with overflow check (throws std::overflow_error)
Mat2 mat_mul(const Mat2& g, const Mat2& h);
// g^e with entries reduced mod p^prec; valuations stay faithful as long as
// the true entry valuations are < prec (asserted by callers at desk scale)
Mat2 mat_pow_mod(const Mat2& g, u64 e, u64 p, int prec);
// largest k with p^k < 2^62
int max_padic_prec(u64 p);

TreeVertex standard_vertex(u64 p);
// lattice class of an explicit column basis, entries num/p^denpow
TreeVertex vertex_from_basis(u64 p, const std::array<std::array<i64, 2>, 2>& num,
                             const std::array<std::array<int, 2>, 2>& denpow);

std::vector<TreeVertex> neighbors(const TreeVertex& v);
int tree_distance(const TreeVertex& v, const TreeVertex& w);

// projective action by an integer matrix with det != 0 and content prime to p
TreeVertex act(const Mat2& g, const TreeVertex& v);
TreeEdge act(const Mat2& g, const TreeEdge& e);

// all vertices at distance <= radius, paired with their distance
std::vector<std::pair<TreeVertex, int>> ball_around(const TreeVertex& center, int radius);

// --------------------------------------------------------------------------
// Inert torus

struct TorusData {
  u64 p = 0;
  int prec = 0;
  u64 u = 0;           // quadratic non-residue
  Mat2 root;           // matrix squaring to u * scale² (image of √u)
  i64 root_scale = 1;  // element(x,y) embeds x + y*root_scale*√u
  TreeVertex fixed;    // unique torus-fixed vertex
  QuadExtElem tau, tau_bar;  // boundary fixed points

  static TorusData standard(u64 p, int prec);
  static TorusData conjugated(u64 p, int prec, const Mat2& g);
  Mat2 element(i64 x, i64 y) const;        // x*I + y*root
  QuadExtElem alpha(i64 x, i64 y) const;   // the field element it embeds
};

// order of the cyclic quotient acting on the depth-n sphere
inline u64 level_order(u64 p, int n) { return (p + 1) * ipow(p, (unsigned)(n - 1)); }

TreeVertex torus_fixed_vertex(const TorusData& t);

// vertices at distance n from the fixed vertex (breadth-first enumeration)
std::vector<TreeVertex> sphere(const TorusData& t, int n);

// e_1, ..., e_n with s(e_1) = fixed vertex and t(e_i) = s(e_{i+1}); ties are
// broken by the canonical vertex order, so the sequence is deterministic
std::vector<TreeEdge> consecutive_edges(const TorusData& t, int n);

struct TorusGenerator {
  i64 x = 0, y = 0;  // class of x + y·(scale·√u) generates the level-n quotient
  Mat2 mat;
};

// first pair in the fixed (y, x) enumeration whose class has full order
// (p+1)p^(n-1) modulo the depth-n stabilizer
TorusGenerator generator_for_depth(const TorusData& t, int n);

// orbit {g^j · e : 0 <= j < count}; powers reduced mod p^prec
std::vector<TreeEdge> orbit_of_edge(const TorusData& t, const TorusGenerator& g,
                                    const TreeEdge& e, u64 count);

// --------------------------------------------------------------------------
// Edge functions and the U_p ("sum over continuations") operator

template <typename V>
using EdgeFunction = std::unordered_map<TreeEdge, V, EdgeHash>;

// (U_p f)(e) = sum of f over the p continuations e' of e: s(e') = t(e) and
// e' is not the reversal of e.
template <typename V>
EdgeFunction<V> up_operator(const EdgeFunction<V>& f) {
  EdgeFunction<V> out;
  for (const auto& [e, val] : f) {
    // e contributes f(e) to every edge it continues, i.e. edges (w, s(e))
    // with w != t(e)
    for (const TreeVertex& w : neighbors(e.src)) {
      if (w == e.dst) continue;
      TreeEdge into{w, e.src};
      auto it = out.find(into);
      if (it == out.end())
        out.emplace(into, val);
      else
        it->second = it->second + val;
    }
  }
  return out;
}

// transpose: (U_p^T f)(e) = sum of f over the p edges e' continued by e,
// i.e. t(e') = s(e) and e' is not the reversal of e
template <typename V>
EdgeFunction<V> up_transpose(const EdgeFunction<V>& f) {
  EdgeFunction<V> out;
  for (const auto& [e, val] : f) {
    // e contributes f(e) to its own continuations (t(e), w), w != s(e)
    for (const TreeVertex& w : neighbors(e.dst)) {
      if (w == e.src) continue;
      TreeEdge cont{e.dst, w};
      auto it = out.find(cont);
      if (it == out.end())
        out.emplace(cont, val);
      else
        it->second = it->second + val;
    }
  }
  return out;
}

// Group-ring coefficients Z/p^k [Z/h]: the value type of torus orbit series.
struct GroupRingElem {
  u64 h = 1;    // group order
  u64 mod = 1;  // coefficient modulus p^k
  std::vector<u64> c;
  GroupRingElem() : c(1, 0) {}
  GroupRingElem(u64 h_, u64 mod_) : h(h_), mod(mod_), c(h_, 0) {}
  static GroupRingElem basis(u64 h, u64 mod, u64 j) {
    GroupRingElem g(h, mod);
    g.c[j % h] = 1 % mod;
    return g;
  }
  GroupRingElem operator+(const GroupRingElem& o) const;
  GroupRingElem operator-() const;
  GroupRingElem scaled(u64 s) const;  // multiply every coefficient by s
  bool operator==(const GroupRingElem& o) const { return h == o.h && mod == o.mod && c == o.c; }
  bool is_zero() const;
  // push coefficients along Z/h -> Z/h' (h' | h)
  GroupRingElem reduced_to(u64 hp) const;
};

// h_n = sum over j of [j] · (indicator of g^j · reversed(e_n)): the level-n
// torus orbit series.  Edges are oriented toward the fixed vertex; with the
// U_p convention above this is the orientation for which projecting the
// level-(n+1) series to level n equals U_p of the level-n series on the nose.
EdgeFunction<GroupRingElem> torus_orbit_series(const TorusData& t, const TorusGenerator& g,
                                               int n, u64 coeff_mod);

// same orbit data oriented away from the fixed vertex (the transposed
// identity partner; kept separate so both conventions stay testable)
EdgeFunction<GroupRingElem> torus_orbit_series_outward(const TorusData& t,
                                                       const TorusGenerator& g, int n,
                                                       u64 coeff_mod);

}  // namespace plectic

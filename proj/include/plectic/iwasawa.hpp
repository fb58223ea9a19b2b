#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plectic/arith.hpp"
#include "plectic/integrate.hpp"

// The truncated anticyclotomic algebra (Z/p^k)[T]/(T^n) with T = gamma - 1
// for a topological generator gamma of the cyclic p-tower, together with
// everything the rank-bound argument consumes: augmentation-ideal orders,
// Fitting-ideal orders of square presentations, the kappa-classes attached
// to compatible point systems, the bipartite reciprocity validator, and the
// Selmer split tables.

namespace plectic {

struct IwasawaElem {
  u64 p = 0;
  unsigned k = 0;  // coefficients mod p^k
  unsigned n = 0;  // truncation T^n
  std::vector<u64> c;  // c[i] is the T^i coefficient, size n

  static IwasawaElem zero(u64 p, unsigned k, unsigned n);
  static IwasawaElem constant(u64 p, unsigned k, unsigned n, i64 value);
  // (1 + T)^j truncated: the image of the j-th power of the group generator.
  static IwasawaElem group_like(u64 p, unsigned k, unsigned n, u64 j);

  u64 modulus() const;
  bool same_ring(const IwasawaElem& o) const;
  bool is_zero() const;
  u64 augmentation() const { return c.empty() ? 0 : c[0]; }

  IwasawaElem operator+(const IwasawaElem& o) const;
  IwasawaElem operator-(const IwasawaElem& o) const;
  IwasawaElem operator*(const IwasawaElem& o) const;
  IwasawaElem scaled(i64 s) const;
  bool operator==(const IwasawaElem& o) const;
  bool operator!=(const IwasawaElem& o) const { return !(*this == o); }

  std::string str() const;  // "3 + 2*T + T^3" style rendering
};

// Least i with c_i != 0, or n when the element vanishes: the order of
// vanishing along the augmentation ideal I = (T).
int ord_I(const IwasawaElem& x);

// ord_I of the determinant of a square presentation matrix (the 0th
// Fitting generator).  For a matrix with more rows than columns the minimum
// over the maximal minors is reported (a lower bound for nothing — it *is*
// the order of the minor ideal); fewer rows than columns presents the zero
// ideal and yields n.  Elementary row/column operations do not change the
// result.
int fitting_ord_I(const std::vector<std::vector<IwasawaElem>>& M);

struct KappaClass {
  u64 p = 0;
  unsigned k = 0;
  unsigned trunc = 0;
  u64 rank = 0;
  i64 a_p = 0;
  int multiplier = 0;  // ord_p of the Tate parameter; carried, never applied

  // level[n-1][component]: kappa_n = a_p^(-n) sum_j P_n(-j) (1+T)^j
  std::vector<std::vector<IwasawaElem>> level;
  std::vector<bool> augmentation_zero;  // per level
  std::vector<bool> corestriction_ok;   // level n+1 -> n, size depth-1

  bool certified() const;
};

// Builds the kappa-class tower from a trace-compatible point system: at
// level n the group element g^j acts by index translation and maps to
// (1+T)^j, the whole sum is normalized by a_p^(-n) (a_p must be +1 or -1),
// and tate_val >= 1 is recorded as the untouched scalar multiplier.
// Certificates: the augmentation of every level vanishes (the class lives
// in A tensor I), and re-summing level n+1 with exponents folded mod |G_n|
// reproduces a_p^(-1) times level n exactly.
KappaClass kappa_from_system(const PointSystem& ps, i64 a_p, int tate_val,
                             unsigned trunc = 4);

// min over components of ord_I at the deepest level; nullopt for the zero
// class (no bound can be extracted from it).
std::optional<int> kappa_ord(const KappaClass& kc);

// 1 + 2 * ord_kappa, the rank bound the Fitting-order argument yields.
// Negative input (the "vanishing class" sentinel) is refused.
int rank_bound(int ord_kappa);

struct SplitCandidate {
  int r_plus = 0, r_minus = 0;
  int max_rank_delta = 0;  // max{r+ + delta+, r- + delta-}
};

// All (r+, r-) with r+ + r- = r_total, both parities equal to eps, and the
// eigenspace of sign(-a_p * eps) forced positive; each candidate carries
// max{r^pm + delta^pm} for the supplied deltas.
std::vector<SplitCandidate> selmer_split_table(int r_total, int eps, i64 a_p,
                                               int delta_plus, int delta_minus);

struct RankReport {
  int ord_kappa = 0;
  int char_ord_bound = 0;   // 2 * ord
  int rank_bound_value = 0; // 1 + 2 * ord
  std::vector<SplitCandidate> table;
};

// Assembles the full chain ord_I(kappa) -> char-order bound -> rank bound
// -> split table.  Throws on a vanishing class.
RankReport rank_report(const KappaClass& kc, int eps, int delta_plus, int delta_minus);

// ---- bipartite reciprocity data ----

struct BipartiteNode {
  std::vector<u64> m;      // strictly increasing primes; empty = base level
  bool indefinite = true;  // parity tag: must equal (|m| even)
  std::vector<IwasawaElem> kappa;  // class vector when indefinite
  IwasawaElem lambda;              // scalar when definite
};

struct BipartiteEdge {
  std::vector<u64> m;  // source product
  u64 ell = 0;         // prime joined to it
  // linear functional applied to whichever side carries the class vector
  std::vector<IwasawaElem> loc;
};

struct BipartiteData {
  std::vector<BipartiteNode> nodes;
  std::vector<BipartiteEdge> edges;
};

struct BipartiteReport {
  bool ok = true;
  std::vector<std::string> failures;  // human-readable witnesses
};

// Checks structural sanity (parity tags, sorted squarefree indices, class /
// scalar presence) and every supplied reciprocity edge: with m' = m + {ell},
// loc(kappa of the indefinite side) must equal lambda of the definite side.
// Never throws; all violations are reported with witnesses.
BipartiteReport validate_bipartite(const BipartiteData& data);

// When the same instance is supplied at two precisions, every matching node
// of the coarse instance must be the mod-p^k reduction of the fine one.
BipartiteReport bipartite_reduction_compatible(const BipartiteData& fine,
                                               const BipartiteData& coarse);

}  // namespace plectic

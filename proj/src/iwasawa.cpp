#include "plectic/iwasawa.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace plectic {

namespace {

void require_ring(const IwasawaElem& a, const IwasawaElem& b) {
  if (!a.same_ring(b))
    throw std::invalid_argument("iwasawa: elements from different truncated rings");
}

// binomial coefficient C(j, m) reduced mod `mod`.  The raw numerator is a
// product of m consecutive integers, so it fits in 128 bits for the sizes the
// truncation allows (m <= 6, j <= 10^6); the division by m! is exact.
u64 binom_mod(u64 j, unsigned m, u64 mod) {
  if (m == 0) return 1 % mod;
  if (j < m) return 0;
  u128 num = 1;
  u64 den = 1;
  for (unsigned t = 0; t < m; ++t) {
    num *= (u128)(j - t);
    den *= (u64)(t + 1);
  }
  return (u64)((num / den) % mod);
}

std::vector<std::vector<IwasawaElem>> minor_of(const std::vector<std::vector<IwasawaElem>>& M,
                                               size_t row, size_t col) {
  std::vector<std::vector<IwasawaElem>> out;
  for (size_t i = 0; i < M.size(); ++i) {
    if (i == row) continue;
    std::vector<IwasawaElem> r;
    for (size_t jj = 0; jj < M[i].size(); ++jj)
      if (jj != col) r.push_back(M[i][jj]);
    out.push_back(std::move(r));
  }
  return out;
}

IwasawaElem det(const std::vector<std::vector<IwasawaElem>>& M) {
  if (M.size() == 1) return M[0][0];
  IwasawaElem acc = IwasawaElem::zero(M[0][0].p, M[0][0].k, M[0][0].n);
  for (size_t jj = 0; jj < M.size(); ++jj) {
    IwasawaElem term = M[0][jj] * det(minor_of(M, 0, jj));
    acc = (jj % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

std::string product_str(const std::vector<u64>& m) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
  os << "}";
  return os.str();
}

const BipartiteNode* find_node(const BipartiteData& data, const std::vector<u64>& m) {
  for (const auto& node : data.nodes)
    if (node.m == m) return &node;
  return nullptr;
}

// the ring parameters of whichever element a node actually carries
const IwasawaElem* ring_probe(const BipartiteNode& node) {
  if (node.indefinite) return node.kappa.empty() ? nullptr : &node.kappa[0];
  return node.lambda.p != 0 ? &node.lambda : nullptr;
}

IwasawaElem reduce_precision(const IwasawaElem& x, unsigned k2) {
  IwasawaElem out = IwasawaElem::zero(x.p, k2, x.n);
  for (unsigned i = 0; i < x.n; ++i) out.c[i] = x.c[i] % out.modulus();
  return out;
}

}  // namespace

IwasawaElem IwasawaElem::zero(u64 p, unsigned k, unsigned n) {
  if (p < 2 || k == 0 || n == 0 || n > 7)
    throw std::invalid_argument("iwasawa ring wants p >= 2, k >= 1, 1 <= n <= 7");
  IwasawaElem e;
  e.p = p;
  e.k = k;
  e.n = n;
  e.c.assign(n, 0);
  e.modulus();  // overflow check in ipow
  return e;
}

IwasawaElem IwasawaElem::constant(u64 p, unsigned k, unsigned n, i64 value) {
  IwasawaElem e = zero(p, k, n);
  u64 mod = e.modulus();
  e.c[0] = (u64)(((value % (i64)mod) + (i64)mod) % (i64)mod);
  return e;
}

IwasawaElem IwasawaElem::group_like(u64 p, unsigned k, unsigned n, u64 j) {
  if (j > 1000000)
    throw std::invalid_argument("group_like: exponent too large for exact binomials");
  IwasawaElem e = zero(p, k, n);
  u64 mod = e.modulus();
  for (unsigned i = 0; i < n; ++i) e.c[i] = binom_mod(j, i, mod);
  return e;
}

u64 IwasawaElem::modulus() const { return ipow(p, k); }

bool IwasawaElem::same_ring(const IwasawaElem& o) const {
  return p == o.p && k == o.k && n == o.n;
}

bool IwasawaElem::is_zero() const {
  for (u64 ci : c)
    if (ci != 0) return false;
  return true;
}

IwasawaElem IwasawaElem::operator+(const IwasawaElem& o) const {
  require_ring(*this, o);
  IwasawaElem out = zero(p, k, n);
  u64 mod = modulus();
  for (unsigned i = 0; i < n; ++i) out.c[i] = addm(c[i], o.c[i], mod);
  return out;
}

IwasawaElem IwasawaElem::operator-(const IwasawaElem& o) const {
  require_ring(*this, o);
  IwasawaElem out = zero(p, k, n);
  u64 mod = modulus();
  for (unsigned i = 0; i < n; ++i) out.c[i] = subm(c[i], o.c[i], mod);
  return out;
}

IwasawaElem IwasawaElem::operator*(const IwasawaElem& o) const {
  require_ring(*this, o);
  IwasawaElem out = zero(p, k, n);
  u64 mod = modulus();
  for (unsigned i = 0; i < n; ++i)
    for (unsigned jj = 0; i + jj < n; ++jj)
      out.c[i + jj] = addm(out.c[i + jj], mulm(c[i], o.c[jj], mod), mod);
  return out;
}

IwasawaElem IwasawaElem::scaled(i64 s) const {
  IwasawaElem out = zero(p, k, n);
  u64 mod = modulus();
  u64 su = (u64)(((s % (i64)mod) + (i64)mod) % (i64)mod);
  for (unsigned i = 0; i < n; ++i) out.c[i] = mulm(c[i], su, mod);
  return out;
}

bool IwasawaElem::operator==(const IwasawaElem& o) const {
  return same_ring(o) && c == o.c;
}

std::string IwasawaElem::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (unsigned i = 0; i < n; ++i) {
    if (c[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0) {
      os << c[i];
    } else {
      if (c[i] != 1) os << c[i] << "*";
      os << "T";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

int ord_I(const IwasawaElem& x) {
  for (unsigned i = 0; i < x.n; ++i)
    if (x.c[i] != 0) return (int)i;
  return (int)x.n;
}

int fitting_ord_I(const std::vector<std::vector<IwasawaElem>>& M) {
  if (M.empty() || M[0].empty())
    throw std::invalid_argument("fitting_ord_I: empty presentation");
  const size_t rows = M.size(), cols = M[0].size();
  for (const auto& row : M) {
    if (row.size() != cols)
      throw std::invalid_argument("fitting_ord_I: ragged matrix");
    for (const auto& e : row) require_ring(e, M[0][0]);
  }
  const unsigned n = M[0][0].n;
  if (rows < cols) return (int)n;  // too few relations: the zero ideal
  if (rows == cols) return ord_I(det(M));

  // more relations than generators: the ideal of maximal minors; its order
  // along I is the minimum over the generating minors
  int best = (int)n;
  std::vector<size_t> pick(cols);
  for (size_t i = 0; i < cols; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<IwasawaElem>> sub;
    for (size_t r : pick) sub.push_back(M[r]);
    best = std::min(best, ord_I(det(sub)));
    // next combination of rows
    size_t i = cols;
    while (i > 0 && pick[i - 1] == rows - cols + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (size_t jj = i; jj < cols; ++jj) pick[jj] = pick[jj - 1] + 1;
  }
  return best;
}

bool KappaClass::certified() const {
  for (bool b : augmentation_zero)
    if (!b) return false;
  for (bool b : corestriction_ok)
    if (!b) return false;
  return !level.empty();
}

KappaClass kappa_from_system(const PointSystem& ps, i64 a_p, int tate_val, unsigned trunc) {
  SystemReport rep = validate_point_system(ps);
  if (!rep.ok)
    throw std::invalid_argument("kappa_from_system: invalid point system: " + rep.message);
  if (a_p != 1 && a_p != -1)
    throw std::domain_error("kappa_from_system: a_p must be +1 or -1 (multiplicative case)");
  if (tate_val < 1)
    throw std::domain_error("kappa_from_system: the Tate parameter has positive valuation");

  KappaClass kc;
  kc.p = ps.p;
  kc.k = (unsigned)ps.k;
  kc.trunc = trunc;
  kc.rank = (u64)ps.rank;
  kc.a_p = a_p;
  kc.multiplier = tate_val;

  const IwasawaElem one = IwasawaElem::constant(ps.p, kc.k, trunc, 1);
  const IwasawaElem t_plus_one = IwasawaElem::group_like(ps.p, kc.k, trunc, 1);

  for (int nn = 1; nn <= ps.depth; ++nn) {
    const u64 h = ps.order(nn);
    // since a_p = ±1, the normalizer a_p^(-nn) is just a_p^nn
    const i64 norm = (a_p == -1 && nn % 2 == 1) ? -1 : 1;
    std::vector<IwasawaElem> comp(ps.rank, IwasawaElem::zero(ps.p, kc.k, trunc));
    IwasawaElem g = one;  // (1+T)^j, advanced incrementally
    for (u64 j = 0; j < h; ++j) {
      const auto& pt = ps.level[nn - 1][(h - j) % h];
      for (int c = 0; c < ps.rank; ++c)
        comp[c] = comp[c] + g.scaled((i64)pt[c]);
      g = g * t_plus_one;
    }
    for (int c = 0; c < ps.rank; ++c) comp[c] = comp[c].scaled(norm);
    bool aug = true;
    for (int c = 0; c < ps.rank; ++c) aug = aug && comp[c].c[0] == 0;
    kc.level.push_back(std::move(comp));
    kc.augmentation_zero.push_back(aug);
  }

  // corestriction: fold the exponents of level nn+1 down mod |G_nn|; the
  // trace condition makes the re-sum land exactly on a_p^(-1) * level nn
  for (int nn = 1; nn < ps.depth; ++nn) {
    const u64 h0 = ps.order(nn);
    const u64 h1 = ps.order(nn + 1);
    const i64 norm = (a_p == -1 && (nn + 1) % 2 == 1) ? -1 : 1;
    std::vector<IwasawaElem> gpow;
    gpow.reserve(h0);
    IwasawaElem g = one;
    for (u64 i = 0; i < h0; ++i) {
      gpow.push_back(g);
      g = g * t_plus_one;
    }
    bool ok = true;
    for (int c = 0; c < ps.rank && ok; ++c) {
      IwasawaElem cores = IwasawaElem::zero(ps.p, kc.k, trunc);
      for (u64 j = 0; j < h1; ++j)
        cores = cores + gpow[j % h0].scaled((i64)ps.level[nn][(h1 - j) % h1][c]);
      cores = cores.scaled(norm);
      // a_p^(-1) = a_p
      ok = ok && (cores == kc.level[nn - 1][c].scaled(a_p));
    }
    kc.corestriction_ok.push_back(ok);
  }
  return kc;
}

std::optional<int> kappa_ord(const KappaClass& kc) {
  if (kc.level.empty()) return std::nullopt;
  int best = (int)kc.trunc;
  for (const auto& comp : kc.level.back()) best = std::min(best, ord_I(comp));
  if (best == (int)kc.trunc) return std::nullopt;
  return best;
}

int rank_bound(int ord_kappa) {
  if (ord_kappa < 0)
    throw std::domain_error("rank_bound: a vanishing class gives no bound");
  return 1 + 2 * ord_kappa;
}

std::vector<SplitCandidate> selmer_split_table(int r_total, int eps, i64 a_p,
                                               int delta_plus, int delta_minus) {
  if (r_total < 0) throw std::domain_error("selmer_split_table: negative total rank");
  if (eps != 1 && eps != -1) throw std::domain_error("selmer_split_table: eps must be +1 or -1");
  if (a_p != 1 && a_p != -1) throw std::domain_error("selmer_split_table: a_p must be +1 or -1");
  if (delta_plus < 0 || delta_plus > 1 || delta_minus < 0 || delta_minus > 1)
    throw std::domain_error("selmer_split_table: deltas are 0 or 1");

  // the eigenspace of sign -a_p * eps carries the forced point
  const bool forced_plus = (-(int)a_p * eps) == 1;
  std::vector<SplitCandidate> out;
  for (int rp = 0; rp <= r_total; ++rp) {
    const int rm = r_total - rp;
    const int par_p = (rp % 2 == 0) ? 1 : -1;
    const int par_m = (rm % 2 == 0) ? 1 : -1;
    if (par_p != eps || par_m != eps) continue;
    if (forced_plus ? rp < 1 : rm < 1) continue;
    SplitCandidate cand;
    cand.r_plus = rp;
    cand.r_minus = rm;
    cand.max_rank_delta = std::max(rp + delta_plus, rm + delta_minus);
    out.push_back(cand);
  }
  return out;
}

RankReport rank_report(const KappaClass& kc, int eps, int delta_plus, int delta_minus) {
  auto ord = kappa_ord(kc);
  if (!ord)
    throw std::domain_error("rank_report: the class vanishes at the deepest level; no bound");
  RankReport rep;
  rep.ord_kappa = *ord;
  rep.char_ord_bound = 2 * *ord;
  rep.rank_bound_value = rank_bound(*ord);
  rep.table = selmer_split_table(2, eps, kc.a_p, delta_plus, delta_minus);
  return rep;
}

BipartiteReport validate_bipartite(const BipartiteData& data) {
  BipartiteReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.failures.push_back(msg);
  };

  std::set<std::vector<u64>> seen;
  const IwasawaElem* ring = nullptr;
  for (const auto& node : data.nodes) {
    const std::string name = product_str(node.m);
    if (!seen.insert(node.m).second) fail("duplicate node at m = " + name);
    for (size_t i = 0; i < node.m.size(); ++i) {
      if (!is_prime(node.m[i])) {
        fail("index " + name + " contains the non-prime " + std::to_string(node.m[i]));
        break;
      }
      if (i > 0 && node.m[i] <= node.m[i - 1]) {
        fail("index " + name + " is not strictly increasing");
        break;
      }
    }
    const bool even = node.m.size() % 2 == 0;
    if (node.indefinite != even)
      fail("parity tag at m = " + name + " contradicts the factor count");
    if (node.indefinite && node.kappa.empty())
      fail("indefinite node m = " + name + " carries no class vector");
    if (!node.indefinite && node.lambda.p == 0)
      fail("definite node m = " + name + " carries no scalar");
    if (const IwasawaElem* probe = ring_probe(node)) {
      if (!ring) ring = probe;
      else if (!ring->same_ring(*probe))
        fail("node m = " + name + " lives in a different truncated ring");
    }
    if (node.indefinite)
      for (const auto& e : node.kappa)
        if (ring && !ring->same_ring(e)) {
          fail("mixed rings inside the class vector at m = " + name);
          break;
        }
  }

  for (const auto& edge : data.edges) {
    const std::string where =
        "(m = " + product_str(edge.m) + ", ell = " + std::to_string(edge.ell) + ")";
    if (!is_prime(edge.ell)) {
      fail("edge " + where + ": ell is not prime");
      continue;
    }
    if (std::find(edge.m.begin(), edge.m.end(), edge.ell) != edge.m.end()) {
      fail("edge " + where + ": ell already divides m");
      continue;
    }
    std::vector<u64> target = edge.m;
    target.push_back(edge.ell);
    std::sort(target.begin(), target.end());
    const BipartiteNode* src = find_node(data, edge.m);
    const BipartiteNode* dst = find_node(data, target);
    if (!src || !dst) {
      fail("edge " + where + ": missing node " + product_str(src ? target : edge.m));
      continue;
    }
    if (src->indefinite == dst->indefinite) {
      fail("edge " + where + ": both endpoints have the same parity tag");
      continue;
    }
    const BipartiteNode* cls = src->indefinite ? src : dst;  // carries kappa
    const BipartiteNode* sca = src->indefinite ? dst : src;  // carries lambda
    if (cls->kappa.empty() || sca->lambda.p == 0) continue;  // reported above
    if (edge.loc.size() != cls->kappa.size()) {
      fail("edge " + where + ": loc has " + std::to_string(edge.loc.size()) +
           " coefficients for a class vector of size " + std::to_string(cls->kappa.size()));
      continue;
    }
    IwasawaElem value = IwasawaElem::zero(cls->kappa[0].p, cls->kappa[0].k, cls->kappa[0].n);
    bool ringok = true;
    for (size_t i = 0; i < edge.loc.size(); ++i) {
      if (!edge.loc[i].same_ring(cls->kappa[i])) {
        fail("edge " + where + ": loc coefficients live in the wrong ring");
        ringok = false;
        break;
      }
      value = value + edge.loc[i] * cls->kappa[i];
    }
    if (!ringok) continue;
    if (!(value == sca->lambda))
      fail("reciprocity fails at " + where + ": loc(kappa_" + product_str(cls->m) +
           ") = " + value.str() + " but lambda_" + product_str(sca->m) + " = " +
           sca->lambda.str());
  }
  return rep;
}

BipartiteReport bipartite_reduction_compatible(const BipartiteData& fine,
                                               const BipartiteData& coarse) {
  BipartiteReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.failures.push_back(msg);
  };

  for (const auto& cnode : coarse.nodes) {
    const std::string name = product_str(cnode.m);
    const BipartiteNode* fnode = find_node(fine, cnode.m);
    if (!fnode) {
      fail("coarse node m = " + name + " has no fine counterpart");
      continue;
    }
    if (cnode.indefinite != fnode->indefinite) {
      fail("parity tags disagree at m = " + name);
      continue;
    }
    const IwasawaElem* cr = ring_probe(cnode);
    const IwasawaElem* fr = ring_probe(*fnode);
    if (!cr || !fr) continue;
    if (cr->p != fr->p || cr->n != fr->n || cr->k > fr->k) {
      fail("ring mismatch at m = " + name + " (coarse precision must divide fine)");
      continue;
    }
    if (cnode.indefinite) {
      if (cnode.kappa.size() != fnode->kappa.size()) {
        fail("class vector sizes disagree at m = " + name);
        continue;
      }
      for (size_t i = 0; i < cnode.kappa.size(); ++i)
        if (!(reduce_precision(fnode->kappa[i], cr->k) == cnode.kappa[i]))
          fail("component " + std::to_string(i) + " of kappa_" + name +
               " is not the reduction of the fine value");
    } else if (!(reduce_precision(fnode->lambda, cr->k) == cnode.lambda)) {
      fail("lambda_" + name + " is not the reduction of the fine value");
    }
  }

  for (const auto& cedge : coarse.edges) {
    const std::string where =
        "(m = " + product_str(cedge.m) + ", ell = " + std::to_string(cedge.ell) + ")";
    const BipartiteEdge* match = nullptr;
    for (const auto& fedge : fine.edges)
      if (fedge.m == cedge.m && fedge.ell == cedge.ell) match = &fedge;
    if (!match) {
      fail("coarse edge " + where + " has no fine counterpart");
      continue;
    }
    if (match->loc.size() != cedge.loc.size()) {
      fail("loc sizes disagree on edge " + where);
      continue;
    }
    for (size_t i = 0; i < cedge.loc.size(); ++i)
      if (!(reduce_precision(match->loc[i], cedge.loc[i].k) == cedge.loc[i]))
        fail("loc coefficient " + std::to_string(i) + " on edge " + where +
             " is not the reduction of the fine value");
  }
  return rep;
}

}  // namespace plectic

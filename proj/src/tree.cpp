#include "plectic/tree.hpp"

#include <algorithm>
#include <deque>

namespace plectic {

namespace {

constexpr int VAL_INF = 1 << 20;
constexpr i64 ENTRY_CAP = (i64)1 << 40;  // act() bound keeping i128 products safe

int val_i128(i128 x, u64 p) {
  if (x == 0) return VAL_INF;
  int v = 0;
  while (x % (i128)p == 0) { x /= (i128)p; ++v; }
  return v;
}

i128 pow_i128(u64 p, int e) {
  i128 r = 1;
  for (int i = 0; i < e; ++i) {
    r *= (i128)p;
    if (r > ((i128)1 << 100)) throw std::overflow_error("tree: p-power out of range");
  }
  return r;
}

// unit part of nonzero x as residue in [0, mod)
u64 unit_mod(i128 x, u64 p, u64 mod) {
  int v = val_i128(x, p);
  i128 ux = x / pow_i128(p, v);
  i128 r = ux % (i128)mod;
  if (r < 0) r += mod;
  return (u64)r;
}

TreeVertex make_vertex(u64 p, int a, i128 j, int m) {
  if (m < 0) throw std::logic_error("make_vertex: negative denominator exponent");
  TreeVertex v;
  v.p = p;
  v.a = a;
  int range = a + m;
  if (range <= 0) { v.bj = 0; v.bm = 0; return v; }
  i128 mod = pow_i128(p, range);
  j %= mod;
  if (j < 0) j += mod;
  while (m > 0 && j % (i128)p == 0) { j /= (i128)p; --m; }
  if (j == 0) m = 0;
  if (j > (i128)INT64_MAX) throw std::overflow_error("make_vertex: parameter out of range");
  v.bj = (i64)j;
  v.bm = m;
  return v;
}

}  // namespace

std::string TreeVertex::str() const {
  std::string s = "(" + std::to_string(a) + ", " + std::to_string(bj);
  if (bm > 0) s += "/" + std::to_string(p) + "^" + std::to_string(bm);
  return s + ")";
}

std::string TreeEdge::str() const { return src.str() + " -> " + dst.str(); }

Mat2 mat_mul(const Mat2& g, const Mat2& h) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      i128 s = (i128)g.m[i][0] * h.m[0][j] + (i128)g.m[i][1] * h.m[1][j];
      if (s > INT64_MAX || s < INT64_MIN) throw std::overflow_error("mat_mul: entry overflow");
      r.m[i][j] = (i64)s;
    }
  return r;
}

Mat2 mat_pow_mod(const Mat2& g, u64 e, u64 p, int prec) {
  u64 mod = ipow(p, (unsigned)prec);
  u64 b[2][2], acc[2][2] = {{1 % mod, 0}, {0, 1 % mod}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) b[i][j] = reduce_signed(g.m[i][j], mod);
  auto mul = [&](u64 x[2][2], u64 y[2][2]) {
    u64 t[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        t[i][j] = addm(mulm(x[i][0], y[0][j], mod), mulm(x[i][1], y[1][j], mod), mod);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) x[i][j] = t[i][j];
  };
  while (e) {
    if (e & 1) mul(acc, b);
    mul(b, b);
    e >>= 1;
  }
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = (i64)acc[i][j];
  return r;
}

int max_padic_prec(u64 p) {
  int k = 0;
  u64 v = 1;
  while (v < ((u64)1 << 62) / p) { v *= p; ++k; }
  return k;
}

TreeVertex standard_vertex(u64 p) { return TreeVertex{p, 0, 0, 0}; }

TreeVertex vertex_from_basis(u64 p, const std::array<std::array<i64, 2>, 2>& num,
                             const std::array<std::array<int, 2>, 2>& denpow) {
  // clear denominators, then normalize the integer matrix
  int dmax = 0;
  for (auto& row : denpow)
    for (int d : row) {
      if (d < 0) throw std::domain_error("vertex_from_basis: negative denominator exponent");
      dmax = std::max(dmax, d);
    }
  i128 M[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) M[i][j] = (i128)num[i][j] * pow_i128(p, dmax - denpow[i][j]);
  i128 det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
  if (det == 0) throw std::domain_error("vertex_from_basis: singular basis");
  int valdet = val_i128(det, p);
  // column with the lower bottom-row valuation becomes the pivot column
  i128 y = M[0][1], d = M[1][1];
  if (val_i128(M[1][0], p) < val_i128(d, p)) { y = M[0][0]; d = M[1][0]; }
  int vd = val_i128(d, p);
  int a = valdet - 2 * vd;
  int beta = val_i128(y, p) - vd;
  if (beta >= a || y == 0) return make_vertex(p, a, 0, 0);
  int m = std::max(0, -beta);
  if (a + m > 38) throw std::overflow_error("vertex_from_basis: parameters out of desk range");
  u64 mu = ipow(p, (unsigned)(a + m));
  u64 uy = unit_mod(y, p, mu), ud = unit_mod(d, p, mu);
  u64 j = mulm(uy, invm(ud, mu), mu);
  j = mulm(j, ipow(p, (unsigned)(beta + m)) % mu, mu);
  return make_vertex(p, a, (i128)j, m);
}

std::vector<TreeVertex> neighbors(const TreeVertex& v) {
  std::vector<TreeVertex> out;
  out.reserve(v.p + 1);
  // children: b + t*p^a at level a+1
  int lcd = std::max({v.bm, -v.a, 0});
  for (u64 t = 0; t < v.p; ++t) {
    i128 num = (i128)v.bj * pow_i128(v.p, lcd - v.bm) + (i128)t * pow_i128(v.p, lcd + v.a);
    out.push_back(make_vertex(v.p, v.a + 1, num, lcd));
  }
  // parent: same b read mod p^(a-1)
  out.push_back(make_vertex(v.p, v.a - 1, (i128)v.bj, v.bm));
  return out;
}

int tree_distance(const TreeVertex& v, const TreeVertex& w) {
  if (v.p != w.p) throw std::domain_error("tree_distance: mixed primes");
  // elementary divisors of the relative basis [[p^aw, bw - bv], [0, p^av]]
  i128 num = (i128)w.bj * pow_i128(v.p, v.bm) - (i128)v.bj * pow_i128(v.p, w.bm);
  int val01 = num == 0 ? VAL_INF : val_i128(num, v.p) - (v.bm + w.bm);
  int minv = std::min({v.a, w.a, val01});
  return (v.a + w.a) - 2 * minv;
}

TreeVertex act(const Mat2& g, const TreeVertex& v) {
  i128 det = g.det();
  if (det == 0) throw std::domain_error("act: singular matrix");
  for (auto& row : g.m)
    for (i64 e : row)
      if (e >= ENTRY_CAP || e <= -ENTRY_CAP)
        throw std::overflow_error("act: matrix entries too large; reduce mod p^k first");
  u64 p = v.p;
  int S = v.bm + std::max(0, -v.a);
  // scaled integer image of g * [[p^a, b],[0,1]]
  i128 A = (i128)g.m[0][0] * pow_i128(p, v.a + S);
  i128 C = (i128)g.m[1][0] * pow_i128(p, v.a + S);
  i128 Y = (i128)g.m[0][0] * v.bj * pow_i128(p, S - v.bm) + (i128)g.m[0][1] * pow_i128(p, S);
  i128 D = (i128)g.m[1][0] * v.bj * pow_i128(p, S - v.bm) + (i128)g.m[1][1] * pow_i128(p, S);
  int valdet = val_i128(det, p) + v.a + 2 * S;
  i128 y = Y, d = D;
  if (val_i128(C, p) < val_i128(D, p)) { y = A; d = C; }
  int vd = val_i128(d, p);
  if (vd >= VAL_INF) throw std::logic_error("act: degenerate bottom row");
  int a = valdet - 2 * vd;
  int beta = (y == 0 ? VAL_INF : val_i128(y, p)) - vd;
  if (y == 0 || beta >= a) return make_vertex(p, a, 0, 0);
  int m = std::max(0, -beta);
  if (a + m > 38) throw std::overflow_error("act: image parameters out of desk range");
  u64 mu = ipow(p, (unsigned)(a + m));
  u64 j = mulm(unit_mod(y, p, mu), invm(unit_mod(d, p, mu), mu), mu);
  j = mulm(j, ipow(p, (unsigned)(beta + m)) % mu, mu);
  return make_vertex(p, a, (i128)j, m);
}

TreeEdge act(const Mat2& g, const TreeEdge& e) {
  TreeEdge img{act(g, e.src), act(g, e.dst)};
  if (tree_distance(img.src, img.dst) != 1)
    throw std::logic_error("act: image of an edge is not an edge");
  return img;
}

std::vector<std::pair<TreeVertex, int>> ball_around(const TreeVertex& center, int radius) {
  std::vector<std::pair<TreeVertex, int>> out;
  std::unordered_map<TreeVertex, int, VertexHash> seen;
  std::deque<TreeVertex> queue{center};
  seen[center] = 0;
  while (!queue.empty()) {
    TreeVertex v = queue.front();
    queue.pop_front();
    int d = seen[v];
    out.push_back({v, d});
    if (d == radius) continue;
    for (const TreeVertex& w : neighbors(v))
      if (seen.emplace(w, d + 1).second) queue.push_back(w);
  }
  return out;
}

// --------------------------------------------------------------------------

TorusData TorusData::standard(u64 p, int prec) {
  u64 u = smallest_nonresidue(p);
  TorusData t{p, prec, u, Mat2{{{0, (i64)u}, {1, 0}}}, 1, standard_vertex(p),
              QuadExtElem::sqrt_u(p, prec, u), QuadExtElem::sqrt_u(p, prec, u).conj()};
  return t;
}

TorusData TorusData::conjugated(u64 p, int prec, const Mat2& g) {
  i128 det = g.det();
  if (det == 0) throw std::domain_error("TorusData: singular conjugator");
  if (det > INT64_MAX || det < INT64_MIN) throw std::overflow_error("TorusData: conjugator too large");
  u64 u = smallest_nonresidue(p);
  Mat2 std_root{{{0, (i64)u}, {1, 0}}};
  Mat2 root = mat_mul(mat_mul(g, std_root), g.adj());
  // strip p-content so the action stays faithful
  while (root.m[0][0] % (i64)p == 0 && root.m[0][1] % (i64)p == 0 && root.m[1][0] % (i64)p == 0 &&
         root.m[1][1] % (i64)p == 0 && (i64)det % (i64)(p * p) == 0) {
    for (auto& row : root.m)
      for (auto& e : row) e /= (i64)p;
    det /= (i64)(p * p);
  }
  QuadExtElem numr = QuadExtElem(PadicElem::from_integer(g.m[0][1], p, prec),
                                 PadicElem::from_integer(g.m[0][0], p, prec), u);
  QuadExtElem denr = QuadExtElem(PadicElem::from_integer(g.m[1][1], p, prec),
                                 PadicElem::from_integer(g.m[1][0], p, prec), u);
  QuadExtElem tau = numr / denr;
  return TorusData{p, prec, u, root, (i64)det, act(g, standard_vertex(p)), tau, tau.conj()};
}

Mat2 TorusData::element(i64 x, i64 y) const {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      i128 e = (i128)y * root.m[i][j] + (i == j ? (i128)x : 0);
      if (e > INT64_MAX || e < INT64_MIN) throw std::overflow_error("TorusData::element overflow");
      r.m[i][j] = (i64)e;
    }
  return r;
}

QuadExtElem TorusData::alpha(i64 x, i64 y) const {
  i128 ys = (i128)y * root_scale;
  if (ys > INT64_MAX || ys < INT64_MIN) throw std::overflow_error("TorusData::alpha overflow");
  return QuadExtElem(PadicElem::from_integer(x, p, prec),
                     PadicElem::from_integer((i64)ys, p, prec), u);
}

TreeVertex torus_fixed_vertex(const TorusData& t) {
  if (!(act(t.root, t.fixed) == t.fixed))
    throw std::logic_error("torus_fixed_vertex: stored vertex is not fixed");
  return t.fixed;
}

std::vector<TreeVertex> sphere(const TorusData& t, int n) {
  if (n < 0) throw std::domain_error("sphere: negative radius");
  std::vector<TreeVertex> out;
  for (const auto& [v, d] : ball_around(t.fixed, n))
    if (d == n) out.push_back(v);
  return out;
}

std::vector<TreeEdge> consecutive_edges(const TorusData& t, int n) {
  if (n < 1) throw std::domain_error("consecutive_edges: need n >= 1");
  std::vector<TreeEdge> out;
  TreeVertex cur = t.fixed;
  TreeVertex prev = cur;
  for (int i = 0; i < n; ++i) {
    std::vector<TreeVertex> nb = neighbors(cur);
    const TreeVertex* best = nullptr;
    for (const TreeVertex& w : nb) {
      if (i > 0 && w == prev) continue;  // no backtracking
      if (!best || w < *best) best = &w;
    }
    out.push_back({cur, *best});
    prev = cur;
    cur = *best;
  }
  return out;
}

TorusGenerator generator_for_depth(const TorusData& t, int n) {
  u64 h = level_order(t.p, n);
  std::vector<u64> divisors;
  for (u64 d = 1; d <= h; ++d)
    if (h % d == 0) divisors.push_back(d);
  TreeVertex vn = consecutive_edges(t, n).back().dst;
  int aprec = 1;
  while (ipow(t.p, (unsigned)(aprec + 1)) < ((u64)1 << 39) && aprec < 36) ++aprec;
  u64 scale_sq = reduce_signed((i64)((i128)t.root_scale * t.root_scale % (i64)t.p), t.p);
  for (i64 y = 1; y <= (i64)t.p + 1; ++y) {
    for (i64 x = 0; x <= (i64)t.p; ++x) {
      // skip classes that are not units: x² − u·scale²·y² ≡ 0 mod p
      u64 nrm = subm(mulm(reduce_signed(x, t.p), reduce_signed(x, t.p), t.p),
                     mulm(t.u % t.p, mulm(scale_sq, mulm(reduce_signed(y, t.p), reduce_signed(y, t.p), t.p), t.p), t.p),
                     t.p);
      if (nrm == 0) continue;
      Mat2 A = t.element(x, y);
      u64 order = 0;
      for (u64 d : divisors) {
        if (act(mat_pow_mod(A, d, t.p, aprec), vn) == vn) { order = d; break; }
      }
      if (order == h) return TorusGenerator{x, y, A};
    }
  }
  throw std::logic_error("generator_for_depth: no generator in the enumeration window");
}

std::vector<TreeEdge> orbit_of_edge(const TorusData& t, const TorusGenerator& g,
                                    const TreeEdge& e, u64 count) {
  int aprec = 1;
  while (ipow(t.p, (unsigned)(aprec + 1)) < ((u64)1 << 39) && aprec < 36) ++aprec;
  u64 mod = ipow(t.p, (unsigned)aprec);
  u64 gm[2][2], cur[2][2] = {{1, 0}, {0, 1}};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) gm[i][k] = reduce_signed(g.mat.m[i][k], mod);
  std::vector<TreeEdge> out;
  out.reserve(count);
  for (u64 j = 0; j < count; ++j) {
    Mat2 c{{{(i64)cur[0][0], (i64)cur[0][1]}, {(i64)cur[1][0], (i64)cur[1][1]}}};
    out.push_back(act(c, e));
    u64 nxt[2][2];
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k)
        nxt[i][k] = addm(mulm(cur[i][0], gm[0][k], mod), mulm(cur[i][1], gm[1][k], mod), mod);
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) cur[i][k] = nxt[i][k];
  }
  return out;
}

// --------------------------------------------------------------------------

GroupRingElem GroupRingElem::operator+(const GroupRingElem& o) const {
  if (h != o.h || mod != o.mod) throw std::domain_error("GroupRingElem: mixed rings");
  GroupRingElem r(h, mod);
  for (u64 j = 0; j < h; ++j) r.c[j] = addm(c[j], o.c[j], mod);
  return r;
}

GroupRingElem GroupRingElem::operator-() const {
  GroupRingElem r(h, mod);
  for (u64 j = 0; j < h; ++j) r.c[j] = c[j] ? mod - c[j] : 0;
  return r;
}

GroupRingElem GroupRingElem::scaled(u64 s) const {
  GroupRingElem r(h, mod);
  for (u64 j = 0; j < h; ++j) r.c[j] = mulm(c[j], s % mod, mod);
  return r;
}

bool GroupRingElem::is_zero() const {
  for (u64 x : c)
    if (x) return false;
  return true;
}

GroupRingElem GroupRingElem::reduced_to(u64 hp) const {
  if (hp == 0 || h % hp != 0) throw std::domain_error("GroupRingElem: not a quotient order");
  GroupRingElem r(hp, mod);
  for (u64 j = 0; j < h; ++j) r.c[j % hp] = addm(r.c[j % hp], c[j], mod);
  return r;
}

namespace {
EdgeFunction<GroupRingElem> orbit_series_impl(const TorusData& t, const TorusGenerator& g, int n,
                                              u64 coeff_mod, bool toward_fixed) {
  u64 h = level_order(t.p, n);
  TreeEdge base = consecutive_edges(t, n).back();
  if (toward_fixed) base = base.reversed();
  std::vector<TreeEdge> orbit = orbit_of_edge(t, g, base, h);
  EdgeFunction<GroupRingElem> f;
  for (u64 j = 0; j < h; ++j) {
    auto it = f.find(orbit[j]);
    GroupRingElem b = GroupRingElem::basis(h, coeff_mod, j);
    if (it == f.end())
      f.emplace(orbit[j], b);
    else
      it->second = it->second + b;
  }
  return f;
}
}  // namespace

EdgeFunction<GroupRingElem> torus_orbit_series(const TorusData& t, const TorusGenerator& g,
                                               int n, u64 coeff_mod) {
  return orbit_series_impl(t, g, n, coeff_mod, true);
}

EdgeFunction<GroupRingElem> torus_orbit_series_outward(const TorusData& t,
                                                       const TorusGenerator& g, int n,
                                                       u64 coeff_mod) {
  return orbit_series_impl(t, g, n, coeff_mod, false);
}

}  // namespace plectic

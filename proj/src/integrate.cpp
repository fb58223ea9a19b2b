#include "plectic/integrate.hpp"

#include <stdexcept>

namespace plectic {

namespace {

u64 xorshift(u64& s) {
  s ^= s << 13;
  s ^= s >> 7;
  s ^= s << 17;
  return s;
}

i128 pow_i128(u64 p, int e) {
  i128 r = 1;
  while (e-- > 0) r *= (i128)p;
  return r;
}

i64 to_i64(i128 x, const char* what) {
  if (x > (i128)INT64_MAX || x < (i128)INT64_MIN)
    throw std::overflow_error(std::string(what) + ": coordinate exceeds 64 bits");
  return (i64)x;
}

}  // namespace

PointSystem PointSystem::make(u64 p, int k, int depth, int rank,
                              std::vector<std::vector<std::vector<u64>>> level) {
  if (!is_prime(p) || p == 2) throw std::domain_error("PointSystem: p must be an odd prime");
  if (k < 1 || depth < 1 || rank < 1) throw std::domain_error("PointSystem: bad shape");
  if ((int)level.size() != depth) throw std::domain_error("PointSystem: one level per depth");
  PointSystem ps{p, k, depth, rank, std::move(level)};
  u64 mod = ps.modulus();
  for (int n = 1; n <= depth; ++n) {
    auto& ln = ps.level[n - 1];
    if (ln.size() != ps.order(n))
      throw std::domain_error("PointSystem: level " + std::to_string(n) + " has wrong order");
    for (auto& entry : ln) {
      if ((int)entry.size() != rank) throw std::domain_error("PointSystem: wrong rank");
      for (u64& x : entry) x %= mod;
    }
  }
  return ps;
}

std::vector<std::vector<u64>> level_trace(const PointSystem& ps, int n) {
  if (n < 1 || n > ps.depth) throw std::domain_error("level_trace: level out of range");
  const auto& top = ps.level[n - 1];
  u64 mod = ps.modulus();
  if (n == 1) {
    std::vector<u64> total(ps.rank, 0);
    for (const auto& entry : top)
      for (int c = 0; c < ps.rank; ++c) total[c] = addm(total[c], entry[c], mod);
    return {total};
  }
  u64 h_prev = ps.order(n - 1);
  std::vector<std::vector<u64>> out(h_prev, std::vector<u64>(ps.rank, 0));
  for (u64 i = 0; i < h_prev; ++i)
    for (u64 m = 0; m < ps.p; ++m)
      for (int c = 0; c < ps.rank; ++c)
        out[i][c] = addm(out[i][c], top[i + m * h_prev][c], mod);
  return out;
}

SystemReport validate_point_system(const PointSystem& ps) {
  for (int n = ps.depth; n >= 2; --n) {
    if (level_trace(ps, n) != ps.level[n - 2])
      return {false, n,
              "level " + std::to_string(n) + " does not trace to level " + std::to_string(n - 1)};
  }
  std::vector<std::vector<u64>> base = level_trace(ps, 1);
  for (u64 x : base[0])
    if (x != 0) return {false, 0, "level 1 does not trace to zero"};
  return {true, 0, "ok"};
}

PointSystem spread_point_system(u64 p, int k, int rank, const std::vector<u64>& seed, int depth,
                                u64 rng_seed) {
  u64 h = level_order(p, depth);
  u64 mod = ipow(p, (unsigned)k);
  size_t total = h * (size_t)rank;
  if (seed.size() > total) throw std::domain_error("spread_point_system: seed longer than level");
  if (seed.size() > total - rank && seed.size() < total)
    throw std::domain_error("spread_point_system: seed must leave the final entry free");

  std::vector<std::vector<u64>> top(h, std::vector<u64>(rank, 0));
  u64 s = rng_seed ? rng_seed : 1;
  for (size_t t = 0; t < total; ++t) {
    u64 v = t < seed.size() ? seed[t] % mod : xorshift(s) % mod;
    top[t / rank][t % rank] = v;
  }
  std::vector<u64> sum(rank, 0);
  for (const auto& entry : top)
    for (int c = 0; c < rank; ++c) sum[c] = addm(sum[c], entry[c], mod);
  if (seed.size() == total) {
    for (u64 x : sum)
      if (x != 0) throw std::domain_error("spread_point_system: pinned seed has nonzero trace");
  } else {
    // absorb the running total into the final entry
    for (int c = 0; c < rank; ++c) {
      u64 rest = subm(sum[c], top[h - 1][c], mod);
      top[h - 1][c] = subm(0, rest, mod);
    }
  }

  std::vector<std::vector<std::vector<u64>>> levels(depth);
  levels[depth - 1] = std::move(top);
  PointSystem scratch{p, k, depth, rank, {}};
  for (int n = depth; n >= 2; --n) {
    scratch.level.assign(n, {});
    scratch.level[n - 1] = levels[n - 1];
    scratch.depth = n;
    levels[n - 2] = level_trace(scratch, n);
  }
  return PointSystem::make(p, k, depth, rank, std::move(levels));
}

// --------------------------------------------------------------------------
// Boundary functions

NormOneElem f_psi(const TorusData& t, i128 a, i128 b) {
  // strip common p-powers so the numerator keeps a visible leading digit
  while (a != 0 && b != 0 && a % (i128)t.p == 0 && b % (i128)t.p == 0) {
    a /= (i128)t.p;
    b /= (i128)t.p;
  }
  if (a == 0 && b == 0) throw std::domain_error("f_psi: (0 : 0) is not a point");
  PadicElem pa = PadicElem::from_integer(to_i64(a, "f_psi"), t.p, t.prec);
  PadicElem pb = PadicElem::from_integer(to_i64(b, "f_psi"), t.p, t.prec);
  QuadExtElem num = QuadExtElem::from_base(pa, t.u) - t.tau * QuadExtElem::from_base(pb, t.u);
  // a, b are rational, so conj(a − τb) = a − τ̄b and the quotient by the
  // conjugate is exactly (t − τ)/(t − τ̄)
  return NormOneElem::project(num);
}

NormOneElem mobius_A_psi(const TorusData& t, i128 a, i128 b) { return f_psi(t, a, b); }

std::pair<i128, i128> center_sample(const BoundaryBall& b) {
  if (!b.exterior) return {(i128)b.cj, pow_i128(b.p, b.cm)};
  // a canonical point just outside B(c, m): c + p^(m−1)
  int e = std::max(b.cm, 1 - b.m);
  return {(i128)b.cj * pow_i128(b.p, e - b.cm) + pow_i128(b.p, e + b.m - 1), pow_i128(b.p, e)};
}

std::pair<i128, i128> spread_sample(const BoundaryBall& b) {
  if (!b.exterior) {
    // one step deeper inside: c + p^(m+1)
    int e = std::max(b.cm, -b.m - 1);
    return {(i128)b.cj * pow_i128(b.p, e - b.cm) + pow_i128(b.p, e + b.m + 1), pow_i128(b.p, e)};
  }
  int e = std::max(b.cm, 2 - b.m);
  return {(i128)b.cj * pow_i128(b.p, e - b.cm) + pow_i128(b.p, e + b.m - 2), pow_i128(b.p, e)};
}

std::vector<HarmonicMeasure> measure_from_system(const TorusData& t, const PointSystem& ps) {
  if (t.p != ps.p) throw std::domain_error("measure_from_system: prime mismatch");
  SystemReport rep = validate_point_system(ps);
  if (!rep.ok) throw std::domain_error("measure_from_system: " + rep.message);
  u64 mod = ps.modulus();
  u64 h = ps.order(ps.depth);
  std::vector<HarmonicMeasure> out;
  for (int c = 0; c < ps.rank; ++c) {
    std::vector<ZkCoeff> vals;
    vals.reserve(h);
    for (u64 j = 0; j < h; ++j) vals.emplace_back(mod, ps.level[ps.depth - 1][j][c]);
    out.push_back(HarmonicMeasure::from_sphere_values(t, ps.depth, vals));
  }
  return out;
}

std::vector<NormOneElem> integrate_mult(const TorusData& t,
                                        const std::vector<HarmonicMeasure>& mu,
                                        const BoundaryFn& f, int m, const BallSampler& sampler) {
  if (mu.empty()) throw std::domain_error("integrate_mult: no measure components");
  int n = mu[0].radius();
  for (const auto& comp : mu)
    if (comp.radius() != n) throw std::domain_error("integrate_mult: mixed measure radii");
  TorusGenerator g = generator_for_depth(t, n);
  TreeEdge deep = consecutive_edges(t, n).back();
  std::vector<TreeEdge> orbit = orbit_of_edge(t, g, deep, level_order(t.p, n));

  // exponents are classes mod p^k, so the raw product is defined up to
  // p^k-th powers; read off k to bound the meaningful precision
  u64 coeff_mod = mu[0](orbit[0]).mod;
  int k = 0;
  for (u64 mm = coeff_mod; mm > 1; mm /= t.p) ++k;
  if (m > k + 1)
    throw std::domain_error("integrate_mult: target precision exceeds the p^(k+1) resolution");

  std::vector<NormOneElem> acc(mu.size(), NormOneElem::identity(t.p, t.prec, t.u));
  for (const TreeEdge& e : orbit) {
    auto [a, b] = sampler(ball_of_edge(e));
    NormOneElem y = f(t, a, b);
    for (size_t c = 0; c < mu.size(); ++c) acc[c] = acc[c] * y.pow(mu[c](e).v);
  }
  // canonicalize: p^k-th powers are exactly the classes that vanish on the
  // pro-p representative mod p^(k+1), so projecting makes the value of the
  // class unambiguous there
  for (auto& v : acc) {
    v = v.pro_p_part();
    if (v.value().re().precision() < m)
      throw precision_error("integrate_mult: precision fell below the target");
  }
  return acc;
}

bool integration_stabilized(const TorusData& t, const std::vector<HarmonicMeasure>& mu,
                            const BoundaryFn& f, int m) {
  int n = mu[0].radius();
  if (n < 2) throw std::domain_error("integration_stabilized: need measure radius >= 2");
  // rebuild the measures one level shallower from the propagated interior
  // values, then compare the two Riemann products
  TorusGenerator g = generator_for_depth(t, n - 1);
  TreeEdge e_prev = consecutive_edges(t, n - 1).back();
  u64 h_prev = level_order(t.p, n - 1);
  std::vector<TreeEdge> orbit = orbit_of_edge(t, g, e_prev, h_prev);
  std::vector<HarmonicMeasure> shallow;
  for (const auto& comp : mu) {
    std::vector<ZkCoeff> vals;
    vals.reserve(h_prev);
    for (const TreeEdge& e : orbit) vals.push_back(comp(e));
    shallow.push_back(HarmonicMeasure::from_sphere_values(t, n - 1, vals));
  }
  std::vector<NormOneElem> fine = integrate_mult(t, mu, f, m);
  std::vector<NormOneElem> coarse = integrate_mult(t, shallow, f, m);
  for (size_t c = 0; c < mu.size(); ++c)
    if (!fine[c].congruent(coarse[c], m)) return false;
  return true;
}

// --------------------------------------------------------------------------
// Coset dictionary

NormOneElem generator_image(const TorusData& t, const TorusGenerator& g) {
  return NormOneElem::project(t.alpha(g.x, g.y));
}

std::optional<u64> coset_exponent(const NormOneElem& lambda, const NormOneElem& y, int n,
                                  u64 cosets) {
  NormOneElem cur = NormOneElem::identity(y.prime(), y.value().re().precision(),
                                          y.value().param_u());
  NormOneElem target = y.inverse();
  for (u64 e = 0; e < cosets; ++e) {
    if ((cur * target).is_principal_unit(n)) return e;
    cur = cur * lambda;
  }
  return std::nullopt;
}

// --------------------------------------------------------------------------
// Kolyvagin derivatives

std::vector<std::vector<u64>> kolyvagin_derivative(const PointSystem& ps, int n) {
  if (n < 1 || n > ps.depth) throw std::domain_error("kolyvagin_derivative: level out of range");
  u64 h = ps.order(n);
  u64 mod = ps.modulus();
  const auto& P = ps.level[n - 1];
  std::vector<std::vector<u64>> D(h, std::vector<u64>(ps.rank, 0));
  for (u64 i = 0; i < h; ++i)
    for (u64 j = 0; j < h; ++j) {
      u64 coord = j % mod;  // exponent lifted from [0, h)
      const auto& src = P[(i + h - j) % h];
      for (int c = 0; c < ps.rank; ++c)
        D[i][c] = addm(D[i][c], mulm(coord, src[c], mod), mod);
    }
  return D;
}

std::vector<u64> derivative_via_integration(const TorusData& t, const PointSystem& ps, int n) {
  if (t.p != ps.p) throw std::domain_error("derivative_via_integration: prime mismatch");
  if (n < 1 || n > ps.depth)
    throw std::domain_error("derivative_via_integration: level out of range");
  if (t.prec <= n + 1)
    throw std::domain_error("derivative_via_integration: torus precision too low for this depth");
  SystemReport rep = validate_point_system(ps);
  if (!rep.ok) throw std::domain_error("derivative_via_integration: " + rep.message);

  u64 h = ps.order(n);
  u64 mod = ps.modulus();
  TorusGenerator g = generator_for_depth(t, n);
  NormOneElem lambda = generator_image(t, g);
  TreeEdge deep = consecutive_edges(t, n).back();
  std::vector<TreeEdge> orbit = orbit_of_edge(t, g, deep, h);

  std::vector<u64> value(ps.rank, 0);
  for (u64 j = 0; j < h; ++j) {
    auto [a, b] = center_sample(ball_of_edge(orbit[j]));
    NormOneElem y = f_psi(t, a, b);
    std::optional<u64> e = coset_exponent(lambda, y, n, h);
    if (!e) throw std::domain_error("derivative_via_integration: sample point misses all cosets");
    for (int c = 0; c < ps.rank; ++c)
      value[c] = addm(value[c], mulm(*e % mod, ps.level[n - 1][j][c], mod), mod);
  }
  return value;
}

DerivedInvariant mock_invariant(const PointSystem& ps, int a_p, int epsilon, int q_multiplier) {
  if (a_p != 1 && a_p != -1) throw std::domain_error("mock_invariant: a_p must be ±1");
  if (epsilon != 1 && epsilon != -1) throw std::domain_error("mock_invariant: epsilon must be ±1");
  SystemReport rep = validate_point_system(ps);
  if (!rep.ok) throw std::domain_error("mock_invariant: " + rep.message);

  DerivedInvariant inv;
  inv.p = ps.p;
  inv.k = ps.k;
  inv.rank = ps.rank;
  inv.sign = -a_p * epsilon;
  inv.q_multiplier = q_multiplier;
  u64 mod = ps.modulus();
  for (int n = 1; n <= ps.depth; ++n) {
    auto D = kolyvagin_derivative(ps, n);
    std::vector<u64> rung = D[0];
    if (a_p == -1 && n % 2 == 1)  // scale level n by a_p^(−n)
      for (u64& x : rung) x = subm(0, x, mod);
    inv.derivative.push_back(std::move(D));
    inv.ladder.push_back(std::move(rung));
  }
  int s = ps.depth;
  while (s >= 2 && inv.ladder[s - 2] == inv.ladder[ps.depth - 1]) --s;
  inv.stable_level = s;
  inv.stabilized = s < ps.depth;
  inv.value = inv.ladder[s - 1];
  return inv;
}

}  // namespace plectic

#include "plectic/curve.hpp"

#include <cmath>
#include <sstream>

namespace plectic {

namespace {

i128 abs128(i128 x) { return x < 0 ? -x : x; }

int val128(i128 x, u64 p) {
  if (x == 0) throw std::domain_error("val128: zero");
  int v = 0;
  i128 ax = abs128(x);
  while (ax % (i128)p == 0) { ax /= (i128)p; ++v; }
  return v;
}

bool divides128(u64 d, i128 x) { return x % (i128)d == 0; }

// Split/nonsplit sign at an odd multiplicative prime: +1 when the tangent
// directions at the node are rational, i.e. -c6 is a square mod ell.
i64 mult_sign(const CurveModel& E, u64 ell) {
  u64 r = (u64)(((-E.c6) % (i128)ell + (i128)ell) % (i128)ell);
  return kronecker((i64)r, (i64)ell) == 1 ? 1 : -1;
}

}  // namespace

CurveModel CurveModel::make(std::string label, i64 a1, i64 a2, i64 a3, i64 a4,
                            i64 a6, u64 N) {
  CurveModel E;
  E.label = std::move(label);
  E.a1 = a1; E.a2 = a2; E.a3 = a3; E.a4 = a4; E.a6 = a6;
  E.N = N;

  i128 A1 = a1, A2 = a2, A3 = a3, A4 = a4, A6 = a6;
  i128 B2 = A1 * A1 + 4 * A2;
  i128 B4 = 2 * A4 + A1 * A3;
  i128 B6 = A3 * A3 + 4 * A6;
  E.b8 = A1 * A1 * A6 + 4 * A2 * A6 - A1 * A3 * A4 + A2 * A3 * A3 - A4 * A4;
  E.c4 = B2 * B2 - 24 * B4;
  E.c6 = -B2 * B2 * B2 + 36 * B2 * B4 - 216 * B6;
  E.disc = -B2 * B2 * E.b8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;

  const i128 budget = (i128)1000000000000LL;  // 10^12: keeps factorization cheap
  if (abs128(B2) > budget || abs128(E.c6) > budget || abs128(E.disc) > budget)
    throw std::overflow_error("CurveModel: invariants exceed the desk-scale budget");
  E.b2 = (i64)B2; E.b4 = (i64)B4; E.b6 = (i64)B6;

  if (E.disc == 0) throw std::domain_error("CurveModel: singular equation (disc = 0)");
  if (N == 0) throw std::domain_error("CurveModel: conductor must be positive");

  // conductor versus model, odd primes only
  for (const auto& [ell, e] : factorize(N)) {
    if (ell == 2) continue;
    if (!divides128(ell, E.disc))
      throw std::domain_error("CurveModel: conductor prime " + std::to_string(ell) +
                              " does not divide the discriminant");
    bool c4div = divides128(ell, E.c4);
    if (e == 1 && c4div)
      throw std::domain_error("CurveModel: reduction at " + std::to_string(ell) +
                              " is additive but the conductor says multiplicative");
    if (e >= 2 && !c4div)
      throw std::domain_error("CurveModel: reduction at " + std::to_string(ell) +
                              " is multiplicative but the conductor says additive");
    // odd minimality: a twelfth power of ell cannot be scaled out
    i128 L = (i128)ell;
    if (E.c4 % (L * L * L * L) == 0 && E.c6 % (L * L * L * L * L * L) == 0)
      throw std::domain_error("CurveModel: not minimal at " + std::to_string(ell));
  }

  // every odd discriminant prime must show up in the conductor
  u64 odd_disc = (u64)abs128(E.disc);
  while (odd_disc % 2 == 0) odd_disc /= 2;
  for (const auto& [q, e] : factorize(odd_disc)) {
    (void)e;
    if (N % q != 0)
      throw std::domain_error("CurveModel: discriminant prime " + std::to_string(q) +
                              " is missing from the conductor");
  }

  return E;
}

std::string CurveModel::str() const {
  std::ostringstream os;
  os << label << " [" << a1 << "," << a2 << "," << a3 << "," << a4 << "," << a6
     << "] " << N;
  return os.str();
}

const char* reduction_type_name(ReductionType t) {
  switch (t) {
    case ReductionType::good: return "good";
    case ReductionType::split_mult: return "split";
    case ReductionType::nonsplit_mult: return "nonsplit";
    case ReductionType::additive: return "additive";
  }
  return "?";
}

i64 ap_count(const CurveModel& E, u64 ell) {
  if (!is_prime(ell)) throw std::domain_error("ap_count: " + std::to_string(ell) + " is not prime");
  if (E.N % ell == 0) throw std::domain_error("ap_count: bad reduction at " + std::to_string(ell));
  if (ell > 1000000) throw std::domain_error("ap_count: prime exceeds the enumeration cap");

  if (ell == 2) {
    // four affine candidates plus the point at infinity
    int count = 1;
    for (i64 x = 0; x < 2; ++x)
      for (i64 y = 0; y < 2; ++y) {
        i64 lhs = y * y + E.a1 * x * y + E.a3 * y;
        i64 rhs = x * x * x + E.a2 * x * x + E.a4 * x + E.a6;
        if (((lhs - rhs) % 2 + 2) % 2 == 0) ++count;
      }
    return 3 - count;
  }

  // #E(F_ell) = ell + 1 + sum_x chi(4x^3 + b2 x^2 + 2 b4 x + b6), so the
  // trace is minus the character sum.
  u64 b2 = reduce_signed(E.b2, ell), b4 = reduce_signed(E.b4, ell), b6 = reduce_signed(E.b6, ell);
  i64 sum = 0;
  for (u64 x = 0; x < ell; ++x) {
    u64 d = addm(mulm(addm(mulm(addm(mulm(4, x, ell), b2, ell), x, ell), mulm(2, b4, ell), ell), x, ell), b6, ell);
    sum += kronecker((i64)d, (i64)ell);
  }
  return -sum;
}

ReductionInfo reduction_type(const CurveModel& E, u64 p) {
  if (p < 5 || !is_prime(p))
    throw std::domain_error("reduction_type: need a prime p >= 5");
  ReductionInfo info;
  info.prime = p;
  if (!divides128(p, E.disc)) {
    info.type = ReductionType::good;
    info.a_p = ap_count(E, p);
    return info;
  }
  if (divides128(p, E.c4)) {
    info.type = ReductionType::additive;
    return info;
  }
  info.tate_val = val128(E.disc, p);
  info.a_p = mult_sign(E, p);
  info.type = info.a_p == 1 ? ReductionType::split_mult : ReductionType::nonsplit_mult;
  return info;
}

i64 a_ell(const CurveModel& E, u64 ell) {
  if (E.N % ell != 0) return ap_count(E, ell);
  u64 m = E.N;
  int e = 0;
  while (m % ell == 0) { m /= ell; ++e; }
  if (e >= 2) return 0;  // additive
  if (ell == 2)
    throw std::domain_error("a_ell: multiplicative reduction at 2 is unsupported");
  return mult_sign(E, ell);
}

std::vector<i64> an_table(const CurveModel& E, u64 count) {
  std::vector<i64> a(count + 1, 0);
  if (count == 0) return a;
  a[1] = 1;
  // smallest prime factor sieve
  std::vector<u64> spf(count + 1, 0);
  for (u64 i = 2; i <= count; ++i)
    if (spf[i] == 0)
      for (u64 j = i; j <= count; j += i)
        if (spf[j] == 0) spf[j] = i;
  for (u64 n = 2; n <= count; ++n) {
    u64 p = spf[n], q = p, r = n / p;
    while (r % p == 0) { q *= p; r /= p; }
    if (r > 1) { a[n] = a[q] * a[r]; continue; }
    // n = p^e
    if (q == p) { a[n] = a_ell(E, p); continue; }
    if (E.N % p == 0) a[n] = a[p] * a[n / p];
    else a[n] = a[p] * a[n / p] - (i64)p * a[n / (p * p)];
  }
  return a;
}

CurveModel quadratic_twist(const CurveModel& E, i64 D) {
  if (!is_fundamental_discriminant(D))
    throw std::domain_error("quadratic_twist: discriminant is not fundamental");
  if (D == 1) return E;
  u64 aD = D < 0 ? (u64)(-D) : (u64)D;
  if (gcd_u64(aD, E.N) != 1)
    throw std::domain_error("quadratic_twist: discriminant shares a prime with the conductor");

  i128 c4t = E.c4 * (i128)D * (i128)D;
  i128 c6t = E.c6 * (i128)D * (i128)D * (i128)D;

  // Reconstruct an integral model with invariants (c4t, c6t): b2 is
  // determined mod 12, so scan a window and divide out.
  for (i64 b2 = -12; b2 <= 12; ++b2) {
    i128 num4 = (i128)b2 * b2 - c4t;
    if (num4 % 24 != 0) continue;
    i128 b4 = num4 / 24;
    i128 num6 = -(i128)b2 * b2 * b2 + 36 * (i128)b2 * b4 - c6t;
    if (num6 % 216 != 0) continue;
    i128 b6 = num6 / 216;
    for (i64 a1 = 0; a1 <= 1; ++a1)
      for (i64 a3 = 0; a3 <= 1; ++a3) {
        if (((b2 - a1) % 4 + 4) % 4 != 0) continue;
        if (((b4 - a1 * a3) % 2 + 2) % 2 != 0) continue;
        if (((b6 - a3) % 4 + 4) % 4 != 0) continue;
        i64 a2 = (b2 - a1) / 4;
        i64 a4v = (i64)((b4 - a1 * a3) / 2);
        i64 a6v = (i64)((b6 - a3) / 4);
        u64 Nt = E.N * aD * aD;
        CurveModel T = CurveModel::make(E.label + "_tw" + std::to_string(D), a1,
                                        a2, a3, a4v, a6v, Nt);
        if (T.c4 == c4t && T.c6 == c6t) return T;
      }
  }
  throw std::domain_error("quadratic_twist: no integral model realizes the scaled invariants");
}

int root_number(const CurveModel& E) {
  auto fac = factorize(E.N);
  for (const auto& [ell, e] : fac) {
    if (e > 1) throw std::domain_error("root_number: conductor is not squarefree");
    if (ell == 2) throw std::domain_error("root_number: multiplicative reduction at 2 is unsupported");
  }
  int eps = -1;
  for (const auto& [ell, e] : fac) {
    (void)e;
    // split reduction contributes w = -1, nonsplit w = +1
    eps *= (mult_sign(E, ell) == 1) ? -1 : 1;
  }
  return eps;
}

int twisted_root_number(const CurveModel& E, i64 D) {
  if (!is_fundamental_discriminant(D))
    throw std::domain_error("twisted_root_number: discriminant is not fundamental");
  u64 aD = D < 0 ? (u64)(-D) : (u64)D;
  if (D != 1 && gcd_u64(aD, E.N) != 1)
    throw std::domain_error("twisted_root_number: discriminant shares a prime with the conductor");
  return kronecker(D, -(i64)E.N) * root_number(E);
}

int root_number_over_K(const CurveModel& E, i64 D) {
  if (D >= 0) throw std::domain_error("root_number_over_K: need an imaginary field");
  return root_number(E) * twisted_root_number(E, D);
}

int delta_p(const CurveModel& E, u64 p) {
  ReductionInfo info = reduction_type(E, p);
  if (info.type != ReductionType::split_mult && info.type != ReductionType::nonsplit_mult)
    throw std::domain_error("delta_p: reduction at " + std::to_string(p) + " is not multiplicative");
  return info.a_p == 1 ? 1 : 0;
}

bool mod_p_ramified_at(const CurveModel& E, u64 ell, u64 p) {
  if (!is_prime(p) || p == 2) throw std::domain_error("mod_p_ramified_at: p must be an odd prime");
  if (ell == p) throw std::domain_error("mod_p_ramified_at: ell and p must differ");
  if (ell == 2 || E.N % ell != 0 || (E.N / ell) % ell == 0)
    throw std::domain_error("mod_p_ramified_at: need odd multiplicative ell");
  return val128(E.disc, ell) % (int)p != 0;
}

LValueResult l_value_with_sign(const CurveModel& E, int sign, double tolerance) {
  if (sign != 1 && sign != -1) throw std::domain_error("l_value: sign must be +1 or -1");
  if (!(tolerance > 0)) throw std::domain_error("l_value: tolerance must be positive");

  LValueResult res;
  res.sign = sign;
  if (sign == -1) {
    res.forced_zero = true;
    return res;
  }

  const long double pi = 3.14159265358979323846L;
  long double c = 2.0L * pi / std::sqrt((long double)E.N);
  // |a_n| <= d(n) sqrt(n) <= 2n, so the dropped part of (1+sign) * sum is
  // at most 4 exp(-c(M+1)) / (1 - exp(-c)).
  long double emc = std::exp(-c);
  const u64 cap = 1000000;
  u64 M = 1;
  while (M <= cap) {
    long double tail = 4.0L * std::exp(-c * (long double)(M + 1)) / (1.0L - emc);
    if (tail < (long double)tolerance) break;
    ++M;
  }
  if (M > cap)
    throw std::domain_error("l_value: tolerance unreachable within the term cap");

  std::vector<i64> a = an_table(E, M);
  long double sum = 0.0L;
  for (u64 n = M; n >= 1; --n)
    sum += (long double)a[n] / (long double)n * std::exp(-c * (long double)n);
  res.value = (double)(2.0L * sum);
  res.tail = (double)(4.0L * std::exp(-c * (long double)(M + 1)) / (1.0L - emc));
  res.terms = M;
  return res;
}

LValueResult l_value(const CurveModel& E, double tolerance) {
  return l_value_with_sign(E, root_number(E), tolerance);
}

}  // namespace plectic

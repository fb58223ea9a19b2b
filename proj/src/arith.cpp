#include "plectic/arith.hpp"

namespace plectic {

u64 ipow(u64 p, unsigned e) {
  u64 r = 1;
  const u64 cap = (u64)1 << 62;
  for (unsigned i = 0; i < e; ++i) {
    if (r > cap / p) throw std::overflow_error("ipow: p^e exceeds the 62-bit modulus budget");
    r *= p;
  }
  return r;
}

u64 powm(u64 a, u128 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulm(r, a, m);
    a = mulm(a, a, m);
    e >>= 1;
  }
  return r;
}

u64 invm(u64 a, u64 m) {
  // extended Euclid on signed 128-bit accumulators
  i128 t = 0, nt = 1, r = (i128)m, nr = (i128)(a % m);
  while (nr != 0) {
    i128 q = r / nr;
    t -= q * nt; std::swap(t, nt);
    r -= q * nr; std::swap(r, nr);
  }
  if (r != 1) throw std::domain_error("invm: argument not invertible");
  if (t < 0) t += m;
  return (u64)t;
}

std::pair<int, u64> val_unit(i64 x, u64 p) {
  if (x == 0) throw std::domain_error("val_unit: zero has no finite valuation");
  int v = 0;
  u64 ax = x < 0 ? (u64)(-(x + 1)) + 1 : (u64)x;  // |x| without overflow at INT64_MIN
  while (ax % p == 0) { ax /= p; ++v; }
  return {v, ax};
}

int valuation(i64 x, u64 p) { return val_unit(x, p).first; }

int kronecker(i64 a, i64 n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int sign = 1;
  if (n < 0) {
    if (a < 0) sign = -sign;
    n = -n;
  }
  // factor out 2s of n
  int e2 = 0;
  while (n % 2 == 0) { n /= 2; ++e2; }
  if (e2 > 0) {
    if (a % 2 == 0) return 0;
    i64 am8 = ((a % 8) + 8) % 8;
    int k2 = (am8 == 1 || am8 == 7) ? 1 : -1;  // (a|2) for odd a
    if (e2 % 2 == 1) sign *= k2;
  }
  // Jacobi (a|n), n odd positive
  a %= n; if (a < 0) a += n;
  int result = sign;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      i64 nm8 = n % 8;
      if (nm8 == 3 || nm8 == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  // deterministic Miller-Rabin for 64-bit inputs
  u64 d = n - 1;
  int s = 0;
  while (d % 2 == 0) { d /= 2; ++s; }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powm(a % n, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulm(x, x, n);
      if (x == n - 1) { composite = false; break; }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<u64> primes_up_to(u64 bound) {
  std::vector<u64> out;
  if (bound < 2) return out;
  std::vector<bool> sieve(bound + 1, true);
  for (u64 i = 2; i <= bound; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= bound; j += i) sieve[j] = false;
  }
  return out;
}

std::vector<std::pair<u64, int>> factorize(u64 n) {
  if (n == 0) throw std::domain_error("factorize: zero");
  std::vector<std::pair<u64, int>> out;
  for (u64 q = 2; (u128)q * q <= n; q += (q == 2 ? 1 : 2)) {
    if (n % q) continue;
    int e = 0;
    while (n % q == 0) { n /= q; ++e; }
    out.push_back({q, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

u64 smallest_nonresidue(u64 p) {
  if (p < 3 || !is_prime(p)) throw std::domain_error("smallest_nonresidue: need an odd prime");
  for (u64 u = 2; u < p; ++u)
    if (kronecker((i64)u, (i64)p) == -1) return u;
  throw std::logic_error("smallest_nonresidue: unreachable for odd p");
}

u64 gcd_u64(u64 a, u64 b) {
  while (b) { a %= b; std::swap(a, b); }
  return a;
}

bool is_fundamental_discriminant(i64 D) {
  if (D == 1) return true;
  if (D == 0) return false;
  auto squarefree = [](u64 n) {
    for (const auto& [q, e] : factorize(n))
      if (e > 1) return false;
    return true;
  };
  u64 aD = D < 0 ? (u64)(-D) : (u64)D;
  i64 r4 = ((D % 4) + 4) % 4;
  if (r4 == 1) return squarefree(aD);
  if (r4 != 0) return false;
  i64 m = D / 4;
  i64 m4 = ((m % 4) + 4) % 4;
  if (m4 != 2 && m4 != 3) return false;
  u64 am = m < 0 ? (u64)(-m) : (u64)m;
  return squarefree(am);
}

std::string int128_str(i128 x) {
  if (x == 0) return "0";
  bool neg = x < 0;
  u128 ax = neg ? (u128)(-(x + 1)) + 1 : (u128)x;
  std::string s;
  while (ax) {
    s.push_back((char)('0' + (int)(ax % 10)));
    ax /= 10;
  }
  if (neg) s.push_back('-');
  return std::string(s.rbegin(), s.rend());
}

}  // namespace plectic

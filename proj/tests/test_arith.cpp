#include "doctest.h"
#include "plectic/arith.hpp"

#include <set>

using namespace plectic;

namespace {
// deterministic xorshift so failures reproduce
u64 rng_next(u64& s) {
  s ^= s << 13;
  s ^= s >> 7;
  s ^= s << 17;
  return s;
}
}  // namespace

TEST_CASE("modular helpers agree with 128-bit reference arithmetic") {
  u64 s = 0x9e3779b97f4a7c15ull;
  for (int i = 0; i < 2000; ++i) {
    u64 m = rng_next(s) % (((u64)1 << 62) - 2) + 2;
    u64 a = rng_next(s) % m, b = rng_next(s) % m;
    CHECK(addm(a, b, m) == (u64)(((u128)a + b) % m));
    CHECK(subm(a, b, m) == (u64)(((u128)a + m - b) % m));
    CHECK(mulm(a, b, m) == (u64)((u128)a * b % m));
  }
}

TEST_CASE("powm matches repeated multiplication") {
  u64 s = 42;
  for (int i = 0; i < 200; ++i) {
    u64 m = rng_next(s) % 1000000 + 2;
    u64 a = rng_next(s) % m;
    u64 e = rng_next(s) % 40;
    u64 ref = 1 % m;
    for (u64 k = 0; k < e; ++k) ref = mulm(ref, a, m);
    CHECK(powm(a, e, m) == ref);
  }
  CHECK(powm(0, 0, 7) == 1);  // empty product convention
}

TEST_CASE("invm produces inverses and rejects non-units") {
  u64 s = 7;
  int done = 0;
  while (done < 500) {
    u64 m = rng_next(s) % ((u64)1 << 50) + 2;
    u64 a = rng_next(s) % m;
    if (a == 0 || gcd_u64(a, m) != 1) continue;
    CHECK(mulm(a, invm(a, m), m) == 1 % m);
    ++done;
  }
  CHECK_THROWS_AS(invm(6, 9), std::domain_error);
  CHECK_THROWS_AS(invm(0, 5), std::domain_error);
}

TEST_CASE("ipow guards the modulus budget") {
  CHECK(ipow(3, 0) == 1);
  CHECK(ipow(5, 4) == 625);
  CHECK(ipow(2, 62) == (u64)1 << 62);
  CHECK_THROWS_AS(ipow(2, 64), std::overflow_error);
  CHECK_THROWS_AS(ipow(10, 19), std::overflow_error);
}

TEST_CASE("val_unit reconstructs its input") {
  u64 s = 99;
  for (u64 p : {3ull, 5ull, 7ull, 13ull}) {
    for (int i = 0; i < 300; ++i) {
      i64 x = (i64)(rng_next(s) % 2000000) - 1000000;
      if (x == 0) continue;
      auto [v, u] = val_unit(x, p);
      CHECK(u % p != 0);
      i64 rec = (i64)u;
      for (int k = 0; k < v; ++k) rec *= (i64)p;
      CHECK(rec == (x < 0 ? -x : x));
    }
  }
  CHECK(val_unit(INT64_MIN, 3).first == 0);  // |INT64_MIN| must not overflow
  CHECK_THROWS_AS(val_unit(0, 3), std::domain_error);
}

TEST_CASE("kronecker matches the Euler character at odd prime moduli") {
  for (i64 p : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61}) {
    for (i64 a = -2 * p; a <= 2 * p; ++a) {
      int expect;
      i64 r = ((a % p) + p) % p;
      if (r == 0)
        expect = 0;
      else
        expect = powm((u64)r, (u64)((p - 1) / 2), (u64)p) == 1 ? 1 : -1;
      CHECK(kronecker(a, p) == expect);
    }
  }
}

TEST_CASE("kronecker at 2, -1 and 0 follows the standard conventions") {
  // (a|2) by residue of a mod 8
  for (i64 a : {1, 7, 9, 15, -1, -7}) CHECK(kronecker(a, 2) == 1);
  for (i64 a : {3, 5, 11, 13, -3, -5}) CHECK(kronecker(a, 2) == -1);
  for (i64 a : {0, 2, 4, -6}) CHECK(kronecker(a, 2) == 0);
  CHECK(kronecker(1, 0) == 1);
  CHECK(kronecker(-1, 0) == 1);
  CHECK(kronecker(2, 0) == 0);
  // negative bottom argument: (a|-1) is the sign of a
  CHECK(kronecker(5, -1) == 1);
  CHECK(kronecker(-5, -1) == -1);
  CHECK(kronecker(-5, -11) == kronecker(-5, -1) * kronecker(-5, 11));
}

TEST_CASE("kronecker is multiplicative in both arguments") {
  u64 s = 1234;
  for (int i = 0; i < 400; ++i) {
    i64 a = (i64)(rng_next(s) % 200) - 100;
    i64 b = (i64)(rng_next(s) % 200) - 100;
    i64 n = (i64)(rng_next(s) % 99) * 2 + 1;  // odd positive
    CHECK(kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n));
    i64 m = (i64)(rng_next(s) % 99) * 2 + 1;
    CHECK(kronecker(a, n * m) == kronecker(a, n) * kronecker(a, m));
  }
}

TEST_CASE("kronecker hand-checked values used downstream") {
  CHECK(kronecker(-8, 11) == 1);  // -8 ≡ 3 ≡ 5² mod 11
  CHECK(kronecker(-8, 13) == -1);
  CHECK(kronecker(-7, 19) == -1);
  CHECK(kronecker(-7, 43) == 1);
  CHECK(kronecker(-7, 2) == 1);
  CHECK(kronecker(5, 5) == 0);
}

TEST_CASE("is_prime agrees with trial division") {
  auto trial = [](u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  };
  for (u64 n = 0; n <= 20000; ++n) CHECK(is_prime(n) == trial(n));
  CHECK(is_prime(1000003));
  CHECK(is_prime((u64)1 << 61) == false);
  CHECK(is_prime(2305843009213693951ull));  // 2^61 - 1
}

TEST_CASE("primes_up_to matches is_prime") {
  auto ps = primes_up_to(3000);
  std::set<u64> pset(ps.begin(), ps.end());
  for (u64 n = 0; n <= 3000; ++n) CHECK(pset.count(n) == (is_prime(n) ? 1u : 0u));
}

TEST_CASE("factorize recomposes and yields prime factors in order") {
  for (u64 n = 1; n <= 5000; ++n) {
    auto fs = factorize(n);
    u64 rec = 1;
    u64 last = 0;
    for (auto [q, e] : fs) {
      CHECK(is_prime(q));
      CHECK(q > last);
      last = q;
      for (int k = 0; k < e; ++k) rec *= q;
    }
    CHECK(rec == n);
  }
  CHECK(factorize(1).empty());
  CHECK_THROWS_AS(factorize(0), std::domain_error);
}

TEST_CASE("smallest_nonresidue is minimal and genuinely a non-residue") {
  for (u64 p : primes_up_to(500)) {
    if (p == 2) continue;
    u64 u = smallest_nonresidue(p);
    CHECK(kronecker((i64)u, (i64)p) == -1);
    for (u64 v = 1; v < u; ++v) CHECK(kronecker((i64)v, (i64)p) == 1);
  }
}

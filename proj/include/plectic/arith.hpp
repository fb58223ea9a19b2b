#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Exact integer utilities shared by every module: modular arithmetic on
// uint64 residues (products via 128-bit intermediates), Kronecker symbols,
// p-valuations and trial-division factorization.  Everything here is
// deterministic and desk-scale; moduli are required to fit in 62 bits so a
// product of two reduced residues never overflows __int128.

namespace plectic {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

// p^e as u64; throws std::overflow_error if the power leaves the 62-bit budget.
u64 ipow(u64 p, unsigned e);

inline u64 addm(u64 a, u64 b, u64 m) { u64 s = a + b; return s >= m || s < a ? s - m : s; }
inline u64 subm(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + (m - b); }
inline u64 mulm(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }
u64 powm(u64 a, u128 e, u64 m);

// Inverse of a mod m; throws std::domain_error when gcd(a, m) > 1.
u64 invm(u64 a, u64 m);

// Reduce a signed value into [0, m).
inline u64 reduce_signed(i64 a, u64 m) {
  i64 r = a % (i64)m;
  return r < 0 ? (u64)(r + (i64)m) : (u64)r;
}

// (val, unit) with x = p^val * unit, x != 0.
std::pair<int, u64> val_unit(i64 x, u64 p);
int valuation(i64 x, u64 p);  // throws on x == 0

// Full Kronecker symbol (a|n), multiplicative in both arguments, with the
// usual conventions at 2, -1 and 0.
int kronecker(i64 a, i64 n);

bool is_prime(u64 n);
std::vector<u64> primes_up_to(u64 bound);

// Ascending (prime, exponent) pairs; factorize(1) = {}.  Trial division:
// fine for the 64-bit desk scale this library targets.
std::vector<std::pair<u64, int>> factorize(u64 n);

// Smallest positive quadratic non-residue mod an odd prime p.
u64 smallest_nonresidue(u64 p);

// gcd on u64
u64 gcd_u64(u64 a, u64 b);

// True for D = 1 and for the discriminants of quadratic fields: squarefree
// D = 1 (mod 4), or D = 4m with m squarefree and m = 2 or 3 (mod 4).
bool is_fundamental_discriminant(i64 D);

// Decimal rendering of a signed 128-bit value (iostreams lack one).
std::string int128_str(i128 x);

}  // namespace plectic

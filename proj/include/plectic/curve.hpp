#pragma once

#include <string>
#include <vector>

#include "plectic/arith.hpp"

// Elliptic curves over Q at desk scale: integral Weierstrass models with
// their standard derived invariants, naive point counts over prime fields,
// reduction types at odd primes read off c4/c6/Delta, quadratic twists,
// root numbers of semistable curves, and numerical special values of the
// L-series at s = 1 via the exponentially convergent sum attached to the
// functional equation.
//
// The conductor is *input*, not computed: callers supply N together with
// the a-invariants and the constructor cross-checks it against the
// discriminant pattern at odd primes (2-adic Tate algorithm is out of
// scope, so the even part of N is taken on faith).  Models are required to
// be minimal at odd primes; minimality at 2 is not enforced, which is what
// lets quadratic twists by even discriminants live in this type.

namespace plectic {

struct CurveModel {
  std::string label;
  i64 a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

  // derived quantities, in the usual normalization:
  //   b2 = a1^2 + 4a2            c4 = b2^2 - 24 b4
  //   b4 = 2a4 + a1 a3           c6 = -b2^3 + 36 b2 b4 - 216 b6
  //   b6 = a3^2 + 4a6            1728 disc = c4^3 - c6^2
  //   b8 = (b2 b6 - b4^2) / 4
  i64 b2 = 0, b4 = 0, b6 = 0;
  i128 b8 = 0, c4 = 0, c6 = 0, disc = 0;

  u64 N = 0;  // conductor, supplied and validated

  // Validates: disc != 0; every odd prime exactly dividing N is
  // multiplicative for the model (divides disc, not c4) and every odd prime
  // with square part in N is additive (divides both); every odd prime of
  // disc appears in N; no odd prime has ell^4 | c4 and ell^6 | c6 (odd
  // minimality).  Throws std::domain_error on violations and
  // std::overflow_error when |disc| leaves the trial-division budget.
  static CurveModel make(std::string label, i64 a1, i64 a2, i64 a3, i64 a4,
                         i64 a6, u64 N);

  std::string str() const;  // "label [a1,a2,a3,a4,a6] N"
};

enum class ReductionType { good, split_mult, nonsplit_mult, additive };

const char* reduction_type_name(ReductionType t);

struct ReductionInfo {
  u64 prime = 0;
  ReductionType type = ReductionType::good;
  i64 a_p = 0;    // trace of Frobenius (good), +1 / -1 (split / nonsplit), 0 (additive)
  int tate_val = 0;  // ord_p(disc) when multiplicative, else 0
};

// Trace of Frobenius at a good prime ell <= 10^6: for odd ell a character
// sum of the quartic discriminant 4x^3 + b2 x^2 + 2 b4 x + b6 over F_ell,
// for ell = 2 direct enumeration of affine points.  Throws on bad ell.
i64 ap_count(const CurveModel& E, u64 ell);

// Reduction data at a prime p >= 5.  Multiplicative iff p | disc and
// p does not divide c4; split iff -c6 is a square mod p.
ReductionInfo reduction_type(const CurveModel& E, u64 p);

// Hecke eigenvalue a_ell at any prime ell: ap_count at good primes, the
// split/nonsplit sign at odd multiplicative primes, 0 at additive primes.
// Multiplicative reduction at 2 is unsupported (throws).
i64 a_ell(const CurveModel& E, u64 ell);

// a_1 .. a_count by multiplicativity and the recursion
// a_{ell^(e+1)} = a_ell a_{ell^e} - ell a_{ell^(e-1)} at good ell,
// a_{ell^e} = a_ell^e at bad ell.
std::vector<i64> an_table(const CurveModel& E, u64 count);

// The twist of E by a fundamental discriminant D coprime to N: the model
// with invariants (c4 D^2, c6 D^3), reconstructed as an integral Weierstrass
// equation, labelled "<label>_tw<D>" and handed conductor N D^2.  D = 1
// returns E unchanged.  The j-invariant is preserved; a_ell picks up the
// factor kronecker(D, ell) at good odd ell.
CurveModel quadratic_twist(const CurveModel& E, i64 D);

// Global root number of a semistable curve with odd squarefree conductor:
// -prod_{ell | N} w_ell with w_ell = -1 at split and +1 at nonsplit primes.
int root_number(const CurveModel& E);

// Sign of the functional equation of the twisted L-series L(E, chi_D, s)
// for fundamental D coprime to N: kronecker(D, -N) * root_number(E).
int twisted_root_number(const CurveModel& E, i64 D);

// Root number of E over the imaginary quadratic field of discriminant D:
// the product root_number(E) * twisted_root_number(E, D), which collapses
// to -(-1)^{#{ell | N inert in K}}.
int root_number_over_K(const CurveModel& E, i64 D);

// 1 when Frobenius at a multiplicative prime p acts on the Tate line with
// eigenvalue +1 (split reduction), else 0.  Throws unless reduction at p
// is multiplicative.
int delta_p(const CurveModel& E, u64 p);

// Sufficient condition for the mod-p Galois representation to be ramified
// at a multiplicative prime ell != p: true iff p does not divide
// ord_ell(disc) (the Tate-parameter valuation).
bool mod_p_ramified_at(const CurveModel& E, u64 ell, u64 p);

struct LValueResult {
  double value = 0.0;   // the computed special value
  double tail = 0.0;    // rigorous bound on the truncation error
  u64 terms = 0;        // summation length M
  int sign = 0;         // functional-equation sign used
  bool forced_zero = false;  // sign was -1, value is exactly 0
};

// L(E, 1) as (1 + sign) * sum_{n <= M} (a_n / n) exp(-2 pi n / sqrt(N)),
// with M chosen so the tail (bounded via |a_n| <= 2n) stays below the
// tolerance.  A sign of -1 short-circuits to an exact zero.  The sign is
// supplied by the caller, which is what twists with additive primes need;
// l_value() derives it from root_number and so requires semistability.
LValueResult l_value_with_sign(const CurveModel& E, int sign, double tolerance);
LValueResult l_value(const CurveModel& E, double tolerance);

}  // namespace plectic

#pragma once

#include <string>
#include <vector>

#include "plectic/arith.hpp"
#include "plectic/curve.hpp"

// Imaginary quadratic field data and the hypothesis machinery sitting
// between a curve and the p-adic constructions: splitting behaviour of
// primes, the N = p * N+ * N- factorization, an itemized checklist of the
// running assumptions, the k-admissible prime sieve, and the symbolic
// level-raised eigenvalue tables.

namespace plectic {

struct FieldData {
  i64 D = 0;                   // fundamental discriminant, negative
  bool unit_exception = false; // D in {-3, -4}: extra roots of unity

  // Validates D < 0 and fundamental; flags the two exceptional fields
  // rather than rejecting them (the hypothesis checker reports on them).
  static FieldData make(i64 D);

  // kronecker(D, q): +1 split, -1 inert, 0 ramified.
  int splitting_at(u64 q) const { return kronecker(D, (i64)q); }
};

// Rendering of a Kronecker value as a splitting word.
const char* splitting_name(int kron);

struct Factorization {
  u64 p = 0;
  u64 n_plus = 1;   // product of split prime powers of N / p
  u64 n_minus = 1;  // squarefree product of the inert primes of N / p
  // (prime, kronecker(D, prime)) for each prime of N / p, ascending.
  std::vector<std::pair<u64, int>> witness;
};

// Splits N as p * N+ * N- according to the splitting of each prime in K.
// Requires p || N, every prime of N unramified in K, and inert primes
// appearing to the first power only; violations throw std::domain_error.
Factorization factor_N(const CurveModel& E, const FieldData& K, u64 p);

enum class CheckStatus { fail, pass, asserted };

struct CheckItem {
  std::string name;
  CheckStatus status = CheckStatus::fail;
  std::string detail;
};

struct HypothesisReport {
  std::vector<CheckItem> items;
  bool all_ok() const;  // no item failed (asserted counts as ok)
  const CheckItem* find(const std::string& name) const;
};

// The running-assumption checklist for the triple (E, K, p): p >= 5 and
// inert, multiplicative reduction at p, N unramified in K, N- squarefree
// with an even number of prime factors, K not one of the two fields with
// extra units, root number +1 over K, the mod-p representation ramified at
// every inert prime ell with ell^2 = 1 (mod p) (checked via the sufficient
// ord_ell(disc) criterion), and surjectivity of the mod-p representation,
// which is not computable here and is echoed as an asserted flag with its
// citation.  Always returns a full report; nothing throws.
HypothesisReport check_hypotheses(const CurveModel& E, const FieldData& K, u64 p,
                                  bool rho_surjective_asserted,
                                  const std::string& citation = "");

struct AdmissiblePrime {
  u64 ell = 0;
  unsigned k = 0;
  int sign = 0;  // the unique epsilon with a_ell = epsilon * (ell + 1) mod p^k
};

// All k-admissible primes up to the bound, ascending: ell coprime to N p,
// inert in K, ell^2 != 1 (mod p), and a_ell = sign * (ell + 1) mod p^k for
// a (necessarily unique) sign.  The prerequisites the congruences depend on
// (p >= 5 prime, inert, multiplicative at p, N unramified) are re-validated.
std::vector<AdmissiblePrime> admissible_sieve(const CurveModel& E, const FieldData& K,
                                              u64 p, unsigned k, u64 bound);

enum class ProductClass { definite, indefinite };

// Parity of a squarefree product of primes: odd count = definite, even
// count (including the empty product) = indefinite.  Repeated or composite
// entries throw.
ProductClass classify_product(const std::vector<u64>& m);

struct EigenEntry {
  char op = 'T';  // 'T' away from N m, 'U' at primes of N m
  u64 q = 0;
  u64 value = 0;  // residue mod p^k
};

// The level-raised eigenvalue table mod p^k attached to a squarefree
// product m of admissible primes: T_q -> a_q for q coprime to N m,
// U_q -> a_q for q | N, and U_ell -> sign for ell | m.  Every supplied
// (ell, sign) is re-verified for admissibility; m = {} is the plain mod-p^k
// reduction of the eigenvalue system.
std::vector<EigenEntry> level_raising_eigensystem(const CurveModel& E, const FieldData& K,
                                                  u64 p, unsigned k,
                                                  const std::vector<AdmissiblePrime>& m,
                                                  u64 prime_bound);

}  // namespace plectic

#include "plectic/heegner.hpp"

#include <algorithm>

namespace plectic {

FieldData FieldData::make(i64 D) {
  if (D >= 0) throw std::domain_error("FieldData: need a negative discriminant");
  if (!is_fundamental_discriminant(D))
    throw std::domain_error("FieldData: " + std::to_string(D) + " is not a fundamental discriminant");
  FieldData K;
  K.D = D;
  K.unit_exception = (D == -3 || D == -4);
  return K;
}

const char* splitting_name(int kron) {
  if (kron > 0) return "split";
  if (kron < 0) return "inert";
  return "ramified";
}

Factorization factor_N(const CurveModel& E, const FieldData& K, u64 p) {
  Factorization f;
  f.p = p;
  if (E.N % p != 0 || (E.N / p) % p == 0)
    throw std::domain_error("factor_N: p must divide the conductor exactly once");
  for (const auto& [q, e] : factorize(E.N)) {
    if (q == p) continue;
    int s = K.splitting_at(q);
    f.witness.push_back({q, s});
    if (s == 0)
      throw std::domain_error("factor_N: conductor prime " + std::to_string(q) +
                              " ramifies in K");
    if (s > 0) {
      f.n_plus *= ipow(q, (unsigned)e);
    } else {
      if (e > 1)
        throw std::domain_error("factor_N: inert prime " + std::to_string(q) +
                                " divides the conductor more than once");
      f.n_minus *= q;
    }
  }
  return f;
}

bool HypothesisReport::all_ok() const {
  for (const auto& it : items)
    if (it.status == CheckStatus::fail) return false;
  return true;
}

const CheckItem* HypothesisReport::find(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}

HypothesisReport check_hypotheses(const CurveModel& E, const FieldData& K, u64 p,
                                  bool rho_surjective_asserted,
                                  const std::string& citation) {
  HypothesisReport rep;
  auto add = [&rep](std::string name, bool ok, std::string detail) {
    rep.items.push_back({std::move(name), ok ? CheckStatus::pass : CheckStatus::fail,
                         std::move(detail)});
  };

  add("p_at_least_5", p >= 5 && is_prime(p), "p = " + std::to_string(p));

  int sp = K.splitting_at(p);
  add("p_inert_in_K", sp == -1,
      std::to_string(p) + " is " + splitting_name(sp) + " in Q(sqrt(" +
          std::to_string(K.D) + "))");

  // multiplicative reduction at p
  {
    std::string detail;
    bool ok = false;
    try {
      ReductionInfo r = reduction_type(E, p);
      ok = r.type == ReductionType::split_mult || r.type == ReductionType::nonsplit_mult;
      detail = std::string(reduction_type_name(r.type)) +
               (ok ? ", a_p = " + std::to_string(r.a_p) +
                         ", tate_val = " + std::to_string(r.tate_val)
                   : "");
    } catch (const std::exception& e) {
      detail = e.what();
    }
    add("multiplicative_at_p", ok, detail);
  }

  u64 aD = (u64)(-K.D);
  add("N_unramified_in_K", gcd_u64(aD, E.N) == 1,
      "gcd(|D|, N) = " + std::to_string(gcd_u64(aD, E.N)));

  // N- parity and squarefreeness, plus the ramification obstruction scan,
  // both need the factorization
  bool have_fact = false;
  Factorization fact;
  std::string fact_err;
  try {
    fact = factor_N(E, K, p);
    have_fact = true;
  } catch (const std::exception& e) {
    fact_err = e.what();
  }

  if (have_fact) {
    int inert_count = 0;
    for (const auto& [q, s] : fact.witness)
      if (s < 0) ++inert_count;
    add("N_minus_even_squarefree", inert_count % 2 == 0,
        "N- = " + std::to_string(fact.n_minus) + " with " +
            std::to_string(inert_count) + " prime factor(s)");
  } else {
    add("N_minus_even_squarefree", false, fact_err);
  }

  add("field_not_exceptional", !K.unit_exception,
      K.unit_exception ? "D = " + std::to_string(K.D) + " has extra units"
                       : "D = " + std::to_string(K.D));

  {
    std::string detail;
    bool ok = false;
    try {
      int eps = root_number_over_K(E, K.D);
      ok = eps == 1;
      detail = "epsilon(E/K) = " + std::to_string(eps);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    add("root_number_over_K_plus_one", ok, detail);
  }

  // For every inert ell | N- with ell^2 = 1 (mod p) the mod-p representation
  // must ramify at ell; the ord_ell(disc) test is sufficient, so a miss is
  // reported as a failure to *confirm*, not a disproof.
  if (have_fact) {
    bool ok = true;
    int checked = 0;
    std::string detail;
    for (const auto& [q, s] : fact.witness) {
      if (s >= 0) continue;
      if ((q * q - 1) % p != 0) continue;
      ++checked;
      if (!mod_p_ramified_at(E, q, p)) {
        ok = false;
        detail = "criterion inconclusive at ell = " + std::to_string(q);
        break;
      }
    }
    if (ok)
      detail = std::to_string(checked) + " obstructed prime(s) checked";
    add("ramified_at_obstructed_N_minus_primes", ok, detail);
  } else {
    add("ramified_at_obstructed_N_minus_primes", false, fact_err);
  }

  rep.items.push_back({"rho_mod_p_surjective",
                       rho_surjective_asserted ? CheckStatus::asserted : CheckStatus::fail,
                       rho_surjective_asserted
                           ? (citation.empty() ? "asserted by caller" : citation)
                           : "not asserted"});
  return rep;
}

namespace {

// The sieve's arithmetic prerequisites; the full checklist also contains
// global conditions (parity, root number) irrelevant to per-prime soundness.
void require_sieve_setup(const CurveModel& E, const FieldData& K, u64 p) {
  if (p < 5 || !is_prime(p))
    throw std::domain_error("admissible_sieve: need a prime p >= 5");
  if (K.splitting_at(p) != -1)
    throw std::domain_error("admissible_sieve: p must be inert in K");
  if (E.N % p != 0 || (E.N / p) % p == 0)
    throw std::domain_error("admissible_sieve: p must divide the conductor exactly once");
  if (gcd_u64((u64)(-K.D), E.N) != 1)
    throw std::domain_error("admissible_sieve: conductor ramifies in K");
}

}  // namespace

std::vector<AdmissiblePrime> admissible_sieve(const CurveModel& E, const FieldData& K,
                                              u64 p, unsigned k, u64 bound) {
  require_sieve_setup(E, K, p);
  if (k == 0) throw std::domain_error("admissible_sieve: k must be positive");
  u64 mod = ipow(p, k);

  std::vector<AdmissiblePrime> out;
  for (u64 ell : primes_up_to(bound)) {
    if (ell == p || E.N % ell == 0) continue;
    if (K.splitting_at(ell) != -1) continue;
    u64 r = ell % p;
    if (r == 1 || r == p - 1) continue;  // ell^2 = 1 (mod p)
    u64 a = reduce_signed(ap_count(E, ell), mod);
    u64 target = (ell + 1) % mod;
    bool plus = a == target;
    bool minus = a == (mod - target) % mod;
    if (plus && minus)
      throw std::logic_error("admissible_sieve: both signs matched, which ell^2 != 1 (mod p) forbids");
    if (plus) out.push_back({ell, k, 1});
    else if (minus) out.push_back({ell, k, -1});
  }
  return out;
}

ProductClass classify_product(const std::vector<u64>& m) {
  std::vector<u64> sorted = m;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (!is_prime(sorted[i]))
      throw std::domain_error("classify_product: " + std::to_string(sorted[i]) + " is not prime");
    if (i > 0 && sorted[i] == sorted[i - 1])
      throw std::domain_error("classify_product: repeated prime " + std::to_string(sorted[i]));
  }
  return m.size() % 2 == 1 ? ProductClass::definite : ProductClass::indefinite;
}

std::vector<EigenEntry> level_raising_eigensystem(const CurveModel& E, const FieldData& K,
                                                  u64 p, unsigned k,
                                                  const std::vector<AdmissiblePrime>& m,
                                                  u64 prime_bound) {
  require_sieve_setup(E, K, p);
  if (k == 0) throw std::domain_error("level_raising_eigensystem: k must be positive");
  u64 mod = ipow(p, k);

  for (size_t i = 0; i < m.size(); ++i) {
    const AdmissiblePrime& ap = m[i];
    for (size_t j = 0; j < i; ++j)
      if (m[j].ell == ap.ell)
        throw std::domain_error("level_raising_eigensystem: repeated prime in m");
    if (ap.sign != 1 && ap.sign != -1)
      throw std::domain_error("level_raising_eigensystem: sign must be +1 or -1");
    bool ok = is_prime(ap.ell) && ap.ell != p && E.N % ap.ell != 0 &&
              K.splitting_at(ap.ell) == -1 && ap.ell % p != 1 && ap.ell % p != p - 1;
    if (ok) {
      u64 a = reduce_signed(ap_count(E, ap.ell), mod);
      u64 want = ap.sign == 1 ? (ap.ell + 1) % mod : (mod - (ap.ell + 1) % mod) % mod;
      ok = a == want;
    }
    if (!ok)
      throw std::domain_error("level_raising_eigensystem: " + std::to_string(ap.ell) +
                              " is not admissible with the supplied sign");
  }

  std::vector<EigenEntry> table;
  for (u64 q : primes_up_to(prime_bound)) {
    bool in_m = false;
    int sgn = 0;
    for (const auto& ap : m)
      if (ap.ell == q) { in_m = true; sgn = ap.sign; }
    if (in_m)
      table.push_back({'U', q, reduce_signed(sgn, mod)});
    else if (E.N % q == 0)
      table.push_back({'U', q, reduce_signed(a_ell(E, q), mod)});
    else
      table.push_back({'T', q, reduce_signed(ap_count(E, q), mod)});
  }
  return table;
}

}  // namespace plectic

#pragma once

#include <string>

#include "plectic/arith.hpp"

// Truncated p-adic numbers and the unramified quadratic extension Q_p(√u).
//
// A nonzero element is stored as p^val * unit with the unit known modulo
// p^prec ("prec" relative digits).  Zero is a dedicated state standing for
// the zero residue at working precision -- never a sentinel valuation.
// Arithmetic keeps the precision ledger: a product carries min of the input
// precisions, a sum carries the joint absolute precision, and a sum whose
// entire stored window cancels collapses to the zero state (the residue at
// working precision is 0; conjugation-symmetric formulas rely on this).
// Operations that cannot even determine a leading digit raise
// precision_error instead of returning garbage.

namespace plectic {

struct precision_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class PadicElem {
 public:
  PadicElem(u64 p, int prec);  // exact zero
  static PadicElem from_integer(i64 n, u64 p, int prec);
  // num / (den * p^den_pow); den may carry p-powers of its own
  static PadicElem from_rational(i64 num, i64 den, u64 p, int prec);
  static PadicElem from_unit(u64 p, int prec, i64 val, u64 unit);

  u64 prime() const { return p_; }
  bool is_zero() const { return zero_; }
  int precision() const { return prec_; }
  i64 valuation() const;  // throws std::domain_error on zero
  u64 unit() const;       // in [1, p^prec), coprime to p

  PadicElem operator-() const;
  PadicElem operator+(const PadicElem& o) const;
  PadicElem operator-(const PadicElem& o) const { return *this + (-o); }
  PadicElem operator*(const PadicElem& o) const;
  PadicElem operator/(const PadicElem& o) const { return *this * o.inverse(); }
  PadicElem inverse() const;
  PadicElem scaled_by_power(i64 e) const;  // multiply by p^e

  // canonical residue in [0, p^m); needs val >= 0 and m <= val + prec
  u64 residue(int m) const;
  // decides val(x - y) >= m; throws precision_error if the stored digits
  // cannot settle the question
  bool congruent(const PadicElem& o, int m) const;
  // equality at the joint stored precision
  bool same_class(const PadicElem& o) const;

  std::string str() const;

 private:
  PadicElem(u64 p, int prec, bool zero, i64 val, u64 unit)
      : p_(p), prec_(prec), zero_(zero), val_(val), unit_(unit) {}
  void match(const PadicElem& o) const;
  u64 p_;
  int prec_;
  bool zero_;
  i64 val_;
  u64 unit_;
};

// a + b√u with a fixed quadratic non-residue u mod p.  Conjugation flips the
// sign of b; the norm a² − u·b² lands back in Q_p.
class QuadExtElem {
 public:
  QuadExtElem(PadicElem a, PadicElem b, u64 u);
  static QuadExtElem one(u64 p, int prec, u64 u);
  static QuadExtElem from_base(const PadicElem& a, u64 u);
  static QuadExtElem sqrt_u(u64 p, int prec, u64 u);

  const PadicElem& re() const { return a_; }
  const PadicElem& im() const { return b_; }
  u64 param_u() const { return u_; }
  u64 prime() const { return a_.prime(); }

  QuadExtElem conj() const;
  PadicElem norm() const;
  PadicElem trace() const;

  QuadExtElem operator-() const;
  QuadExtElem operator+(const QuadExtElem& o) const;
  QuadExtElem operator-(const QuadExtElem& o) const;
  QuadExtElem operator*(const QuadExtElem& o) const;
  QuadExtElem inverse() const;  // conj / norm; throws on non-invertible input
  QuadExtElem operator/(const QuadExtElem& o) const { return *this * o.inverse(); }
  QuadExtElem pow(u128 e) const;

  // componentwise congruence mod p^m
  bool congruent(const QuadExtElem& o, int m) const;
  bool is_one(int m) const;

  std::string str() const;

 private:
  PadicElem a_, b_;
  u64 u_;
};

// Multiplicative subgroup {x : Norm(x) = 1} of Q_p(√u)^×, truncated.  The
// constructor checks the norm to the stored precision; project() realizes the
// map y ↦ y·conj(y)^{-1} which sweeps K^× onto the norm-one subgroup.
class NormOneElem {
 public:
  explicit NormOneElem(const QuadExtElem& x);
  static NormOneElem project(const QuadExtElem& y);
  static NormOneElem identity(u64 p, int prec, u64 u);

  const QuadExtElem& value() const { return x_; }
  u64 prime() const { return x_.prime(); }

  NormOneElem operator*(const NormOneElem& o) const;
  NormOneElem inverse() const;
  NormOneElem pow_signed(i64 e) const;
  NormOneElem pow(u128 e) const;

  // kill the order-(p+1) residue component: x ↦ x^{(p+1)·((p+1)^{-1} mod p^N)}
  NormOneElem pro_p_part() const;
  bool is_principal_unit(int depth) const;  // ≡ 1 mod p^depth
  bool congruent(const NormOneElem& o, int m) const;

  std::string str() const { return x_.str(); }

 private:
  QuadExtElem x_;
};

}  // namespace plectic

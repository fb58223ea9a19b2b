#include "plectic/padic.hpp"

namespace plectic {

namespace {
void check_params(u64 p, int prec) {
  if (p < 3 || !is_prime(p)) throw std::domain_error("PadicElem: p must be an odd prime");
  if (prec < 1) throw std::domain_error("PadicElem: precision must be >= 1");
  ipow(p, (unsigned)prec);  // overflow guard
}
}  // namespace

PadicElem::PadicElem(u64 p, int prec) : p_(p), prec_(prec), zero_(true), val_(0), unit_(0) {
  check_params(p, prec);
}

PadicElem PadicElem::from_integer(i64 n, u64 p, int prec) {
  check_params(p, prec);
  if (n == 0) return PadicElem(p, prec);
  auto [v, au] = val_unit(n, p);
  u64 m = ipow(p, (unsigned)prec);
  u64 unit = au % m;
  if (n < 0) unit = m - unit;
  return PadicElem(p, prec, false, v, unit);
}

PadicElem PadicElem::from_rational(i64 num, i64 den, u64 p, int prec) {
  if (den == 0) throw std::domain_error("PadicElem: zero denominator");
  PadicElem n = from_integer(num, p, prec);
  if (n.is_zero()) return n;
  PadicElem d = from_integer(den, p, prec);
  return n / d;
}

PadicElem PadicElem::from_unit(u64 p, int prec, i64 val, u64 unit) {
  check_params(p, prec);
  u64 m = ipow(p, (unsigned)prec);
  unit %= m;
  if (unit == 0 || unit % p == 0) throw std::domain_error("PadicElem: unit part divisible by p");
  return PadicElem(p, prec, false, val, unit);
}

i64 PadicElem::valuation() const {
  if (zero_) throw std::domain_error("valuation of exact zero is +infinity");
  return val_;
}

u64 PadicElem::unit() const {
  if (zero_) throw std::domain_error("unit part of exact zero");
  return unit_;
}

void PadicElem::match(const PadicElem& o) const {
  if (p_ != o.p_) throw std::domain_error("PadicElem: mixed primes");
}

PadicElem PadicElem::operator-() const {
  if (zero_) return *this;
  u64 m = ipow(p_, (unsigned)prec_);
  return PadicElem(p_, prec_, false, val_, m - unit_);
}

PadicElem PadicElem::operator+(const PadicElem& o) const {
  match(o);
  if (zero_) return o;
  if (o.zero_) return *this;
  const PadicElem& x = val_ <= o.val_ ? *this : o;
  const PadicElem& y = val_ <= o.val_ ? o : *this;
  i64 delta = y.val_ - x.val_;
  // joint absolute precision: both operands are known modulo p^A
  i64 abs_prec = std::min(x.val_ + x.prec_, y.val_ + y.prec_);
  int rel = (int)(abs_prec - x.val_);
  if (rel <= 0) throw precision_error("PadicElem::add: no overlapping digits");
  u64 m = ipow(p_, (unsigned)rel);
  u64 s = x.unit_ % m;
  if (delta < rel) s = addm(s, mulm(ipow(p_, (unsigned)delta), y.unit_ % m, m), m);
  // cancellation of the whole stored window: the sum is the zero residue at
  // working precision, i.e. the dedicated zero flag
  if (s == 0) return PadicElem(p_, std::min(prec_, o.prec_));
  auto [extra, su] = val_unit((i64)s, p_);
  int new_rel = rel - extra;
  if (new_rel <= 0) throw precision_error("PadicElem::add: cancellation exhausted precision");
  return PadicElem(p_, new_rel, false, x.val_ + extra, su % ipow(p_, (unsigned)new_rel));
}

PadicElem PadicElem::operator*(const PadicElem& o) const {
  match(o);
  int prec = std::min(prec_, o.prec_);
  if (zero_ || o.zero_) return PadicElem(p_, prec);
  u64 m = ipow(p_, (unsigned)prec);
  return PadicElem(p_, prec, false, val_ + o.val_, mulm(unit_ % m, o.unit_ % m, m));
}

PadicElem PadicElem::inverse() const {
  if (zero_) throw std::domain_error("PadicElem: inverse of zero");
  u64 m = ipow(p_, (unsigned)prec_);
  return PadicElem(p_, prec_, false, -val_, invm(unit_, m));
}

PadicElem PadicElem::scaled_by_power(i64 e) const {
  if (zero_) return *this;
  return PadicElem(p_, prec_, false, val_ + e, unit_);
}

u64 PadicElem::residue(int m) const {
  if (m < 0) throw std::domain_error("PadicElem::residue: negative modulus exponent");
  if (zero_) return 0;
  if (val_ < 0) throw std::domain_error("PadicElem::residue: negative valuation");
  if (m > val_ + prec_) throw precision_error("PadicElem::residue: beyond stored precision");
  if (val_ >= m) return 0;
  u64 mod = ipow(p_, (unsigned)m);
  return mulm(ipow(p_, (unsigned)val_) % mod, unit_ % mod, mod);
}

bool PadicElem::congruent(const PadicElem& o, int m) const {
  match(o);
  if (zero_ && o.zero_) return true;
  if (zero_ || o.zero_) {
    const PadicElem& x = zero_ ? o : *this;
    if (x.val_ >= m) return true;
    return false;  // nonzero digits below p^m on one side
  }
  if (val_ != o.val_) {
    i64 low = std::min(val_, o.val_);
    return low >= m;  // the lower-valuation digits cannot cancel
  }
  if (val_ >= m) return true;
  int need = (int)(m - val_);
  if (need > prec_ || need > o.prec_)
    throw precision_error("PadicElem::congruent: not enough stored digits");
  u64 mod = ipow(p_, (unsigned)need);
  return unit_ % mod == o.unit_ % mod;
}

bool PadicElem::same_class(const PadicElem& o) const {
  match(o);
  if (zero_ && o.zero_) return true;
  if (zero_ || o.zero_) {
    const PadicElem& x = zero_ ? o : *this;
    (void)x;
    return false;
  }
  if (val_ != o.val_) return false;
  int rel = std::min(prec_, o.prec_);
  u64 mod = ipow(p_, (unsigned)rel);
  return unit_ % mod == o.unit_ % mod;
}

std::string PadicElem::str() const {
  if (zero_) return "0";
  return std::to_string(unit_) + "*" + std::to_string(p_) + "^" + std::to_string(val_) +
         " + O(" + std::to_string(p_) + "^" + std::to_string(val_ + prec_) + ")";
}

// ---------------------------------------------------------------------------

QuadExtElem::QuadExtElem(PadicElem a, PadicElem b, u64 u) : a_(a), b_(b), u_(u) {
  if (a_.prime() != b_.prime()) throw std::domain_error("QuadExtElem: mixed primes");
  if (kronecker((i64)(u % a_.prime()), (i64)a_.prime()) != -1)
    throw std::domain_error("QuadExtElem: u must be a non-residue mod p");
}

QuadExtElem QuadExtElem::one(u64 p, int prec, u64 u) {
  return QuadExtElem(PadicElem::from_integer(1, p, prec), PadicElem(p, prec), u);
}

QuadExtElem QuadExtElem::from_base(const PadicElem& a, u64 u) {
  return QuadExtElem(a, PadicElem(a.prime(), a.precision()), u);
}

QuadExtElem QuadExtElem::sqrt_u(u64 p, int prec, u64 u) {
  return QuadExtElem(PadicElem(p, prec), PadicElem::from_integer(1, p, prec), u);
}

QuadExtElem QuadExtElem::conj() const { return QuadExtElem(a_, -b_, u_); }

PadicElem QuadExtElem::norm() const {
  PadicElem uc = PadicElem::from_integer((i64)u_, a_.prime(), std::min(a_.precision(), b_.precision()));
  return a_ * a_ - uc * b_ * b_;
}

PadicElem QuadExtElem::trace() const { return a_ + a_; }

QuadExtElem QuadExtElem::operator-() const { return QuadExtElem(-a_, -b_, u_); }

QuadExtElem QuadExtElem::operator+(const QuadExtElem& o) const {
  return QuadExtElem(a_ + o.a_, b_ + o.b_, u_);
}

QuadExtElem QuadExtElem::operator-(const QuadExtElem& o) const {
  return QuadExtElem(a_ - o.a_, b_ - o.b_, u_);
}

QuadExtElem QuadExtElem::operator*(const QuadExtElem& o) const {
  if (u_ != o.u_) throw std::domain_error("QuadExtElem: mixed extensions");
  PadicElem uc = PadicElem::from_integer((i64)u_, a_.prime(),
                                         std::min(a_.precision(), o.a_.precision()));
  return QuadExtElem(a_ * o.a_ + uc * b_ * o.b_, a_ * o.b_ + b_ * o.a_, u_);
}

QuadExtElem QuadExtElem::inverse() const {
  PadicElem n = norm();
  if (n.is_zero()) throw std::domain_error("QuadExtElem: inverse of zero");
  PadicElem ninv = n.inverse();
  return QuadExtElem(a_ * ninv, (-b_) * ninv, u_);
}

QuadExtElem QuadExtElem::pow(u128 e) const {
  QuadExtElem base = *this;
  QuadExtElem acc = one(a_.prime(), std::max(a_.precision(), b_.precision()), u_);
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

bool QuadExtElem::congruent(const QuadExtElem& o, int m) const {
  return a_.congruent(o.a_, m) && b_.congruent(o.b_, m);
}

bool QuadExtElem::is_one(int m) const {
  return congruent(one(a_.prime(), std::max({m, a_.precision(), b_.precision()}), u_), m);
}

std::string QuadExtElem::str() const {
  return "(" + a_.str() + ") + (" + b_.str() + ")*sqrt(" + std::to_string(u_) + ")";
}

// ---------------------------------------------------------------------------

NormOneElem::NormOneElem(const QuadExtElem& x) : x_(x) {
  PadicElem n = x.norm();
  int chk = std::min(x.re().precision(), x.im().is_zero() ? x.re().precision() : x.im().precision());
  if (!n.congruent(PadicElem::from_integer(1, x.prime(), chk), chk))
    throw std::domain_error("NormOneElem: norm is not 1 at stored precision");
}

NormOneElem NormOneElem::project(const QuadExtElem& y) {
  PadicElem n = y.norm();
  if (n.is_zero()) throw std::domain_error("NormOneElem::project: non-invertible input");
  return NormOneElem(y * y.conj().inverse());
}

NormOneElem NormOneElem::identity(u64 p, int prec, u64 u) {
  return NormOneElem(QuadExtElem::one(p, prec, u));
}

NormOneElem NormOneElem::operator*(const NormOneElem& o) const {
  return NormOneElem(x_ * o.x_);
}

NormOneElem NormOneElem::inverse() const {
  // for norm-one x the inverse is the conjugate; cheaper and loses no digits
  return NormOneElem(x_.conj());
}

NormOneElem NormOneElem::pow(u128 e) const { return NormOneElem(x_.pow(e)); }

NormOneElem NormOneElem::pow_signed(i64 e) const {
  if (e >= 0) return pow((u128)e);
  return inverse().pow((u128)(-e));
}

NormOneElem NormOneElem::pro_p_part() const {
  u64 p = x_.prime();
  int prec = std::min(x_.re().precision(),
                      x_.im().is_zero() ? x_.re().precision() : x_.im().precision());
  u64 mod = ipow(p, (unsigned)prec);
  u64 t = invm((p + 1) % mod, mod);
  // exponent (p+1)*t ≡ 1 mod p^prec and ≡ 0 mod (p+1): the idempotent that
  // keeps the pro-p component and annihilates mu_{p+1}
  u128 e = (u128)(p + 1) * t;
  return pow(e);
}

bool NormOneElem::is_principal_unit(int depth) const {
  return x_.is_one(depth);
}

bool NormOneElem::congruent(const NormOneElem& o, int m) const {
  return x_.congruent(o.x_, m);
}

}  // namespace plectic

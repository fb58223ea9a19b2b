#include "plectic/boundary.hpp"

#include <algorithm>

namespace plectic {

namespace {

constexpr int VAL_INF = 1 << 20;

int val_i128(i128 x, u64 p) {
  if (x == 0) return VAL_INF;
  int v = 0;
  while (x % (i128)p == 0) { x /= (i128)p; ++v; }
  return v;
}

i128 pow_i128(u64 p, int e) {
  i128 r = 1;
  for (int i = 0; i < e; ++i) {
    r *= (i128)p;
    if (r > ((i128)1 << 100)) throw std::overflow_error("boundary: p-power out of range");
  }
  return r;
}

}  // namespace

std::string BoundaryBall::str() const {
  std::string center = std::to_string(cj);
  if (cm > 0) center += "/" + std::to_string(p) + "^" + std::to_string(cm);
  std::string core = "B(" + center + ", " + std::to_string(m) + ")";
  return exterior ? "P1 \\ " + core : core;
}

BoundaryBall canonical_ball(u64 p, bool exterior, int m, i128 cj, int cm) {
  if (cm < 0) throw std::domain_error("canonical_ball: negative denominator exponent");
  BoundaryBall b;
  b.p = p;
  b.exterior = exterior;
  b.m = m;
  int range = m + cm;
  if (range <= 0) { b.cj = 0; b.cm = 0; return b; }
  i128 mod = pow_i128(p, range);
  cj %= mod;
  if (cj < 0) cj += mod;
  while (cm > 0 && cj % (i128)p == 0) { cj /= (i128)p; --cm; }
  if (cj == 0) cm = 0;
  b.cj = (i64)cj;
  b.cm = cm;
  return b;
}

BoundaryBall ball_of_edge(const TreeEdge& e) {
  if (tree_distance(e.src, e.dst) != 1) throw std::domain_error("ball_of_edge: not an edge");
  if (e.dst.a == e.src.a + 1)  // child direction: the destination's ball
    return canonical_ball(e.dst.p, false, e.dst.a, e.dst.bj, e.dst.bm);
  // parent direction: complement of the source's ball
  return canonical_ball(e.src.p, true, e.src.a, e.src.bj, e.src.bm);
}

std::vector<P1Point> p1_points(u64 p, int n) {
  if (n < 1) throw std::domain_error("p1_points: need level >= 1");
  u64 pn = ipow(p, (unsigned)n);
  std::vector<P1Point> out;
  out.reserve(pn + pn / p);
  for (u64 x = 0; x < pn; ++x) out.push_back({(i64)x, 1});
  for (u64 z = 0; z < pn / p; ++z) out.push_back({1, (i64)(p * z)});
  return out;
}

bool ball_contains(const BoundaryBall& ball, i128 a, i128 b) {
  if (a == 0 && b == 0) throw std::domain_error("ball_contains: not a projective point");
  bool in;
  if (b == 0) {
    in = false;  // the point at infinity lies in no interior ball
  } else {
    // val(a/b - cj/p^cm) >= m  <=>  val(a·p^cm - cj·b) >= m + val(b) + cm
    i128 num = a * pow_i128(ball.p, ball.cm) - (i128)ball.cj * b;
    in = val_i128(num, ball.p) >= ball.m + val_i128(b, ball.p) + ball.cm;
  }
  return ball.exterior ? !in : in;
}

std::vector<BoundaryBall> star_partition(const TreeVertex& v) {
  std::vector<BoundaryBall> out;
  for (const TreeVertex& w : neighbors(v)) out.push_back(ball_of_edge(TreeEdge{v, w}));
  return out;
}

std::vector<BoundaryBall> covering(const TorusData& t, int n) {
  if (n < 1) throw std::domain_error("covering: need n >= 1");
  TorusGenerator g = generator_for_depth(t, n);
  u64 h = level_order(t.p, n);
  std::vector<BoundaryBall> out;
  out.reserve(h);
  for (const TreeEdge& e : orbit_of_edge(t, g, consecutive_edges(t, n).back(), h))
    out.push_back(ball_of_edge(e));
  return out;
}

// --------------------------------------------------------------------------

EdgeSum steinberg_delta(const TreeVertex& v) {
  EdgeSum out;
  for (const TreeVertex& w : neighbors(v)) out.emplace(TreeEdge{v, w}, 1);
  return out;
}

SteinbergElem::SteinbergElem(u64 p, int level, std::vector<i64> raw)
    : p_(p), level_(level), v_(std::move(raw)) {
  u64 pn = ipow(p, (unsigned)level);
  if (v_.size() != pn + pn / p)
    throw std::domain_error("SteinbergElem: value count must match P1(Z/p^n)");
  i64 base = v_[0];
  for (i64& x : v_) x -= base;  // functions modulo constants
}

bool SteinbergElem::is_zero() const {
  return std::all_of(v_.begin(), v_.end(), [](i64 x) { return x == 0; });
}

SteinbergElem SteinbergElem::operator+(const SteinbergElem& o) const {
  if (p_ != o.p_ || level_ != o.level_)
    throw std::domain_error("SteinbergElem: mixed levels");
  std::vector<i64> sum(v_.size());
  for (size_t i = 0; i < v_.size(); ++i) sum[i] = v_[i] + o.v_[i];
  return SteinbergElem(p_, level_, std::move(sum));
}

bool SteinbergElem::operator==(const SteinbergElem& o) const {
  return p_ == o.p_ && level_ == o.level_ && v_ == o.v_;
}

SteinbergElem steinberg_ev(u64 p, const EdgeSum& x, int level) {
  std::vector<P1Point> pts = p1_points(p, level);
  std::vector<i64> vals(pts.size(), 0);
  for (const auto& [e, c] : x) {
    BoundaryBall ball = ball_of_edge(e);
    for (size_t i = 0; i < pts.size(); ++i)
      if (ball_contains(ball, pts[i])) vals[i] += c;
  }
  return SteinbergElem(p, level, std::move(vals));
}

}  // namespace plectic

#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "plectic/boundary.hpp"

// Multiplicative integration against harmonic boundary measures, and the
// derivative calculus for trace-compatible point systems.
//
// A point system models a tower of module elements P_n living in the induced
// modules A[G_n], where A = (Z/p^k)^rank and G_n is cyclic of order
// (p+1)p^(n-1), subject to two trace conditions: consecutive levels trace to
// each other, and the bottom level traces to zero.  Everything downstream —
// derivative sums, stabilized invariants, the coset form of the integral —
// is a formal consequence of those two conditions, which is what the tests
// exercise.

namespace plectic {

struct PointSystem {
  u64 p = 0;
  int k = 1;  // coefficient exponent: values live in Z/p^k
  int depth = 0;
  int rank = 1;
  // level[n-1][j][c] = component c of the value at group exponent j,
  // 0 <= j < (p+1)p^(n-1)
  std::vector<std::vector<std::vector<u64>>> level;

  u64 modulus() const { return ipow(p, (unsigned)k); }
  u64 order(int n) const { return level_order(p, n); }

  // size-validating constructor (content validation is a separate concern,
  // see validate_point_system)
  static PointSystem make(u64 p, int k, int depth, int rank,
                          std::vector<std::vector<std::vector<u64>>> level);
};

// trace of level n one step down the tower: entry j sums the p translates
// lying above it; for n = 1 the result is the single base-field vector
std::vector<std::vector<u64>> level_trace(const PointSystem& ps, int n);

struct SystemReport {
  bool ok = true;
  int level = 0;  // first failing level; 0 means the trace to the base field
  std::string message;
};

SystemReport validate_point_system(const PointSystem& ps);

// Build a trace-compatible system from the top: seed entries fill the deepest
// level in group-major order, remaining entries are drawn from a deterministic
// generator, and the final entry absorbs the running total so the trace to
// the base field vanishes.  A seed that pins every entry of the deepest level
// but sums to something nonzero cannot be repaired and is rejected.
PointSystem spread_point_system(u64 p, int k, int rank, const std::vector<u64>& seed,
                                int depth, u64 rng_seed = 1);

// --------------------------------------------------------------------------
// Boundary functions

// t ↦ (t − τ)/(t − τ̄) at t = a/b (b = 0 encodes ∞), realized as the
// norm-one projection of b·t − τ·b's numerator: since a, b are rational,
// conj(a − τb) = a − τ̄b, so the value is project(a − τ·b).  Sends ∞ to 1.
NormOneElem f_psi(const TorusData& t, i128 a, i128 b);

// the Möbius coordinate change sending (τ, τ̄, ∞) to (0, ∞, 1); the same
// rational expression as f_psi, exposed under the name of its role: the
// homeomorphism from the boundary onto the norm-one circle
NormOneElem mobius_A_psi(const TorusData& t, i128 a, i128 b);

using BoundaryFn = std::function<NormOneElem(const TorusData&, i128, i128)>;
using BallSampler = std::function<std::pair<i128, i128>(const BoundaryBall&)>;

// canonical sample point: the center c for an interior ball B(c, m); the
// point c + p^(m-1) for the complement of B(c, m)
std::pair<i128, i128> center_sample(const BoundaryBall& b);
// a second point of the same ball, for independence checks
std::pair<i128, i128> spread_sample(const BoundaryBall& b);

// one harmonic measure per coefficient component, with the deepest level of
// the system as sphere values; trace compatibility makes the propagated
// interior values reproduce the lower levels
std::vector<HarmonicMeasure> measure_from_system(const TorusData& t, const PointSystem& ps);

// Riemann product Π_U f(t_U)^{μ(U)} over the covering at the measure's
// stored radius, one norm-one value per component.  Because the weights are
// classes mod p^k, the raw product is defined only up to p^k-th powers; the
// returned value is the canonical pro-p representative of that class, which
// pins it down mod p^(k+1).  Within that bound the result is meaningful mod
// p^m once the covering refines f's level of constancy plus m; the companion
// check below certifies that by comparing two radii.
std::vector<NormOneElem> integrate_mult(const TorusData& t,
                                        const std::vector<HarmonicMeasure>& mu,
                                        const BoundaryFn& f, int m,
                                        const BallSampler& sampler = center_sample);

// compare the products over the coverings at the stored radius and one step
// shallower; agreement mod p^m certifies stabilization for this integrand
bool integration_stabilized(const TorusData& t, const std::vector<HarmonicMeasure>& mu,
                            const BoundaryFn& f, int m);

// --------------------------------------------------------------------------
// Coset dictionary

// norm-one image of a torus generator: project(x + y√u)
NormOneElem generator_image(const TorusData& t, const TorusGenerator& g);

// writes y's class modulo depth-n principal units as a power of lambda
// (brute force over the (p+1)p^(n-1) cosets); nullopt when y misses every
// coset, which signals a generator/precision mismatch
std::optional<u64> coset_exponent(const NormOneElem& lambda, const NormOneElem& y, int n,
                                  u64 cosets);

// --------------------------------------------------------------------------
// Kolyvagin derivatives

// D_n = Σ_j (g^j · P_n) ⊗ j with the coordinate lifted from [0, h_n):
// returned as an element of A[G_n], entry [i][c] = Σ_j j·P_n[(i−j) mod h_n][c]
std::vector<std::vector<u64>> kolyvagin_derivative(const PointSystem& ps, int n);

// the coset form: Σ_j μ(U_j) ⊗ (exponent of the coset A_ψ(U_j)), evaluated
// through actual integration data — covering, sample points, discrete
// logarithms — rather than through the group-ring formula.  The torus must
// carry enough precision for depth-n coset separation (prec > n).
std::vector<u64> derivative_via_integration(const TorusData& t, const PointSystem& ps, int n);

struct DerivedInvariant {
  u64 p = 0;
  int k = 1;
  int rank = 1;
  // the group-ring derivative at every level
  std::vector<std::vector<std::vector<u64>>> derivative;
  // identity-component value per level, scaled by a_p^(-n)
  std::vector<std::vector<u64>> ladder;
  // ladder entry at the stabilization level
  std::vector<u64> value;
  int stable_level = 0;    // first level from which the ladder is constant mod p^k
  bool stabilized = false; // false when the ladder still moves at the deepest level
  int sign = 0;            // complex-conjugation eigenvalue bookkeeping: −a_p·ε
  int q_multiplier = 0;    // ord_p of the Tate period, carried but never applied
};

// assemble the derivative ladder of a validated system; a_p, epsilon ∈ {±1}
DerivedInvariant mock_invariant(const PointSystem& ps, int a_p, int epsilon, int q_multiplier);

}  // namespace plectic

// Exact lattice machinery: LLL reduction over the integers with rational
// Gram-Schmidt data, a certified lower bound for distances to lattice points,
// construction of approximation lattices from high-precision logarithms, and
// the resulting reduction of small-linear-form bounds.
#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "sdioph/real.hpp"

namespace sdioph {

// Columns are basis vectors.
struct IntegerLattice {
  std::vector<std::vector<mpz_class>> basis;  // basis[i] = i-th column
  int k = 0;

  mpz_class determinant() const;  // exact, k <= 4
};

struct GramSchmidtData {
  std::vector<mpq_class> norms_sq;             // |b*_i|^2
  std::vector<std::vector<mpq_class>> mu;      // mu[i][j], j < i
};

GramSchmidtData gram_schmidt(const IntegerLattice& L);

// In-place LLL with delta = 3/4, exact rational arithmetic throughout.
// Returns the accompanying Gram-Schmidt data of the reduced basis.
GramSchmidtData lll_reduce(IntegerLattice& L);

// Lemma-style certified lower bound: returns c1^2 with l(L,y)^2 >= c1^2,
// c1^2 = sigma^2 |b1|^2 / c2, c2 = max_j |b1|^2/|b*_j|^2, sigma the distance
// of the last non-integral coordinate of B^{-1} y to the nearest integer
// (sigma = 1 when y is in the lattice).  Exact rational output.
mpq_class lattice_lower_bound_sq(const IntegerLattice& reduced,
                                 const GramSchmidtData& gs,
                                 const std::vector<mpz_class>& y);

// A small linear form |eta_0 + sum x_i eta_i| <= c3 exp(-c4 H) with
// |x_i| <= X_i.  The eta are given as exact positive rationals whose logs
// are meant, so floors of Ctilde*eta can be recomputed at any precision.
struct LatticeProblem {
  std::vector<mpq_class> eta_args;  // log(eta_args[i]) = eta_i, lattice order
  mpq_class eta0_arg{1};            // 1 -> homogeneous
  mpz_class C_tilde;
  std::vector<mpz_class> X;
  Real c3 = Real::of(2.0);
  Real c4 = Real::of(1.0);
};

// floor(C * log(arg)) with the floor certified stable against rounding by
// evaluating at both rounding directions and escalating precision.
mpz_class stable_floor_log(const mpz_class& C, const mpq_class& arg);

// Identity rows above, floors of C*eta in the last row; y = (0..0, -floor(C*eta0)).
std::pair<IntegerLattice, std::vector<mpz_class>> build_approx_lattice(const LatticeProblem& prob);

enum class ReductionKind { NewBound, ExceptionalSolutionOnly, Inconclusive };

struct ReductionOutcome {
  ReductionKind kind = ReductionKind::Inconclusive;
  Real H_bound = Real::of(0.0);
  double c1 = 0.0;  // certified sqrt of the lattice lower bound
  // present when x_k = -floor(C eta_0)/floor(C eta_k) is integral: the
  // solution x_1 = ... = x_{k-1} = 0 that evades the bound
  std::optional<mpz_class> exceptional_xk;
};

// Lemma-style reduction: builds the approximation lattice, LLL-reduces,
// tests c1^2 >= T^2 + S and on success returns the bound
// H <= (log(C c3) - log(sqrt(c1^2 - S) - T)) / c4, rounded up.
ReductionOutcome reduce_linear_form(const LatticeProblem& prob);

}  // namespace sdioph

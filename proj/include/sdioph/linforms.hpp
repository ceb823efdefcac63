// Numeric evaluators for the three classical lower-bound results driving the
// exponent bounds: Matveev's theorem for linear forms in complex logarithms,
// the Bugeaud-Laurent bound for two p-adic logarithms, and the fixed-point
// bound of Petho and de Weger.  All results are rounded so that the returned
// value is an upper estimate of the exact one.
#pragma once

#include <gmpxx.h>

#include <vector>

#include "sdioph/real.hpp"

namespace sdioph {

// h(num/den) = max{log|num|, log|den|} for a nonzero rational in lowest terms.
Real weil_height(const mpq_class& x, mpfr_prec_t prec = kDefaultPrec);

struct MatveevInstance {
  unsigned n = 2;       // number of logarithms, >= 2
  unsigned D = 1;       // field degree
  unsigned kappa = 1;   // 1 for real fields, 2 otherwise
  std::vector<Real> A;  // n height parameters, A_i >= max{D h(eta_i), |log eta_i|}
  Real E = Real::of(1.0);
};

// C(n,kappa) * C0 * W0 * D^2 * prod A_i; log|Lambda| >= -returned value.
Real matveev_lower_bound(const MatveevInstance& inst);

// The E-independent factor C(n,kappa) * C0 (handy for composing bounds where
// E is kept symbolic).
Real matveev_cnc0(unsigned n, unsigned D, unsigned kappa, mpfr_prec_t prec = kDefaultPrec);
// W0 = log(1.5 e E D log(e D))
Real matveev_w0(const Real& E, unsigned D);

struct BugeaudLaurentInstance {
  mpz_class p;  // the valuation prime
  Real h1, h2;  // modified heights h'(eta_1), h'(eta_2), each >= log p
  mpz_class b1{1}, b2{1};
};

// 24 p / (log p)^4 * E^2 * h1 * h2 with
// E = max{log(b1/h2 + b2/h1) + log log p + 0.4, 10, 10 log p}.
// Upper-bounds nu_p(eta1^b1 eta2^b2 - 1) for multiplicatively independent
// p-adic units eta1, eta2; callers assert those hypotheses.
Real bugeaud_laurent_bound(const BugeaudLaurentInstance& inst);

// Upper bound for the largest solution of x = u + v (log x)^h:
// max{2^h (u^{1/h} + v^{1/h} log(h^h v))^h, 2^h (u^{1/h} + 2 e^2)^h},
// the first branch dropped when log(h^h v) <= 0.
Real petho_de_weger_bound(const Real& u, const Real& v, const Real& h);

}  // namespace sdioph

#include "sdioph/linforms.hpp"

#include <stdexcept>

namespace sdioph {

Real weil_height(const mpq_class& x, mpfr_prec_t prec) {
  if (x == 0) throw std::domain_error("weil_height: zero input");
  mpz_class num = abs(mpz_class(x.get_num()));
  mpz_class den = abs(mpz_class(x.get_den()));
  return r_max(Real::log_z(num, MPFR_RNDU, prec), Real::log_z(den, MPFR_RNDU, prec));
}

Real matveev_cnc0(unsigned n, unsigned D, unsigned kappa, mpfr_prec_t prec) {
  const mpfr_rnd_t U = MPFR_RNDU;
  Real e = r_exp(Real::of(1.0, prec), U);
  // C(n,kappa) = 16/(n! kappa) e^n (2n+1+2kappa)(n+2)(4(n+1))^{n+1} (e n / 2)^kappa
  mpz_class fact;
  mpz_fac_ui(fact.get_mpz_t(), n);
  Real c = r_div(Real::of(16.0, prec), r_mul_ui(Real::of(fact, prec), kappa, MPFR_RNDD), U);
  c = r_mul(c, r_pow_ui(e, n, U), U);
  c = r_mul_ui(c, 2 * n + 1 + 2 * kappa, U);
  c = r_mul_ui(c, n + 2, U);
  c = r_mul(c, r_pow_ui(Real::of(static_cast<unsigned long>(4 * (n + 1)), prec), n + 1, U), U);
  c = r_mul(c, r_pow_ui(r_div_ui(r_mul_ui(e, n, U), 2, U), kappa, U), U);
  // C0 = log(e^{4.4 n + 7} n^{5.5} D^2 log(e D))
  Real t = r_add(r_mul_ui(Real::of_str("4.4", prec), n, U), Real::of(7.0, prec), U);
  Real c0 = t;  // log of e^{...} contributes the exponent itself
  Real n_r = Real::of(static_cast<unsigned long>(n), prec);
  c0 = r_add(c0, r_mul(Real::of_str("5.5", prec), r_log(n_r, U), U), U);
  Real d_r = Real::of(static_cast<unsigned long>(D), prec);
  c0 = r_add(c0, r_mul_ui(r_log(d_r, U), 2, U), U);
  Real logeD = r_log(r_mul(e, d_r, U), U);  // log(e D) >= 1, its log adds
  c0 = r_add(c0, r_log(logeD, U), U);
  return r_mul(c, c0, U);
}

Real matveev_w0(const Real& E, unsigned D) {
  const mpfr_rnd_t U = MPFR_RNDU;
  Real e = r_exp(Real::of(1.0, E.prec()), U);
  Real d_r = Real::of(static_cast<unsigned long>(D), E.prec());
  Real inner = r_mul(Real::of_str("1.5", E.prec()), e, U);
  inner = r_mul(inner, E, U);
  inner = r_mul(inner, d_r, U);
  inner = r_mul(inner, r_log(r_mul(e, d_r, U), U), U);
  return r_log(inner, U);
}

Real matveev_lower_bound(const MatveevInstance& inst) {
  if (inst.n < 2 || inst.A.size() != inst.n) throw std::invalid_argument("bad Matveev instance");
  const mpfr_rnd_t U = MPFR_RNDU;
  Real bound = matveev_cnc0(inst.n, inst.D, inst.kappa, inst.A[0].prec());
  bound = r_mul(bound, matveev_w0(inst.E, inst.D), U);
  bound = r_mul_ui(bound, inst.D * inst.D, U);
  for (const Real& a : inst.A) bound = r_mul(bound, a, U);
  return bound;
}

Real bugeaud_laurent_bound(const BugeaudLaurentInstance& inst) {
  const mpfr_rnd_t U = MPFR_RNDU;
  const mpfr_rnd_t Dn = MPFR_RNDD;
  const mpfr_prec_t prec = inst.h1.prec();
  if (inst.b1 < 1 || inst.b2 < 1) throw std::invalid_argument("coefficients must be positive");
  Real logp_up = Real::log_z(inst.p, U, prec);
  Real logp_dn = Real::log_z(inst.p, Dn, prec);
  // E' = b1/h2 + b2/h1, rounded up
  Real eprime = r_add(r_div(Real::of(inst.b1, prec, U), inst.h2, U),
                      r_div(Real::of(inst.b2, prec, U), inst.h1, U), U);
  Real E = r_add(r_add(r_log(eprime, U), r_log(logp_up, U), U), Real::of_str("0.4", prec), U);
  E = r_max(E, Real::of(10.0, prec));
  E = r_max(E, r_mul_ui(logp_up, 10, U));
  // 24 p / (log p)^4 * E^2 * h1 * h2   (denominator rounded down)
  Real lead = r_div(r_mul_ui(Real::of(inst.p, prec, U), 24, U), r_pow_ui(logp_dn, 4, Dn), U);
  Real out = r_mul(lead, r_mul(E, E, U), U);
  out = r_mul(out, inst.h1, U);
  return r_mul(out, inst.h2, U);
}

Real petho_de_weger_bound(const Real& u, const Real& v, const Real& h) {
  const mpfr_rnd_t U = MPFR_RNDU;
  const mpfr_prec_t prec = u.prec();
  if (u.sgn() < 0 || v.sgn() < 0 || h.cmp(1.0) < 0)
    throw std::invalid_argument("petho_de_weger_bound: need u,v >= 0 and h >= 1");
  Real two_h(prec), inv_h(prec), u_rt(prec);
  mpfr_pow(two_h.raw(), Real::of(2.0, prec).raw(), h.raw(), MPFR_RNDU);
  mpfr_ui_div(inv_h.raw(), 1, h.raw(), MPFR_RNDU);
  mpfr_pow(u_rt.raw(), u.raw(), inv_h.raw(), MPFR_RNDU);

  // second branch: 2^h (u^{1/h} + 2 e^2)^h
  Real e2 = r_exp(Real::of(2.0, prec), U);
  Real s2 = r_add(u_rt, r_mul_ui(e2, 2, U), U);
  Real b2(prec);
  mpfr_pow(b2.raw(), s2.raw(), h.raw(), MPFR_RNDU);
  b2 = r_mul(two_h, b2, U);

  if (v.sgn() > 0) {
    // log(h^h v) > 0 gates the first branch
    Real hh(prec);
    mpfr_pow(hh.raw(), h.raw(), h.raw(), MPFR_RNDU);
    Real hhv = r_mul(hh, v, U);
    if (hhv.cmp(1.0) > 0) {
      Real v_rt(prec);
      mpfr_pow(v_rt.raw(), v.raw(), inv_h.raw(), MPFR_RNDU);
      Real s1 = r_add(u_rt, r_mul(v_rt, r_log(hhv, U), U), U);
      Real b1(prec);
      mpfr_pow(b1.raw(), s1.raw(), h.raw(), MPFR_RNDU);
      b1 = r_mul(two_h, b1, U);
      return r_max(b1, b2);
    }
  }
  return b2;
}

}  // namespace sdioph

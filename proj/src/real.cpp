#include "sdioph/real.hpp"

#include <cstdio>
#include <stdexcept>
#include <vector>

namespace sdioph {

Real Real::log_z(const mpz_class& z, mpfr_rnd_t rnd, mpfr_prec_t prec) {
  if (z <= 0) throw std::domain_error("log_z: argument must be positive");
  Real t(prec);
  mpfr_set_z(t.v_, z.get_mpz_t(), rnd);  // exact if prec suffices; else directed
  Real r(prec);
  mpfr_log(r.v_, t.v_, rnd);
  return r;
}

Real Real::log_q(const mpq_class& q, mpfr_rnd_t rnd, mpfr_prec_t prec) {
  if (q <= 0) throw std::domain_error("log_q: argument must be positive");
  // log(n/d) = log n - log d with mixed rounding
  mpfr_rnd_t inv = (rnd == MPFR_RNDU) ? MPFR_RNDD : (rnd == MPFR_RNDD ? MPFR_RNDU : rnd);
  Real ln = log_z(mpz_class(q.get_num()), rnd, prec);
  Real ld = log_z(mpz_class(q.get_den()), inv, prec);
  return r_sub(ln, ld, rnd);
}

std::string Real::str(int digits) const {
  std::vector<char> buf(digits + 48);
  std::string fmt = "%." + std::to_string(digits - 1) + "Re";
  mpfr_snprintf(buf.data(), buf.size(), fmt.c_str(), v_);
  return std::string(buf.data());
}

#define SD_BINOP(name, fn)                                     \
  Real name(const Real& a, const Real& b, mpfr_rnd_t rnd) {    \
    Real r(a.prec());                                          \
    fn(r.raw(), a.raw(), b.raw(), rnd);                        \
    return r;                                                  \
  }
SD_BINOP(r_add, mpfr_add)
SD_BINOP(r_sub, mpfr_sub)
SD_BINOP(r_mul, mpfr_mul)
SD_BINOP(r_div, mpfr_div)
#undef SD_BINOP

Real r_mul_ui(const Real& a, unsigned long b, mpfr_rnd_t rnd) {
  Real r(a.prec()); mpfr_mul_ui(r.raw(), a.raw(), b, rnd); return r;
}
Real r_div_ui(const Real& a, unsigned long b, mpfr_rnd_t rnd) {
  Real r(a.prec()); mpfr_div_ui(r.raw(), a.raw(), b, rnd); return r;
}
Real r_add_d(const Real& a, double b, mpfr_rnd_t rnd) {
  Real r(a.prec()); mpfr_add_d(r.raw(), a.raw(), b, rnd); return r;
}
Real r_log(const Real& a, mpfr_rnd_t rnd) {
  Real r(a.prec()); mpfr_log(r.raw(), a.raw(), rnd); return r;
}
Real r_exp(const Real& a, mpfr_rnd_t rnd) {
  Real r(a.prec()); mpfr_exp(r.raw(), a.raw(), rnd); return r;
}
Real r_sqrt(const Real& a, mpfr_rnd_t rnd) {
  Real r(a.prec()); mpfr_sqrt(r.raw(), a.raw(), rnd); return r;
}
Real r_pow_ui(const Real& a, unsigned long e, mpfr_rnd_t rnd) {
  Real r(a.prec()); mpfr_pow_ui(r.raw(), a.raw(), e, rnd); return r;
}
Real r_max(const Real& a, const Real& b) { return a.cmp(b) >= 0 ? a : b; }
Real r_min(const Real& a, const Real& b) { return a.cmp(b) <= 0 ? a : b; }
Real r_abs(const Real& a) {
  Real r(a.prec()); mpfr_abs(r.raw(), a.raw(), MPFR_RNDN); return r;
}

}  // namespace sdioph

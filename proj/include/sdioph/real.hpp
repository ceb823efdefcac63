// Arbitrary-precision real numbers on top of MPFR, with explicit rounding
// control.  Every bound this project certifies is produced with directed
// rounding: quantities that enlarge a bound are rounded up, quantities that
// shrink it are rounded down.
#pragma once

#include <mpfr.h>

#include <gmpxx.h>
#include <string>
#include <utility>

namespace sdioph {

inline constexpr mpfr_prec_t kDefaultPrec = 192;

class Real {
 public:
  explicit Real(mpfr_prec_t prec = kDefaultPrec) { mpfr_init2(v_, prec); mpfr_set_ui(v_, 0, MPFR_RNDN); }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o) {
    if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
  ~Real() { mpfr_clear(v_); }

  static Real of(double d, mpfr_prec_t prec = kDefaultPrec) {
    Real r(prec); mpfr_set_d(r.v_, d, MPFR_RNDN); return r;
  }
  static Real of(unsigned long u, mpfr_prec_t prec = kDefaultPrec) {
    Real r(prec); mpfr_set_ui(r.v_, u, MPFR_RNDN); return r;
  }
  static Real of(const mpz_class& z, mpfr_prec_t prec = kDefaultPrec, mpfr_rnd_t rnd = MPFR_RNDN) {
    Real r(prec); mpfr_set_z(r.v_, z.get_mpz_t(), rnd); return r;
  }
  static Real of_str(const std::string& s, mpfr_prec_t prec = kDefaultPrec) {
    Real r(prec); mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN); return r;
  }
  // log of an exact positive integer (or rational num/den), directed.
  static Real log_z(const mpz_class& z, mpfr_rnd_t rnd, mpfr_prec_t prec = kDefaultPrec);
  static Real log_q(const mpq_class& q, mpfr_rnd_t rnd, mpfr_prec_t prec = kDefaultPrec);

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  double d() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sgn() const { return mpfr_sgn(v_); }
  int cmp(const Real& o) const { return mpfr_cmp(v_, o.v_); }
  int cmp(double d) const { return mpfr_cmp_d(v_, d); }
  bool operator<(const Real& o) const { return cmp(o) < 0; }
  bool operator<=(const Real& o) const { return cmp(o) <= 0; }
  bool operator>(const Real& o) const { return cmp(o) > 0; }
  bool operator>=(const Real& o) const { return cmp(o) >= 0; }

  mpz_class floor_z() const { mpz_class z; mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD); return z; }
  mpz_class ceil_z() const { mpz_class z; mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDU); return z; }

  // decimal string with `digits` significant digits (used by reports)
  std::string str(int digits = 30) const;

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

 private:
  mpfr_t v_;
};

// Directed arithmetic.  Result precision = precision of `a`.
Real r_add(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real r_sub(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real r_mul(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real r_div(const Real& a, const Real& b, mpfr_rnd_t rnd);
Real r_mul_ui(const Real& a, unsigned long b, mpfr_rnd_t rnd);
Real r_div_ui(const Real& a, unsigned long b, mpfr_rnd_t rnd);
Real r_add_d(const Real& a, double b, mpfr_rnd_t rnd);
Real r_log(const Real& a, mpfr_rnd_t rnd);
Real r_exp(const Real& a, mpfr_rnd_t rnd);
Real r_sqrt(const Real& a, mpfr_rnd_t rnd);
Real r_pow_ui(const Real& a, unsigned long e, mpfr_rnd_t rnd);
Real r_max(const Real& a, const Real& b);
Real r_min(const Real& a, const Real& b);
Real r_abs(const Real& a);

}  // namespace sdioph

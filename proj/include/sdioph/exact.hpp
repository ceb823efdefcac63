// Exact integer primitives: the prime triple S = {p,q,r}, p-adic valuations
// (including valuations of power products minus one, computed modularly),
// S-unit recognition and sorted enumeration, perfect squares, p-free parts
// and multiplicative dependence over <p,q,r>.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "sdioph/real.hpp"

namespace sdioph {

// Deterministic primality: trial division below 10^4, otherwise Miller-Rabin
// with the 12-prime base set (valid below 3.317e24).  Larger inputs are out
// of the supported range.
bool is_prime(const mpz_class& n);

// The set S = {p, q, r} with p < q < r, all prime.  Logs are kept at
// `prec` bits, rounded to nearest.
struct PrimeTriple {
  mpz_class p, q, r;
  Real log_p, log_q, log_r;
  mpfr_prec_t prec;

  PrimeTriple(mpz_class p_, mpz_class q_, mpz_class r_, mpfr_prec_t prec_ = kDefaultPrec);

  const mpz_class& prime(int i) const { return i == 0 ? p : (i == 1 ? q : r); }
  const Real& log(int i) const { return i == 0 ? log_p : (i == 1 ? log_q : log_r); }
  // log of prime(i) rounded in the given direction
  Real log_dir(int i, mpfr_rnd_t rnd) const { return Real::log_z(prime(i), rnd, prec); }
  bool fits_ulong() const;
  unsigned long ul(int i) const { return prime(i).get_ui(); }
};

// An S-unit p^a q^b r^c together with its exact value.
struct SUnit {
  unsigned a = 0, b = 0, c = 0;
  mpz_class value = 1;
  double log_value = 0.0;

  unsigned exp(int i) const { return i == 0 ? a : (i == 1 ? b : c); }
};

// p^{e_p} q^{e_q} r^{e_r} with signed exponents (a rational in lowest terms).
struct SignedExponentVector {
  long e_p = 0, e_q = 0, e_r = 0;
  long exp(int i) const { return i == 0 ? e_p : (i == 1 ? e_q : e_r); }
};

// nu_p(n) for n != 0.
unsigned long p_adic_valuation(const mpz_class& n, const mpz_class& p);

// n / p^{nu_p(n)}; sign preserved.
mpz_class p_free_part(const mpz_class& n, const mpz_class& p);

// nu_p(prod base_i^{e_i} - 1) for bases coprime to p, exponents not all zero.
// Negative exponents are interpreted through the lowest-terms fraction.  The
// valuation is computed modulo p^k with k doubling up to `cap`; the full
// power product is never formed.  Returns nullopt (over cap) if the quantity
// is still 1 mod p^cap.
std::optional<unsigned long> valuation_of_power_product_minus_one(
    const mpz_class& p, const std::vector<std::pair<mpz_class, long>>& bases,
    unsigned long cap);

// max nu_p(q^beta r^gamma - 1) over |beta| <= beta_bound, |gamma| <= gamma_bound,
// (beta,gamma) != (0,0).  Empty box yields 0.
unsigned long max_valuation_search(const mpz_class& p,
                                   const mpz_class& q, unsigned long beta_bound,
                                   const mpz_class& r, unsigned long gamma_bound);

// Exponent vector of n if n is an S-unit, else nullopt.  n >= 1.
std::optional<SUnit> is_s_unit(const mpz_class& n, const PrimeTriple& S);

// sqrt(n) when n is a perfect square, else nullopt.  n >= 1.
std::optional<mpz_class> perfect_square_root(const mpz_class& n);

// b/a as p^x q^y r^z when both parts of the lowest-terms fraction are
// S-units (i.e. {p,q,r,b/a} multiplicatively dependent); else nullopt.
std::optional<SignedExponentVector> multiplicative_dependence(
    const mpz_class& a, const mpz_class& b, const PrimeTriple& S);

// Streams all S-units with value <= threshold in strictly increasing order.
class SUnitStream {
 public:
  SUnitStream(const PrimeTriple& S, mpz_class threshold);
  // Returns false when exhausted.
  bool next(SUnit& out);

 private:
  struct Node {
    mpz_class value;
    unsigned a, b, c;
  };
  struct Cmp {
    bool operator()(const Node& x, const Node& y) const { return x.value > y.value; }
  };
  const PrimeTriple& S_;
  mpz_class threshold_;
  std::priority_queue<Node, std::vector<Node>, Cmp> heap_;
};

// Inclusive threshold floor(exp(log_bound)) computed with the exponential
// rounded up, so a unit whose log equals the bound is never dropped.
mpz_class s_unit_threshold(const Real& log_bound);

// All S-units with log value <= log_bound, sorted increasing.
std::vector<SUnit> s_unit_enumerate(const PrimeTriple& S, const Real& log_bound);

}  // namespace sdioph

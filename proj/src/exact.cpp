#include "sdioph/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdioph {

namespace {

// n < 3.317e24 makes this base set a deterministic primality certificate.
const char* kMillerRabinLimit = "3317044064679887385961981";

bool miller_rabin(const mpz_class& n, unsigned long a) {
  if (mpz_divisible_ui_p(n.get_mpz_t(), a)) return n == a;
  mpz_class d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  d >>= s;
  mpz_class x, base(a);
  mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n - 1) return true;
  for (unsigned long i = 1; i < s; ++i) {
    x = (x * x) % n;
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime(const mpz_class& n) {
  if (n < 2) return false;
  if (n < 10000) {
    for (unsigned long d = 2; d * d <= n.get_ui(); ++d)
      if (n.get_ui() % d == 0) return false;
    return true;
  }
  static const mpz_class limit(kMillerRabinLimit);
  if (n >= limit) throw std::invalid_argument("prime candidate above deterministic test range");
  for (unsigned long a : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul, 29ul, 31ul, 37ul})
    if (!miller_rabin(n, a)) return false;
  return true;
}

PrimeTriple::PrimeTriple(mpz_class p_, mpz_class q_, mpz_class r_, mpfr_prec_t prec_)
    : p(std::move(p_)), q(std::move(q_)), r(std::move(r_)),
      log_p(prec_), log_q(prec_), log_r(prec_), prec(prec_) {
  if (!(p < q && q < r)) throw std::invalid_argument("primes must satisfy p < q < r");
  for (const mpz_class* x : {&p, &q, &r})
    if (!is_prime(*x)) throw std::invalid_argument("not a prime: " + x->get_str());
  log_p = Real::log_z(p, MPFR_RNDN, prec);
  log_q = Real::log_z(q, MPFR_RNDN, prec);
  log_r = Real::log_z(r, MPFR_RNDN, prec);
}

bool PrimeTriple::fits_ulong() const { return r.fits_ulong_p(); }

unsigned long p_adic_valuation(const mpz_class& n, const mpz_class& p) {
  if (n == 0) throw std::domain_error("p_adic_valuation: n must be nonzero");
  mpz_class rest;
  return mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
}

mpz_class p_free_part(const mpz_class& n, const mpz_class& p) {
  if (n == 0) throw std::domain_error("p_free_part: n must be nonzero");
  mpz_class rest;
  mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
  return rest;
}

std::optional<unsigned long> valuation_of_power_product_minus_one(
    const mpz_class& p, const std::vector<std::pair<mpz_class, long>>& bases,
    unsigned long cap) {
  bool all_zero = true;
  for (const auto& [base, e] : bases) {
    if (e != 0) all_zero = false;
    if (mpz_divisible_p(base.get_mpz_t(), p.get_mpz_t()))
      throw std::domain_error("base shares a factor with p");
  }
  if (all_zero) throw std::domain_error("all exponents zero: value is 0, valuation infinite");

  unsigned long k = std::max<unsigned long>(8, 64 / std::max(1.0, std::log2(p.get_d())));
  for (;;) {
    k = std::min(k, cap);
    mpz_class m;
    mpz_pow_ui(m.get_mpz_t(), p.get_mpz_t(), k);
    mpz_class x(1);
    for (const auto& [base, e] : bases) {
      if (e == 0) continue;
      mpz_class b = base % m;
      if (e < 0 && mpz_invert(b.get_mpz_t(), b.get_mpz_t(), m.get_mpz_t()) == 0)
        throw std::domain_error("base not invertible mod p^k");
      mpz_class t;
      mpz_powm_ui(t.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(std::labs(e)), m.get_mpz_t());
      x = (x * t) % m;
    }
    mpz_class diff = (x - 1) % m;
    if (diff < 0) diff += m;
    if (diff != 0) return p_adic_valuation(diff, p);
    if (k == cap) return std::nullopt;
    k *= 2;
  }
}

namespace {

// One (beta, gamma) cell of the search box, modulo 2^64 when p^k fits a word.
struct WordBox {
  unsigned long m;     // p^K
  unsigned K;
  unsigned long p;
};

unsigned long mulmod_u64(unsigned long a, unsigned long b, unsigned long m) {
  return static_cast<unsigned long>((static_cast<unsigned __int128>(a) * b) % m);
}

unsigned long powmod_u64(unsigned long b, unsigned long e, unsigned long m) {
  unsigned long r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, b, m);
    b = mulmod_u64(b, b, m);
    e >>= 1;
  }
  return r;
}

unsigned long invmod_u64(unsigned long a, unsigned long m) {
  // m is a prime power and a coprime to it; use Euler with phi = m - m/p... a
  // plain extended Euclid is simpler and exact.
  long long t = 0, newt = 1;
  long long rr = static_cast<long long>(m), newr = static_cast<long long>(a % m);
  while (newr != 0) {
    long long qq = rr / newr;
    t -= qq * newt; std::swap(t, newt);
    rr -= qq * newr; std::swap(rr, newr);
  }
  if (t < 0) t += static_cast<long long>(m);
  return static_cast<unsigned long>(t);
}

}  // namespace

unsigned long max_valuation_search(const mpz_class& p,
                                   const mpz_class& q, unsigned long beta_bound,
                                   const mpz_class& r, unsigned long gamma_bound) {
  if (beta_bound == 0 && gamma_bound == 0) return 0;
  if (!p.fits_ulong_p() || !q.fits_ulong_p() || !r.fits_ulong_p())
    throw std::invalid_argument("max_valuation_search: primes out of word range");
  const unsigned long pu = p.get_ui(), qu = q.get_ui(), ru = r.get_ui();

  // largest p^K fitting in 62 bits
  unsigned long m = pu;
  unsigned K = 1;
  while (m <= (1ul << 62) / pu) { m *= pu; ++K; }

  const unsigned long qinv = invmod_u64(qu % m, m);
  const unsigned long rinv = invmod_u64(ru % m, m);

  // nu_p of (q^beta r^gamma - 1) exceeds K only in rare cells; those are
  // recomputed exactly with a larger modulus.
  unsigned long best = 0;
  // q^beta mod m for beta in [-B, B]: walk incrementally.
  unsigned long qpow = powmod_u64(qinv, beta_bound, m);  // beta = -B
  for (long beta = -static_cast<long>(beta_bound); beta <= static_cast<long>(beta_bound); ++beta) {
    unsigned long x = mulmod_u64(qpow, powmod_u64(rinv, gamma_bound, m), m);  // gamma = -G
    for (long gamma = -static_cast<long>(gamma_bound); gamma <= static_cast<long>(gamma_bound); ++gamma) {
      if (!(beta == 0 && gamma == 0)) {
        unsigned long t = x >= 1 ? x - 1 : m - 1;
        if (t == 0) {
          // valuation >= K; escalate this one cell exactly
          auto v = valuation_of_power_product_minus_one(
              p, {{q, beta}, {r, gamma}},
              4 * K + 64);
          if (v && *v > best) best = *v;
        } else if (t % pu == 0) {
          unsigned long v = 0;
          while (t % pu == 0) { t /= pu; ++v; }
          if (v > best) best = v;
        }
      }
      x = mulmod_u64(x, ru, m);
    }
    qpow = mulmod_u64(qpow, qu, m);
  }
  return best;
}

std::optional<SUnit> is_s_unit(const mpz_class& n, const PrimeTriple& S) {
  if (n < 1) return std::nullopt;
  SUnit u;
  mpz_class rest;
  u.a = mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), S.p.get_mpz_t());
  u.b = mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), S.q.get_mpz_t());
  u.c = mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), S.r.get_mpz_t());
  if (rest != 1) return std::nullopt;
  u.value = n;
  u.log_value = u.a * S.log_p.d() + u.b * S.log_q.d() + u.c * S.log_r.d();
  return u;
}

std::optional<mpz_class> perfect_square_root(const mpz_class& n) {
  if (n < 1) return std::nullopt;
  if (!mpz_perfect_square_p(n.get_mpz_t())) return std::nullopt;
  mpz_class s;
  mpz_sqrt(s.get_mpz_t(), n.get_mpz_t());
  return s;
}

std::optional<SignedExponentVector> multiplicative_dependence(
    const mpz_class& a, const mpz_class& b, const PrimeTriple& S) {
  mpq_class ratio(b, a);
  ratio.canonicalize();
  auto num = is_s_unit(mpz_class(ratio.get_num()), S);
  auto den = is_s_unit(mpz_class(ratio.get_den()), S);
  if (!num || !den) return std::nullopt;
  SignedExponentVector v;
  v.e_p = static_cast<long>(num->a) - static_cast<long>(den->a);
  v.e_q = static_cast<long>(num->b) - static_cast<long>(den->b);
  v.e_r = static_cast<long>(num->c) - static_cast<long>(den->c);
  return v;
}

SUnitStream::SUnitStream(const PrimeTriple& S, mpz_class threshold)
    : S_(S), threshold_(std::move(threshold)) {
  if (threshold_ >= 1) heap_.push({mpz_class(1), 0, 0, 0});
}

bool SUnitStream::next(SUnit& out) {
  // Each unit is reached exactly once: multiply by r only while a = b = 0,
  // by q only while a = 0, by p always.
  while (!heap_.empty()) {
    Node n = heap_.top();
    heap_.pop();
    mpz_class vp = n.value * S_.p;
    if (vp <= threshold_) heap_.push({std::move(vp), n.a + 1, n.b, n.c});
    if (n.a == 0) {
      mpz_class vq = n.value * S_.q;
      if (vq <= threshold_) heap_.push({std::move(vq), n.a, n.b + 1, n.c});
      if (n.b == 0) {
        mpz_class vr = n.value * S_.r;
        if (vr <= threshold_) heap_.push({std::move(vr), n.a, n.b, n.c + 1});
      }
    }
    out.a = n.a; out.b = n.b; out.c = n.c;
    out.value = std::move(n.value);
    out.log_value = out.a * S_.log_p.d() + out.b * S_.log_q.d() + out.c * S_.log_r.d();
    return true;
  }
  return false;
}

mpz_class s_unit_threshold(const Real& log_bound) {
  if (log_bound.sgn() < 0) return mpz_class(0);
  return r_exp(log_bound, MPFR_RNDU).floor_z();
}

std::vector<SUnit> s_unit_enumerate(const PrimeTriple& S, const Real& log_bound) {
  std::vector<SUnit> out;
  SUnitStream stream(S, s_unit_threshold(log_bound));
  SUnit u;
  while (stream.next(u)) out.push_back(u);
  return out;
}

}  // namespace sdioph

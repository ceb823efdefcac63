#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sdioph/exact.hpp"
#include "sdioph/linforms.hpp"

using namespace sdioph;

TEST_CASE("weil height of rationals") {
  CHECK(weil_height(mpq_class(7)).d() == doctest::Approx(std::log(7.0)));
  CHECK(weil_height(mpq_class(3, 5)).d() == doctest::Approx(std::log(5.0)));
  CHECK(weil_height(mpq_class(1)).d() == doctest::Approx(0.0));
  CHECK_THROWS(weil_height(mpq_class(0)));
}

TEST_CASE("matveev three-log factor matches the known constant") {
  // C(3,1) * C0 for D = 1 evaluates near 1.6902e10
  double v = matveev_cnc0(3, 1, 1).d();
  CHECK(v > 1.68e10);
  CHECK(v < 1.70e10);
}

TEST_CASE("matveev two-log instance is finite and positive") {
  MatveevInstance inst;
  inst.n = 2;
  inst.D = 1;
  inst.kappa = 1;
  inst.A = {Real::of(1.0), Real::of(1.0)};
  inst.E = Real::of(1.0);
  Real b = matveev_lower_bound(inst);
  CHECK(b.is_finite());
  CHECK(b.d() > 1e8);
  CHECK(b.d() < 1e9);
}

TEST_CASE("matveev four-log coefficient absorbs into 1.893e12 log M") {
  // with E = M large, C(4)C0 W0 <= 1.893e12 log M
  Real M = Real::of_str("1.26e28");
  double lhs = r_mul(matveev_cnc0(4, 1, 1), matveev_w0(M, 1), MPFR_RNDU).d();
  double logM = std::log(1.26e28);
  CHECK(lhs <= 1.893e12 * logM);
  CHECK(lhs >= 1.3e12 * logM);
}

TEST_CASE("matveev bound is monotone in heights and E") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 50; ++it) {
    MatveevInstance a;
    a.n = 3;
    a.A = {Real::of(1.0 + (rng() % 100) / 10.0), Real::of(1.0 + (rng() % 100) / 10.0),
           Real::of(1.0 + (rng() % 100) / 10.0)};
    a.E = Real::of(1.0 + (rng() % 1000));
    MatveevInstance b = a;
    size_t idx = rng() % 3;
    b.A[idx] = r_add(b.A[idx], Real::of(1.0), MPFR_RNDU);
    MatveevInstance c = a;
    c.E = r_mul_ui(c.E, 2, MPFR_RNDU);
    CHECK(matveev_lower_bound(a).d() <= matveev_lower_bound(b).d());
    CHECK(matveev_lower_bound(a).d() <= matveev_lower_bound(c).d());
  }
}

TEST_CASE("matveev bound dominates random three-log forms") {
  // |Lambda| = |b1 log2 + b2 log3 + b3 log5| >= exp(-bound)
  const mpfr_prec_t hp = 256;
  Real l2 = Real::log_z(mpz_class(2), MPFR_RNDN, hp);
  Real l3 = Real::log_z(mpz_class(3), MPFR_RNDN, hp);
  Real l5 = Real::log_z(mpz_class(5), MPFR_RNDN, hp);
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int it = 0; it < 200 && checked < 100; ++it) {
    long b1 = static_cast<long>(rng() % 20001) - 10000;
    long b2 = static_cast<long>(rng() % 20001) - 10000;
    long b3 = static_cast<long>(rng() % 20001) - 10000;
    if (b3 == 0) continue;
    // Lambda at 256 bits
    Real lam(hp);
    mpfr_mul_si(lam.raw(), l2.raw(), b1, MPFR_RNDN);
    Real t(hp);
    mpfr_mul_si(t.raw(), l3.raw(), b2, MPFR_RNDN);
    lam = r_add(lam, t, MPFR_RNDN);
    mpfr_mul_si(t.raw(), l5.raw(), b3, MPFR_RNDN);
    lam = r_add(lam, t, MPFR_RNDN);
    if (lam.sgn() == 0) continue;
    ++checked;
    MatveevInstance inst;
    inst.n = 3;
    inst.A = {Real::log_z(mpz_class(2), MPFR_RNDU), Real::log_z(mpz_class(3), MPFR_RNDU),
              Real::log_z(mpz_class(5), MPFR_RNDU)};
    double An = inst.A[2].d();
    double maxE = 1.0;
    maxE = std::max(maxE, std::abs(static_cast<double>(b1)) * inst.A[0].d() / An);
    maxE = std::max(maxE, std::abs(static_cast<double>(b2)) * inst.A[1].d() / An);
    maxE = std::max(maxE, std::abs(static_cast<double>(b3)) * inst.A[2].d() / An);
    inst.E = Real::of(maxE + 1);
    double bound = matveev_lower_bound(inst).d();
    double loglam = std::log(std::abs(lam.d()));
    CHECK(loglam >= -bound);
  }
  CHECK(checked == 100);
}

TEST_CASE("bugeaud-laurent clamped instance evaluates exactly") {
  BugeaudLaurentInstance inst;
  inst.p = 2;
  inst.h1 = Real::log_z(mpz_class(2), MPFR_RNDU);
  inst.h2 = Real::log_z(mpz_class(2), MPFR_RNDU);
  inst.b1 = 1;
  inst.b2 = 1;
  // E clamps at 10: bound = 48/(log2)^4 * 100 * (log2)^2 = 4800/(log2)^2
  double expect = 4800.0 / (std::log(2.0) * std::log(2.0));
  CHECK(bugeaud_laurent_bound(inst).d() == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("bugeaud-laurent large instance lands near 6.2e8") {
  BugeaudLaurentInstance inst;
  inst.p = 2;
  inst.h1 = Real::log_z(mpz_class(5), MPFR_RNDU);
  inst.h2 = Real::of_str("545.6");
  inst.b1 = mpz_class("12600000000000000000000000000");
  inst.b2 = 1;
  double v = bugeaud_laurent_bound(inst).d();
  CHECK(v > 5.9e8);
  CHECK(v < 6.6e8);
}

TEST_CASE("bugeaud-laurent dominates exact valuations") {
  // eta1 = 3, eta2 = 5, b1 = b2 = 2: nu_2(3^2 5^2 - 1) = 5
  BugeaudLaurentInstance inst;
  inst.p = 2;
  inst.h1 = r_max(weil_height(mpq_class(3)), Real::log_z(mpz_class(2), MPFR_RNDU));
  inst.h2 = r_max(weil_height(mpq_class(5)), Real::log_z(mpz_class(2), MPFR_RNDU));
  inst.b1 = 2;
  inst.b2 = 2;
  CHECK(bugeaud_laurent_bound(inst).d() >= 5.0);

  // random small instances with multiplicatively independent eta
  const long pool[] = {2, 3, 5, 7, 11, 13};
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int it = 0; it < 400 && checked < 100; ++it) {
    long p = pool[rng() % 4];
    long e1 = pool[rng() % 6], e2 = pool[rng() % 6];
    if (e1 % p == 0 || e2 % p == 0 || e1 == e2) continue;
    // multiplicative independence of prime pairs: distinct primes suffice
    long b1 = static_cast<long>(rng() % 8) + 1, b2 = static_cast<long>(rng() % 8) + 1;
    mpz_class val;
    mpz_ui_pow_ui(val.get_mpz_t(), e1, b1);
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), e2, b2);
    val *= t;
    val -= 1;
    unsigned long nu = p_adic_valuation(val, p);
    BugeaudLaurentInstance bi;
    bi.p = p;
    bi.h1 = r_max(weil_height(mpq_class(e1)), Real::log_z(mpz_class(p), MPFR_RNDU));
    bi.h2 = r_max(weil_height(mpq_class(e2)), Real::log_z(mpz_class(p), MPFR_RNDU));
    bi.b1 = b1;
    bi.b2 = b2;
    CHECK(bugeaud_laurent_bound(bi).d() >= static_cast<double>(nu));
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("petho-de weger fixed-point bound") {
  // u = 0, v = 9.03e22 (log 5)^5, h = 2 resolves near 1.26e28
  double v5 = std::pow(std::log(5.0), 5);
  Real b = petho_de_weger_bound(Real::of(0.0), Real::of(9.03e22 * v5), Real::of(2.0));
  CHECK(b.d() > 1.2e28);
  CHECK(b.d() < 1.31e28);
  // v = 0 branch: 2 (4 + 2 e^2)
  Real c = petho_de_weger_bound(Real::of(4.0), Real::of(0.0), Real::of(1.0));
  CHECK(c.d() == doctest::Approx(2 * (4 + 2 * std::exp(2.0))).epsilon(1e-9));
}

TEST_CASE("petho-de weger dominates the largest fixed point") {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 100; ++it) {
    double u = (rng() % 10000) / 100.0;
    double v = (rng() % 10000) / 100.0;
    double h = 1.0 + (rng() % 200) / 100.0;
    Real bound = petho_de_weger_bound(Real::of(u), Real::of(v), Real::of(h));
    // iterate x -> u + v log(x)^h downward from the bound; converges to the
    // largest root from above
    double x = bound.d();
    for (int k = 0; k < 200; ++k) {
      double nx = u + v * std::pow(std::log(std::max(x, 1.000001)), h);
      if (!(nx < x)) break;
      x = nx;
    }
    CHECK(bound.d() >= x - 1e-6 * std::abs(x));
  }
}

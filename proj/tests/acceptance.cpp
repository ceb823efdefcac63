// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  The heavyweight canonical runs are shared across
// criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "sdioph/linforms.hpp"
#include "sdioph/pipeline.hpp"

using namespace sdioph;

namespace {

int failures = 0;

void report(int crit, bool ok, const std::string& detail) {
  std::printf("%s criterion %-2d: %s\n", ok ? "PASS" : "FAIL", crit, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

mpz_class pow10_z(unsigned e) {
  mpz_class c;
  mpz_ui_pow_ui(c.get_mpz_t(), 10, e);
  return c;
}

std::set<std::array<long, 3>> triple_set(const std::vector<TripleRecord>& ts) {
  std::set<std::array<long, 3>> out;
  for (const auto& t : ts) out.insert({t.a.get_si(), t.b.get_si(), t.c.get_si()});
  return out;
}

std::set<std::array<long, 4>> quad_set(const std::vector<QuadrupleRecord>& qs) {
  std::set<std::array<long, 4>> out;
  for (const auto& q : qs) out.insert({q.a.get_si(), q.b.get_si(), q.c.get_si(), q.d.get_si()});
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// The 37 triples printed in the reference list for S = {2,3,5}.
const std::set<std::array<long, 3>> kReference37 = {
    {1, 3, 5},    {1, 7, 9},     {1, 15, 17},  {1, 23, 89},   {1, 5, 19},   {1, 2, 4},
    {1, 5, 7},    {1, 47, 49},   {1, 19, 485}, {1, 7, 23},    {1, 17, 19},  {1, 31, 47},
    {1, 49, 119}, {1, 7, 3749},  {1, 3, 53},   {1, 11, 29},   {1, 9, 71},   {1, 2, 7},
    {1, 7, 17},   {1, 4, 11},    {1, 11, 49},  {3, 13, 83},   {1, 17, 127}, {2, 7, 1562},
    {1, 19, 1151},{1, 3, 8},     {1, 9, 11},   {1, 17, 47},   {1, 159, 161},{1, 29, 31},
    {1, 19, 71},  {1, 127, 287}, {1, 7, 107},  {1, 89, 8191}, {1, 24, 26},  {1, 44, 71},
    {1, 29, 431}};

int default_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace

int main() {
  const int threads = default_threads();
  std::printf("acceptance suite (threads = %d)\n", threads);

  // --- criterion 1: initial bound --------------------------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    PrimeTriple S(2, 3, 5);
    double m = initial_bound(S).M.d();
    bool ok = m >= 1.20e28 && m <= 1.32e28;
    // worst case over all prime triples below 100
    std::vector<int> primes;
    for (int n = 2; n < 100; ++n)
      if (is_prime(mpz_class(n))) primes.push_back(n);
    double worst = 0;
    for (size_t i = 0; i < primes.size(); ++i)
      for (size_t j = i + 1; j < primes.size(); ++j)
        for (size_t k = j + 1; k < primes.size(); ++k) {
          PrimeTriple T(primes[i], primes[j], primes[k]);
          worst = std::max(worst, initial_bound(T).M.d());
        }
    ok = ok && worst <= 3.0e30;
    double dt = seconds_since(t0);
    report(1, ok && dt < 60.0,
           "initial bound: {2,3,5} -> " + fmt(m) + " (window [1.20e28,1.32e28]), worst below 100 -> " +
               fmt(worst) + " (<= 3.0e30), " + fmt(dt) + " s");
  }

  // --- criterion 2: first lattice reduction ----------------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    PrimeTriple S(2, 3, 5);
    BoundLedger led = initial_bound(S);
    led.M = Real::of_str("1.26e28");
    reduce_M0(S, led, CtildePolicy::fixed_policy(pow10_z(88)));
    double m0 = led.M0.d();
    double dt = seconds_since(t0);
    report(2, m0 >= 130.0 && m0 <= 140.0 && dt < 10.0,
           "reduction at scale 10^88: M0 = " + fmt(m0) + " (window [130,140]), " + fmt(dt) + " s");
  }

  // --- criterion 3: exact valuation maxima ------------------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    PrimeTriple S(2, 3, 5);
    BoundLedger led = initial_bound(S);
    led.M4 = Real::of_str("272.8");
    compute_Bpqr(S, led);
    double dt = seconds_since(t0);
    bool ok = led.bp_count == 18 && led.bq_count == 13 && led.br_count == 8 && dt < 60.0;
    report(3, ok,
           "valuation maxima at M4 = 272.8: (" + std::to_string(led.bp_count) + "," +
               std::to_string(led.bq_count) + "," + std::to_string(led.br_count) +
               ") expected (18,13,8), " + fmt(dt) + " s");
  }

  // --- criterion 4: first-pass exponent bounds --------------------------
  {
    PrimeTriple S(2, 3, 5);
    BoundLedger led = initial_bound(S);
    reduce_M0(S, led, CtildePolicy::fixed_policy(pow10_z(88)));
    compute_Bpqr(S, led);
    compute_M5(S, led);
    reduce_exponents(S, led);
    bool ok = led.A.d() >= 5e8 && led.A.d() <= 9.5e8;
    ok = ok && led.B.d() >= 0.65 * 1.73e8 && led.B.d() <= 1.35 * 1.73e8;
    ok = ok && led.C.d() >= 0.65 * 6.33e7 && led.C.d() <= 1.35 * 6.33e7;
    report(4, ok,
           "first-pass exponent bounds: A = " + fmt(led.A.d()) + " B = " + fmt(led.B.d()) +
               " C = " + fmt(led.C.d()));
  }

  // --- criterion 5: five reduction rounds -------------------------------
  BoundLedger led235;
  {
    auto t0 = std::chrono::steady_clock::now();
    PrimeTriple S(2, 3, 5);
    PipelineOptions opt;
    opt.threads = threads;
    led235 = iterate_bounds(S, 5, opt);
    double dt = seconds_since(t0);
    bool ok = led235.M0.d() <= 35.0 && led235.M4.d() <= 70.0 &&
              std::abs(led235.M4.d() - led235.M5.d()) < 1e-9 && led235.A.d() <= 6e6 &&
              led235.B.d() <= 2e6 && led235.C.d() <= 1.5e6 && dt < 120.0;
    report(5, ok,
           "after 5 rounds: M0 = " + fmt(led235.M0.d()) + " (<= 35), M4 = M5 = " +
               fmt(led235.M4.d()) + " (<= 70), A = " + fmt(led235.A.d()) + " (<= 6e6), B = " +
               fmt(led235.B.d()) + " (<= 2e6), C = " + fmt(led235.C.d()) + " (<= 1.5e6), " +
               fmt(dt) + " s");
  }

  // --- criteria 6-8 share the canonical runs ---------------------------
  PipelineResult res235;
  {
    auto t0 = std::chrono::steady_clock::now();
    PrimeTriple S(2, 3, 5);
    PipelineOptions opt;
    opt.threads = threads;
    res235 = find_all_quadruples(S, opt);
    double dt = seconds_since(t0);

    auto got = triple_set(res235.triples);
    std::vector<std::array<long, 3>> missing, extra;
    for (const auto& t : kReference37)
      if (!got.count(t)) missing.push_back(t);
    for (const auto& t : got)
      if (!kReference37.count(t)) extra.push_back(t);
    bool exact = missing.empty() && extra.empty();
    std::string detail = "triple scan {2,3,5}: " + std::to_string(got.size()) +
                         " triples in " + fmt(dt) + " s";
    if (!missing.empty()) detail += ", missing " + std::to_string(missing.size());
    if (!extra.empty()) {
      detail += ", beyond the reference list:";
      for (const auto& t : extra)
        detail += " (" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                  std::to_string(t[2]) + ")";
      bool extras_genuine = true;
      PrimeTriple T(2, 3, 5);
      for (const auto& t : extra) {
        extras_genuine = extras_genuine && is_s_unit(mpz_class(t[0]) * t[1] + 1, T) &&
                         is_s_unit(mpz_class(t[0]) * t[2] + 1, T) &&
                         is_s_unit(mpz_class(t[1]) * t[2] + 1, T);
      }
      detail += extras_genuine ? " [verified genuine S-Diophantine triples missing from the "
                                 "reference list; see decisions ledger]"
                               : " [NOT genuine - enumeration bug]";
    }
    report(6, exact, detail);
  }

  // --- criterion 7: per-triple reduction anchors ------------------------
  {
    double m135 = -1, m179 = -1;
    for (const auto& t : res235.triples) {
      if (t.a == 1 && t.b == 3 && t.c == 5 && t.M3) m135 = *t.M3;
      if (t.a == 1 && t.b == 7 && t.c == 9 && t.M3) m179 = *t.M3;
    }
    bool ok = m135 >= 37.0 && m135 <= 42.0 && m179 >= 44.0 && m179 <= 50.0;
    report(7, ok,
           "per-triple bounds at scale 10^25: (1,3,5) -> " + fmt(m135) +
               " (window [37,42]), (1,7,9) -> " + fmt(m179) + " (window [44,50])");
  }

  // --- criterion 8: end-to-end theorems ---------------------------------
  std::vector<std::pair<std::array<int, 3>, std::set<std::array<long, 4>>>> expected = {
      {{2, 3, 5}, {}},
      {{2, 3, 11}, {{1, 3, 5, 7}}},
      {{2, 3, 29}, {{1, 5, 7, 23}}},
      {{2, 11, 37}, {{1, 3, 7, 21}}},
  };
  std::vector<PipelineResult> results8;
  {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = quad_set(res235.quadruples).empty();
    std::string detail = "end-to-end: {2,3,5} -> " + std::to_string(res235.quadruples.size()) +
                         " quadruples (expected 0)";
    results8.push_back(res235);
    for (size_t i = 1; i < expected.size(); ++i) {
      const auto& [pr, want] = expected[i];
      PrimeTriple S(pr[0], pr[1], pr[2]);
      PipelineOptions opt;
      opt.threads = threads;
      PipelineResult res = find_all_quadruples(S, opt);
      bool match = quad_set(res.quadruples) == want;
      ok = ok && match;
      detail += "; {" + std::to_string(pr[0]) + "," + std::to_string(pr[1]) + "," +
                std::to_string(pr[2]) + "} -> " + std::to_string(res.quadruples.size()) +
                (match ? " ok" : " MISMATCH");
      results8.push_back(std::move(res));
    }
    detail += ", " + fmt(seconds_since(t0)) + " s";
    report(8, ok, detail);
  }

  // --- criterion 9: oracle equivalence ----------------------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail = "oracle equivalence:";
    const unsigned long c_cap = 2000, d_cap = 500;
    std::vector<std::array<int, 3>> sets = {
        {2, 3, 5}, {2, 3, 7}, {2, 3, 11}, {2, 5, 7}, {3, 5, 7}};
    for (const auto& pr : sets) {
      PrimeTriple S(pr[0], pr[1], pr[2]);
      OracleResult oracle = brute_force_oracle(S, c_cap, d_cap);
      // pipeline triples under an equivalent cap: every triple with c <= cap
      // satisfies log s2, log s4 < 2 log(cap + 1)
      BoundLedger led;
      led.M0 = Real::of(2 * std::log(static_cast<double>(c_cap) + 1));
      led.M4 = led.M0;
      PipelineOptions opt;
      opt.threads = threads;
      auto pipeline = enumerate_triples(S, led, opt);
      std::set<std::array<long, 3>> capped;
      for (const auto& t : triple_set(pipeline))
        if (t[2] <= static_cast<long>(c_cap)) capped.insert(t);
      auto os = triple_set(oracle.triples);
      bool sub = std::includes(capped.begin(), capped.end(), os.begin(), os.end());
      bool sup = std::includes(os.begin(), os.end(), capped.begin(), capped.end());
      bool quads_ok = true;
      if (!oracle.quadruples.empty()) {
        // covered by a full pipeline run where available
        bool found_full = false;
        for (size_t i = 0; i < expected.size(); ++i)
          if (expected[i].first == pr) {
            auto full = quad_set(results8[i].quadruples);
            auto oq = quad_set(oracle.quadruples);
            quads_ok = std::includes(full.begin(), full.end(), oq.begin(), oq.end());
            found_full = true;
          }
        if (!found_full) quads_ok = false;
      }
      bool this_ok = sub && sup && quads_ok;
      ok = ok && this_ok;
      detail += " {" + std::to_string(pr[0]) + "," + std::to_string(pr[1]) + "," +
                std::to_string(pr[2]) + "}:" + std::to_string(os.size()) + "t/" +
                std::to_string(oracle.quadruples.size()) + "q" + (this_ok ? " ok" : " MISMATCH");
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 300.0;
    report(9, ok, detail + ", " + fmt(dt) + " s");
  }

  // --- criterion 10: invariant suites ------------------------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    int rc = 0;
    // LLL invariants, CVP domination, Bugeaud-Laurent, Matveev, fixed-point
    // dominance and valuation correctness are covered by the unit suites;
    // here a condensed rerun provides the single acceptance line.
    {
      std::mt19937_64 rng(9001);
      const mpq_class delta(3, 4);
      for (int it = 0; it < 200 && rc == 0; ++it) {
        int k = 2 + static_cast<int>(rng() % 3);
        IntegerLattice L;
        L.k = k;
        L.basis.assign(k, std::vector<mpz_class>(k));
        do {
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
              L.basis[i][j] = static_cast<long>(rng() % 2001) - 1000;
        } while (L.determinant() == 0);
        mpz_class det_before = abs(L.determinant());
        GramSchmidtData gs = lll_reduce(L);
        if (abs(L.determinant()) != det_before) rc = 1;
        for (int i = 0; i < k && rc == 0; ++i)
          for (int j = 0; j < i; ++j)
            if (abs(gs.mu[i][j]) > mpq_class(1, 2)) rc = 2;
        for (int i = 1; i < k && rc == 0; ++i)
          if (gs.norms_sq[i] < (delta - gs.mu[i][i - 1] * gs.mu[i][i - 1]) * gs.norms_sq[i - 1])
            rc = 3;
      }
    }
    if (rc == 0) {  // CVP domination on 100 instances
      std::mt19937_64 rng(9002);
      for (int it = 0; it < 100 && rc == 0; ++it) {
        int k = 2 + static_cast<int>(rng() % 2);
        IntegerLattice L;
        L.k = k;
        L.basis.assign(k, std::vector<mpz_class>(k));
        do {
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
              L.basis[i][j] = static_cast<long>(rng() % 1001) - 500;
        } while (L.determinant() == 0);
        GramSchmidtData gs = lll_reduce(L);
        std::vector<mpz_class> y(k);
        for (auto& v : y) v = static_cast<long>(rng() % 1001) - 500;
        mpq_class c1sq = lattice_lower_bound_sq(L, gs, y);
        mpq_class best = -1;
        std::vector<int> coef(k, -10);
        for (;;) {
          std::vector<mpz_class> v(k, 0);
          bool zero = true;
          for (int i = 0; i < k; ++i)
            for (int t = 0; t < k; ++t) v[t] += coef[i] * L.basis[i][t];
          mpq_class n = 0;
          for (int t = 0; t < k; ++t) {
            v[t] -= y[t];
            if (v[t] != 0) zero = false;
            n += mpq_class(v[t]) * v[t];
          }
          if (!zero && (best < 0 || n < best)) best = n;
          int pos = 0;
          while (pos < k && ++coef[pos] > 10) coef[pos++] = -10;
          if (pos == k) break;
        }
        if (best >= 0 && c1sq > best) rc = 4;
      }
    }
    if (rc == 0) {  // Bugeaud-Laurent validity on 100 instances
      std::mt19937_64 rng(9003);
      const long pool[] = {2, 3, 5, 7, 11, 13};
      int done = 0;
      while (done < 100 && rc == 0) {
        long p = pool[rng() % 4];
        long e1 = pool[rng() % 6], e2 = pool[rng() % 6];
        if (e1 % p == 0 || e2 % p == 0 || e1 == e2) continue;
        long b1 = static_cast<long>(rng() % 8) + 1, b2 = static_cast<long>(rng() % 8) + 1;
        mpz_class val, t;
        mpz_ui_pow_ui(val.get_mpz_t(), e1, b1);
        mpz_ui_pow_ui(t.get_mpz_t(), e2, b2);
        val = val * t - 1;
        unsigned long nu = p_adic_valuation(val, p);
        BugeaudLaurentInstance bi;
        bi.p = p;
        bi.h1 = r_max(Real::log_z(mpz_class(e1), MPFR_RNDU), Real::log_z(mpz_class(p), MPFR_RNDU));
        bi.h2 = r_max(Real::log_z(mpz_class(e2), MPFR_RNDU), Real::log_z(mpz_class(p), MPFR_RNDU));
        bi.b1 = b1;
        bi.b2 = b2;
        if (bugeaud_laurent_bound(bi).d() < static_cast<double>(nu)) rc = 5;
        ++done;
      }
    }
    if (rc == 0) {  // Matveev validity on 100 instances
      std::mt19937_64 rng(9004);
      const mpfr_prec_t hp = 256;
      Real l2 = Real::log_z(mpz_class(2), MPFR_RNDN, hp);
      Real l3 = Real::log_z(mpz_class(3), MPFR_RNDN, hp);
      Real l5 = Real::log_z(mpz_class(5), MPFR_RNDN, hp);
      int done = 0;
      while (done < 100 && rc == 0) {
        long b1 = static_cast<long>(rng() % 20001) - 10000;
        long b2 = static_cast<long>(rng() % 20001) - 10000;
        long b3 = static_cast<long>(rng() % 20001) - 10000;
        if (b3 == 0) continue;
        Real lam(hp), t(hp);
        mpfr_mul_si(lam.raw(), l2.raw(), b1, MPFR_RNDN);
        mpfr_mul_si(t.raw(), l3.raw(), b2, MPFR_RNDN);
        lam = r_add(lam, t, MPFR_RNDN);
        mpfr_mul_si(t.raw(), l5.raw(), b3, MPFR_RNDN);
        lam = r_add(lam, t, MPFR_RNDN);
        if (lam.sgn() == 0) continue;
        MatveevInstance inst;
        inst.n = 3;
        inst.A = {Real::log_z(mpz_class(2), MPFR_RNDU), Real::log_z(mpz_class(3), MPFR_RNDU),
                  Real::log_z(mpz_class(5), MPFR_RNDU)};
        double An = inst.A[2].d();
        double maxE = 1.0;
        maxE = std::max(maxE, std::abs(static_cast<double>(b1)) * inst.A[0].d() / An);
        maxE = std::max(maxE, std::abs(static_cast<double>(b2)) * inst.A[1].d() / An);
        maxE = std::max(maxE, std::abs(static_cast<double>(b3)));
        inst.E = Real::of(maxE + 1);
        if (std::log(std::abs(lam.d())) < -matveev_lower_bound(inst).d()) rc = 6;
        ++done;
      }
    }
    if (rc == 0) {  // fixed-point dominance on 100 instances
      std::mt19937_64 rng(9005);
      for (int it = 0; it < 100 && rc == 0; ++it) {
        double u = (rng() % 10000) / 100.0;
        double v = (rng() % 10000) / 100.0;
        double h = 1.0 + (rng() % 200) / 100.0;
        double bound = petho_de_weger_bound(Real::of(u), Real::of(v), Real::of(h)).d();
        double x = bound;
        for (int k2 = 0; k2 < 200; ++k2) {
          double nx = u + v * std::pow(std::log(std::max(x, 1.000001)), h);
          if (!(nx < x)) break;
          x = nx;
        }
        if (bound < x - 1e-6 * std::abs(x)) rc = 7;
      }
    }
    if (rc == 0) {  // valuation correctness on 1e4 random integers
      std::mt19937_64 rng(9006);
      for (int it = 0; it < 10000 && rc == 0; ++it) {
        mpz_class n = static_cast<unsigned long>(rng() % 1000000 + 1);
        for (unsigned long p : {2ul, 3ul, 5ul, 7ul}) {
          unsigned long v = p_adic_valuation(n, p);
          mpz_class pv;
          mpz_ui_pow_ui(pv.get_mpz_t(), p, v);
          if (!mpz_divisible_p(n.get_mpz_t(), pv.get_mpz_t())) rc = 8;
          pv *= p;
          if (mpz_divisible_p(n.get_mpz_t(), pv.get_mpz_t())) rc = 8;
        }
      }
    }
    double dt = seconds_since(t0);
    report(10, rc == 0 && dt < 120.0,
           "invariant suites (LLL/CVP/valuation/linear-form bounds): " +
               std::string(rc == 0 ? "all hold" : ("violation code " + std::to_string(rc))) +
               ", " + fmt(dt) + " s");
  }

  std::printf("%s (%d criterion failures)\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              failures);
  return failures == 0 ? 0 : 1;
}

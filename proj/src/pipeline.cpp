#include "sdioph/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <type_traits>

#include "sdioph/linforms.hpp"

namespace sdioph {

PipelineOptions::PipelineOptions() {
  mpz_class c25;
  mpz_ui_pow_ui(c25.get_mpz_t(), 10, 25);
  m3_policy = CtildePolicy::fixed_policy(c25);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

mpz_class pow10_z(unsigned long e) {
  mpz_class c;
  mpz_ui_pow_ui(c.get_mpz_t(), 10, e);
  return c;
}

// ---------------------------------------------------------------------------
// Step I
// ---------------------------------------------------------------------------

Real log15e(mpfr_prec_t prec) {  // log(1.5 e) = 1 + log 1.5, rounded up
  return r_add(Real::of(1.0, prec), r_log(Real::of_str("1.5", prec), MPFR_RNDU), MPFR_RNDU);
}

}  // namespace

BoundLedger initial_bound(const PrimeTriple& S) {
  const mpfr_prec_t prec = S.prec;
  const mpfr_rnd_t U = MPFR_RNDU;
  Real LP = Real::log_z(S.r, U, prec);
  Real Lp_dn = Real::log_z(S.p, MPFR_RNDD, prec);
  Real log2 = Real::log_z(mpz_class(2), U, prec);

  // Three-log and four-log Matveev factors with W0 <= log(1.5e) log(2M)
  // absorbed (valid once 2M >= 33, always the case for these bounds).
  Real K124 = r_mul(matveev_cnc0(3, 1, 1, prec), log15e(prec), U);
  Real K3 = r_mul(matveev_cnc0(4, 1, 1, prec), log15e(prec), U);

  // M <= u0 + b0 log(2M) + v0 log(2M)^2; substitute x = 2M and resolve.
  Real u0 = r_div(r_mul_ui(log2, 2, U), Lp_dn, U);
  Real b0 = r_mul(r_mul(r_mul_ui(K3, 2, U), r_pow_ui(LP, 2, U), U), log2, U);
  Real v0 = r_mul(r_mul(r_mul_ui(K3, 2, U), K124, U), r_pow_ui(LP, 5, U), U);
  Real u = r_mul_ui(u0, 2, U);
  Real v = r_add(r_mul_ui(b0, 2, U), r_mul_ui(v0, 2, U), U);
  Real x = petho_de_weger_bound(u, v, Real::of(2.0, prec));
  Real M = r_div_ui(x, 2, U);

  BoundLedger led;
  led.M = M;
  // Coarse but valid seeds; the first reduction round replaces them.
  Real log2M = r_log(r_mul_ui(M, 2, U), U);
  led.M0 = r_add(log2, r_mul(r_mul(K124, r_pow_ui(LP, 3, U), U), log2M, U), U);
  led.M4 = r_mul_ui(led.M0, 2, U);
  led.M5 = r_mul(M, LP, U);
  led.A = M;
  led.B = M;
  led.C = M;
  led.alpha5 = M;
  led.beta5 = M;
  led.gamma5 = M;
  led.iteration = 0;
  return led;
}

// ---------------------------------------------------------------------------
// Lattice reduction driver: candidate scale ladder, both coordinate orders.
// ---------------------------------------------------------------------------

namespace {

std::vector<mpz_class> ctilde_ladder(const mpz_class& X0) {
  double lg = std::log10(std::max(2.0, X0.get_d()));
  long e0 = static_cast<long>(std::ceil(3.0 * lg)) + 5;
  std::vector<mpz_class> out;
  if (e0 <= 40) {
    static const int mant10[] = {10, 12, 15, 20, 25, 30, 40, 50, 60, 80};
    for (long e = std::max<long>(7, e0 - 12); e <= e0; ++e)
      for (int m : mant10) out.push_back(mpz_class(m) * pow10_z(e - 1));
  } else {
    for (long e = e0 - 12; e <= e0; e += 3)
      for (int m : {10, 30}) out.push_back(mpz_class(m) * pow10_z(e - 1));
  }
  return out;
}

struct ReductionInput {
  const PrimeTriple& S;
  mpq_class eta0_arg{1};                 // 1 -> homogeneous
  std::array<mpz_class, 3> X{};          // coefficient bounds in (p,q,r) order
  // When true the all-zero / exceptional candidate is known impossible for
  // the Diophantine instance and is not folded into the bound.
  bool exceptional_impossible = false;
  mpfr_prec_t prec = kDefaultPrec;
};

// Bound implied by the single candidate solution (0,...,0,x_k): the linear
// form evaluated there, |eta0 + x_k eta_k| >= lower, gives
// H <= log c3 - log(lower).
std::optional<Real> exceptional_height(const mpq_class& eta0_arg, const mpq_class& etak_arg,
                                       const mpz_class& xk, mpfr_prec_t prec) {
  // exact-zero test: eta0 * etak^xk == 1 (only reachable for small |xk|,
  // since |xk| log2 <= |log eta0|)
  if (abs(xk) <= 100000) {
    mpq_class base = etak_arg;
    if (xk < 0) base = 1 / base;
    mpq_class acc(1), sq = base;
    mpz_class bits = abs(xk);
    while (bits > 0) {
      if (mpz_odd_p(bits.get_mpz_t())) acc *= sq;
      bits >>= 1;
      if (bits > 0) sq *= sq;
    }
    if (eta0_arg * acc == 1) return std::nullopt;  // form vanishes exactly
  }
  for (mpfr_prec_t p = prec; p <= (1 << 20); p *= 2) {
    Real lo = Real::log_q(eta0_arg, MPFR_RNDD, p);
    Real hi = Real::log_q(eta0_arg, MPFR_RNDU, p);
    Real tk_lo = Real::log_q(etak_arg, MPFR_RNDD, p);
    Real tk_hi = Real::log_q(etak_arg, MPFR_RNDU, p);
    Real xk_r = Real::of(xk, p, MPFR_RNDN);
    Real a = r_add(lo, r_mul(xk_r, xk >= 0 ? tk_lo : tk_hi, MPFR_RNDD), MPFR_RNDD);
    Real b = r_add(hi, r_mul(xk_r, xk >= 0 ? tk_hi : tk_lo, MPFR_RNDU), MPFR_RNDU);
    if (a.sgn() > 0 || b.sgn() < 0) {
      Real lower = a.sgn() > 0 ? a : r_abs(b);
      Real H = r_sub(r_log(Real::of(2.0, p), MPFR_RNDU), r_log(lower, MPFR_RNDD), MPFR_RNDU);
      return H;
    }
  }
  throw std::runtime_error("exceptional_height: cannot certify nonzero linear form");
}

struct BestReduction {
  Real H;
  mpz_class C_tilde;
  bool ascending = false;
  double c1 = 0.0;
};

std::optional<BestReduction> try_reduction_at(const ReductionInput& in, const mpz_class& Ct) {
  std::optional<BestReduction> best;
  for (bool ascending : {true, false}) {
    LatticeProblem prob;
    prob.C_tilde = Ct;
    prob.c3 = Real::of(2.0, in.prec);
    prob.c4 = Real::of(1.0, in.prec);
    prob.eta0_arg = in.eta0_arg;
    std::array<int, 3> ord = ascending ? std::array<int, 3>{0, 1, 2} : std::array<int, 3>{2, 1, 0};
    for (int i : ord) {
      prob.eta_args.push_back(mpq_class(in.S.prime(i)));
      prob.X.push_back(in.X[static_cast<size_t>(i)]);
    }
    ReductionOutcome oc = reduce_linear_form(prob);
    if (oc.kind != ReductionKind::NewBound) continue;
    Real H = oc.H_bound;
    if (oc.exceptional_xk && !in.exceptional_impossible) {
      auto He = exceptional_height(prob.eta0_arg, prob.eta_args.back(), *oc.exceptional_xk, in.prec);
      if (He) H = r_max(H, *He);
      // a vanishing exceptional form would leave the candidate unbounded
      else continue;
    }
    if (!best || H < best->H) best = BestReduction{H, Ct, ascending, oc.c1};
  }
  return best;
}

BestReduction best_reduction(const ReductionInput& in, const CtildePolicy& policy) {
  std::vector<mpz_class> cands;
  if (policy.mode == CtildePolicy::Mode::Fixed) {
    cands.push_back(policy.fixed);
  } else {
    mpz_class X0 = std::max({in.X[0], in.X[1], in.X[2]});
    cands = ctilde_ladder(X0);
  }
  for (int escalation = 0; escalation <= 4; ++escalation) {
    std::optional<BestReduction> best;
    for (const mpz_class& Ct : cands) {
      auto r = try_reduction_at(in, Ct);
      if (r && (!best || r->H < best->H)) best = r;
    }
    if (best) return *best;
    // all candidates inconclusive: scale the exponent by 3/2 and retry
    std::vector<mpz_class> next;
    for (const mpz_class& Ct : cands) {
      size_t digits = mpz_sizeinbase(Ct.get_mpz_t(), 10);
      next.push_back(pow10_z(static_cast<unsigned long>((digits * 3 + 1) / 2)));
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cands = std::move(next);
  }
  throw ReductionFailure("lattice reduction inconclusive after scale escalation");
}

}  // namespace

// ---------------------------------------------------------------------------
// Step II
// ---------------------------------------------------------------------------

void reduce_M0(const PrimeTriple& S, BoundLedger& led, const CtildePolicy& policy) {
  const mpfr_rnd_t U = MPFR_RNDU;
  ReductionInput in{S};
  in.prec = S.prec;
  // The all-zero solution would force equal members in the quadruple.
  in.exceptional_impossible = true;
  if (led.iteration == 0) {
    mpz_class twoM = r_mul_ui(led.M, 2, U).floor_z();
    in.X = {twoM, twoM, twoM};
  } else {
    // In the four-term exponent differences at most one term exceeds the
    // second-largest bound, so |A'| <= A + alpha5 (and 2A always).
    auto cap = [](const Real& top, const Real& second) {
      return r_min(r_mul_ui(top, 2, MPFR_RNDU), r_add(top, second, MPFR_RNDU)).floor_z();
    };
    in.X = {cap(led.A, led.alpha5), cap(led.B, led.beta5), cap(led.C, led.gamma5)};
  }
  BestReduction r = best_reduction(in, policy);
  led.M0 = r_min(led.M0, r.H);
  led.M4 = r_min(led.M4, r_mul_ui(led.M0, 2, U));
  std::string ct = r.C_tilde.get_str();
  led.notes.push_back("M0 reduction used C~ = " + ct.substr(0, 1) + "." + ct.substr(1, 1) + "e" +
                      std::to_string(ct.size() - 1) +
                      (r.ascending ? " (ascending)" : " (descending)"));
}

// ---------------------------------------------------------------------------
// Step III
// ---------------------------------------------------------------------------

void compute_Bpqr(const PrimeTriple& S, BoundLedger& led) {
  const mpfr_rnd_t U = MPFR_RNDU;
  auto box = [&](int i) -> unsigned long {
    Real b = r_div(led.M4, S.log_dir(i, MPFR_RNDD), U);
    mpz_class z = b.floor_z();
    if (z < 0) return 0;
    return z.get_ui();
  };
  unsigned long ba = box(0), bb = box(1), bc = box(2);
  led.bp_count = max_valuation_search(S.p, S.q, bb, S.r, bc);
  led.bq_count = max_valuation_search(S.q, S.p, ba, S.r, bc);
  led.br_count = max_valuation_search(S.r, S.p, ba, S.q, bb);
  led.Bp = r_mul_ui(S.log_dir(0, U), led.bp_count, U);
  led.Bq = r_mul_ui(S.log_dir(1, U), led.bq_count, U);
  led.Br = r_mul_ui(S.log_dir(2, U), led.br_count, U);
  led.Bscript = r_max(led.Bp, r_max(led.Bq, led.Br));
  led.valuations_known = true;
}

// ---------------------------------------------------------------------------
// Step IV
// ---------------------------------------------------------------------------

void compute_M5(const PrimeTriple& S, BoundLedger& led) {
  const mpfr_rnd_t U = MPFR_RNDU;
  led.M5 = r_min(led.M5, r_max(r_add(led.M0, led.Bscript, U), led.M4));
  auto fifth = [&](const Real& Bv, int i) {
    return r_div(r_max(r_add(led.M0, Bv, U), led.M4), S.log_dir(i, MPFR_RNDD), U);
  };
  led.alpha5 = r_min(led.alpha5, fifth(led.Bp, 0));
  led.beta5 = r_min(led.beta5, fifth(led.Bq, 1));
  led.gamma5 = r_min(led.gamma5, fifth(led.Br, 2));
}

void reduce_exponents(const PrimeTriple& S, BoundLedger& led) {
  const mpfr_rnd_t U = MPFR_RNDU;
  const mpfr_prec_t prec = S.prec;
  const Real* prev[3] = {&led.A, &led.B, &led.C};
  Real h2 = r_add(led.M4, led.M5, U);

  Real bounds[3] = {Real(prec), Real(prec), Real(prec)};
  const Real* Bv[3] = {&led.Bp, &led.Bq, &led.Br};
  for (int vi = 0; vi < 3; ++vi) {
    Real Cv = Real::of(0.0, prec);
    for (int oi = 0; oi < 3; ++oi) {
      if (oi == vi) continue;
      BugeaudLaurentInstance inst;
      inst.p = S.prime(vi);
      inst.h1 = r_max(S.log_dir(oi, U), S.log_dir(vi, U));
      inst.h2 = r_max(h2, S.log_dir(vi, U));
      // the outer coefficient is an exponent of prime oi, so the previous
      // round's bound for that exponent caps it (first round: M)
      Real cap = led.iteration == 0 ? led.M : r_min(led.M, *prev[oi]);
      inst.b1 = cap.floor_z();
      if (inst.b1 < 1) inst.b1 = 1;
      inst.b2 = 1;
      Cv = r_max(Cv, bugeaud_laurent_bound(inst));
    }
    // Case III dominates Cases I/II: (M4 + Bv)/log v + Cv
    bounds[vi] = r_add(r_div(r_add(led.M4, *Bv[vi], U), S.log_dir(vi, MPFR_RNDD), U), Cv, U);
  }
  // Either M <= (M0 + 3 M5)/log p or the per-prime bounds apply.
  Real D0 = r_div(r_add(led.M0, r_mul_ui(led.M5, 3, U), U), S.log_dir(0, MPFR_RNDD), U);
  led.A = r_min(led.A, r_max(bounds[0], D0));
  led.B = r_min(led.B, r_max(bounds[1], D0));
  led.C = r_min(led.C, r_max(bounds[2], D0));
  led.M = r_min(led.M, r_max(led.A, r_max(led.B, led.C)));
}

// ---------------------------------------------------------------------------
// Step V
// ---------------------------------------------------------------------------

BoundLedger iterate_bounds(const PrimeTriple& S, int rounds, const PipelineOptions& opt) {
  if (rounds < 1) throw std::invalid_argument("iterate_bounds: rounds >= 1 required");
  BoundLedger led = initial_bound(S);
  for (int round = 1; round <= rounds; ++round) {
    double m_before = led.M.d();
    reduce_M0(S, led, opt.m0_policy);
    compute_Bpqr(S, led);
    compute_M5(S, led);
    reduce_exponents(S, led);
    led.iteration = round;
    BoundLedger snap = led;
    snap.history.clear();
    led.history.push_back(std::move(snap));
    if (opt.progress)
      opt.progress("round " + std::to_string(round) + ": M0=" + std::to_string(led.M0.d()) +
                   " M4=" + std::to_string(led.M4.d()) + " A=" + std::to_string(led.A.d()) +
                   " B=" + std::to_string(led.B.d()) + " C=" + std::to_string(led.C.d()));
    double m_after = led.M.d();
    if (round >= 2 && m_after > 0 && (m_before - m_after) < 0.01 * m_before) break;
  }
  return led;
}

// ---------------------------------------------------------------------------
// Step VI
// ---------------------------------------------------------------------------

namespace {

using u128 = unsigned __int128;

uint64_t isqrt_u128(u128 x) {
  if (x == 0) return 0;
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(x)));
  // a couple of Newton fix-ups around the floating seed
  for (int i = 0; i < 2; ++i) {
    u128 q = r ? x / r : x;
    r = static_cast<uint64_t>((static_cast<u128>(r) + q) / 2);
  }
  while (static_cast<u128>(r) * r > x) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= x) ++r;
  return r;
}

template <typename I>
struct IntOps;

template <>
struct IntOps<u128> {
  static u128 from_mpz(const mpz_class& z) {
    u128 hi = static_cast<u128>(mpz_class(z >> 64).get_ui());
    u128 lo = static_cast<u128>(mpz_class(z & mpz_class("18446744073709551615")).get_ui());
    return (hi << 64) | lo;
  }
  static mpz_class to_mpz(u128 v) {
    mpz_class hi(static_cast<unsigned long>(v >> 64));
    mpz_class lo(static_cast<unsigned long>(v & ~0ull));
    return (hi << 64) | lo;
  }
  static bool square_root(u128 v, u128& out) {
    uint64_t r = isqrt_u128(v);
    if (static_cast<u128>(r) * r != v) return false;
    out = r;
    return true;
  }
};

template <>
struct IntOps<mpz_class> {
  static mpz_class from_mpz(const mpz_class& z) { return z; }
  static mpz_class to_mpz(const mpz_class& v) { return v; }
  static bool square_root(const mpz_class& v, mpz_class& out) {
    if (!mpz_perfect_square_p(v.get_mpz_t())) return false;
    mpz_sqrt(out.get_mpz_t(), v.get_mpz_t());
    return true;
  }
};

struct UnitEntry {
  std::array<uint32_t, 3> e;
};

// quadratic-residue filter thresholds: for the prime 2 the minimum triple
// exponent is at most 1; for p = 3 mod 4 it is 0; p = 1 mod 4 unconstrained.
struct ResidueRule {
  bool active = false;
  uint32_t cap = 0;
};

template <typename I>
struct EnumContext {
  std::vector<I> val4;                 // s4 candidates ascending
  std::vector<UnitEntry> ex4;
  std::vector<I> val2;                 // s2 candidates ascending (<= e^{M0})
  std::vector<UnitEntry> ex2;
  std::array<ResidueRule, 3> rules;
  // s1 candidate lists per constraint signature (bit i: prime i constrained)
  std::array<std::vector<I>, 8> s1_val;
  std::array<std::vector<UnitEntry>, 8> s1_ex;
  std::array<std::vector<I>, 3> ppow;  // prime powers for gcd assembly
  bool filter_s2_divides_s4 = true;
};

template <typename I>
void build_context(EnumContext<I>& ctx, const PrimeTriple& S,
                   const std::vector<SUnit>& units4, const std::vector<SUnit>& units2) {
  for (const SUnit& u : units4) {
    ctx.val4.push_back(IntOps<I>::from_mpz(u.value));
    ctx.ex4.push_back({{u.a, u.b, u.c}});
  }
  for (const SUnit& u : units2) {
    ctx.val2.push_back(IntOps<I>::from_mpz(u.value));
    ctx.ex2.push_back({{u.a, u.b, u.c}});
  }
  for (int i = 0; i < 3; ++i) {
    const mpz_class& pi = S.prime(i);
    if (pi == 2) ctx.rules[i] = {true, 1};
    else if (mpz_class(pi % 4) == 3) ctx.rules[i] = {true, 0};
    uint32_t emax = 0;
    for (const auto& e : ctx.ex4) emax = std::max(emax, e.e[i]);
    I pw = 1;
    for (uint32_t j = 0; j <= emax; ++j) {
      ctx.ppow[i].push_back(pw);
      if (j < emax) pw = pw * IntOps<I>::from_mpz(pi);
    }
  }
  for (int sig = 0; sig < 8; ++sig) {
    bool possible = true;
    for (int i = 0; i < 3; ++i)
      if ((sig >> i) & 1 && !ctx.rules[i].active) possible = false;
    if (!possible) continue;
    for (size_t t = 0; t < ctx.val2.size(); ++t) {
      if (ctx.val2[t] == 1) continue;  // s1 = 1 gives a = 0
      bool ok = true;
      for (int i = 0; i < 3; ++i)
        if ((sig >> i) & 1 && ctx.ex2[t].e[i] > ctx.rules[i].cap) ok = false;
      if (ok) {
        ctx.s1_val[sig].push_back(ctx.val2[t]);
        ctx.s1_ex[sig].push_back(ctx.ex2[t]);
      }
    }
  }
}

template <typename I>
void scan_s4_range(const EnumContext<I>& ctx, size_t i4_begin, size_t i4_end,
                   std::vector<std::array<mpz_class, 3>>& out, StepCounters& counters) {
  for (size_t i4 = i4_begin; i4 < i4_end; ++i4) {
    const I s4 = ctx.val4[i4];
    const UnitEntry& e4 = ctx.ex4[i4];
    if (s4 <= 2) continue;
    const I m = s4 - 1;
    // s2 < min(s4, threshold2): val2 is ascending and capped by threshold2
    size_t hi = std::lower_bound(ctx.val2.begin(), ctx.val2.end(), s4) - ctx.val2.begin();
    for (size_t i2 = 0; i2 < hi; ++i2) {
      const I s2 = ctx.val2[i2];
      if (s2 <= 1) continue;
      const UnitEntry& e2 = ctx.ex2[i2];
      ++counters.pairs_total;
      if (ctx.filter_s2_divides_s4 && e2.e[0] <= e4.e[0] && e2.e[1] <= e4.e[1] &&
          e2.e[2] <= e4.e[2])
        continue;  // s2 | s4
      ++counters.pairs_after_divisibility;
      // B_c = (s4 - s2)/gcd; discard pairs whose c-bound is too small
      I g = ctx.ppow[0][std::min(e2.e[0], e4.e[0])] * ctx.ppow[1][std::min(e2.e[1], e4.e[1])] *
            ctx.ppow[2][std::min(e2.e[2], e4.e[2])];
      I bc = (s4 - s2) / g;
      if constexpr (std::is_same_v<I, u128>) {
        if (bc <= static_cast<u128>(~0ull) && bc * (bc - 1) + 1 < s4) continue;
      } else {
        if (bc * (bc - 1) + 1 < s4) continue;
      }
      ++counters.pairs_after_bc;
      int sig = 0;
      for (int i = 0; i < 3; ++i)
        if (ctx.rules[i].active && e2.e[i] > ctx.rules[i].cap && e4.e[i] > ctx.rules[i].cap)
          sig |= 1 << i;
      const auto& vals = ctx.s1_val[sig];
      size_t n1 = std::lower_bound(vals.begin(), vals.end(), s2) - vals.begin();
      const I s2m1 = s2 - 1;
      for (size_t i1 = 0; i1 < n1; ++i1) {
        ++counters.s1_tested;
        const I n = (vals[i1] - 1) * s2m1;
        if (n % m != 0) continue;
        I a2 = n / m;
        I a;
        if (!IntOps<I>::square_root(a2, a)) continue;
        if (a == 0) continue;
        const I s1m1 = vals[i1] - 1;
        if (s1m1 % a != 0 || s2m1 % a != 0) continue;
        I b = s1m1 / a, c = s2m1 / a;
        if (!(a < b && b < c)) continue;
        out.push_back({IntOps<I>::to_mpz(a), IntOps<I>::to_mpz(b), IntOps<I>::to_mpz(c)});
        ++counters.triples_found;
      }
    }
  }
}

template <typename I>
std::vector<std::array<mpz_class, 3>> run_enumeration(const PrimeTriple& S,
                                                      const std::vector<SUnit>& units4,
                                                      const std::vector<SUnit>& units2,
                                                      const PipelineOptions& opt,
                                                      StepCounters& counters) {
  EnumContext<I> ctx;
  ctx.filter_s2_divides_s4 = !opt.disable_s2_divides_s4_filter;
  build_context(ctx, S, units4, units2);

  int threads = opt.threads > 0 ? opt.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  const size_t n4 = ctx.val4.size();
  const size_t chunk = 512;
  const size_t nchunks = (n4 + chunk - 1) / chunk;
  std::vector<std::vector<std::array<mpz_class, 3>>> results(nchunks);
  std::vector<StepCounters> parts(nchunks);
  std::atomic<size_t> next{0};
  std::atomic<size_t> done{0};

  auto work = [&]() {
    for (;;) {
      size_t id = next.fetch_add(1);
      if (id >= nchunks) return;
      size_t lo = id * chunk, hi = std::min(n4, lo + chunk);
      scan_s4_range(ctx, lo, hi, results[id], parts[id]);
      size_t d = done.fetch_add(1) + 1;
      if (opt.progress && (d % 16 == 0 || d == nchunks))
        opt.progress("triple scan: " + std::to_string(d) + "/" + std::to_string(nchunks) +
                     " chunks");
    }
  };
  if (threads == 1 || nchunks <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::vector<std::array<mpz_class, 3>> out;
  for (size_t id = 0; id < nchunks; ++id) {
    for (auto& t : results[id]) out.push_back(std::move(t));
    counters.pairs_total += parts[id].pairs_total;
    counters.pairs_after_divisibility += parts[id].pairs_after_divisibility;
    counters.pairs_after_bc += parts[id].pairs_after_bc;
    counters.s1_tested += parts[id].s1_tested;
    counters.triples_found += parts[id].triples_found;
  }
  return out;
}

}  // namespace

std::vector<TripleRecord> enumerate_triples(const PrimeTriple& S, const BoundLedger& led,
                                            const PipelineOptions& opt, StepCounters* counters) {
  StepCounters local;
  StepCounters& cnt = counters ? *counters : local;

  mpz_class thr4 = s_unit_threshold(led.M4);
  mpz_class thr2 = s_unit_threshold(led.M0);
  std::vector<SUnit> units4 = s_unit_enumerate(S, led.M4);
  std::vector<SUnit> units2;
  units2.reserve(units4.size());
  for (const SUnit& u : units4) {
    if (u.value <= thr2) units2.push_back(u);
  }
  cnt.units_s4 = units4.size();
  cnt.units_s2 = units2.size();
  if (opt.progress)
    opt.progress("units: " + std::to_string(cnt.units_s4) + " below M4, " +
                 std::to_string(cnt.units_s2) + " below M0");

  bool small = !opt.force_bigint && S.fits_ulong() &&
               mpz_sizeinbase(thr4.get_mpz_t(), 2) <= 126 &&
               mpz_sizeinbase(thr2.get_mpz_t(), 2) <= 62;
  std::vector<std::array<mpz_class, 3>> raw =
      small ? run_enumeration<u128>(S, units4, units2, opt, cnt)
            : run_enumeration<mpz_class>(S, units4, units2, opt, cnt);

  std::vector<TripleRecord> out;
  for (auto& t : raw) {
    TripleRecord rec;
    rec.a = t[0];
    rec.b = t[1];
    rec.c = t[2];
    auto u1 = is_s_unit(rec.a * rec.b + 1, S);
    auto u2 = is_s_unit(rec.a * rec.c + 1, S);
    auto u4 = is_s_unit(rec.b * rec.c + 1, S);
    if (!u1 || !u2 || !u4) continue;  // cannot happen by construction
    rec.s1 = *u1;
    rec.s2 = *u2;
    rec.s4 = *u4;
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  cnt.triples_found = out.size();
  return out;
}

// ---------------------------------------------------------------------------
// Step VII
// ---------------------------------------------------------------------------

Real reduce_triple(const PrimeTriple& S, TripleRecord& triple, const BoundLedger& led,
                   const CtildePolicy& policy, mpfr_prec_t prec) {
  ReductionInput in{S};
  in.prec = prec;
  in.X = {led.A.floor_z(), led.B.floor_z(), led.C.floor_z()};
  auto dep = multiplicative_dependence(triple.a, triple.b, S);
  if (dep) {
    triple.reduction_case = 2;
    triple.dependence = *dep;
    for (int i = 0; i < 3; ++i) in.X[static_cast<size_t>(i)] += std::labs(dep->exp(i));
    // all coefficients zero would force b = a
    in.exceptional_impossible = true;
  } else {
    triple.reduction_case = 1;
    in.eta0_arg = mpq_class(triple.b, triple.a);
    in.eta0_arg.canonicalize();
  }
  BestReduction r = best_reduction(in, policy);
  triple.M3 = r.H.d();
  return r.H;
}

// ---------------------------------------------------------------------------
// Step VIII
// ---------------------------------------------------------------------------

std::vector<QuadrupleRecord> extend_triple(const PrimeTriple& S, const TripleRecord& triple,
                                           const Real& M3) {
  std::vector<QuadrupleRecord> out;
  SUnitStream stream(S, s_unit_threshold(M3));
  SUnit s3;
  while (stream.next(s3)) {
    mpz_class s3m1 = s3.value - 1;
    if (s3m1 == 0 || !mpz_divisible_p(s3m1.get_mpz_t(), triple.a.get_mpz_t())) continue;
    mpz_class d = s3m1 / triple.a;
    if (d <= triple.c) continue;  // entries distinct and increasing
    auto s5 = is_s_unit(triple.b * d + 1, S);
    if (!s5) continue;
    auto s6 = is_s_unit(triple.c * d + 1, S);
    if (!s6) continue;
    QuadrupleRecord q;
    q.a = triple.a;
    q.b = triple.b;
    q.c = triple.c;
    q.d = d;
    q.s[0] = triple.s1;
    q.s[1] = triple.s2;
    q.s[2] = s3;
    q.s[3] = triple.s4;
    q.s[4] = *s5;
    q.s[5] = *s6;
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<QuadrupleRecord> extend_all(const PrimeTriple& S, std::vector<TripleRecord>& triples,
                                        const BoundLedger& led, const PipelineOptions& opt) {
  std::vector<QuadrupleRecord> out;
  for (TripleRecord& t : triples) {
    Real M3 = opt.m3_override ? Real::of(*opt.m3_override, opt.prec)
                              : reduce_triple(S, t, led, opt.m3_policy, opt.prec);
    if (opt.m3_override) t.M3 = *opt.m3_override;
    for (QuadrupleRecord& q : extend_triple(S, t, M3)) out.push_back(std::move(q));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (const QuadrupleRecord& q : out)
    if (!verify_quadruple(S, q.a, q.b, q.c, q.d))
      throw std::logic_error("emitted quadruple failed verification");
  return out;
}

bool verify_quadruple(const PrimeTriple& S, const mpz_class& a, const mpz_class& b,
                      const mpz_class& c, const mpz_class& d) {
  std::array<const mpz_class*, 4> v{&a, &b, &c, &d};
  for (int i = 0; i < 4; ++i) {
    if (*v[i] < 1) return false;
    for (int j = i + 1; j < 4; ++j) {
      if (*v[i] == *v[j]) return false;
      if (!is_s_unit(*v[i] * *v[j] + 1, S)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// The complete pipeline
// ---------------------------------------------------------------------------

PipelineResult find_all_quadruples(const PrimeTriple& S, const PipelineOptions& opt) {
  PipelineResult res;
  auto t0 = Clock::now();
  res.ledger = iterate_bounds(S, opt.rounds, opt);
  res.timings_ms.emplace_back("bounds", ms_since(t0));

  t0 = Clock::now();
  res.triples = enumerate_triples(S, res.ledger, opt, &res.counters);
  res.timings_ms.emplace_back("triples", ms_since(t0));
  if (opt.progress) opt.progress("triples: " + std::to_string(res.triples.size()));

  t0 = Clock::now();
  res.quadruples = extend_all(S, res.triples, res.ledger, opt);
  res.timings_ms.emplace_back("extensions", ms_since(t0));

  res.diagnostics = res.ledger.notes;
  res.diagnostics.push_back(
      "Bugeaud-Laurent applied assuming multiplicative independence of the "
      "unit-equation quotients from the base primes");
  return res;
}

// ---------------------------------------------------------------------------
// Independent oracle
// ---------------------------------------------------------------------------

OracleResult brute_force_oracle(const PrimeTriple& S, unsigned long c_cap, unsigned long d_cap) {
  if (c_cap < 2 || d_cap < 2) throw std::invalid_argument("caps must be >= 2");
  if (c_cap > 3000000000ul || !S.fits_ulong())
    throw std::invalid_argument("brute_force_oracle: cap out of word range");
  OracleResult res;
  const unsigned long pu = S.p.get_ui(), qu = S.q.get_ui(), ru = S.r.get_ui();
  auto strip = [](unsigned long n, unsigned long f) {
    while (n % f == 0) n /= f;
    return n;
  };
  auto word_s_unit = [&](unsigned long n) { return strip(strip(strip(n, pu), qu), ru) == 1; };

  // all S-units up to c_cap^2 by plain nested loops (independent of the
  // heap enumerator)
  const unsigned long cap = c_cap * c_cap;
  std::vector<unsigned long> units;
  for (unsigned long vp = 1; vp <= cap; vp *= pu) {
    for (unsigned long vq = vp; vq <= cap; vq *= qu) {
      for (unsigned long vr = vq; vr <= cap; vr *= ru) {
        units.push_back(vr);
        if (vr > cap / ru) break;
      }
      if (vq > cap / qu) break;
    }
    if (vp > cap / pu) break;
  }
  std::sort(units.begin(), units.end());

  for (size_t i = 0; i < units.size(); ++i) {
    if (units[i] < 2) continue;
    for (size_t j = i + 1; j < units.size(); ++j) {
      unsigned long g = std::gcd(units[i] - 1, units[j] - 1);
      // every divisor a of g
      for (unsigned long a = 1; a * a <= g; ++a) {
        if (g % a != 0) continue;
        for (unsigned long aa : {a, g / a}) {
          unsigned long b = (units[i] - 1) / aa;
          unsigned long c = (units[j] - 1) / aa;
          if (!(aa < b && b < c && c <= c_cap)) continue;
          if (!word_s_unit(b * c + 1)) continue;
          TripleRecord t;
          t.a = aa;
          t.b = b;
          t.c = c;
          t.s1 = *is_s_unit(mpz_class(aa) * b + 1, S);
          t.s2 = *is_s_unit(mpz_class(aa) * c + 1, S);
          t.s4 = *is_s_unit(mpz_class(b) * c + 1, S);
          res.triples.push_back(std::move(t));
        }
      }
    }
  }
  std::sort(res.triples.begin(), res.triples.end());
  res.triples.erase(std::unique(res.triples.begin(), res.triples.end()), res.triples.end());

  for (const TripleRecord& t : res.triples) {
    for (mpz_class d = t.c + 1; d <= d_cap; ++d) {
      if (is_s_unit(t.a * d + 1, S) && is_s_unit(t.b * d + 1, S) && is_s_unit(t.c * d + 1, S)) {
        QuadrupleRecord q;
        q.a = t.a;
        q.b = t.b;
        q.c = t.c;
        q.d = d;
        q.s[0] = t.s1;
        q.s[1] = t.s2;
        q.s[2] = *is_s_unit(t.a * d + 1, S);
        q.s[3] = t.s4;
        q.s[4] = *is_s_unit(t.b * d + 1, S);
        q.s[5] = *is_s_unit(t.c * d + 1, S);
        res.quadruples.push_back(std::move(q));
      }
    }
  }
  std::sort(res.quadruples.begin(), res.quadruples.end());
  res.quadruples.erase(std::unique(res.quadruples.begin(), res.quadruples.end()),
                       res.quadruples.end());
  return res;
}

}  // namespace sdioph

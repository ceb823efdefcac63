// The full reduction-and-search pipeline for S-Diophantine quadruples over a
// fixed three-prime set: initial Baker-type bound, iterated lattice
// reduction of the exponent bounds, exhaustive triple enumeration with
// arithmetic filters, per-triple bound reduction and quadruple extension.
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdioph/exact.hpp"
#include "sdioph/lattice.hpp"
#include "sdioph/real.hpp"

namespace sdioph {

// All scalar bounds of the reduction.  A, B, C bound the largest p-, q- and
// r-exponents; M = max{A,B,C}.  M0 bounds log s1, log s2; M4 bounds log s4;
// M5 the combined second-largest bound; Bp/Bq/Br the log-weighted maximal
// valuations; alpha5/beta5/gamma5 the per-prime second-largest exponent bounds.
struct BoundLedger {
  Real M, M0, M4, M5;
  Real Bp, Bq, Br, Bscript;
  unsigned long bp_count = 0, bq_count = 0, br_count = 0;
  Real A, B, C;
  Real alpha5, beta5, gamma5;
  int iteration = 0;
  bool valuations_known = false;  // Bp/Bq/Br computed at least once
  std::vector<BoundLedger> history;
  std::vector<std::string> notes;
};

struct TripleRecord {
  mpz_class a, b, c;
  SUnit s1, s2, s4;  // ab+1, ac+1, bc+1
  std::optional<double> M3;
  int reduction_case = 0;  // 1 = inhomogeneous, 2 = multiplicatively dependent
  std::optional<SignedExponentVector> dependence;

  friend bool operator<(const TripleRecord& x, const TripleRecord& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.c < y.c;
  }
  friend bool operator==(const TripleRecord& x, const TripleRecord& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c;
  }
};

struct QuadrupleRecord {
  mpz_class a, b, c, d;
  // s1..s6 = ab+1, ac+1, ad+1, bc+1, bd+1, cd+1
  std::array<SUnit, 6> s;

  friend bool operator<(const QuadrupleRecord& x, const QuadrupleRecord& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    if (x.c != y.c) return x.c < y.c;
    return x.d < y.d;
  }
  friend bool operator==(const QuadrupleRecord& x, const QuadrupleRecord& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
};

struct CtildePolicy {
  enum class Mode { Auto, Fixed } mode = Mode::Auto;
  mpz_class fixed;
  static CtildePolicy auto_policy() { return {}; }
  static CtildePolicy fixed_policy(mpz_class c) { return {Mode::Fixed, std::move(c)}; }
};

using ProgressFn = std::function<void(const std::string&)>;

struct PipelineOptions {
  int rounds = 5;
  int threads = 0;  // 0 = hardware concurrency
  bool disable_s2_divides_s4_filter = false;
  bool force_bigint = false;  // exercise the arbitrary-precision enumeration path
  mpfr_prec_t prec = kDefaultPrec;
  CtildePolicy m0_policy = CtildePolicy::auto_policy();
  CtildePolicy m3_policy;  // defaulted to fixed 10^25 in the constructor
  std::optional<double> m3_override;
  ProgressFn progress;

  PipelineOptions();
};

struct StepCounters {
  unsigned long units_s4 = 0;
  unsigned long units_s2 = 0;
  unsigned long pairs_total = 0;
  unsigned long pairs_after_divisibility = 0;
  unsigned long pairs_after_bc = 0;
  unsigned long s1_tested = 0;
  unsigned long triples_found = 0;
};

struct PipelineResult {
  std::vector<QuadrupleRecord> quadruples;
  BoundLedger ledger;
  std::vector<TripleRecord> triples;
  StepCounters counters;
  std::vector<std::string> diagnostics;
  std::vector<std::pair<std::string, double>> timings_ms;
};

struct ReductionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Step I.  Composes the Matveev bounds on the two three-log forms with the
// four-log form, resolves the resulting inequality
// M < coeff (log P)^5 (log 2M)^2 through the fixed-point bound.
BoundLedger initial_bound(const PrimeTriple& S);

// Step II.  Lattice reduction of the three-log forms; updates M0 and M4.
void reduce_M0(const PrimeTriple& S, BoundLedger& led, const CtildePolicy& policy);

// Step III.  Brute-force maximal valuations; updates Bp, Bq, Br, Bscript.
void compute_Bpqr(const PrimeTriple& S, BoundLedger& led);

// Step IV prerequisite.  M5 = max{M0 + Bscript, M4} plus per-prime bounds.
void compute_M5(const PrimeTriple& S, BoundLedger& led);

// Step IV.  Bugeaud-Laurent bounds on the maximal valuations of the unit
// equation quotients; updates A, B, C and M.
void reduce_exponents(const PrimeTriple& S, BoundLedger& led);

// Steps I-V.
BoundLedger iterate_bounds(const PrimeTriple& S, int rounds = 5,
                           const PipelineOptions& opt = PipelineOptions());

// Step VI.  All S-Diophantine triples within the ledger bounds.
std::vector<TripleRecord> enumerate_triples(const PrimeTriple& S, const BoundLedger& led,
                                            const PipelineOptions& opt = PipelineOptions(),
                                            StepCounters* counters = nullptr);

// Step VII.  Per-triple bound on log s3; fills M3/case in the record.
Real reduce_triple(const PrimeTriple& S, TripleRecord& triple, const BoundLedger& led,
                   const CtildePolicy& policy, mpfr_prec_t prec = kDefaultPrec);

// Step VIII.  All quadruple extensions of one triple below exp(M3).
std::vector<QuadrupleRecord> extend_triple(const PrimeTriple& S, const TripleRecord& triple,
                                           const Real& M3);

// Steps VII + VIII over a triple list: fills M3/case in the records and
// returns the verified quadruples, sorted and deduplicated.
std::vector<QuadrupleRecord> extend_all(const PrimeTriple& S, std::vector<TripleRecord>& triples,
                                        const BoundLedger& led, const PipelineOptions& opt);

bool verify_quadruple(const PrimeTriple& S, const mpz_class& a, const mpz_class& b,
                      const mpz_class& c, const mpz_class& d);

// The whole algorithm.
PipelineResult find_all_quadruples(const PrimeTriple& S,
                                   const PipelineOptions& opt = PipelineOptions());

// Independent of the bound machinery: all triples with c <= c_cap found by
// divisor search over S-unit pairs, extended to quadruples with d <= d_cap.
struct OracleResult {
  std::vector<TripleRecord> triples;
  std::vector<QuadrupleRecord> quadruples;
};
OracleResult brute_force_oracle(const PrimeTriple& S, unsigned long c_cap, unsigned long d_cap);

}  // namespace sdioph

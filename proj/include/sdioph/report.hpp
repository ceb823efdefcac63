// Machine-readable run reports (versioned JSON, optional CSV flattening)
// and the per-prime-set cache used for resumable scans.
#pragma once

#include <optional>
#include <string>

#include "sdioph/pipeline.hpp"

namespace sdioph {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct RunConfig {
  mpz_class p, q, r;
  int iterations = 5;
  int precision_digits = 60;
  std::string ctilde = "auto";  // "auto" or a decimal exponent, e.g. "88"
  int threads = 0;
  std::string cache_dir;
  bool disable_s2_divides_s4_filter = false;
  std::optional<double> m3_override;

  mpfr_prec_t prec_bits() const;
  PipelineOptions to_options() const;
};

struct Report {
  int schema_version = kReportSchemaVersion;
  std::string tool_version = kToolVersion;
  RunConfig config;
  PipelineResult result;
};

std::string report_to_json(const Report& rep);
// Throws std::runtime_error on malformed input.
Report report_from_json(const std::string& text);

// primes;a;b;c;d rows (header included)
std::string quadruples_to_csv(const std::vector<std::pair<std::array<mpz_class, 3>,
                                                          QuadrupleRecord>>& rows);

// Cache: one JSON file per prime set keyed by primes, iterations, tool
// version and filter flags.  Stores the ledger and the triple list; the
// per-triple reduction and extension are recomputed on reuse.
struct CacheEntry {
  BoundLedger ledger;
  std::vector<TripleRecord> triples;
  StepCounters counters;
  bool complete = false;
};

std::string cache_file_name(const RunConfig& cfg);
bool cache_load(const std::string& path, const RunConfig& cfg, CacheEntry& out);
void cache_store(const std::string& path, const RunConfig& cfg, const CacheEntry& entry);

}  // namespace sdioph

// Command-line front end: solve single prime sets, scan prime ranges,
// verify candidate tuples, and run the independent brute-force oracle.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sdioph/pipeline.hpp"
#include "sdioph/report.hpp"

namespace fs = std::filesystem;
using namespace sdioph;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitReduction = 3;
constexpr int kExitInternal = 4;

std::vector<mpz_class> parse_int_list(const std::string& s) {
  std::vector<mpz_class> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw CLI::ValidationError("empty entry in list: " + s);
    out.emplace_back(item);
  }
  return out;
}

PrimeTriple make_triple(const RunConfig& cfg) {
  return PrimeTriple(cfg.p, cfg.q, cfg.r, cfg.prec_bits());
}

struct CommonFlags {
  std::string primes;
  RunConfig cfg;
  std::string output;
  std::string format = "json";
  bool quiet = false;
  double m3_tmp = 0;

  void add_run_flags(CLI::App* app, bool with_primes = true) {
    if (with_primes)
      app->add_option("--primes", primes, "three primes p,q,r with p<q<r")->required();
    app->add_option("--iterations", cfg.iterations, "reduction rounds (default 5)");
    app->add_option("--precision-digits", cfg.precision_digits,
                    "working precision in decimal digits (default 60)");
    app->add_option("--ctilde", cfg.ctilde,
                    "lattice scale policy: 'auto' or a decimal exponent (e.g. 88)");
    app->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    app->add_option("--cache-dir", cfg.cache_dir,
                    "cache directory (also via SDIOPH_CACHE_DIR)");
    app->add_option("--output", output, "write the report to this path");
    app->add_option("--format", format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app->add_flag("--disable-s2-divides-s4-filter", cfg.disable_s2_divides_s4_filter,
                  "turn off the divisibility pruning in the triple scan");
    auto* opt = app->add_option("--m3-override", m3_tmp, "fixed bound on log s3 for every triple");
    app->callback([this, opt]() {
      if (opt->count()) cfg.m3_override = m3_tmp;
    });
    app->add_flag("--quiet", quiet, "suppress progress logging");
  }

  void finalize() {
    if (cfg.cache_dir.empty()) {
      if (const char* env = std::getenv("SDIOPH_CACHE_DIR")) cfg.cache_dir = env;
    }
    if (!primes.empty()) {
      auto v = parse_int_list(primes);
      if (v.size() != 3) throw CLI::ValidationError("--primes needs exactly three values");
      cfg.p = v[0];
      cfg.q = v[1];
      cfg.r = v[2];
    }
  }

  ProgressFn progress() const {
    if (quiet) return nullptr;
    return [](const std::string& msg) { std::cerr << "[sdioph] " << msg << "\n"; };
  }
};

// Runs one prime set through the pipeline, consulting the cache for the
// enumeration stage.  The per-triple reduction and extension stages are
// always recomputed.
PipelineResult run_one_set(const PrimeTriple& S, const RunConfig& cfg, const ProgressFn& log) {
  PipelineOptions opt = cfg.to_options();
  opt.progress = log;
  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };

  CacheEntry entry;
  std::string cache_path;
  bool cached = false;
  if (!cfg.cache_dir.empty()) {
    fs::create_directories(cfg.cache_dir);
    cache_path = (fs::path(cfg.cache_dir) / cache_file_name(cfg)).string();
    cached = cache_load(cache_path, cfg, entry) && entry.complete;
    if (cached && log) log("cache hit: " + cache_path);
  }

  PipelineResult res;
  if (cached) {
    res.ledger = entry.ledger;
    res.triples = entry.triples;
    res.counters = entry.counters;
    res.timings_ms.emplace_back("cache", 0.0);
  } else {
    auto t0 = Clock::now();
    res.ledger = iterate_bounds(S, opt.rounds, opt);
    res.timings_ms.emplace_back("bounds", ms_since(t0));
    t0 = Clock::now();
    try {
      res.triples = enumerate_triples(S, res.ledger, opt, &res.counters);
    } catch (...) {
      if (!cache_path.empty())
        cache_store(cache_path, cfg, {res.ledger, res.triples, res.counters, false});
      throw;
    }
    res.timings_ms.emplace_back("triples", ms_since(t0));
    if (!cache_path.empty())
      cache_store(cache_path, cfg, {res.ledger, res.triples, res.counters, true});
  }
  if (log) log("triples: " + std::to_string(res.triples.size()));

  auto t0 = Clock::now();
  res.quadruples = extend_all(S, res.triples, res.ledger, opt);
  res.timings_ms.emplace_back("extensions", ms_since(t0));
  res.diagnostics = res.ledger.notes;
  return res;
}

void write_output(const CommonFlags& flags, const Report& rep) {
  std::string text;
  if (flags.format == "csv") {
    std::vector<std::pair<std::array<mpz_class, 3>, QuadrupleRecord>> rows;
    for (const QuadrupleRecord& q : rep.result.quadruples)
      rows.push_back({{rep.config.p, rep.config.q, rep.config.r}, q});
    text = quadruples_to_csv(rows);
  } else {
    text = report_to_json(rep);
  }
  if (flags.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(flags.output);
    out << text;
  }
}

int cmd_run(CommonFlags& flags) {
  flags.finalize();
  PrimeTriple S = make_triple(flags.cfg);
  Report rep;
  rep.config = flags.cfg;
  try {
    rep.result = run_one_set(S, flags.cfg, flags.progress());
  } catch (const ReductionFailure& e) {
    rep.result.diagnostics.push_back(std::string("reduction failure: ") + e.what());
    write_output(flags, rep);  // partial report
    std::cerr << "reduction failure: " << e.what() << "\n";
    return kExitReduction;
  }
  write_output(flags, rep);
  std::cerr << "quadruples found: " << rep.result.quadruples.size() << "\n";
  return kExitOk;
}

int cmd_scan(CommonFlags& flags, unsigned long max_prime) {
  flags.finalize();
  if (max_prime < 5) throw CLI::ValidationError("--max-prime must be at least 5");
  std::vector<unsigned long> primes;
  for (unsigned long n = 2; n <= max_prime; ++n)
    if (is_prime(mpz_class(n))) primes.push_back(n);

  std::vector<std::pair<std::array<mpz_class, 3>, QuadrupleRecord>> rows;
  int failures = 0;
  auto log = flags.progress();
  for (size_t i = 0; i < primes.size(); ++i)
    for (size_t j = i + 1; j < primes.size(); ++j)
      for (size_t k = j + 1; k < primes.size(); ++k) {
        RunConfig cfg = flags.cfg;
        cfg.p = primes[i];
        cfg.q = primes[j];
        cfg.r = primes[k];
        std::string label = "{" + cfg.p.get_str() + "," + cfg.q.get_str() + "," +
                            cfg.r.get_str() + "}";
        if (log) log("scanning " + label);
        try {
          PrimeTriple S = make_triple(cfg);
          PipelineResult res = run_one_set(S, cfg, log);
          for (const QuadrupleRecord& q : res.quadruples) {
            rows.push_back({{cfg.p, cfg.q, cfg.r}, q});
            std::cerr << label << " -> (" << q.a.get_str() << "," << q.b.get_str() << ","
                      << q.c.get_str() << "," << q.d.get_str() << ")\n";
          }
        } catch (const std::exception& e) {
          ++failures;
          std::cerr << "set " << label << " failed: " << e.what() << "\n";
        }
      }

  std::string text = quadruples_to_csv(rows);
  if (flags.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(flags.output);
    out << text;
  }
  std::cerr << "scan complete, quadruples: " << rows.size() << ", set failures: " << failures
            << "\n";
  return failures == 0 ? kExitOk : kExitReduction;
}

void print_factorization(const PrimeTriple& S, const mpz_class& n) {
  mpz_class rest = n;
  std::string parts;
  for (int i = 0; i < 3; ++i) {
    unsigned long e = 0;
    while (mpz_divisible_p(rest.get_mpz_t(), S.prime(i).get_mpz_t())) {
      rest /= S.prime(i);
      ++e;
    }
    if (e) {
      if (!parts.empty()) parts += " * ";
      parts += S.prime(i).get_str();
      if (e > 1) parts += "^" + std::to_string(e);
    }
  }
  if (rest != 1 || parts.empty()) {
    if (!parts.empty()) parts += " * ";
    parts += rest.get_str();
  }
  std::cout << n.get_str() << " = " << parts << (rest == 1 ? "" : "   <- not an S-unit") << "\n";
}

int cmd_verify(CommonFlags& flags, const std::string& tuple_str) {
  flags.finalize();
  PrimeTriple S = make_triple(flags.cfg);
  auto tuple = parse_int_list(tuple_str);
  if (tuple.size() != 3 && tuple.size() != 4)
    throw CLI::ValidationError("--tuple needs three or four entries");
  for (const mpz_class& v : tuple)
    if (v < 1) throw CLI::ValidationError("tuple entries must be positive");
  for (size_t i = 0; i < tuple.size(); ++i)
    for (size_t j = i + 1; j < tuple.size(); ++j)
      if (tuple[i] == tuple[j]) throw CLI::ValidationError("tuple entries must be distinct");

  bool ok = true;
  for (size_t i = 0; i < tuple.size(); ++i)
    for (size_t j = i + 1; j < tuple.size(); ++j) {
      mpz_class prod = tuple[i] * tuple[j] + 1;
      print_factorization(S, prod);
      if (!is_s_unit(prod, S)) ok = false;
    }
  std::cout << (ok ? "S-Diophantine tuple" : "not an S-Diophantine tuple") << "\n";
  return ok ? kExitOk : 1;
}

int cmd_brute(CommonFlags& flags, unsigned long c_cap, unsigned long d_cap) {
  flags.finalize();
  PrimeTriple S = make_triple(flags.cfg);
  OracleResult res = brute_force_oracle(S, c_cap, d_cap);
  std::cout << "triples (c <= " << c_cap << "): " << res.triples.size() << "\n";
  for (const TripleRecord& t : res.triples)
    std::cout << "  (" << t.a.get_str() << "," << t.b.get_str() << "," << t.c.get_str() << ")\n";
  std::cout << "quadruples (d <= " << d_cap << "): " << res.quadruples.size() << "\n";
  for (const QuadrupleRecord& q : res.quadruples)
    std::cout << "  (" << q.a.get_str() << "," << q.b.get_str() << "," << q.c.get_str() << ","
              << q.d.get_str() << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S-Diophantine quadruple solver for a fixed set of three primes"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "find all quadruples for one prime set");
  run_flags.add_run_flags(run);

  CommonFlags scan_flags;
  unsigned long max_prime = 0;
  auto* scan = app.add_subcommand("scan", "scan all prime triples up to a bound");
  scan->add_option("--max-prime", max_prime, "largest prime to include")->required();
  scan_flags.add_run_flags(scan, false);

  CommonFlags verify_flags;
  std::string tuple_str;
  auto* verify = app.add_subcommand("verify", "check whether a tuple is S-Diophantine");
  verify->add_option("--primes", verify_flags.primes, "three primes p,q,r")->required();
  verify->add_option("--tuple", tuple_str, "three or four distinct positive integers")->required();

  CommonFlags brute_flags;
  unsigned long c_cap = 0, d_cap = 2;
  auto* brute = app.add_subcommand("brute", "independent brute-force oracle");
  brute->add_option("--primes", brute_flags.primes, "three primes p,q,r")->required();
  brute->add_option("--c-cap", c_cap, "largest c to search")->required();
  brute->add_option("--d-cap", d_cap, "largest d to search (default 2)");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(run_flags);
    if (scan->parsed()) return cmd_scan(scan_flags, max_prime);
    if (verify->parsed()) return cmd_verify(verify_flags, tuple_str);
    if (brute->parsed()) return cmd_brute(brute_flags, c_cap, d_cap);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ReductionFailure& e) {
    std::cerr << "reduction failure: " << e.what() << "\n";
    return kExitReduction;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

#include "sdioph/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sdioph {

using nlohmann::json;

mpfr_prec_t RunConfig::prec_bits() const {
  return static_cast<mpfr_prec_t>(std::ceil(precision_digits * 3.3219281)) + 64;
}

PipelineOptions RunConfig::to_options() const {
  PipelineOptions opt;
  opt.rounds = iterations;
  opt.threads = threads;
  opt.disable_s2_divides_s4_filter = disable_s2_divides_s4_filter;
  opt.prec = prec_bits();
  opt.m3_override = m3_override;
  if (ctilde != "auto") {
    mpz_class c;
    mpz_ui_pow_ui(c.get_mpz_t(), 10, std::stoul(ctilde));
    opt.m0_policy = CtildePolicy::fixed_policy(c);
  }
  return opt;
}

namespace {

json real_to_json(const Real& r) { return r.str(30); }
Real real_from_json(const json& j) { return Real::of_str(j.get<std::string>()); }

json unit_to_json(const SUnit& u) {
  return json{{"value", u.value.get_str()}, {"exps", {u.a, u.b, u.c}}};
}

SUnit unit_from_json(const json& j) {
  SUnit u;
  u.value = mpz_class(j.at("value").get<std::string>());
  u.a = j.at("exps")[0].get<unsigned>();
  u.b = j.at("exps")[1].get<unsigned>();
  u.c = j.at("exps")[2].get<unsigned>();
  return u;
}

json ledger_to_json(const BoundLedger& led, bool with_history = true) {
  json j;
  j["M"] = real_to_json(led.M);
  j["M0"] = real_to_json(led.M0);
  j["M4"] = real_to_json(led.M4);
  j["M5"] = real_to_json(led.M5);
  j["Bp"] = real_to_json(led.Bp);
  j["Bq"] = real_to_json(led.Bq);
  j["Br"] = real_to_json(led.Br);
  j["Bscript"] = real_to_json(led.Bscript);
  j["bp_count"] = led.bp_count;
  j["bq_count"] = led.bq_count;
  j["br_count"] = led.br_count;
  j["A"] = real_to_json(led.A);
  j["B"] = real_to_json(led.B);
  j["C"] = real_to_json(led.C);
  j["alpha5"] = real_to_json(led.alpha5);
  j["beta5"] = real_to_json(led.beta5);
  j["gamma5"] = real_to_json(led.gamma5);
  j["iteration"] = led.iteration;
  j["valuations_known"] = led.valuations_known;
  j["notes"] = led.notes;
  if (with_history) {
    json h = json::array();
    for (const BoundLedger& s : led.history) h.push_back(ledger_to_json(s, false));
    j["history"] = h;
  }
  return j;
}

BoundLedger ledger_from_json(const json& j) {
  BoundLedger led;
  led.M = real_from_json(j.at("M"));
  led.M0 = real_from_json(j.at("M0"));
  led.M4 = real_from_json(j.at("M4"));
  led.M5 = real_from_json(j.at("M5"));
  led.Bp = real_from_json(j.at("Bp"));
  led.Bq = real_from_json(j.at("Bq"));
  led.Br = real_from_json(j.at("Br"));
  led.Bscript = real_from_json(j.at("Bscript"));
  led.bp_count = j.at("bp_count").get<unsigned long>();
  led.bq_count = j.at("bq_count").get<unsigned long>();
  led.br_count = j.at("br_count").get<unsigned long>();
  led.A = real_from_json(j.at("A"));
  led.B = real_from_json(j.at("B"));
  led.C = real_from_json(j.at("C"));
  led.alpha5 = real_from_json(j.at("alpha5"));
  led.beta5 = real_from_json(j.at("beta5"));
  led.gamma5 = real_from_json(j.at("gamma5"));
  led.iteration = j.at("iteration").get<int>();
  led.valuations_known = j.at("valuations_known").get<bool>();
  led.notes = j.at("notes").get<std::vector<std::string>>();
  if (j.contains("history"))
    for (const json& h : j.at("history")) led.history.push_back(ledger_from_json(h));
  return led;
}

json triple_to_json(const TripleRecord& t) {
  json j;
  j["a"] = t.a.get_str();
  j["b"] = t.b.get_str();
  j["c"] = t.c.get_str();
  j["s1"] = unit_to_json(t.s1);
  j["s2"] = unit_to_json(t.s2);
  j["s4"] = unit_to_json(t.s4);
  if (t.M3) j["M3"] = *t.M3;
  j["case"] = t.reduction_case;
  if (t.dependence)
    j["dependence"] = {t.dependence->e_p, t.dependence->e_q, t.dependence->e_r};
  return j;
}

TripleRecord triple_from_json(const json& j) {
  TripleRecord t;
  t.a = mpz_class(j.at("a").get<std::string>());
  t.b = mpz_class(j.at("b").get<std::string>());
  t.c = mpz_class(j.at("c").get<std::string>());
  t.s1 = unit_from_json(j.at("s1"));
  t.s2 = unit_from_json(j.at("s2"));
  t.s4 = unit_from_json(j.at("s4"));
  if (j.contains("M3")) t.M3 = j.at("M3").get<double>();
  t.reduction_case = j.at("case").get<int>();
  if (j.contains("dependence")) {
    SignedExponentVector v;
    v.e_p = j.at("dependence")[0].get<long>();
    v.e_q = j.at("dependence")[1].get<long>();
    v.e_r = j.at("dependence")[2].get<long>();
    t.dependence = v;
  }
  return t;
}

json quad_to_json(const QuadrupleRecord& q) {
  json j;
  j["a"] = q.a.get_str();
  j["b"] = q.b.get_str();
  j["c"] = q.c.get_str();
  j["d"] = q.d.get_str();
  json s = json::array();
  for (const SUnit& u : q.s) s.push_back(unit_to_json(u));
  j["s"] = s;
  return j;
}

QuadrupleRecord quad_from_json(const json& j) {
  QuadrupleRecord q;
  q.a = mpz_class(j.at("a").get<std::string>());
  q.b = mpz_class(j.at("b").get<std::string>());
  q.c = mpz_class(j.at("c").get<std::string>());
  q.d = mpz_class(j.at("d").get<std::string>());
  for (int i = 0; i < 6; ++i) q.s[static_cast<size_t>(i)] = unit_from_json(j.at("s")[i]);
  return q;
}

json counters_to_json(const StepCounters& c) {
  return json{{"units_s4", c.units_s4},
              {"units_s2", c.units_s2},
              {"pairs_total", c.pairs_total},
              {"pairs_after_divisibility", c.pairs_after_divisibility},
              {"pairs_after_bc", c.pairs_after_bc},
              {"s1_tested", c.s1_tested},
              {"triples_found", c.triples_found}};
}

StepCounters counters_from_json(const json& j) {
  StepCounters c;
  c.units_s4 = j.at("units_s4").get<unsigned long>();
  c.units_s2 = j.at("units_s2").get<unsigned long>();
  c.pairs_total = j.at("pairs_total").get<unsigned long>();
  c.pairs_after_divisibility = j.at("pairs_after_divisibility").get<unsigned long>();
  c.pairs_after_bc = j.at("pairs_after_bc").get<unsigned long>();
  c.s1_tested = j.at("s1_tested").get<unsigned long>();
  c.triples_found = j.at("triples_found").get<unsigned long>();
  return c;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["primes"] = {cfg.p.get_str(), cfg.q.get_str(), cfg.r.get_str()};
  j["iterations"] = cfg.iterations;
  j["precision_digits"] = cfg.precision_digits;
  j["ctilde"] = cfg.ctilde;
  j["threads"] = cfg.threads;
  j["cache_dir"] = cfg.cache_dir;
  j["disable_s2_divides_s4_filter"] = cfg.disable_s2_divides_s4_filter;
  if (cfg.m3_override) j["m3_override"] = *cfg.m3_override;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  cfg.p = mpz_class(j.at("primes")[0].get<std::string>());
  cfg.q = mpz_class(j.at("primes")[1].get<std::string>());
  cfg.r = mpz_class(j.at("primes")[2].get<std::string>());
  cfg.iterations = j.at("iterations").get<int>();
  cfg.precision_digits = j.at("precision_digits").get<int>();
  cfg.ctilde = j.at("ctilde").get<std::string>();
  cfg.threads = j.at("threads").get<int>();
  cfg.cache_dir = j.at("cache_dir").get<std::string>();
  cfg.disable_s2_divides_s4_filter = j.at("disable_s2_divides_s4_filter").get<bool>();
  if (j.contains("m3_override")) cfg.m3_override = j.at("m3_override").get<double>();
  return cfg;
}

}  // namespace

std::string report_to_json(const Report& rep) {
  json j;
  j["schema_version"] = rep.schema_version;
  j["tool_version"] = rep.tool_version;
  j["config"] = config_to_json(rep.config);
  j["ledger"] = ledger_to_json(rep.result.ledger);
  json triples = json::array();
  for (const TripleRecord& t : rep.result.triples) triples.push_back(triple_to_json(t));
  j["triples"] = triples;
  json quads = json::array();
  for (const QuadrupleRecord& q : rep.result.quadruples) quads.push_back(quad_to_json(q));
  j["quadruples"] = quads;
  j["counters"] = counters_to_json(rep.result.counters);
  j["diagnostics"] = rep.result.diagnostics;
  json tm = json::object();
  for (const auto& [k, v] : rep.result.timings_ms) tm[k] = v;
  j["timings_ms"] = tm;
  return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  json j = json::parse(text);
  Report rep;
  rep.schema_version = j.at("schema_version").get<int>();
  rep.tool_version = j.at("tool_version").get<std::string>();
  rep.config = config_from_json(j.at("config"));
  rep.result.ledger = ledger_from_json(j.at("ledger"));
  for (const json& t : j.at("triples")) rep.result.triples.push_back(triple_from_json(t));
  for (const json& q : j.at("quadruples")) rep.result.quadruples.push_back(quad_from_json(q));
  rep.result.counters = counters_from_json(j.at("counters"));
  rep.result.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  for (const auto& [k, v] : j.at("timings_ms").items())
    rep.result.timings_ms.emplace_back(k, v.get<double>());
  return rep;
}

std::string quadruples_to_csv(
    const std::vector<std::pair<std::array<mpz_class, 3>, QuadrupleRecord>>& rows) {
  std::ostringstream os;
  os << "primes;a;b;c;d\n";
  for (const auto& [primes, q] : rows) {
    os << primes[0].get_str() << "," << primes[1].get_str() << "," << primes[2].get_str() << ";"
       << q.a.get_str() << ";" << q.b.get_str() << ";" << q.c.get_str() << ";" << q.d.get_str()
       << "\n";
  }
  return os.str();
}

std::string cache_file_name(const RunConfig& cfg) {
  std::ostringstream os;
  os << "s_" << cfg.p.get_str() << "_" << cfg.q.get_str() << "_" << cfg.r.get_str() << ".it"
     << cfg.iterations << ".v" << kToolVersion << (cfg.disable_s2_divides_s4_filter ? ".nf" : ".f")
     << ".json";
  return os.str();
}

bool cache_load(const std::string& path, const RunConfig& cfg, CacheEntry& out) {
  std::ifstream in(path);
  if (!in) return false;
  try {
    json j = json::parse(in);
    if (j.at("tool_version").get<std::string>() != kToolVersion) return false;
    if (j.at("iterations").get<int>() != cfg.iterations) return false;
    if (j.at("filter_disabled").get<bool>() != cfg.disable_s2_divides_s4_filter) return false;
    auto primes = j.at("primes").get<std::vector<std::string>>();
    if (primes.size() != 3 || mpz_class(primes[0]) != cfg.p || mpz_class(primes[1]) != cfg.q ||
        mpz_class(primes[2]) != cfg.r)
      return false;
    out.ledger = ledger_from_json(j.at("ledger"));
    out.triples.clear();
    for (const json& t : j.at("triples")) out.triples.push_back(triple_from_json(t));
    out.counters = counters_from_json(j.at("counters"));
    out.complete = j.at("complete").get<bool>();
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

void cache_store(const std::string& path, const RunConfig& cfg, const CacheEntry& entry) {
  json j;
  j["tool_version"] = kToolVersion;
  j["iterations"] = cfg.iterations;
  j["filter_disabled"] = cfg.disable_s2_divides_s4_filter;
  j["primes"] = {cfg.p.get_str(), cfg.q.get_str(), cfg.r.get_str()};
  j["ledger"] = ledger_to_json(entry.ledger);
  json triples = json::array();
  for (const TripleRecord& t : entry.triples) triples.push_back(triple_to_json(t));
  j["triples"] = triples;
  j["counters"] = counters_to_json(entry.counters);
  j["complete"] = entry.complete;
  std::ofstream outf(path);
  outf << j.dump(2) << "\n";
}

}  // namespace sdioph

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "mdl/arith.hpp"
#include "mdl/digits.hpp"
#include "mdl/errors.hpp"
#include "mdl/expsum.hpp"
#include "mdl/order.hpp"
#include "mdl/primes.hpp"
#include "mdl/vmvt.hpp"

namespace mdl::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Report {
  std::string subcommand;
  Json inputs = Json::object();
  Json results = Json::object();
  std::vector<std::string> notes;  // extra "# ..." lines in CSV
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Context {
  unsigned threads = 1;
  std::optional<std::filesystem::path> cache_dir;
};

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

Json json_integer(const mpz_class& v) {
  if (v.fits_ulong_p()) return Json(static_cast<std::uint64_t>(v.get_ui()));
  if (v.fits_slong_p()) return Json(static_cast<std::int64_t>(v.get_si()));
  return Json(v.get_str());
}

std::string plain(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

// Flag values as typed by the user, converted on demand.
class Params {
 public:
  std::string& slot(const std::string& name) { return raw_[name]; }

  bool has(const std::string& name) const {
    auto it = raw_.find(name);
    return it != raw_.end() && !it->second.empty();
  }
  std::uint64_t u64(const std::string& name) const { return parse_unsigned(name, get(name)); }
  std::int64_t i64(const std::string& name) const { return parse_signed(name, get(name)); }
  mpz_class integer(const std::string& name) const { return parse_integer(name, get(name)); }
  unsigned small(const std::string& name) const {
    const std::uint64_t v = u64(name);
    if (v > 1'000'000) throw PreconditionError("--" + name + " is too large: " + std::to_string(v));
    return static_cast<unsigned>(v);
  }
  double real(const std::string& name) const {
    const std::string& text = get(name);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) {
      throw PreconditionError("--" + name + " is not a number: '" + text + "'");
    }
    return v;
  }

 private:
  const std::string& get(const std::string& name) const {
    auto it = raw_.find(name);
    if (it == raw_.end() || it->second.empty()) throw PreconditionError("missing --" + name);
    return it->second;
  }
  std::map<std::string, std::string> raw_;
};

std::vector<std::uint64_t> primes_for(std::uint64_t X, const Context& ctx) {
  return load_primes(X, ctx.cache_dir);
}

Report digit_stats(const Params& p, const Context& ctx) {
  const std::uint64_t q = p.u64("q");
  const std::uint64_t X = p.u64("X");
  const unsigned r = p.small("r");
  const unsigned s = p.small("s");
  Report rep;
  rep.subcommand = "digit-stats";
  rep.inputs = {{"q", q}, {"X", X}, {"r", r}, {"s", s}};
  if (X < 2) throw PreconditionError("digit-stats: X must be >= 2");
  if (s < 1 || s > r + 1) throw PreconditionError("digit-stats: requires 1 <= s <= r+1");
  PrimePowerModulus(q, 1);
  mpz_class values;
  mpz_ui_pow_ui(values.get_mpz_t(), q, s);
  if (values > kMaxBlockValues) throw ResourceGuardError("digit-stats: q^s block values exceed the limit");

  const auto primes = primes_for(X, ctx);
  const DigitCountReport counts = count_blocks(q, primes, X, r, s, ctx.threads);
  rep.results["pi_X"] = counts.pi_X;
  rep.results["expected"] = counts.expected;
  rep.results["max_abs_deviation"] = counts.max_abs_deviation;
  Json table = Json::array();
  rep.columns = {"block", "count", "deviation"};
  for (std::uint64_t b = 0; b < counts.counts.size(); ++b) {
    const double dev = counts.deviation(b);
    table.push_back({{"block", b}, {"count", counts.counts[b]}, {"deviation", dev}});
    rep.rows.push_back({std::to_string(b), std::to_string(counts.counts[b]), format_double(dev)});
  }
  rep.results["counts"] = std::move(table);
  rep.notes = {"pi_X=" + std::to_string(counts.pi_X), "expected=" + format_double(counts.expected),
               "max_abs_deviation=" + format_double(counts.max_abs_deviation)};
  return rep;
}

void fill_sum(Report& rep, const ExpSumResult& sum, std::uint64_t X, const Params& p) {
  rep.results["real"] = sum.real;
  rep.results["imag"] = sum.imag;
  rep.results["magnitude"] = sum.magnitude();
  rep.results["term_count"] = sum.term_count;
  rep.results["normalizer"] = sum.normalizer;
  rep.results["rho"] = X >= 2 ? Json(sum.rho) : Json(nullptr);
  rep.columns = {"real", "imag", "magnitude", "term_count", "normalizer", "rho"};
  rep.rows.push_back({format_double(sum.real), format_double(sum.imag), format_double(sum.magnitude()),
                      std::to_string(sum.term_count), format_double(sum.normalizer),
                      X >= 2 ? format_double(sum.rho) : ""});
  if (p.has("delta") || p.has("c")) {
    const double bound = theorem_main_bound(X, sum.modulus, p.real("delta"), p.real("c"));
    rep.results["bound"] = bound;
    rep.columns.push_back("bound");
    rep.rows.back().push_back(format_double(bound));
  }
}

void echo_bound_inputs(Report& rep, const Params& p) {
  if (p.has("delta")) rep.inputs["delta"] = p.real("delta");
  if (p.has("c")) rep.inputs["c"] = p.real("c");
}

Report expsum(const Params& p, const Context& ctx) {
  const std::uint64_t q = p.u64("q");
  const unsigned gamma = p.small("gamma");
  const mpz_class a = p.integer("a");
  const std::int64_t g = p.i64("g");
  const std::uint64_t X = p.u64("X");
  Report rep;
  rep.subcommand = "expsum";
  rep.inputs = {{"q", q}, {"gamma", gamma}, {"a", json_integer(a)}, {"g", g}, {"X", X}};
  echo_bound_inputs(rep, p);
  if (X < 1) throw PreconditionError("expsum: X must be >= 1");
  const PrimePowerModulus m(q, gamma);
  fill_sum(rep, mangoldt_exp_sum(m, a, g, X, ctx.threads), X, p);
  return rep;
}

Report mersenne_sum(const Params& p, const Context& ctx) {
  const std::uint64_t q = p.u64("q");
  const unsigned gamma = p.small("gamma");
  const mpz_class a = p.integer("a");
  const std::uint64_t X = p.u64("X");
  Report rep;
  rep.subcommand = "mersenne-sum";
  rep.inputs = {{"q", q}, {"gamma", gamma}, {"a", json_integer(a)}, {"X", X}};
  echo_bound_inputs(rep, p);
  if (X < 2) throw PreconditionError("mersenne-sum: X must be >= 2");
  const PrimePowerModulus m(q, gamma);
  const auto primes = primes_for(X, ctx);
  fill_sum(rep, mersenne_prime_sum(m, a, primes, X, ctx.threads), X, p);
  return rep;
}

Report order_structure_report(const Params& p, const Context&) {
  const std::uint64_t q = p.u64("q");
  const std::int64_t g = p.i64("g");
  const unsigned n_max = p.has("n") ? p.small("n") : 5;
  Report rep;
  rep.subcommand = "order-structure";
  rep.inputs = {{"q", q}, {"g", g}, {"n", n_max}};
  if (n_max < 1) throw PreconditionError("order-structure: n must be >= 1");
  const OrderStructure s = order_structure(q, g);
  rep.results["tau"] = s.tau;
  rep.results["G"] = s.G;
  rep.results["witness_h1"] = json_integer(s.witness_h1);
  Json levels = Json::array();
  rep.columns = {"n", "tau_n", "g_frak_n", "h_mod_q", "certified"};
  for (unsigned n = 1; n <= n_max; ++n) {
    const LiftDecomposition lift = lift_decomposition(s, n);
    const bool certified = certify_tau_n(s, n);
    levels.push_back({{"n", n},
                      {"tau_n", json_integer(lift.tau_n)},
                      {"g_frak_n", lift.g_frak},
                      {"h_mod_q", json_integer(lift.h_mod_q)},
                      {"certified", certified}});
    rep.rows.push_back({std::to_string(n), lift.tau_n.get_str(), std::to_string(lift.g_frak),
                        lift.h_mod_q.get_str(), certified ? "true" : "false"});
  }
  rep.results["levels"] = std::move(levels);
  rep.notes = {"tau=" + std::to_string(s.tau), "G=" + std::to_string(s.G),
               "witness_h1=" + s.witness_h1.get_str()};
  return rep;
}

Report vmvt(const Params& p, const Context& ctx, bool ford, bool monotonicity) {
  const unsigned r = p.small("r");
  const unsigned k = p.small("k");
  const std::uint64_t P = p.u64("P");
  Report rep;
  rep.subcommand = "vmvt";
  rep.inputs = {{"r", r}, {"k", k}, {"P", P}};
  if (ford) rep.inputs["ford"] = true;
  if (monotonicity) rep.inputs["monotonicity"] = true;
  if (ford) {
    const double value = ford_bound_log(r, k, static_cast<double>(P));
    rep.results["ford_bound_log"] = value;
    rep.columns = {"r", "k", "P", "ford_bound_log"};
    rep.rows.push_back({std::to_string(r), std::to_string(k), std::to_string(P), format_double(value)});
    return rep;
  }
  const VmvtInstance inst = vmvt_count(r, k, P, ctx.threads);
  rep.results["count"] = json_integer(inst.count);
  rep.columns = {"r", "k", "P", "count"};
  rep.rows.push_back({std::to_string(r), std::to_string(k), std::to_string(P), inst.count.get_str()});
  if (monotonicity) {
    const bool ok = monotonicity_check(r, k, P, ctx.threads);
    rep.results["monotone"] = ok;
    rep.columns.push_back("monotone");
    rep.rows.back().push_back(ok ? "true" : "false");
  }
  return rep;
}

Report discrepancy_report(const Params& p, const Context& ctx) {
  const std::uint64_t q = p.u64("q");
  const unsigned gamma = p.small("gamma");
  const std::uint64_t X = p.u64("X");
  const std::uint64_t H = p.has("H") ? p.u64("H") : 10;
  Report rep;
  rep.subcommand = "discrepancy";
  rep.inputs = {{"q", q}, {"gamma", gamma}, {"X", X}, {"H", H}};
  if (X < 2) throw PreconditionError("discrepancy: X must be >= 2");
  if (H < 1) throw PreconditionError("discrepancy: H must be >= 1");
  const auto primes = primes_for(X, ctx);
  const Discrepancy d = discrepancy(q, gamma, primes, ctx.threads);
  const double bound = erdos_turan_bound(q, gamma, primes, H, ctx.threads);
  const bool certified = d.exact <= mpq_class(bound) * mpq_class(1.0 + 1e-9);
  rep.results["pi_X"] = primes.size();
  rep.results["discrepancy"] = d.value;
  rep.results["discrepancy_exact"] = d.exact.get_str();
  rep.results["erdos_turan_bound"] = bound;
  rep.results["certified"] = certified;
  rep.columns = {"pi_X", "discrepancy", "discrepancy_exact", "erdos_turan_bound", "certified"};
  rep.rows.push_back({std::to_string(primes.size()), format_double(d.value), d.exact.get_str(),
                      format_double(bound), certified ? "true" : "false"});
  return rep;
}

Report verify_lemmas(const Params& p, const Context&) {
  const std::uint64_t q_max = p.has("q-max") ? p.u64("q-max") : 50;
  const std::int64_t g_max = p.has("g-max") ? p.i64("g-max") : 12;
  const unsigned n_max = p.has("n-max") ? p.small("n-max") : 5;
  const std::uint64_t index_max = p.has("index-max") ? p.u64("index-max") : 30;
  const std::uint64_t m_max = p.has("m-max") ? p.u64("m-max") : 20;
  Report rep;
  rep.subcommand = "verify-lemmas";
  rep.inputs = {{"q-max", q_max}, {"g-max", g_max}, {"n-max", n_max}, {"index-max", index_max},
                {"m-max", m_max}};
  if (q_max > 100'000) throw ResourceGuardError("verify-lemmas: q-max above 100000");

  struct Tally {
    std::uint64_t cases = 0, failures = 0;
  };
  Tally orders, lifts, congruences, valuations;
  for (std::uint64_t q = 3; q <= q_max; q += 2) {
    if (!is_prime_small(q)) continue;
    for (std::int64_t g = 2; g <= g_max; ++g) {
      if (g % static_cast<std::int64_t>(q) == 0) continue;
      const OrderStructure s = order_structure(q, g);
      for (unsigned n = 1; n <= n_max; ++n) {
        ++orders.cases;
        if (!certify_tau_n(s, n)) ++orders.failures;
        ++lifts.cases;
        try {
          lift_decomposition(s, n);
        } catch (const ConsistencyError&) {
          ++lifts.failures;
        }
      }
      for (unsigned r = std::max(1u, s.G); r <= n_max; ++r) {
        for (unsigned level = std::max(1u, s.G); level <= r; ++level) {
          for (std::uint64_t n1 = 0; n1 <= index_max; ++n1) {
            for (std::uint64_t n2 = 0; n2 <= index_max; ++n2) {
              ++congruences.cases;
              const CongruenceCriterion c = congruence_criterion(s, r, level, n1, n2);
              if (c.powers_congruent != c.index_divisible) ++congruences.failures;
            }
          }
        }
      }
      for (std::uint64_t m = 1; m <= m_max; ++m) {
        for (std::uint64_t x = 0; x <= m_max; ++x) {
          for (std::uint64_t y = 0; y <= m_max; ++y) {
            if (x == y) continue;
            ++valuations.cases;
            try {
              valuation_difference(s, m, x, y);
            } catch (const ConsistencyError&) {
              ++valuations.failures;
            }
          }
        }
      }
    }
  }
  rep.columns = {"check", "cases", "failures"};
  Json checks = Json::array();
  bool all_passed = true;
  for (const auto& [name, t] : {std::pair<const char*, Tally>{"order_lifting", orders},
                                {"lift_decomposition", lifts},
                                {"congruence_criterion", congruences},
                                {"valuation_difference", valuations}}) {
    checks.push_back({{"check", name}, {"cases", t.cases}, {"failures", t.failures}});
    rep.rows.push_back({name, std::to_string(t.cases), std::to_string(t.failures)});
    all_passed = all_passed && t.failures == 0;
  }
  rep.results["checks"] = std::move(checks);
  rep.results["all_passed"] = all_passed;
  return rep;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string render(const Report& rep, const std::string& format, bool timestamp) {
  std::ostringstream os;
  if (format == "json") {
    Json doc = Json::object();
    doc["tool"] = "mdl";
    doc["version"] = kToolVersion;
    doc["schema"] = kSchema;
    doc["subcommand"] = rep.subcommand;
    doc["inputs"] = rep.inputs;
    if (timestamp) doc["timestamp"] = utc_timestamp();
    for (const auto& [key, value] : rep.results.items()) doc[key] = value;
    os << doc.dump(2) << '\n';
    return os.str();
  }
  os << "# " << kSchema << ' ' << rep.subcommand;
  for (const auto& [key, value] : rep.inputs.items()) os << ' ' << key << '=' << plain(value);
  os << '\n' << "# tool=mdl " << kToolVersion << '\n';
  if (timestamp) os << "# timestamp=" << utc_timestamp() << '\n';
  for (const auto& note : rep.notes) os << "# " << note << '\n';
  for (std::size_t i = 0; i < rep.columns.size(); ++i) os << (i ? "," : "") << rep.columns[i];
  os << '\n';
  for (const auto& row : rep.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::uint64_t parse_unsigned(const std::string& flag, const std::string& text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw PreconditionError("--" + flag + " must be a nonnegative integer that fits in 64 bits, got '" +
                            text + "'");
  }
  return v;
}

std::int64_t parse_signed(const std::string& flag, const std::string& text) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw PreconditionError("--" + flag + " must be an integer that fits in 64 bits, got '" + text + "'");
  }
  return v;
}

mpz_class parse_integer(const std::string& flag, const std::string& text) {
  std::size_t i = (!text.empty() && (text[0] == '-' || text[0] == '+')) ? 1 : 0;
  if (i == text.size()) throw PreconditionError("--" + flag + " must be an integer, got '" + text + "'");
  for (std::size_t j = i; j < text.size(); ++j) {
    if (text[j] < '0' || text[j] > '9') {
      throw PreconditionError("--" + flag + " must be an integer, got '" + text + "'");
    }
  }
  mpz_class v(text.substr(i), 10);
  return text[0] == '-' ? mpz_class(-v) : v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact experiments with Mersenne numbers modulo prime powers", "mdl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("mdl ") + kToolVersion);

  Params params;
  std::string format, output, threads = "1", cache_dir;
  bool no_timestamp = false, ford = false, monotonicity = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", output, "write the report to this file");
    sub->add_option("--threads", threads, "worker threads (>= 1)");
    sub->add_option("--cache-dir", cache_dir, "prime cache directory (MDL_CACHE_DIR overrides)");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the timestamp for byte-reproducible output");
  };
  auto integer = [&](CLI::App* sub, const std::string& name, bool required, const std::string& help) {
    auto* opt = sub->add_option("--" + name, params.slot(name), help);
    if (required) opt->required();
  };

  auto* digit = app.add_subcommand("digit-stats", "count q-ary digit blocks of M_p over primes p <= X");
  integer(digit, "q", true, "odd prime base");
  integer(digit, "X", true, "prime bound");
  integer(digit, "r", true, "leading digit position of the block");
  integer(digit, "s", true, "block length");
  common(digit);

  auto* exps = app.add_subcommand("expsum", "sum_{n<=X} Lambda(n) e(a g^n / q^gamma)");
  for (const char* name : {"q", "gamma", "a", "g", "X"}) integer(exps, name, true, "");
  exps->add_option("--delta", params.slot("delta"), "exponent constant for the bound");
  exps->add_option("--c", params.slot("c"), "multiplicative constant for the bound");
  common(exps);

  auto* mers = app.add_subcommand("mersenne-sum", "sum_{p<=X} e(a M_p / q^gamma)");
  for (const char* name : {"q", "gamma", "a", "X"}) integer(mers, name, true, "");
  mers->add_option("--delta", params.slot("delta"), "exponent constant for the bound");
  mers->add_option("--c", params.slot("c"), "multiplicative constant for the bound");
  common(mers);

  auto* order = app.add_subcommand("order-structure", "order of g modulo q^n and its lifting data");
  integer(order, "q", true, "odd prime");
  integer(order, "g", true, "base, g != 0, +-1, coprime to q");
  integer(order, "n", false, "largest exponent n (default 5)");
  common(order);

  auto* vm = app.add_subcommand("vmvt", "Vinogradov mean value count N_{r,k}(P)");
  integer(vm, "r", true, "variables per side");
  integer(vm, "k", true, "number of power-sum equations");
  integer(vm, "P", true, "range bound");
  vm->add_flag("--ford", ford, "evaluate the log of Ford's bound instead of counting");
  vm->add_flag("--monotonicity", monotonicity, "also check N_{r+1,k}(P) <= P^2 N_{r,k}(P)");
  common(vm);

  auto* disc = app.add_subcommand("discrepancy", "star discrepancy of M_p / q^gamma and its Erdos-Turan bound");
  for (const char* name : {"q", "gamma", "X"}) integer(disc, name, true, "");
  integer(disc, "H", false, "number of harmonics (default 10)");
  common(disc);

  auto* verify = app.add_subcommand("verify-lemmas", "exhaustive checks of the order-lifting identities");
  integer(verify, "q-max", false, "largest prime q (default 50)");
  integer(verify, "g-max", false, "largest base g (default 12)");
  integer(verify, "n-max", false, "largest exponent (default 5)");
  integer(verify, "index-max", false, "largest n1, n2 in the congruence check (default 30)");
  integer(verify, "m-max", false, "largest m, x, y in the valuation check (default 20)");
  common(verify);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mdl: " << e.what() << '\n';
    return kExitPrecondition;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    Context ctx;
    const std::uint64_t t = parse_unsigned("threads", threads);
    if (t < 1 || t > 4096) throw PreconditionError("--threads must be in [1, 4096]");
    ctx.threads = static_cast<unsigned>(t);
    if (const char* env = std::getenv("MDL_CACHE_DIR"); env && *env) {
      ctx.cache_dir = std::filesystem::path(env);
    } else if (!cache_dir.empty()) {
      ctx.cache_dir = std::filesystem::path(cache_dir);
    }

    Report rep;
    if (name == "digit-stats") rep = digit_stats(params, ctx);
    else if (name == "expsum") rep = expsum(params, ctx);
    else if (name == "mersenne-sum") rep = mersenne_sum(params, ctx);
    else if (name == "order-structure") rep = order_structure_report(params, ctx);
    else if (name == "vmvt") rep = vmvt(params, ctx, ford, monotonicity);
    else if (name == "discrepancy") rep = discrepancy_report(params, ctx);
    else rep = verify_lemmas(params, ctx);

    if (format.empty()) format = name == "digit-stats" ? "csv" : "json";
    const std::string text = render(rep, format, !no_timestamp);
    if (output.empty()) {
      out << text;
    } else {
      std::ofstream file(output, std::ios::binary | std::ios::trunc);
      if (!file) throw std::runtime_error("cannot open output file " + output);
      file << text;
    }
    if (rep.results.contains("all_passed") && !rep.results["all_passed"].get<bool>()) return kExitFailure;
    return kExitOk;
  } catch (const PreconditionError& e) {
    err << "mdl " << name << ": precondition violated: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const ResourceGuardError& e) {
    err << "mdl " << name << ": resource guard: " << e.what() << '\n';
    return kExitResourceGuard;
  } catch (const std::exception& e) {
    err << "mdl " << name << ": " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace mdl::cli

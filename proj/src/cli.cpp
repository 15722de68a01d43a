#include "rholab/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rholab/errors.hpp"
#include "rholab/gformula.hpp"
#include "rholab/numtheory.hpp"
#include "rholab/randmap.hpp"
#include "rholab/rhofactor.hpp"
#include "rholab/rng.hpp"
#include "rholab/stats.hpp"

namespace rholab::cli {

using nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

namespace {

// Result of one subcommand: the same data as CSV rows and as JSON.
struct Report {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  ordered_json json;
  int exit_code = kExitOk;
};

struct Options {
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string output;
  std::string threads = "1";
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (const char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

void write_csv(const Report& r, std::ostream& os) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) os << ',';
      os << csv_field(cells[i]);
    }
    os << '\n';
  };
  line(r.header);
  for (const auto& row : r.rows) line(row);
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) s += ',';
    if constexpr (std::is_floating_point_v<T>) {
      s += format_double(values[i]);
    } else {
      s += std::to_string(values[i]);
    }
  }
  return s;
}

std::string str(std::uint64_t v) { return std::to_string(v); }
std::string str(double v) { return format_double(v); }
std::string str(bool v) { return v ? "true" : "false"; }

unsigned resolve_threads(const std::string& requested) {
  std::string value = requested;
  if (const char* env = std::getenv("RHOLAB_THREADS"); env && *env) value = env;
  if (value == "auto") return std::max(1u, std::thread::hardware_concurrency());
  unsigned n = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), n);
  if (ec != std::errc() || ptr != value.data() + value.size() || n == 0) {
    throw DomainError("threads must be a positive integer or 'auto', got '" +
                      value + "'");
  }
  return n;
}

const char* method_name(gformula::GMethod m) {
  return m == gformula::GMethod::kUnits ? "units" : "divisors";
}

ordered_json breakdown_json(const gformula::GResult& r) {
  ordered_json rows = ordered_json::array();
  for (const auto& t : r.breakdown) {
    rows.push_back({{"class", t.residue_class}, {"weight", t.weight},
                    {"term", t.term}});
  }
  return rows;
}

// ---- g ----

struct GArgs {
  std::vector<std::uint64_t> ks;
  std::string method = "divisors";
  bool breakdown = false;
  unsigned m = 1;
  std::uint64_t k_max = 1;
  bool relative = false;
};

Report g_eval(const GArgs& a) {
  const gformula::GQuery q = gformula::GQuery::from_ks(a.ks);
  std::vector<gformula::GResult> results;
  if (a.method == "divisors" || a.method == "both") {
    results.push_back(gformula::g_value_divisors(q));
  }
  if (a.method == "units" || a.method == "both") {
    results.push_back(gformula::g_value_units(q, a.breakdown));
  }
  Report r;
  r.header = {"k", "ell", "method", "g_value"};
  r.json = {{"command", "g eval"}, {"k", a.ks}, {"ell", q.ell}};
  ordered_json list = ordered_json::array();
  for (const auto& res : results) {
    r.rows.push_back(
        {join(a.ks), str(res.ell), method_name(res.method), str(res.value)});
    ordered_json item = {{"method", method_name(res.method)},
                         {"value", res.value}};
    if (a.breakdown) item["breakdown"] = breakdown_json(res);
    list.push_back(std::move(item));
  }
  r.json["results"] = std::move(list);
  return r;
}

Report g_table(const GArgs& a, unsigned threads) {
  const auto rows = gformula::g_table(a.m, a.k_max, a.relative, threads);
  Report r;
  const std::string value_col = a.relative ? "g_relative" : "g_value";
  r.header = a.m == 1 ? std::vector<std::string>{"k", value_col}
                      : std::vector<std::string>{"k1", "k2", value_col};
  r.json = {{"command", "g table"},
            {"m", a.m},
            {"kmax", a.k_max},
            {"relative", a.relative}};
  ordered_json list = ordered_json::array();
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    for (const std::uint64_t k : row.ks) cells.push_back(str(k));
    cells.push_back(str(row.value));
    r.rows.push_back(std::move(cells));
    list.push_back({{"k", row.ks}, {"value", row.value}});
  }
  r.json["rows"] = std::move(list);
  return r;
}

Report g_search(const GArgs& a, unsigned threads) {
  const auto s = gformula::g_search(a.m, a.k_max, threads);
  Report r;
  r.header = {"m", "kmax", "argmin", "g_value", "runner_up", "unique",
              "tuples"};
  r.rows.push_back({str(std::uint64_t{a.m}), str(a.k_max), join(s.argmin),
                    str(s.min_value), str(s.runner_up), str(s.unique),
                    str(s.tuples_evaluated)});
  r.json = {{"command", "g search"}, {"m", a.m},
            {"kmax", a.k_max},       {"argmin", s.argmin},
            {"g_value", s.min_value}, {"runner_up", s.runner_up},
            {"unique", s.unique},    {"tuples", s.tuples_evaluated}};
  return r;
}

Report g_verify(const GArgs& a, unsigned threads) {
  const auto v = gformula::verify_g_gt_one(a.k_max, threads);
  Report r;
  r.header = {"key", "value"};
  r.rows = {{"kmax", str(a.k_max)},
            {"all_pass", str(v.all_pass)},
            {"min_k", str(v.min_k)},
            {"min_value", str(v.min_value)},
            {"failures", str(std::uint64_t{v.failures.size()})}};
  r.json = {{"command", "g verify"}, {"kmax", a.k_max},
            {"all_pass", v.all_pass}, {"min_k", v.min_k},
            {"min_value", v.min_value}, {"failures", v.failures}};
  r.exit_code = v.all_pass ? kExitOk : kExitNoResult;
  return r;
}

// ---- sim ----

struct SimArgs {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> ds;
  std::vector<double> lambdas;
  std::uint64_t trials = 20000;
  std::string mode = "direct";
  bool check = false;
  double tolerance = 0.05;
  double alpha = 0.01;
};

Report sim_report(const std::string& command, const Options& o,
                  const randmap::TrialBatch& b, double exact,
                  double asymptotic) {
  Report r;
  const double ratio = b.mean / asymptotic;
  r.header = {"command",        "seed",
              "trials",         "mean",
              "half_width_95",  "reference_exact",
              "reference_asymptotic", "ratio"};
  r.rows.push_back({command, str(o.seed), str(b.trials), str(b.mean),
                    str(b.half_width_95), str(exact), str(asymptotic),
                    str(ratio)});
  r.json = {{"command", command},
            {"seed", o.seed},
            {"trials", b.trials},
            {"mean", b.mean},
            {"half_width_95", b.half_width_95},
            {"reference_exact", exact},
            {"reference_asymptotic", asymptotic},
            {"ratio", ratio},
            {"streams", b.streams},
            {"min", b.min},
            {"max", b.max}};
  return r;
}

Report sim_dist(const SimArgs& a, const Options& o, unsigned threads) {
  if (a.ds.size() != 1) throw DomainError("sim dist takes a single --d");
  if (a.mode != "direct" && a.mode != "map") {
    throw DomainError("--mode must be direct or map");
  }
  const std::uint64_t d = a.ds.front();
  const std::uint64_t ds[] = {d};
  const double lambdas[] = {1.0};
  const auto mode = a.mode == "map" ? randmap::SampleMode::kFullMap
                                    : randmap::SampleMode::kDirect;
  const auto batch = randmap::estimate_min_expectation(
      a.n, ds, lambdas, a.trials, o.seed, mode, threads);
  const double exact = randmap::exact_mean(randmap::RhoModel::from_nd(a.n, d));
  const double asymptotic = randmap::theorem1_rhs(a.n, ds, lambdas);
  Report r = sim_report("sim dist", o, batch, exact, asymptotic);
  r.json["mode"] = a.mode;
  bool pass = std::abs(batch.mean - exact) <= batch.half_width_95;
  if (mode == randmap::SampleMode::kFullMap) {
    const auto sample = randmap::sample_rho_lengths(
        a.n, d, a.trials, o.seed, mode, threads);
    const auto reference = randmap::sample_rho_lengths(
        a.n, d, a.trials, mix64(o.seed ^ 0x5eed5eed5eed5eedULL),
        randmap::SampleMode::kDirect, threads);
    const auto ks = stats::ks_two_sample(sample, reference, a.alpha);
    r.header.insert(r.header.end(),
                    {"ks_statistic", "ks_critical", "ks_p_value"});
    r.rows.back().insert(r.rows.back().end(),
                         {str(ks.statistic), str(ks.critical_value),
                          str(ks.p_value)});
    r.json["ks_statistic"] = ks.statistic;
    r.json["ks_critical"] = ks.critical_value;
    r.json["ks_p_value"] = ks.p_value;
    pass = !ks.reject;
  }
  if (a.check && !pass) r.exit_code = kExitNoResult;
  return r;
}

Report sim_min(const SimArgs& a, const Options& o, unsigned threads) {
  if (a.ds.size() != a.lambdas.size()) {
    throw DomainError("--d and --lambda need the same number of entries");
  }
  const auto batch = randmap::estimate_min_expectation(
      a.n, a.ds, a.lambdas, a.trials, o.seed, randmap::SampleMode::kDirect,
      threads);
  const double exact = randmap::exact_min_mean(a.n, a.ds, a.lambdas);
  const double asymptotic = randmap::theorem1_rhs(a.n, a.ds, a.lambdas);
  Report r = sim_report("sim min", o, batch, exact, asymptotic);
  if (a.check && std::abs(batch.mean / asymptotic - 1.0) > a.tolerance) {
    r.exit_code = kExitNoResult;
  }
  return r;
}

// ---- factor ----

struct FactorArgs {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> machines;
  std::uint64_t max_iterations = 100'000'000;
  std::uint64_t batch = 128;
  bool deterministic = false;
};

Report factor(const FactorArgs& a, const Options& o) {
  std::vector<gformula::MachineSpec> specs;
  for (const std::uint64_t k : a.machines) {
    specs.push_back(gformula::MachineSpec::from_k(k));
  }
  const auto schedule = a.deterministic ? rhofactor::Schedule::kDeterministic
                                        : rhofactor::Schedule::kThreaded;
  const auto out = rhofactor::parallel_factor(a.n, specs, o.seed,
                                              a.max_iterations, schedule,
                                              a.batch);
  Report r;
  const std::string status = out.found() ? "found" : "exhausted";
  r.header = {"n",       "status", "factor", "winner",       "machine",
              "k",       "lambda", "iterations", "weighted_cost"};
  ordered_json machines = ordered_json::array();
  for (std::size_t i = 0; i < out.machines.size(); ++i) {
    const auto& m = out.machines[i];
    r.rows.push_back({str(a.n), status,
                      out.found() ? str(out.factor) : "",
                      out.found() ? str(std::uint64_t{out.winner_index}) : "",
                      str(std::uint64_t{i}), str(m.k), str(m.lambda),
                      str(m.iterations), str(m.weighted_cost)});
    machines.push_back({{"k", m.k},
                        {"lambda", m.lambda},
                        {"iterations", m.iterations},
                        {"weighted_cost", m.weighted_cost},
                        {"restarts", m.restarts}});
  }
  r.json = {{"n", a.n},
            {"factor", out.found() ? ordered_json(out.factor) : ordered_json()},
            {"winner", out.found() ? ordered_json(out.winner_index)
                                   : ordered_json()},
            {"machines", std::move(machines)},
            {"status", status}};
  r.exit_code = out.found() ? kExitOk : kExitNoResult;
  return r;
}

// ---- heuristic ----

struct HeuristicArgs {
  std::uint64_t p = 0;
  std::uint64_t k = 1;
  std::uint64_t trials = 2000;
  bool check = false;
  double lo = 0.95;
  double hi = 1.05;
};

Report heuristic(const HeuristicArgs& a, const Options& o) {
  if (a.p < 3 || a.p % 2 == 0 || !numtheory::is_prime(a.p)) {
    throw DomainError("--p must be an odd prime, got " + std::to_string(a.p));
  }
  const auto h = rhofactor::heuristic_check(a.p, a.k, a.trials, o.seed);
  Report r;
  r.header = {"p",     "k",          "d",           "trials",
              "empirical_mean", "model_mean", "ratio", "half_width_95",
              "ks_statistic", "ks_p_value"};
  r.rows.push_back({str(h.p), str(h.k), str(h.d), str(h.trials),
                    str(h.empirical_mean), str(h.model_mean), str(h.ratio),
                    str(h.half_width_95), str(h.ks_statistic),
                    str(h.ks_p_value)});
  r.json = {{"command", "heuristic"},
            {"seed", o.seed},
            {"p", h.p},
            {"k", h.k},
            {"d", h.d},
            {"trials", h.trials},
            {"empirical_mean", h.empirical_mean},
            {"model_mean", h.model_mean},
            {"ratio", h.ratio},
            {"half_width_95", h.half_width_95},
            {"ks_statistic", h.ks_statistic},
            {"ks_p_value", h.ks_p_value}};
  if (a.check && (h.ratio < a.lo || h.ratio > a.hi)) {
    r.exit_code = kExitNoResult;
  }
  return r;
}

void add_common(CLI::App& app, Options& o) {
  app.add_option("--seed", o.seed, "base seed of every random stream");
  app.add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", o.output, "write results to this file");
  app.add_option("--threads", o.threads,
                 "worker count or 'auto' (RHOLAB_THREADS overrides)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Parameter laboratory for the parallel Pollard rho method",
               "rholab"};
  app.require_subcommand(1);
  Options opts;

  GArgs g;
  SimArgs sim;
  FactorArgs fac;
  HeuristicArgs heu;

  auto* g_cmd = app.add_subcommand("g", "evaluate the expected-time functional G");
  g_cmd->require_subcommand(1);
  auto* g_eval_cmd = g_cmd->add_subcommand("eval", "G for one tuple of k");
  g_eval_cmd->add_option("--k", g.ks, "comma separated k values")
      ->required()
      ->delimiter(',');
  g_eval_cmd->add_option("--method", g.method, "divisors, units or both")
      ->check(CLI::IsMember({"divisors", "units", "both"}));
  g_eval_cmd->add_flag("--breakdown", g.breakdown, "include per-class terms");
  auto* g_table_cmd = g_cmd->add_subcommand("table", "tabulate G for M = 1, 2");
  g_table_cmd->add_option("--m", g.m, "number of machines (1 or 2)")
      ->required()
      ->check(CLI::IsMember({1u, 2u}));
  g_table_cmd->add_option("--kmax", g.k_max)->required()->check(CLI::PositiveNumber);
  g_table_cmd->add_flag("--relative", g.relative, "divide by G(1, ..., 1)");
  auto* g_search_cmd = g_cmd->add_subcommand("search", "minimize G on a grid");
  g_search_cmd->add_option("--m", g.m)->required()->check(CLI::PositiveNumber);
  g_search_cmd->add_option("--kmax", g.k_max)->required()->check(CLI::PositiveNumber);
  auto* g_verify_cmd = g_cmd->add_subcommand("verify", "check G(k) > 1 for 2 <= k <= kmax");
  g_verify_cmd->add_option("--kmax", g.k_max)->required();

  auto* sim_cmd = app.add_subcommand("sim", "Monte-Carlo rho lengths");
  sim_cmd->require_subcommand(1);
  auto* sim_dist_cmd = sim_cmd->add_subcommand("dist", "single-machine rho length");
  sim_dist_cmd->add_option("--n", sim.n)->required();
  sim_dist_cmd->add_option("--d", sim.ds)->required()->delimiter(',');
  sim_dist_cmd->add_option("--trials", sim.trials);
  sim_dist_cmd->add_option("--mode", sim.mode, "direct or map");
  sim_dist_cmd->add_option("--alpha", sim.alpha, "KS significance for --mode map");
  sim_dist_cmd->add_flag("--check", sim.check, "exit 1 when the gate fails");
  auto* sim_min_cmd = sim_cmd->add_subcommand("min", "min_i lambda_i S_i over machines");
  sim_min_cmd->add_option("--n", sim.n)->required();
  sim_min_cmd->add_option("--d", sim.ds)->required()->delimiter(',');
  sim_min_cmd->add_option("--lambda", sim.lambdas)->required()->delimiter(',');
  sim_min_cmd->add_option("--trials", sim.trials);
  sim_min_cmd->add_option("--tolerance", sim.tolerance,
                          "allowed relative deviation from the asymptotic");
  sim_min_cmd->add_flag("--check", sim.check, "exit 1 when the gate fails");

  auto* factor_cmd = app.add_subcommand("factor", "parallel parameterized rho");
  factor_cmd->add_option("--n", fac.n)->required();
  factor_cmd->add_option("--machines", fac.machines, "k per machine")
      ->required()
      ->delimiter(',');
  factor_cmd->add_option("--max-iter", fac.max_iterations);
  factor_cmd->add_option("--batch", fac.batch, "iterations per gcd");
  factor_cmd->add_flag("--deterministic", fac.deterministic,
                       "single-threaded cost-ordered interleaving");

  auto* heu_cmd = app.add_subcommand("heuristic", "real map vs random-map model");
  heu_cmd->add_option("--p", heu.p)->required();
  heu_cmd->add_option("--k", heu.k);
  heu_cmd->add_option("--trials", heu.trials);
  heu_cmd->add_option("--lo", heu.lo);
  heu_cmd->add_option("--hi", heu.hi);
  heu_cmd->add_flag("--check", heu.check, "exit 1 when the ratio is outside [lo, hi]");

  add_common(app, opts);
  for (CLI::App* sub : {g_cmd, sim_cmd, factor_cmd, heu_cmd, g_eval_cmd,
                        g_table_cmd, g_search_cmd, g_verify_cmd, sim_dist_cmd,
                        sim_min_cmd}) {
    sub->fallthrough();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  Report report;
  try {
    const unsigned threads = resolve_threads(opts.threads);
    if (*g_eval_cmd) {
      report = g_eval(g);
    } else if (*g_table_cmd) {
      report = g_table(g, threads);
    } else if (*g_search_cmd) {
      report = g_search(g, threads);
    } else if (*g_verify_cmd) {
      report = g_verify(g, threads);
    } else if (*sim_dist_cmd) {
      report = sim_dist(sim, opts, threads);
    } else if (*sim_min_cmd) {
      report = sim_min(sim, opts, threads);
    } else if (*factor_cmd) {
      report = factor(fac, opts);
    } else if (*heu_cmd) {
      report = heuristic(heu, opts);
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ostringstream text;
  if (opts.format == "json") {
    text << report.json.dump(2) << '\n';
  } else {
    write_csv(report, text);
  }
  if (opts.output.empty()) {
    out << text.str();
  } else {
    std::ofstream file(opts.output, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << opts.output << '\n';
      return kExitUsage;
    }
    file << text.str();
  }
  return report.exit_code;
}

}  // namespace rholab::cli

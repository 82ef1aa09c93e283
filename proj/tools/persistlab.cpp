// persistlab: simulation, persistence estimates, oracles and invariant checks.
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 failed check.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "persistlab/persistlab.hpp"
#include "verify.hpp"

using namespace persistlab;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

struct Global {
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out = "-";
  std::string format;
};

void emit(const Global& g, const std::string& content) {
  if (g.out.empty() || g.out == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    atomic_write(g.out, content);
  }
}

std::string fmt_or(const Global& g, const std::string& fallback) {
  const std::string f = g.format.empty() ? fallback : g.format;
  if (f != "csv" && f != "json") throw ConfigError("--format must be csv or json");
  return f;
}

// A path to a JSON file, or the JSON text itself.
ProcessModel load_model(const std::string& spec) {
  json j;
  const auto first = spec.find_first_not_of(" \t\n");
  if (first != std::string::npos && spec[first] == '{') {
    j = json::parse(spec);
  } else {
    std::ifstream in(spec);
    if (!in) throw ConfigError("cannot read model file '" + spec + "'");
    j = json::parse(in);
  }
  return ProcessModel::from_json(j);
}

// "16:512" doubles from 16 up to 512; "4,8,20" is taken literally.
std::vector<long> parse_grid(const std::string& s) {
  std::vector<long> g;
  auto to_long = [&](const std::string& t) {
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(t, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != t.size() || v < 1) throw ConfigError("bad grid entry '" + t + "' in '" + s + "'");
    return v;
  };
  if (const auto c = s.find(':'); c != std::string::npos) {
    const long lo = to_long(s.substr(0, c)), hi = to_long(s.substr(c + 1));
    if (hi < lo) throw ConfigError("grid upper end below lower end: " + s);
    for (long n = lo; n <= hi; n *= 2) g.push_back(n);
  } else {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) g.push_back(to_long(tok));
  }
  if (g.empty()) throw ConfigError("empty grid");
  return g;
}

SimConfig sim_config(const Global& g, const ProcessModel& m, std::size_t batch_size) {
  SimConfig c{m};
  c.base_seed = g.seed;
  c.threads = static_cast<unsigned>(std::max(0, g.threads));
  c.batch_size = batch_size;
  return c;
}

RunManifest manifest(const Global& g, const std::string& command) {
  RunManifest m;
  m.command = command;
  m.seed = g.seed;
  return m;
}

json estimate_json(const PersistenceEstimate& e) {
  return {{"model", e.model}, {"process", e.process}, {"side", e.side}, {"barrier", e.barrier}, {"N", e.N},
          {"trials", e.trials}, {"hits", e.hits}, {"phat", e.phat}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}};
}

// ---- simulate

struct SimulateArgs {
  std::string model;
  long N = 0;
  std::uint64_t paths = 1;
  std::size_t batch_size = 4096;
  std::size_t covariance = 0;
};

void cmd_simulate(const Global& g, const SimulateArgs& a) {
  const auto model = load_model(a.model);
  auto man = manifest(g, "simulate");
  man.model = model.to_json();
  if (a.covariance > 0) {
    const auto r = covariance_sequence(model, a.covariance);
    man.extra["max_lag"] = a.covariance;
    if (fmt_or(g, "csv") == "json") {
      emit(g, json{{"manifest", man.to_json()}, {"r", r.r}}.dump(2) + "\n");
      return;
    }
    CsvWriter w(man, {"lag", "r"});
    for (std::size_t k = 0; k <= a.covariance; ++k) w.row({std::to_string(k), fmt_double(r.r[k])});
    emit(g, w.str());
    return;
  }
  if (a.N < 1) throw ConfigError("--N must be >= 1");
  if (a.paths < 1) throw ConfigError("--paths must be >= 1");
  const auto cfg = sim_config(g, model, a.batch_size);
  const PathSampler sampler(model, a.N);
  man.grid = {a.N};
  man.trials = a.paths;
  man.extra["batch_size"] = a.batch_size;
  const bool as_json = fmt_or(g, "csv") == "json";
  json jpaths = json::array();
  std::vector<std::string> cols{"n", "xi", "S", "Itilde", "I", "Ibar"};
  if (a.paths > 1) cols.insert(cols.begin(), "path");
  CsvWriter w(man, cols);
  for (std::uint64_t i = 0; i < a.paths; ++i) {
    const auto p = simulate_one(sampler, cfg, i);
    json jp{{"n", json::array()}, {"xi", json::array()}, {"S", json::array()},
            {"Itilde", json::array()}, {"I", json::array()}, {"Ibar", json::array()}};
    for (long n = -a.N; n <= a.N; ++n) {
      const bool inc = n > -a.N;  // xi and Itilde start at -N+1
      if (as_json) {
        jp["n"].push_back(n);
        jp["xi"].push_back(inc ? json(p.xi(n)) : json(nullptr));
        jp["S"].push_back(p.S(n));
        jp["Itilde"].push_back(inc ? json(p.Itilde(n)) : json(nullptr));
        jp["I"].push_back(p.I(n));
        jp["Ibar"].push_back(p.Ibar(n));
      } else {
        std::vector<std::string> row{std::to_string(n), inc ? fmt_double(p.xi(n)) : "", fmt_double(p.S(n)),
                                     inc ? fmt_double(p.Itilde(n)) : "", fmt_double(p.I(n)), fmt_double(p.Ibar(n))};
        if (a.paths > 1) row.insert(row.begin(), std::to_string(i));
        w.row(row);
      }
    }
    if (as_json) jpaths.push_back(std::move(jp));
  }
  emit(g, as_json ? json{{"manifest", man.to_json()}, {"paths", jpaths}}.dump(2) + "\n" : w.str());
}

// ---- persist

struct PersistArgs {
  std::string model;
  std::string process = "S";
  std::string side = "two";
  std::string barrier = "zero";
  std::string grid = "16:512";
  std::uint64_t trials = 100000;
  std::size_t batch_size = 4096;
};

void cmd_persist(const Global& g, const PersistArgs& a) {
  const auto model = load_model(a.model);
  const auto grid = parse_grid(a.grid);
  const PersistenceQuery q{parse_process(a.process), parse_side(a.side), Barrier::parse(a.barrier)};
  const auto est = mc_persistence_grid(sim_config(g, model, a.batch_size), grid, q, a.trials);
  auto man = manifest(g, "persist");
  man.model = model.to_json();
  man.grid = grid;
  man.trials = a.trials;
  man.extra["process"] = to_string(q.process);
  man.extra["side"] = to_string(q.side);
  man.extra["barrier"] = q.barrier.tag();
  man.extra["batch_size"] = a.batch_size;
  if (fmt_or(g, "csv") == "json") {
    json arr = json::array();
    for (const auto& e : est) arr.push_back(estimate_json(e));
    emit(g, json{{"manifest", man.to_json()}, {"estimates", arr}}.dump(2) + "\n");
    return;
  }
  CsvWriter w(man, {"model", "H", "process", "side", "barrier", "N", "trials", "hits", "phat", "ci_low", "ci_high"});
  for (const auto& e : est) {
    w.row({model.kind_name(), fmt_double(model.H()), e.process, e.side, e.barrier, std::to_string(e.N),
           std::to_string(e.trials), std::to_string(e.hits), fmt_double(e.phat), fmt_double(e.ci_low),
           fmt_double(e.ci_high)});
  }
  emit(g, w.str());
}

// ---- exponent

struct ExponentArgs {
  std::string in;
  long min_N = 1;
  long max_N = std::numeric_limits<long>::max();
};

void cmd_exponent(const Global& g, const ExponentArgs& a) {
  const auto t = read_csv(a.in);
  const std::size_t cN = t.column("N"), cT = t.column("trials"), cH = t.column("hits");
  const std::size_t keys[] = {t.column("model"), t.column("H"), t.column("process"), t.column("side"),
                              t.column("barrier")};
  std::map<std::string, std::vector<PersistenceEstimate>> groups;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw ConfigError("ragged CSV row in " + a.in);
    const long N = std::stol(row[cN]);
    if (N < a.min_N || N > a.max_N) continue;
    std::string key;
    for (auto k : keys) key += row[k] + ",";
    key.pop_back();
    auto e = wilson_estimate(std::stoull(row[cH]), std::stoull(row[cT]));
    e.N = N;
    groups[key].push_back(e);
  }
  if (groups.empty()) throw InsufficientData("no rows in the selected N range");
  auto man = manifest(g, "exponent");
  man.extra["input"] = a.in;
  json fits = json::array();
  for (const auto& [key, est] : groups) {
    const auto f = fit_exponent(est);
    fits.push_back({{"group", key}, {"slope", f.slope}, {"stderr", f.slope_stderr}, {"intercept", f.intercept},
                    {"N", f.N}, {"weights", f.weights}});
  }
  json out = groups.size() == 1 ? fits[0] : json{{"fits", fits}};
  out["manifest"] = man.to_json();
  emit(g, out.dump(2) + "\n");
}

// ---- hull

struct HullArgs {
  std::string model;
  long N = 256;
  std::uint64_t paths = 100;
  bool check = false;
  std::size_t batch_size = 4096;
};

int cmd_hull(const Global& g, const HullArgs& a) {
  const auto model = load_model(a.model);
  if (a.N < 1) throw ConfigError("--N must be >= 1");
  const auto cfg = sim_config(g, model, a.batch_size);
  const PathSampler sampler(model, a.N);
  auto man = manifest(g, a.check ? "hull --check" : "hull");
  man.model = model.to_json();
  man.grid = {a.N};
  man.trials = a.paths;
  double worst_gap = 0.0;
  long nodal = 0, slopes = 0;
  json rows = json::array();
  CsvWriter w(man, {"path", "F_sum", "F_hull", "nodal_count", "theta"});
  for (std::uint64_t i = 0; i < a.paths; ++i) {
    const auto p = simulate_one(sampler, cfg, i);
    const auto h = concave_majorant(p, a.N);
    const double theta = vartheta(p, a.N);
    const auto c = check_hull(h);
    worst_gap = std::max(worst_gap, c.identity_gap);
    nodal += c.nodal_mismatches;
    slopes += c.slope_mismatches;
    rows.push_back({{"F_sum", h.F_sum}, {"F_hull", h.F_hull}, {"nodal_count", h.nodal_points.size()}, {"theta", theta}});
    w.row({std::to_string(i), fmt_double(h.F_sum), fmt_double(h.F_hull), std::to_string(h.nodal_points.size()),
           fmt_double(theta)});
  }
  const bool ok = worst_gap <= 1e-9 && nodal == 0 && slopes == 0;
  if (fmt_or(g, "json") == "json") {
    json out{{"manifest", man.to_json()}, {"paths", rows}};
    if (a.check) {
      out["check"] = {{"max_identity_gap", worst_gap}, {"nodal_violations", nodal}, {"slope_violations", slopes},
                      {"pass", ok}};
    }
    emit(g, out.dump(2) + "\n");
  } else {
    emit(g, w.str());
  }
  if (a.check && !ok) {
    std::cerr << "hull check failed: gap " << worst_gap << ", nodal " << nodal << ", slope " << slopes << "\n";
    return kExitCheck;
  }
  return 0;
}

// ---- oracle

struct OracleArgs {
  std::string model;
  long N = 1;
  std::string process = "S";
  std::string side = "two";
  std::string barrier = "zero";
  long m = 1;
};

void cmd_oracle_persist(const Global& g, const OracleArgs& a) {
  const auto model = load_model(a.model);
  const auto proc = parse_process(a.process);
  const auto side = parse_side(a.side);
  const auto barrier = Barrier::parse(a.barrier);
  const auto r = persistence_exact(model, a.N, proc, side, barrier);
  auto man = manifest(g, "oracle persist");
  man.model = model.to_json();
  man.grid = {a.N};
  man.extra["process"] = to_string(proc);
  man.extra["side"] = to_string(side);
  man.extra["barrier"] = barrier.tag();
  emit(g, json{{"prob", r.prob}, {"err", r.err}, {"points", r.points}, {"manifest", man.to_json()}}.dump(2) + "\n");
}

void cmd_oracle_sparre(const Global& g, const OracleArgs& a) {
  const double p = sparre_andersen_one_sided(a.N);
  auto man = manifest(g, "oracle sparre");
  man.grid = {a.N};
  emit(g, json{{"one_sided", p}, {"two_sided", p * p}, {"manifest", man.to_json()}}.dump(2) + "\n");
}

int cmd_oracle_prekopa(const Global& g, const OracleArgs& a) {
  const auto model = load_model(a.model);
  const auto r = prekopa_check(model, a.N, a.m);
  auto man = manifest(g, "oracle prekopa");
  man.model = model.to_json();
  man.grid = {a.N};
  man.extra["m"] = a.m;
  auto res = [](const OrthantResult& o) { return json{{"prob", o.prob}, {"err", o.err}}; };
  emit(g, json{{"A0", res(r.p0)}, {"Am", res(r.pm)}, {"A_minus_m", res(r.pminus)}, {"margin", r.margin()},
               {"ordering_ok", r.ordering_ok()}, {"symmetry_ok", r.symmetry_ok()}, {"manifest", man.to_json()}}
                  .dump(2) +
              "\n");
  return r.ok() ? 0 : kExitCheck;
}

// ---- rkhs

struct RkhsArgs {
  double H = 0.7;
  std::optional<double> rho;
  long nmax = 4096;
  std::optional<double> u0;
  std::optional<double> delta;
  double A = 2.0;
  std::string model;
};

RkhsParams rkhs_params(const RkhsArgs& a) {
  auto p = RkhsParams::defaults(a.H, a.rho.value_or(RkhsParams::midpoint_rho(a.H)));
  if (a.u0) p.u0 = *a.u0;
  if (a.delta) p.delta = *a.delta;
  p.A = a.A;
  p.validate();
  return p;
}

ProcessModel rkhs_model(const RkhsArgs& a) {
  if (a.model.empty()) return ProcessModel::fgn(HurstParam(a.H));
  auto m = load_model(a.model);
  if (std::abs(m.H() - a.H) > 0) throw ConfigError("--H differs from the model's H");
  return m;
}

json rkhs_manifest_params(const RkhsParams& p, long nmax) {
  return {{"H", p.H}, {"rho", p.rho}, {"u0", p.u0}, {"delta", p.delta}, {"A", p.A}, {"nmax", nmax}};
}

void cmd_rkhs_build(const Global& g, const RkhsArgs& a) {
  const auto p = rkhs_params(a);
  const auto model = rkhs_model(a);
  const auto c = build_rkhs(model, p, a.nmax);
  auto man = manifest(g, "rkhs build");
  man.model = model.to_json();
  man.extra["rkhs"] = rkhs_manifest_params(p, a.nmax);
  if (fmt_or(g, "csv") == "json") {
    std::vector<double> h, f, gg;
    for (long n = -a.nmax; n <= a.nmax; ++n) {
      h.push_back(c.h.h(n));
      f.push_back(c.f(n));
      gg.push_back(c.g(n));
    }
    emit(g, json{{"manifest", man.to_json()}, {"n_min", -a.nmax}, {"h", h}, {"f", f}, {"g", gg}}.dump() + "\n");
    return;
  }
  CsvWriter w(man, {"n", "h", "f", "g"});
  for (long n = -a.nmax; n <= a.nmax; ++n)
    w.row({std::to_string(n), fmt_double(c.h.h(n)), fmt_double(c.f(n)), fmt_double(c.g(n))});
  emit(g, w.str());
}

int cmd_rkhs_check(const Global& g, const RkhsArgs& a) {
  const auto p = rkhs_params(a);
  const auto model = rkhs_model(a);
  const auto c = build_rkhs(model, p, a.nmax);
  auto drift = [&](const RkhsShiftFunction& s) {
    return json{{"exponent", s.target_exponent}, {"ratio_half", s.ratio(a.nmax / 2)}, {"ratio_max", s.ratio(a.nmax)},
                {"drift", s.ratio_drift()}, {"norm_sq", s.norm_sq}};
  };
  const double h_over_h1 = c.h.h(a.nmax) / c.h1(a.nmax);
  const bool positive = c.h.h.min_value() > 0.0;
  const double worst = std::max({c.h.h.ratio_drift(), c.f.ratio_drift(), c.g.ratio_drift()});
  const bool ok = positive && worst < 0.10;
  auto man = manifest(g, "rkhs check");
  man.model = model.to_json();
  man.extra["rkhs"] = rkhs_manifest_params(p, a.nmax);
  json out{{"n0", c.h.n0},
           {"c2", c.h.c2},
           {"min_h", c.h.h.min_value()},
           {"h", drift(c.h.h)},
           {"f", drift(c.f)},
           {"g", drift(c.g)},
           {"h1", drift(c.h1)},
           {"h1_limit_constant", h1_limit_constant(p.rho)},
           {"h_over_h1_at_nmax", h_over_h1},
           {"h2_sup_f2", c.h2.sup_f2},
           {"bump_width", c.h2.bump.width()},
           {"potter_ratio", c.potter_ratio},
           {"pass", ok},
           {"manifest", man.to_json()}};
  emit(g, out.dump(2) + "\n");
  return ok ? 0 : kExitCheck;
}

// ---- verify

int cmd_verify(const Global& g, const std::string& tier, std::uint64_t trials, bool strict) {
  verify::Options o;
  o.seed = g.seed;
  o.threads = static_cast<unsigned>(std::max(0, g.threads));
  o.trials = trials;
  o.strict = strict;
  bool pass = false;
  json report = verify::run(tier, o, pass);
  auto man = manifest(g, "verify --tier " + tier);
  man.trials = trials;
  man.extra["strict"] = strict;
  report["manifest"] = man.to_json();
  emit(g, report.dump(2) + "\n");
  return pass ? 0 : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"persistlab: persistence of integrated long-memory Gaussian sequences"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));
  Global g;
  app.add_option("--seed", g.seed, "base seed for all randomness");
  app.add_option("--threads", g.threads, "worker threads (default: PERSISTLAB_THREADS, then hardware)");
  app.add_option("--out", g.out, "output file ('-' for stdout)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "dump simulated paths or a covariance table");
  s_sim->add_option("--model", sim.model, "model JSON file or inline JSON")->required();
  s_sim->add_option("--N", sim.N, "horizon");
  s_sim->add_option("--paths", sim.paths, "number of paths");
  s_sim->add_option("--batch-size", sim.batch_size, "paths per seed batch");
  s_sim->add_option("--covariance", sim.covariance, "write lag,r for lags 0..K instead of paths");

  PersistArgs per;
  auto* s_per = app.add_subcommand("persist", "Monte Carlo persistence over an N grid");
  s_per->add_option("--model", per.model, "model JSON file or inline JSON")->required();
  s_per->add_option("--process", per.process, "S, I or Ibar");
  s_per->add_option("--side", per.side, "two or one");
  s_per->add_option("--barrier", per.barrier, "zero, inf, constant:b or abs_linear:c");
  s_per->add_option("--grid", per.grid, "lo:hi (doubling) or a comma list");
  s_per->add_option("--trials", per.trials, "paths");
  s_per->add_option("--batch-size", per.batch_size, "paths per seed batch");

  ExponentArgs ex;
  auto* s_ex = app.add_subcommand("exponent", "weighted log-log slope of persist output");
  s_ex->add_option("--in", ex.in, "CSV written by persist")->required();
  s_ex->add_option("--min-N", ex.min_N, "smallest N used");
  s_ex->add_option("--max-N", ex.max_N, "largest N used");

  HullArgs hu;
  auto* s_hu = app.add_subcommand("hull", "concave majorant functionals per path");
  s_hu->add_option("--model", hu.model, "model JSON file or inline JSON")->required();
  s_hu->add_option("--N", hu.N, "horizon");
  s_hu->add_option("--paths", hu.paths, "number of paths");
  s_hu->add_option("--batch-size", hu.batch_size, "paths per seed batch");
  s_hu->add_flag("--check", hu.check, "verify hull identities; exit 4 on any violation");

  OracleArgs orc;
  auto* s_or = app.add_subcommand("oracle", "orthant-probability reference values");
  s_or->require_subcommand(1);
  auto* s_orp = s_or->add_subcommand("persist", "exact persistence probability (dimension <= 12)");
  s_orp->add_option("--model", orc.model, "model JSON file or inline JSON")->required();
  s_orp->add_option("--N", orc.N, "horizon")->required();
  s_orp->add_option("--process", orc.process, "S, I or Ibar");
  s_orp->add_option("--side", orc.side, "two or one");
  s_orp->add_option("--barrier", orc.barrier, "zero, inf, constant:b or abs_linear:c");
  auto* s_ors = s_or->add_subcommand("sparre", "binom(2N,N) 4^-N and its square");
  s_ors->add_option("--N", orc.N, "horizon")->required();
  auto* s_ork = s_or->add_subcommand("prekopa", "P(A_0) >= P(A_m) = P(A_-m)");
  s_ork->add_option("--model", orc.model, "model JSON file or inline JSON")->required();
  s_ork->add_option("--N", orc.N, "horizon (<= 4)")->required();
  s_ork->add_option("--m", orc.m, "shift multiple");

  RkhsArgs rk;
  auto* s_rk = app.add_subcommand("rkhs", "shift functions h, f, g");
  s_rk->require_subcommand(1);
  for (auto* sub : {s_rk->add_subcommand("build", "tabulate n,h,f,g"),
                    s_rk->add_subcommand("check", "ratio diagnostics as JSON")}) {
    sub->add_option("--H", rk.H, "Hurst parameter");
    sub->add_option("--rho", rk.rho, "decay exponent in (-1, H-1); default midpoint");
    sub->add_option("--nmax", rk.nmax, "table half-length");
    sub->add_option("--u0", rk.u0, "cutoff in (0, pi]");
    sub->add_option("--delta", rk.delta, "Potter exponent");
    sub->add_option("--A", rk.A, "Potter constant");
    sub->add_option("--model", rk.model, "density model (default fGn with --H)");
  }

  std::string tier = "fast";
  std::uint64_t vtrials = 20000;
  bool strict = false;
  auto* s_ve = app.add_subcommand("verify", "run invariant suites");
  s_ve->add_option("--tier", tier, "fast, mc, oracle or all")->check(CLI::IsMember({"fast", "mc", "oracle", "all"}));
  s_ve->add_option("--trials", vtrials, "paths per mc check");
  s_ve->add_flag("--strict", strict, "mc checks use the 95% interval instead of 3 SE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*s_sim) cmd_simulate(g, sim);
    if (*s_per) cmd_persist(g, per);
    if (*s_ex) cmd_exponent(g, ex);
    if (*s_hu) return cmd_hull(g, hu);
    if (*s_or) {
      if (*s_orp) cmd_oracle_persist(g, orc);
      if (*s_ors) cmd_oracle_sparre(g, orc);
      if (*s_ork) return cmd_oracle_prekopa(g, orc);
    }
    if (*s_rk) {
      if (*s_rk->get_subcommand("build")) cmd_rkhs_build(g, rk);
      if (*s_rk->get_subcommand("check")) return cmd_rkhs_check(g, rk);
    }
    if (*s_ve) return cmd_verify(g, tier, vtrials, strict);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}

// kolyvagin: instance generation, verification suites, transforms,
// regulators and cyclotomic instances from the command line.
//
// Exit codes: 0 success / all checks pass, 1 a check failed, 2 usage or
// input error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kolyvagin/cyclo.hpp"
#include "kolyvagin/instance.hpp"
#include "kolyvagin/ksystems.hpp"
#include "kolyvagin/serialize.hpp"
#include "kolyvagin/unitsys.hpp"
#include "kolyvagin/verify.hpp"

namespace {

using json = nlohmann::json;
using namespace kolyvagin;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw UsageError("cannot open '" + path + "'");
    in = &file;
  }
  try {
    return json::parse(*in);
  } catch (const json::parse_error& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

InstancePtr load_instance(const std::string& path) {
  return std::make_shared<const SevenTuple>(io::instance_from_json(read_json(path)));
}

/// Flags shared by the subcommands that draw random instances.
struct Common {
  std::uint64_t seed = 1;
  int trials = 20;
  std::optional<Int> m;
  std::optional<int> sites;
  std::vector<Int> t;
  std::optional<int> rank;
  std::optional<int> r;
  std::string out;
  std::string format = "json";

  void add_to(CLI::App* app, bool with_trials) {
    app->add_option("--seed", seed, "64-bit seed for all randomness");
    if (with_trials) app->add_option("--trials", trials, "number of random trials")->check(CLI::PositiveNumber);
    app->add_option("--m", m, "modulus m of O = Z/m")->check(CLI::Range(Int{2}, Int{1} << 30));
    app->add_option("--sites", sites, "number of sites |Sigma|")->check(CLI::Range(1, 12));
    app->add_option("--t", t, "comma-separated t-values, one per site")->delimiter(',');
    app->add_option("--rank", rank, "rank of H")->check(CLI::Range(1, 16));
    app->add_option("--r", r, "system rank r")->check(CLI::Range(0, 16));
    app->add_option("--out", out, "output path (default: standard output)");
    app->add_option("--format", format, "output format")->check(CLI::IsMember({"json"}));
  }

  void check_sites() const {
    if (!t.empty() && sites && static_cast<int>(t.size()) != *sites)
      throw UsageError("--t lists " + std::to_string(t.size()) + " values but --sites is " + std::to_string(*sites));
  }

  InstanceParams instance_params() const {
    check_sites();
    InstanceParams p;
    p.m = m.value_or(9);
    const int n = sites.value_or(t.empty() ? 3 : static_cast<int>(t.size()));
    p.t = t.empty() ? std::vector<Int>(n, p.m) : t;
    p.h = rank.value_or(4);
    return p;
  }

  verify::SuiteParams suite_params() const {
    check_sites();
    verify::SuiteParams p;
    p.seed = seed;
    p.trials = trials;
    p.m = m;
    p.sites = sites ? sites : (t.empty() ? std::nullopt : std::optional<int>(static_cast<int>(t.size())));
    p.t = t;
    p.rank = rank;
    p.r = r;
    return p;
  }
};

int cmd_gen(const Common& c) {
  InstanceParams p = c.instance_params();
  try {
    validate_params(p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_json(io::to_json(random_instance(c.seed, p)), c.out);
  return kOk;
}

struct VerifyArgs {
  std::string suite;
  std::string instance;
  std::string system;
  std::string config;
  bool no_timing = false;
};

int cmd_verify(const Common& c, const VerifyArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  verify::Recorder rec;
  verify::SuiteParams p = c.suite_params();
  json params = p.to_json();
  if ((!a.instance.empty() || !a.system.empty()) && a.suite != "axioms")
    throw UsageError("--instance and --system apply to the axioms suite only");
  if (!a.config.empty() && a.suite != "cyclo" && a.suite != "all")
    throw UsageError("--config applies to the cyclo suite only");
  std::optional<cyclo::CycloConfig> cfg;
  if (!a.config.empty()) {
    cfg = io::cyclo_config_from_json(read_json(a.config));
    params["config"] = a.config;
  }
  auto run = [&](const std::string& s) {
    if (s == "identities") verify::run_identities(rec, p);
    if (s == "diagram") verify::run_diagram(rec, p);
    if (s == "regulator") verify::run_regulator(rec, p);
    if (s == "cyclo") verify::run_cyclo(rec, p, cfg);
    if (s == "axioms") {
      if (!a.system.empty()) {
        if (a.instance.empty()) throw UsageError("--system needs --instance");
        auto T = load_instance(a.instance);
        verify::run_axioms_on(rec, io::system_from_json(read_json(a.system), T));
        params["instance"] = a.instance;
        params["system"] = a.system;
      } else {
        verify::run_axioms_random(rec, p);
      }
    }
  };
  if (a.suite == "all") {
    for (const char* s : {"identities", "diagram", "axioms", "regulator", "cyclo"}) run(s);
  } else {
    if (a.suite == "axioms" && a.system.empty() && !a.instance.empty())
      throw UsageError("--instance without --system: pass both or neither");
    run(a.suite);
  }
  json report;
  report["command"] = "verify";
  report["suite"] = a.suite;
  report["seed"] = c.seed;
  report["parameters"] = params;
  report["checks"] = rec.to_json();
  report["ok"] = rec.ok();
  if (!a.no_timing)
    report["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  write_json(report, c.out);
  if (!rec.ok()) {
    for (const auto& r : rec.results())
      if (r.passed != r.total) std::cerr << "FAIL " << r.name << " (" << r.total - r.passed << " of " << r.total << ")\n";
  }
  return rec.ok() ? kOk : kFailed;
}

struct TransformArgs {
  std::string instance;
  std::string in = "-";
  std::string map;
};

int cmd_transform(const Common& c, const TransformArgs& a) {
  auto T = load_instance(a.instance);
  SystemCollection s = io::system_from_json(read_json(a.in), T);
  using K = SystemKind;
  auto require = [&](const std::vector<K>& allowed) {
    for (K k : allowed)
      if (s.kind == k) return;
    throw UsageError("map '" + a.map + "' does not accept a " + to_string(s.kind) + " collection");
  };
  struct Entry {
    const char* name;
    std::vector<K> accepts;
    SystemCollection (*apply)(const SystemCollection&);
  };
  static const Entry table[] = {
      {"pt", {K::PKS, K::RAW}, f_pt},  {"pk", {K::PKS, K::RAW}, f_pk},  {"tk", {K::TKS, K::RAW}, f_tk},
      {"td", {K::TKS, K::RAW}, f_td},  {"dk", {K::DKS, K::RAW}, f_dk},  {"gpk", {K::KS, K::RAW}, g_pk},
      {"gtd", {K::DKS, K::RAW}, g_td}, {"gtk", {K::KS, K::RAW}, g_tk},
  };
  SystemCollection out = s;
  for (const auto& e : table)
    if (a.map == e.name) {
      require(e.accepts);
      out = e.apply(s);
    }
  write_json(io::to_json(out), c.out);
  return kOk;
}

struct RegulatorArgs {
  std::string instance;
  std::string flavor = "P";
  std::string unit_system_in;
  std::string unit_system_out;
};

int cmd_regulator(const Common& c, const RegulatorArgs& a) {
  InstancePtr T;
  if (!a.instance.empty()) {
    T = load_instance(a.instance);
  } else {
    InstanceParams p = c.instance_params();
    try {
      validate_params(p);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    T = std::make_shared<const SevenTuple>(random_instance(c.seed, p));
  }
  const RegulatorFlavor flavor =
      a.flavor == "P" ? RegulatorFlavor::P : a.flavor == "T" ? RegulatorFlavor::T : RegulatorFlavor::K;
  std::optional<UnitSystem> eps;
  std::size_t generator_count = 0;
  if (!a.unit_system_in.empty()) {
    eps = io::unit_system_from_json(read_json(a.unit_system_in), T);
    if (!check_compatibility(*eps).ok) throw UsageError("unit system fails its compatibility conditions");
  } else {
    const int r = c.r.value_or(1);
    if (r > T->h) throw UsageError("--r exceeds the rank of H");
    auto gens = build_unit_systems(T, Chain::identity(T->site_count()), r);
    generator_count = gens.size();
    if (gens.empty()) {
      eps = UnitSystem::zero(T, Chain::identity(T->site_count()), r);
    } else {
      Rng rng(c.seed);
      eps = combine(gens, verify::random_vec(gens.size(), T->modulus(), rng));
    }
  }
  if (!a.unit_system_out.empty()) write_json(io::to_json(*eps), a.unit_system_out);
  write_json(io::to_json(regulator_collection(*eps, flavor)), c.out);
  if (a.unit_system_in.empty()) std::cerr << "unit-system generators: " << generator_count << "\n";
  return kOk;
}

struct CycloArgs {
  std::string config;
  std::optional<Int> p;
  std::optional<int> k;
  std::optional<Int> bound;
};

int cmd_cyclo(const Common& c, const CycloArgs& a) {
  if (a.bound) {
    const Int p = a.p.value_or(3);
    const int k = a.k.value_or(1);
    std::vector<Int> primes;
    try {
      primes = cyclo::sigma_primes(p, k, *a.bound);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    write_json({{"p", p}, {"k", k}, {"bound", *a.bound}, {"sigma", primes}}, c.out);
    return kOk;
  }
  cyclo::CycloConfig cfg = a.config.empty() ? verify::default_cyclo_config() : io::cyclo_config_from_json(read_json(a.config));
  SevenTuple T;
  try {
    T = cyclo::build_cyclotomic_instance(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_json(io::to_json(T), c.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification engine for algebraic Kolyvagin systems"};
  app.require_subcommand(1);

  Common gen_c, ver_c, tr_c, reg_c, cyc_c;
  VerifyArgs ver_a;
  TransformArgs tr_a;
  RegulatorArgs reg_a;
  CycloArgs cyc_a;

  auto* gen = app.add_subcommand("gen", "write a random instance");
  gen_c.add_to(gen, false);

  auto* ver = app.add_subcommand("verify", "run a property suite and print a JSON report");
  ver_c.add_to(ver, true);
  ver->add_option("--suite", ver_a.suite, "suite to run")
      ->required()
      ->check(CLI::IsMember({"axioms", "diagram", "identities", "regulator", "cyclo", "all"}));
  ver->add_option("--instance", ver_a.instance, "instance file (axioms suite, with --system)");
  ver->add_option("--system", ver_a.system, "system file to check (axioms suite)");
  ver->add_option("--config", ver_a.config, "cyclotomic config file (cyclo suite)");
  ver->add_flag("--no-timing", ver_a.no_timing, "omit wall_time_ms from the report");

  auto* tr = app.add_subcommand("transform", "apply a transform or inverse to a system file");
  tr_c.add_to(tr, false);
  tr->add_option("--instance", tr_a.instance, "instance file")->required();
  tr->add_option("--in", tr_a.in, "system file ('-' for standard input)");
  tr->add_option("--map", tr_a.map, "transform")
      ->required()
      ->check(CLI::IsMember({"pt", "pk", "tk", "td", "dk", "gpk", "gtd", "gtk"}));

  auto* reg = app.add_subcommand("regulator", "regulator image of a unit system");
  reg_c.add_to(reg, false);
  reg->add_option("--instance", reg_a.instance, "instance file (default: random from --m/--sites/--t/--rank)");
  reg->add_option("--flavor", reg_a.flavor, "regulator flavor")->check(CLI::IsMember({"P", "T", "K"}));
  reg->add_option("--unit-system", reg_a.unit_system_in, "unit system file (default: random combination)");
  reg->add_option("--unit-system-out", reg_a.unit_system_out, "write the unit system used here");

  auto* cyc = app.add_subcommand("cyclo", "cyclotomic instance, or Sigma-primes with --bound");
  cyc_c.add_to(cyc, false);
  cyc->add_option("--config", cyc_a.config, "cyclotomic config file (default: p=3, Sigma={7,13,31}, H=<2,5>)");
  cyc->add_option("--p", cyc_a.p, "odd prime p (with --bound)");
  cyc->add_option("--k", cyc_a.k, "exponent k, M = p^k (with --bound)");
  cyc->add_option("--bound", cyc_a.bound, "list Sigma-primes up to this bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_c);
    if (*ver) return cmd_verify(ver_c, ver_a);
    if (*tr) return cmd_transform(tr_c, tr_a);
    if (*reg) return cmd_regulator(reg_c, reg_a);
    if (*cyc) return cmd_cyclo(cyc_c, cyc_a);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const io::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const TypeMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

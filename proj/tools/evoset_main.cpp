#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "evoset/bounds.hpp"
#include "evoset/chain_io.hpp"
#include "evoset/compare.hpp"
#include "evoset/error.hpp"
#include "evoset/evolving.hpp"
#include "evoset/exact_mixing.hpp"
#include "evoset/generators.hpp"
#include "evoset/parallel.hpp"
#include "evoset/profiles.hpp"
#include "evoset/verify.hpp"

namespace {

using namespace evoset;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitTooLarge = 3;
constexpr int kExitUnbounded = 4;
constexpr int kExitVerifyFailed = 6;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TooLarge: return kExitTooLarge;
    case ErrorKind::UnboundedIntegral: return kExitUnbounded;
    case ErrorKind::MissingSeed: return kExitUsage;
    default: return kExitValidation;
  }
}

/// Writes to --out when given, otherwise to stdout; the file is replaced only on success.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write " + out_path);
  file << text;
}

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

std::vector<StateId> parse_ids(const std::string& text) {
  std::vector<StateId> ids;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      ids.push_back(static_cast<StateId>(v));
    } catch (const std::logic_error&) {
      throw UsageError("bad state id '" + item + "'");
    }
  }
  return ids;
}

ProfileMethod choose_method(const ChainKernel& chain, const std::string& method, const std::string& family_path,
                            std::size_t samples, std::optional<std::uint64_t> seed) {
  if (method == "enumerate") return Enumerate{};
  if (method == "family") {
    if (family_path.empty()) throw UsageError("--method family needs --family");
    return Family{read_family_file(family_path, chain)};
  }
  if (method == "monte-carlo") {
    if (!seed) throw UsageError("--method monte-carlo needs --seed");
    return MonteCarlo{samples, *seed};
  }
  if (method == "auto") {
    if (chain.size() <= kMaxEnumerationStates) return Enumerate{};
    if (!seed) throw UsageError("chain too large to enumerate; Monte-Carlo profiles need --seed");
    return MonteCarlo{samples, *seed};
  }
  throw UsageError("unknown method '" + method + "'");
}

struct Options {
  // bench make
  std::string bench_name, bench_params, out, family_out;
  // shared inputs
  std::string chain_path, profile_path, analytic, family_path;
  std::string gauge = "phi", method = "enumerate";
  std::size_t samples = 64;
  std::optional<std::uint64_t> seed;
  // bound
  std::string theorem, kind = "psi";
  double epsilon = 0.25;
  std::optional<double> gamma, pi_x, pi_y;
  std::optional<StateId> x, y;
  // simulate
  std::string start, mode = "plain";
  std::size_t steps = 10;
  // mix
  std::vector<double> epsilons;
  std::size_t n_max = kDefaultMaxSteps;
  bool continuous = false;
  double resolution = 0.01, t_max = 1e4;
  // verify
  std::string suite;
  bool monte_carlo = false;
  // compare
  std::vector<std::string> benches;
};

void run_bench_make(const Options& o) {
  std::string spec = o.bench_name;
  if (!o.bench_params.empty()) spec += ":" + o.bench_params;
  const Benchmark b = make_benchmark(spec);
  for (const std::string& note : b.notes) std::cerr << "note: " << note << '\n';
  std::ostringstream chain;
  write_chain(chain, b.chain);
  emit(o.out, chain.str());
  if (!o.family_out.empty()) {
    if (b.family.empty()) warn(spec + " has no canonical family; writing an empty file");
    std::ostringstream family;
    write_family(family, b.family);
    emit(o.family_out, family.str());
  }
}

void run_profile(const Options& o) {
  const ChainKernel chain = read_chain_file(o.chain_path);
  const ProfileMethod method = choose_method(chain, o.method, o.family_path, o.samples, o.seed);
  const StepFunctionProfile profile = gauge_profile(chain, parse_gauge(o.gauge), method);
  if (profile.is_upper_estimate()) warn("profile is an upper estimate (" + std::string(to_string(profile.provenance)) + ")");
  std::ostringstream out;
  write_profile_csv(out, profile);
  emit(o.out, out.str());
}

void run_bound(const Options& o) {
  const int sources = !o.chain_path.empty() + !o.profile_path.empty() + !o.analytic.empty();
  if (sources != 1) throw UsageError("give exactly one of --chain, --profile, --analytic");
  const std::string& t = o.theorem;
  const bool wants_psi = t == "psith" || (t == "convex" && o.kind == "psi");
  if (t == "hk2" && !o.gamma) throw UsageError("hk2 needs --gamma");
  if (t == "convex" && o.kind != "psi" && o.kind != "phi") throw UsageError("--kind must be psi or phi");

  std::optional<AnyProfile> profile;
  std::optional<double> pi_x = o.pi_x, pi_y = o.pi_y;
  std::vector<std::string> warnings;
  std::optional<double> chain_gamma;
  if (!o.chain_path.empty()) {
    const ChainKernel chain = read_chain_file(o.chain_path);
    chain_gamma = chain.gamma();
    const ProfileMethod method = choose_method(chain, "auto", "", o.samples, o.seed);
    profile = gauge_profile(chain, wants_psi ? GaugeKind::psi : GaugeKind::phi, method);
    auto mass = [&](std::optional<StateId> s) -> std::optional<double> {
      if (!s) return std::nullopt;
      if (*s >= chain.size()) throw UsageError("state id out of range");
      return chain.pi(*s);
    };
    if (o.x) pi_x = mass(o.x);
    if (o.y) pi_y = mass(o.y);
  } else if (!o.profile_path.empty()) {
    std::ifstream in(o.profile_path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + o.profile_path);
    profile = read_profile_csv(in);
  } else {
    profile = parse_analytic_profile(o.analytic);
  }
  if ((o.x || o.y) && o.chain_path.empty()) throw UsageError("--x/--y need --chain; use --pi-x/--pi-y");

  BoundReport report;
  if (t == "hk") {
    if (chain_gamma && *chain_gamma < 0.5) {
      warnings.push_back("chain holding probability " + format_double(*chain_gamma) + " is below 1/2; use hk2");
    }
    report = tau_uniform_bound(*profile, o.epsilon, 0.5, pi_x, pi_y);
  } else if (t == "hk2") {
    report = tau_uniform_bound(*profile, o.epsilon, *o.gamma, pi_x, pi_y);
    report.theorem = BoundTheorem::hk2;
  } else if (t == "hki") {
    report = infinite_bound(*profile, pi_x, pi_y, o.epsilon, o.gamma.value_or(0.5));
  } else if (t == "psith") {
    report = chi_square_bound(*profile, pi_x, o.epsilon);
  } else if (t == "cont1") {
    report = continuous_bound(*profile, pi_x, pi_y, o.epsilon);
  } else if (t == "convex") {
    report = convex_variant_bound(*profile, pi_x, pi_y, o.epsilon, o.gamma.value_or(0.5),
                                  o.kind == "psi" ? ConvexKind::psi : ConvexKind::phi);
  } else {
    throw UsageError("unknown theorem '" + t + "'");
  }
  report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
  for (const std::string& w : report.warnings) warn(w);
  emit(o.out, to_json(report) + "\n");
}

void run_simulate(const Options& o) {
  const ChainKernel chain = read_chain_file(o.chain_path);
  if (!o.seed) throw UsageError("simulate needs --seed");
  if (o.x && o.y) {
    const Estimate e = estimate_transition(chain, *o.x, *o.y, o.steps, o.samples, *o.seed);
    emit(o.out, "estimate,standard_error\n" + format_double(e.value) + "," + format_double(e.standard_error) + "\n");
    return;
  }
  if (o.start.empty()) throw UsageError("simulate needs --start (or --x and --y for an estimate)");
  const StateSet start = chain.subset(parse_ids(o.start));
  const EvolvingTrace trace = sample_trace(chain, start, o.steps, *o.seed, parse_trace_mode(o.mode));
  std::ostringstream out;
  write_trace_csv(out, trace);
  emit(o.out, out.str());
}

void run_mix(const Options& o) {
  const ChainKernel chain = read_chain_file(o.chain_path);
  MixingOptions options;
  if (!o.epsilons.empty()) options.epsilons = o.epsilons;
  options.n_max = o.n_max;
  options.start = o.x;
  const MixingReport report = mixing_report(chain, options);
  auto json = nlohmann::ordered_json::parse(to_json(report));
  if (o.continuous) {
    nlohmann::ordered_json cont = nlohmann::ordered_json::object();
    for (double eps : options.epsilons) {
      try {
        cont[format_double(eps)] = tau_uniform_continuous(chain, eps, o.t_max, o.resolution);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotMixed) throw;
        cont[format_double(eps)] = nullptr;
      }
    }
    json["tau_continuous"] = cont;
    json["params"]["resolution"] = o.resolution;
    json["params"]["t_max"] = o.t_max;
  }
  for (std::size_t i = 0; i < options.epsilons.size(); ++i) {
    if (!report.tau_uniform[i]) warn("not mixed by n_max for epsilon " + format_double(options.epsilons[i]));
  }
  emit(o.out, json.dump(2) + "\n");
}

int run_verify(const Options& o) {
  const ChainKernel chain = read_chain_file(o.chain_path);
  const VerifySuite suite = parse_verify_suite(o.suite);
  if ((suite == VerifySuite::inequalities || o.monte_carlo) && !o.seed) {
    throw UsageError("this suite draws random cases; give --seed");
  }
  VerifyOptions options;
  options.seed = o.seed.value_or(0);
  options.max_steps = o.steps;
  options.monte_carlo = o.monte_carlo;
  if (!o.epsilons.empty()) options.epsilons = o.epsilons;
  const auto checks = run_verify_suite(chain, suite, options);
  std::ostringstream out;
  write_verify_csv(out, checks);
  emit(o.out, out.str());
  for (const auto& c : checks) {
    if (!c.pass()) return kExitVerifyFailed;
  }
  return 0;
}

void run_compare(const Options& o) {
  if (o.benches.empty()) throw UsageError("compare needs at least one --bench");
  CompareOptions options;
  options.seed = o.seed;
  options.monte_carlo_samples = o.samples;
  options.n_max = o.n_max;
  const std::vector<double> eps = o.epsilons.empty() ? std::vector<double>{0.25} : o.epsilons;
  std::ostringstream out;
  write_compare_csv(out, compare_benchmarks(o.benches, eps, options));
  emit(o.out, out.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolving sets, conductance profiles and mixing-time bounds"};
  app.require_subcommand(1);
  Options o;
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker cap (default: EVOSET_THREADS or hardware)");

  auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", o.seed, "Random seed"); };
  auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", o.out, "Output file (default: stdout)"); };

  auto* bench = app.add_subcommand("bench", "Benchmark chain generators");
  bench->require_subcommand(1);
  auto* make = bench->add_subcommand("make", "Write a benchmark chain file");
  make->add_option("name", o.bench_name, "Benchmark name or full spec name:key=value,...")->required();
  make->add_option("--params", o.bench_params, "Parameters key=value,...");
  make->add_option("--out", o.out, "Chain file (default: stdout)");
  make->add_option("--family", o.family_out, "Also write the canonical set family");

  auto* profile = app.add_subcommand("profile", "Compute a step-function profile");
  profile->add_option("--chain", o.chain_path, "Chain file")->required();
  profile->add_option("--gauge", o.gauge, "phi | psi | theta")->check(CLI::IsMember({"phi", "psi", "theta"}));
  profile->add_option("--method", o.method, "enumerate | family | monte-carlo")
      ->check(CLI::IsMember({"enumerate", "family", "monte-carlo"}));
  profile->add_option("--family", o.family_path, "Family file for --method family");
  profile->add_option("--samples", o.samples, "Monte-Carlo restarts");
  add_seed(profile);
  add_out(profile);

  auto* bound = app.add_subcommand("bound", "Evaluate a mixing-time bound");
  bound->add_option("--theorem", o.theorem, "hk | hk2 | psith | hki | cont1 | convex")
      ->required()
      ->check(CLI::IsMember({"hk", "hk2", "psith", "hki", "cont1", "convex"}));
  bound->add_option("--kind", o.kind, "Gauge for convex: psi | phi");
  bound->add_option("--chain", o.chain_path, "Chain file (profile computed)");
  bound->add_option("--profile", o.profile_path, "Profile CSV");
  bound->add_option("--analytic", o.analytic, "Analytic law, e.g. powerlaw:a=0.3,b=0.5");
  bound->add_option("--epsilon", o.epsilon, "Target accuracy");
  bound->add_option("--gamma", o.gamma, "Holding probability lower bound");
  bound->add_option("--x", o.x, "Start state (with --chain)");
  bound->add_option("--y", o.y, "Target state (with --chain)");
  bound->add_option("--pi-x", o.pi_x, "Start mass");
  bound->add_option("--pi-y", o.pi_y, "Target mass");
  bound->add_option("--samples", o.samples, "Monte-Carlo restarts for large chains");
  add_seed(bound);
  add_out(bound);

  auto* simulate = app.add_subcommand("simulate", "Sample evolving-set trajectories");
  simulate->add_option("--chain", o.chain_path, "Chain file")->required();
  simulate->add_option("--start", o.start, "Start set as comma-joined ids");
  simulate->add_option("--steps", o.steps, "Steps");
  simulate->add_option("--mode", o.mode, "plain | doob-exact | doob-weighted");
  simulate->add_option("--x", o.x, "Estimate p^n(x, y): start state");
  simulate->add_option("--y", o.y, "Estimate p^n(x, y): target state");
  simulate->add_option("--samples", o.samples, "Trajectories for the estimate");
  add_seed(simulate);
  add_out(simulate);

  auto* mix = app.add_subcommand("mix", "Exact mixing quantities");
  mix->add_option("--chain", o.chain_path, "Chain file")->required();
  mix->add_option("--epsilon", o.epsilons, "Accuracies (comma separated)")->delimiter(',');
  mix->add_option("--n-max", o.n_max, "Step horizon");
  mix->add_option("--x", o.x, "Start for the chi-square curve (default: worst case)");
  mix->add_flag("--continuous", o.continuous, "Also compute continuous-time mixing");
  mix->add_option("--resolution", o.resolution, "Continuous-time grid step");
  mix->add_option("--t-max", o.t_max, "Continuous-time horizon");
  add_out(mix);

  auto* verify = app.add_subcommand("verify", "Run a property suite");
  verify->add_option("--chain", o.chain_path, "Chain file")->required();
  verify->add_option("--suite", o.suite, "identities | inequalities | bounds")
      ->required()
      ->check(CLI::IsMember({"identities", "inequalities", "bounds"}));
  verify->add_option("--steps", o.steps, "Matrix-power horizon")->default_val(8);
  verify->add_option("--epsilon", o.epsilons, "Accuracies for the bounds suite")->delimiter(',');
  verify->add_flag("--monte-carlo", o.monte_carlo, "Random sets instead of exhaustive enumeration");
  add_seed(verify);
  add_out(verify);

  auto* compare = app.add_subcommand("compare", "Bounds beside exact mixing times");
  compare->add_option("--bench", o.benches, "Benchmark spec (repeatable)");
  compare->add_option("--epsilon", o.epsilons, "Accuracies (comma separated)")->delimiter(',');
  compare->add_option("--n-max", o.n_max, "Step horizon");
  compare->add_option("--samples", o.samples, "Monte-Carlo restarts for large chains");
  add_seed(compare);
  add_out(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    if (*make) run_bench_make(o);
    if (*profile) run_profile(o);
    if (*bound) run_bound(o);
    if (*simulate) run_simulate(o);
    if (*mix) run_mix(o);
    if (*verify) return run_verify(o);
    if (*compare) run_compare(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}

// swlab: command-line front end. Flags override the JSON configuration file,
// which overrides the built-in defaults. Exit codes: 0 success, 1 gate failure,
// 2 usage or parse error, 3 numerical failure.

#include "swlab/app/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using swlab::app::Json;
using swlab::app::UsageError;

enum class Kind { text, integer, unsigned_integer, real, flag };

struct OptionSpec {
  const char* name;
  Kind kind;
  const char* help;
};

const std::vector<OptionSpec>& option_specs() {
  static const std::vector<OptionSpec> specs = {
      {"dims", Kind::text, "nodes per axis: N or N0,N1,N2,N3"},
      {"periods", Kind::text, "chart periods: L or L0,L1,L2,L3 (constants such as 2*pi allowed)"},
      {"metric", Kind::text, "flat | conformal:EXPR | kaehler-product:EXPR | file:PATH"},
      {"theta", Kind::text, "const:V | coord:AXIS | expr:EXPR | file:PATH"},
      {"seed", Kind::unsigned_integer, "seed of the random test fields"},
      {"samples", Kind::integer, "random configurations per check"},
      {"gate", Kind::real, "override the command's gate threshold"},
      {"variant", Kind::text, "simple | full | general"},
      {"source", Kind::text, "manufactured configuration: connection | gauge-trivial"},
      {"eps", Kind::real, "perturbation epsilon"},
      {"amplitude", Kind::real, "amplitude of the random potential or gauge function"},
      {"starts", Kind::integer, "random starts of the lambda minimizer"},
      {"max-iterations", Kind::integer, "iterations per start and smoothing level"},
      {"tolerance", Kind::real, "minimizer gradient tolerance"},
      {"mode", Kind::text, "lebrun: grid | catalog"},
      {"delta", Kind::real, "lebrun: constant sin^2 theta"},
      {"delta-sweep", Kind::text, "lebrun: lo:hi:n"},
      {"catalog", Kind::text, "torus-surface:G[,AREA] | surface-product:G,H"},
      {"flux", Kind::text, "constant integral flux ij:n,..."},
      {"omega-index", Kind::integer, "harmonic form paired with c1"},
      {"harmonic", Kind::flag, "hodge: also compute the harmonic self-dual basis"},
      {"sizes", Kind::text, "sweep: N1,N2,..."},
      {"check", Kind::text, "sweep: weitzenboeck | identity-s | identity-c | dirac | curvature | constant"},
      {"min-order", Kind::real, "sweep: gate on the smallest observed order"},
      {"out", Kind::text, "report path (default stdout)"},
      {"dump-dir", Kind::text, "directory for field dumps"},
      {"csv", Kind::text, "CSV table path (sweep, lebrun catalog)"},
      {"timings", Kind::flag, "include wall-clock timings in the report"},
  };
  return specs;
}

Json typed(const OptionSpec& s, const std::string& v) {
  const std::string key = s.name;
  try {
    std::size_t used = 0;
    switch (s.kind) {
      case Kind::text: return v;
      case Kind::integer: {
        const int x = std::stoi(v, &used);
        if (used == v.size()) return x;
        break;
      }
      case Kind::unsigned_integer: {
        const unsigned long long x = std::stoull(v, &used);
        if (used == v.size() && v.find('-') == std::string::npos) return std::uint64_t(x);
        break;
      }
      case Kind::real: {
        const double x = std::stod(v, &used);
        if (used == v.size()) return x;
        break;
      }
      case Kind::flag: return true;
    }
  } catch (const std::exception&) {
  }
  throw UsageError(key + ": cannot parse '" + v + "'");
}

struct Bound {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_options(CLI::App* sub, Bound& b) {
  sub->add_option("--config", b.config_file, "JSON configuration file")->check(CLI::ExistingFile);
  for (const auto& s : option_specs()) {
    const std::string flag = std::string("--") + s.name;
    if (s.kind == Kind::flag) {
      b.options[s.name] = sub->add_flag(flag, s.help);
    } else {
      b.options[s.name] = sub->add_option(flag, b.values[s.name], s.help);
    }
  }
}

const std::map<std::string, std::string>& command_help() {
  static const std::map<std::string, std::string> help = {
      {"curvature", "scalar and self-dual Weyl curvature of a metric preset against closed forms"},
      {"hodge", "Weitzenboeck and integral identities for self-dual forms with the Kato inequality"},
      {"dirac-check", "Dirac Weitzenboeck identity and log-Kato inequality on random (Phi, a)"},
      {"lambda", "minimize the lambda quotient and assemble K"},
      {"psw-residual", "residuals of the perturbed equations on a manufactured configuration"},
      {"bounds", "a-priori curvature and |Phi|^4 bounds on manufactured near-solutions"},
      {"lebrun", "LeBrun-type linear and quadratic reports on the grid or the catalog"},
      {"sweep", "one check across grid sizes with observed convergence orders"},
  };
  return help;
}

void set_threads() {
#ifdef _OPENMP
  if (const char* env = std::getenv("SWLAB_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw UsageError("SWLAB_THREADS must be a positive integer");
    omp_set_num_threads(int(n));
  }
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swlab: numerical checks for perturbed Seiberg-Witten curvature estimates on periodic 4D grids"};
  app.require_subcommand(1);
  std::map<std::string, Bound> bound;
  for (const auto& name : swlab::app::command_names()) {
    add_options(app.add_subcommand(name, command_help().at(name)), bound[name]);
  }
  Bound run_bound;
  auto* run = app.add_subcommand("run", "run the command named in the configuration file");
  add_options(run, run_bound);
  run->get_option("--config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return swlab::app::kUsageError;
  }

  try {
    set_threads();
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Bound& b = name == "run" ? run_bound : bound[name];
    swlab::app::ExperimentConfig cfg;
    if (!b.config_file.empty()) swlab::app::apply_json(cfg, swlab::app::load_config_file(b.config_file));
    if (name != "run") cfg.command = name;
    Json flags = Json::object();
    for (const auto& s : option_specs()) {
      if (b.options[s.name]->count() > 0) flags[s.name] = typed(s, b.values[s.name]);
    }
    swlab::app::apply_json(cfg, flags);

    const auto outcome = swlab::app::run(cfg);
    if (outcome.report.is_null()) {
      std::cerr << "swlab " << cfg.command << ": " << outcome.error << '\n';
      return outcome.exit_code;
    }
    const std::string text = outcome.report.dump(2) + "\n";
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream os(cfg.out);
      if (!os || !(os << text)) {
        std::cerr << "swlab: cannot write " << cfg.out << '\n';
        return swlab::app::kNumericalError;
      }
    }
    if (outcome.exit_code != swlab::app::kSuccess) std::cerr << "swlab " << cfg.command << ": gate failure\n";
    return outcome.exit_code;
  } catch (const swlab::Error& e) {
    std::cerr << "swlab: " << e.what() << '\n';
    return swlab::app::kUsageError;
  }
}

// Command-line front end. Flags override values from --config.

#include <iostream>

#include "CLI11.hpp"
#include "nhmf/cli/commands.hpp"

namespace {

struct Flags {
  std::string config;
  double u = 0.0, u_min = 0.0, u_max = 0.0, u_step = 0.0;
  double beta = 0.0, e_min = 0.0, e_max = 0.0, e_step = 0.0;
  std::string shift, format, out;
  std::uint64_t seed = 0;
  int starts = 0;
  bool plot = false;
  bool corrupt_gradient = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  sub->add_option("--u", f.u, "on-site repulsion");
  sub->add_option("--u-min", f.u_min, "sweep start");
  sub->add_option("--u-max", f.u_max, "sweep end");
  sub->add_option("--u-step", f.u_step, "sweep step");
  sub->add_option("--beta", f.beta, "lead coupling");
  sub->add_option("--e-min", f.e_min, "energy grid start");
  sub->add_option("--e-max", f.e_max, "energy grid end");
  sub->add_option("--e-step", f.e_step, "energy grid step");
  sub->add_option("--shift", f.shift, "abscissa shift for exact curves: auto or a number");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", f.out, "output file (default stdout)");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--starts", f.starts, "extra random starts per chart");
  sub->add_flag("--plot", f.plot, "also write an SVG next to --out");
}

nhmf::cli::RunConfig build_config(const CLI::App* sub, const Flags& f) {
  using namespace nhmf::cli;
  RunConfig cfg;
  if (!f.config.empty()) apply_config_file(cfg, f.config);
  auto given = [&](const char* name) { return sub->count(name) > 0; };
  if (given("--u")) cfg.u = f.u;
  if (given("--u-min") || given("--u-max") || given("--u-step")) {
    cfg.resolve(sub->get_name());  // pick up the command's default range first
    URange r = *cfg.u_range;
    if (given("--u-min")) r.min = f.u_min;
    if (given("--u-max")) r.max = f.u_max;
    if (given("--u-step")) r.step = f.u_step;
    cfg.u_range = r;
  }
  if (given("--beta")) cfg.beta = f.beta;
  if (given("--e-min")) cfg.e_min = f.e_min;
  if (given("--e-max")) cfg.e_max = f.e_max;
  if (given("--e-step")) cfg.e_step = f.e_step;
  if (given("--shift")) {
    if (f.shift == "auto") {
      cfg.shift.reset();
    } else {
      try {
        std::size_t used = 0;
        cfg.shift = std::stod(f.shift, &used);
        if (used != f.shift.size()) throw std::invalid_argument(f.shift);
      } catch (const std::exception&) {
        throw ConfigError("--shift must be 'auto' or a number");
      }
    }
  }
  if (given("--format")) cfg.format = f.format == "json" ? Format::Json : Format::Csv;
  if (given("--out")) cfg.out = f.out;
  if (given("--seed")) cfg.search.rng_seed = f.seed;
  if (given("--starts")) cfg.search.random_starts = f.starts;
  if (given("--plot")) cfg.plot = f.plot;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-site Hubbard model: exact, Hermitian and non-Hermitian mean-field solutions and transport"};
  app.set_version_flag("--version", std::string(nhmf::cli::kToolVersion));
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"exact-sweep", "exact eigenvalues over a U grid"},
      {"hmf-sweep", "Hermitian mean-field stationary points over a U grid"},
      {"nhmf-sweep", "non-Hermitian mean-field stationary points over a U grid"},
      {"case-study", "first excited NHMF state in detail (JSON)"},
      {"transmission", "exact and mean-field transmission curves"},
      {"verify", "run the invariant suite"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    if (std::string(name) == "verify")
      sub->add_flag("--corrupt-gradient", flags.corrupt_gradient, "test hook: perturb the analytic gradient")
          ->group("");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nhmf::cli::kUsageError;
  }

  const CLI::App* sub = app.get_subcommands().front();
  try {
    const auto cfg = build_config(sub, flags);
    return nhmf::cli::run_command(sub->get_name(), cfg, {flags.corrupt_gradient});
  } catch (...) {
    return nhmf::cli::exit_code_for_current_exception();
  }
}

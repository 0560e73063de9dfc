// fatou <command> [--scenario PATH] [--out DIR] [--tol F] [--horizon N] [--seed U64] [--threads N]
//
// Flags override the matching scenario fields, which override built-in defaults.

#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "fatou/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Non-autonomous basins: germ conjugation, filtrations, Green functions"};
  app.require_subcommand(1);

  fatou::cli::Options opt;
  double tol = 0.0;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;

  const std::map<std::string, std::string> about{
      {"normalize", "lower-triangular normalization of the linear parts"},
      {"solve", "solve the conjugation equations up to the horizon"},
      {"factorize", "factor each g_n into Henon or elementary maps"},
      {"filtration", "search for a filtration radius and its constants"},
      {"green", "Green function estimates at the scenario points"},
      {"classify", "basin / escaping / undecided for the scenario points"},
      {"render", "class and escape-time images of the render window"},
      {"suite", "acceptance checks plus every command of a scenario pack"}};

  for (const auto& name : fatou::cli::commands()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--scenario", opt.scenario, name == "suite" ? "suite file listing the scenario pack" : "scenario JSON");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--tol", tol, "residual / Green tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--horizon", horizon, "solver horizon N")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for generated sequences and samples");
    sub->add_option("--threads", threads, "render threads (default FATOU_THREADS, then all cores)");
    sub->add_flag("--quiet", opt.quiet, "no per-check lines");
    sub->callback([&opt, name] { opt.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fatou::cli::schema;
  }

  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--tol")) opt.overrides.tol = tol;
  if (sub->count("--horizon")) opt.overrides.horizon = horizon;
  if (sub->count("--seed")) opt.overrides.seed = seed;
  if (sub->count("--threads")) opt.overrides.threads = threads;
  if (sub->count("--out")) opt.overrides.out = out;
  return fatou::cli::run(opt, std::cerr);
}

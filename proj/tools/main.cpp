#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "olab/config.hpp"
#include "olab/error.hpp"
#include "olab/experiment.hpp"
#include "olab/io.hpp"
#include "olab/parallel.hpp"
#include "olab/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerdict = 4;

int run_verify(const std::vector<int>& only, const std::optional<std::string>& out) {
  std::string log;
  const auto results = olab::verify::run_acceptance(only, [&](const olab::verify::CriterionResult& r) {
    const std::string line = olab::verify::summary_line(r);
    std::cout << line << std::endl;
    log += line + "\n";
  });
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  const std::string tail = std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) + " criteria passed";
  std::cout << tail << std::endl;
  if (out) {
    olab::io::OutputSet files;
    files.add("verify.txt", log + tail + "\n");
    files.commit(*out);
  }
  return failed ? kExitVerdict : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"obstacle-lab: potentials, paraboloid solutions, ACF and matching experiments"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::optional<std::string> config_path, out_dir;
  std::optional<double> tol;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  bool list_keys = false;
  app.add_option("--config", config_path, "flat key = value experiment file");
  app.add_option("--out", out_dir, "output directory (overrides out_dir)");
  app.add_option("--tol", tol, "ordering and bisection tolerance (overrides tol)")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "worker threads (default: hardware concurrency)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed of the sampled points (overrides seed)");
  app.add_flag("--list-keys", list_keys, "print the accepted config keys and exit");

  const std::map<std::string, olab::exp::Report (*)(const olab::cfg::ExperimentConfig&)> commands{
      {"potential", olab::exp::run_potential}, {"growth", olab::exp::run_growth}, {"acf", olab::exp::run_acf},
      {"match", olab::exp::run_match},         {"slide", olab::exp::run_slide},   {"pipeline", olab::exp::run_pipeline},
  };
  const std::map<std::string, std::string> help{
      {"potential", "generalized Newtonian potential samples, scaling law and ΔV = -χ residuals"},
      {"growth", "growth of u - p minus its linear corrector over a decade of radii"},
      {"acf", "ACF profile, subharmonicity and dichotomy of a difference of solutions"},
      {"match", "matching ellipsoid, scale γ and shift τ'"},
      {"slide", "σ̄ bisection along the σ-family"},
      {"pipeline", "solve, mask, fit, match, acf, dichotomy and slide with a JSON verdict"},
  };
  for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name));
  std::vector<int> only;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--only", only, "criterion ids to run (default: all)")->check(CLI::Range(1, 13));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (list_keys) {
    for (const auto& [k, d] : olab::cfg::documented_keys()) std::cout << k << "\t" << d << "\n";
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << "a subcommand is required\n" << app.help();
    return kExitConfig;
  }
  if (threads) olab::set_thread_count(*threads);

  try {
    if (verify->parsed()) return run_verify(only, out_dir);
    olab::cfg::ExperimentConfig cfg;
    if (config_path) cfg = olab::cfg::parse_config(olab::io::read_file(*config_path));
    if (out_dir) cfg.out_dir = *out_dir;
    if (tol) cfg.tol = *tol;
    if (seed) cfg.seed = *seed;
    olab::cfg::validate(cfg);
    for (const auto& [name, fn] : commands) {
      if (!app.got_subcommand(name)) continue;
      const olab::exp::Report rep = fn(cfg);
      rep.files.commit(cfg.out_dir);
      for (const auto& line : rep.summary) std::cout << line << "\n";
      for (const auto& [file, content] : rep.files.files()) std::cout << "wrote " << cfg.out_dir << "/" << file << "\n";
    }
    return kExitOk;
  } catch (const olab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const olab::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << " (estimate " << e.estimate() << ", gap " << e.gap() << ")\n";
    return kExitNumerical;
  } catch (const olab::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

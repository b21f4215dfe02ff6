// magband: band structure, semiclassical bounds, and gap-eigenvalue counting
// for the 2D magnetic Schrodinger operator with a 1D-periodic edge potential.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "magband/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"magnetic band structure and gap-eigenvalue counting toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  magband::RunFlags flags;
  std::uint64_t seed = 0;

  const std::vector<std::string> names{"bands",        "gaps",   "extrema",
                                       "semiclassics", "decay",  "count",
                                       "oracle",       "fitlaw"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", flags.out_dir, "output directory (overrides config)");
    sub->add_option("--threads", flags.threads, "worker threads for k-sweeps");
    sub->add_option("--seed", seed, "RNG seed for property sweeps")
        ->each([&](const std::string&) { flags.seed_set = true; });
    sub->add_flag("--no-cache", flags.no_cache, "disable the band cache");
  }

  CLI11_PARSE(app, argc, argv);
  flags.seed = seed;
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    const magband::RunConfig cfg = magband::load_config(config_path);
    return magband::run_subcommand(cmd, cfg, flags);
  } catch (const magband::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const magband::numerics_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

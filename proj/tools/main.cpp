#include <CLI11.hpp>
#include <exception>
#include <iostream>

#include "commands.hpp"
#include "cruot/errors.hpp"

namespace {

void add_common(CLI::App* sub, cruot::cli::CommonArgs& args) {
  sub->add_option("--config", args.config_path, "run configuration JSON")
      ->required();
  sub->add_option("--out", args.out_dir, "output directory override")
      ->each([&](const std::string&) { args.has_out = true; });
  sub->add_option("--seed", args.seed, "seed override")
      ->each([&](const std::string&) { args.has_seed = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cost-regularized unbalanced transport solver"};
  app.require_subcommand(1);

  cruot::cli::CommonArgs solve_args, map_args, sweep_args, sub_args;
  std::vector<std::string> lambda_grid;
  std::vector<double> epsilon_grid;
  std::filesystem::path toy_out = ".";
  std::uint64_t toy_seed = 0;
  long toy_n_source = 300, toy_n_target = 300;

  CLI::App* solve = app.add_subcommand(
      "solve", "solve the transport problem and write plan artifacts");
  add_common(solve, solve_args);

  CLI::App* map_eval = app.add_subcommand(
      "map-eval", "solve, fit the barycentric map, evaluate label transfer");
  add_common(map_eval, map_args);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "re-run the pipeline across a lambda or epsilon grid");
  add_common(sweep, sweep_args);
  sweep->add_option("--lambda-grid", lambda_grid,
                    "comma-separated lambda values, inf allowed")
      ->delimiter(',');
  sweep->add_option("--epsilon-grid", epsilon_grid,
                    "comma-separated epsilon values")
      ->delimiter(',');

  CLI::App* subsample = app.add_subcommand(
      "subsample", "apply the configured per-label subsampling and write CSVs");
  add_common(subsample, sub_args);

  CLI::App* toy = app.add_subcommand(
      "toy", "generate the synthetic ellipsoid/ellipse-square dataset pair");
  toy->add_option("--out", toy_out, "output directory");
  toy->add_option("--seed", toy_seed, "generation seed");
  toy->add_option("--n-source", toy_n_source, "source point count")
      ->check(CLI::PositiveNumber);
  toy->add_option("--n-target", toy_n_target, "target point count")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help requests keep CLI11's zero exit; genuine usage mistakes are
    // input errors under this tool's exit code contract.
    const int code = app.exit(e);
    return code == 0 ? 0 : cruot::cli::kExitInputError;
  }

  try {
    if (solve->parsed()) return cruot::cli::cmd_solve(solve_args);
    if (map_eval->parsed()) return cruot::cli::cmd_map_eval(map_args);
    if (sweep->parsed())
      return cruot::cli::cmd_sweep(sweep_args, lambda_grid, epsilon_grid);
    if (subsample->parsed()) return cruot::cli::cmd_subsample(sub_args);
    if (toy->parsed())
      return cruot::cli::cmd_toy(toy_out, toy_seed, toy_n_source, toy_n_target);
  } catch (const cruot::NumericalOverflow& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cruot::cli::kExitNotConverged;
  } catch (const cruot::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cruot::cli::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cruot::cli::kExitInputError;
  }
  return cruot::cli::kExitInputError;
}

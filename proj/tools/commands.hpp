#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cruot/data_io.hpp"

namespace cruot::cli {

// Exit codes shared by all subcommands: 0 success, 1 input/config error,
// 2 numerical non-convergence (artifacts are still written).
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

struct CommonArgs {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;  // overrides config output_dir when set
  bool has_out = false;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

int cmd_solve(const CommonArgs& args);
int cmd_map_eval(const CommonArgs& args);
int cmd_sweep(const CommonArgs& args, const std::vector<std::string>& lambda_grid,
              const std::vector<double>& epsilon_grid);
int cmd_subsample(const CommonArgs& args);
int cmd_toy(const std::filesystem::path& out_dir, std::uint64_t seed,
            long n_source, long n_target);

// Parses a lambda token: "inf" or a positive decimal number.
double parse_lambda_token(const std::string& token);

}  // namespace cruot::cli

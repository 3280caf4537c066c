#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cruot/evaluation.hpp"
#include "cruot/types.hpp"

namespace cruot {

// One dataset side: points plus uniform weights, labels taken from the named
// CSV column when present.
struct Dataset {
  PointCloud cloud;
  DiscreteMeasure measure;
};

// Loads a comma-separated table with a header row. Every column except the
// optional label column must be numeric. Weights are uniform 1/n. Quoting is
// not supported; fields must not contain commas.
Dataset load_dataset(const std::filesystem::path& csv_path,
                     const std::string& label_column = "");

// Z-scores each column in place (population standard deviation). Columns
// with zero spread are centered at 0 and left unscaled.
PointCloud standardize_features(const PointCloud& cloud);

// Declarative description of one run, read from a JSON file.
struct RunConfig {
  std::filesystem::path source_path;
  std::filesystem::path target_path;
  std::string label_column;
  double lambda = std::numeric_limits<double>::infinity();  // "inf" token
  double inner_epsilon = 5e-3;
  int knn_k = 5;
  bool knn_on_full_target = false;
  std::filesystem::path output_dir = ".";
  SolveConfig solve;
  std::optional<SubsampleScheme> subsample_source;
  std::optional<SubsampleScheme> subsample_target;

  // entropy1/entropy2 derived from lambda: "inf" selects Balanced.
  EntropySpec entropy() const;
};

RunConfig load_run_config(const std::filesystem::path& json_path);

// Key/value document written as `key<TAB>value` lines, in insertion order.
struct ReportDoc {
  std::vector<std::pair<std::string, std::string>> rows;
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, Index value);
};

// All numeric serialization uses 12 significant digits.
std::string format_number(double v);

void write_report(const std::filesystem::path& path, const ReportDoc& doc);

// Aligned cloud: header dim_0..dim_{q-1}<TAB>label, one row per point.
// The label column is present even when empty.
void write_aligned_tsv(const std::filesystem::path& path,
                       const PointCloud& aligned);

// Objective trace: header iteration<TAB>objective, rows numbered from 1.
void write_trace_tsv(const std::filesystem::path& path,
                     const std::vector<double>& trace);

// Plain numeric matrix, tab-separated, no header.
void write_matrix_tsv(const std::filesystem::path& path, const Matrix& m);

// Round trip helper for the CLI: writes points (+ labels) back to CSV with
// the same column convention load_dataset reads.
void write_dataset_csv(const std::filesystem::path& path,
                       const PointCloud& cloud,
                       const std::string& label_column);

}  // namespace cruot

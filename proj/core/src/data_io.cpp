#include "cruot/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace cruot {

namespace {

using nlohmann::json;

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  // Trim trailing carriage return from files with CRLF endings.
  if (!fields.empty() && !fields.back().empty() &&
      fields.back().back() == '\r') {
    fields.back().pop_back();
  }
  return fields;
}

double parse_double(const std::string& field, std::size_t line,
                    std::size_t column) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw NonNumericFeature("non-numeric value '" + field + "' at line " +
                            std::to_string(line) + ", column " +
                            std::to_string(column));
  }
  return v;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& csv_path,
                     const std::string& label_column) {
  std::ifstream in(csv_path);
  if (!in) {
    throw FileNotFound("cannot open '" + csv_path.string() + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw EmptyDataset("'" + csv_path.string() + "' has no header");
  }
  const auto header = split_fields(line);
  std::ptrdiff_t label_idx = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!label_column.empty() && header[c] == label_column) {
      label_idx = static_cast<std::ptrdiff_t>(c);
    }
  }
  if (!label_column.empty() && label_idx < 0) {
    throw ParseError("label column '" + label_column + "' not in header", 1,
                     0);
  }
  const std::size_t n_features =
      header.size() - (label_idx >= 0 ? 1u : 0u);
  if (n_features == 0) {
    throw EmptyDataset("'" + csv_path.string() + "' has no feature columns");
  }

  std::vector<double> values;
  std::vector<std::string> labels;
  std::size_t n_rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no, fields.size());
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == label_idx) {
        labels.push_back(fields[c]);
      } else {
        values.push_back(parse_double(fields[c], line_no, c + 1));
      }
    }
    ++n_rows;
  }
  if (n_rows == 0) {
    throw EmptyDataset("'" + csv_path.string() + "' has no data rows");
  }

  Matrix pts(static_cast<Index>(n_rows), static_cast<Index>(n_features));
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_features; ++c) {
      pts(static_cast<Index>(r), static_cast<Index>(c)) =
          values[r * n_features + c];
    }
  }
  Dataset ds;
  ds.cloud = PointCloud(std::move(pts), std::move(labels),
                        csv_path.stem().string());
  ds.measure = DiscreteMeasure::uniform(ds.cloud.size());
  return ds;
}

PointCloud standardize_features(const PointCloud& cloud) {
  Matrix pts = cloud.points;
  const double n = static_cast<double>(pts.rows());
  for (Index c = 0; c < pts.cols(); ++c) {
    const double mean = pts.col(c).mean();
    pts.col(c).array() -= mean;
    const double sd = std::sqrt(pts.col(c).squaredNorm() / n);
    if (sd > 0.0) pts.col(c) /= sd;
  }
  return PointCloud(std::move(pts), cloud.labels, cloud.name);
}

EntropySpec RunConfig::entropy() const {
  if (std::isinf(lambda)) return EntropySpec::balanced();
  return EntropySpec::scaled_kl(lambda);
}

namespace {

double parse_lambda(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    throw ConfigError("lambda must be a positive number or \"inf\"");
  }
  const double v = j.get<double>();
  if (!(v > 0.0)) {
    throw ConfigError("lambda must be a positive number or \"inf\"");
  }
  return v;
}

SubsampleScheme parse_scheme(const json& j) {
  SubsampleScheme s;
  if (j.contains("per_label_rates")) {
    for (auto& [key, val] : j.at("per_label_rates").items()) {
      s.per_label_rates[key] = val.get<double>();
    }
  }
  s.default_rate = j.value("default_rate", 1.0);
  s.seed = j.value("seed", std::uint64_t{0});
  return s;
}

MInit parse_m_init(const std::string& s) {
  if (s == "product") return MInit::ProductCoupling;
  if (s == "zero") return MInit::Zero;
  if (s == "seeded") return MInit::Seeded;
  throw ConfigError("m_init must be one of product, zero, seeded");
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) {
    throw FileNotFound("cannot open '" + json_path.string() + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in '" + json_path.string() +
                      "': " + e.what());
  }
  try {
    RunConfig cfg;
    cfg.source_path = j.at("source_path").get<std::string>();
    cfg.target_path = j.at("target_path").get<std::string>();
    cfg.label_column = j.value("label_column", std::string{});
    if (j.contains("lambda")) cfg.lambda = parse_lambda(j.at("lambda"));
    cfg.inner_epsilon = j.value("inner_epsilon", 5e-3);
    cfg.knn_k = j.value("knn_k", 5);
    cfg.knn_on_full_target = j.value("knn_on_full_target", false);
    cfg.output_dir = j.value("output_dir", std::string{"."});
    if (j.contains("solve")) {
      const json& s = j.at("solve");
      cfg.solve.epsilon = s.value("epsilon", 5e-3);
      cfg.solve.radius = s.value("radius", 1.0);
      cfg.solve.max_outer_iters = s.value("max_outer_iters", 200);
      cfg.solve.max_sinkhorn_iters = s.value("max_sinkhorn_iters", 2000);
      cfg.solve.sinkhorn_tol = s.value("sinkhorn_tol", 1e-9);
      cfg.solve.outer_tol = s.value("outer_tol", 1e-7);
      cfg.solve.m_init = parse_m_init(s.value("m_init", std::string{"product"}));
      cfg.solve.m_init_seed = s.value("m_init_seed", std::uint64_t{0});
      cfg.solve.standardize = s.value("standardize", true);
    } else {
      cfg.solve.standardize = true;
    }
    cfg.solve.entropy1 = cfg.entropy();
    cfg.solve.entropy2 = cfg.entropy();
    if (j.contains("subsample_source")) {
      cfg.subsample_source = parse_scheme(j.at("subsample_source"));
    }
    if (j.contains("subsample_target")) {
      cfg.subsample_target = parse_scheme(j.at("subsample_target"));
    }
    cfg.solve.validate();
    if (!(cfg.inner_epsilon > 0.0)) {
      throw ConfigError("inner_epsilon must be positive");
    }
    if (cfg.knn_k < 1) {
      throw ConfigError("knn_k must be at least 1");
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError("bad config '" + json_path.string() + "': " + e.what());
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void ReportDoc::add(const std::string& key, const std::string& value) {
  rows.emplace_back(key, value);
}

void ReportDoc::add(const std::string& key, double value) {
  rows.emplace_back(key, format_number(value));
}

void ReportDoc::add(const std::string& key, Index value) {
  rows.emplace_back(key, std::to_string(value));
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  return out;
}

}  // namespace

void write_report(const std::filesystem::path& path, const ReportDoc& doc) {
  auto out = open_out(path);
  for (const auto& [k, v] : doc.rows) {
    out << k << '\t' << v << '\n';
  }
}

void write_aligned_tsv(const std::filesystem::path& path,
                       const PointCloud& aligned) {
  auto out = open_out(path);
  for (Index c = 0; c < aligned.dim(); ++c) {
    out << "dim_" << c << '\t';
  }
  out << "label\n";
  for (Index i = 0; i < aligned.size(); ++i) {
    for (Index c = 0; c < aligned.dim(); ++c) {
      out << format_number(aligned.points(i, c)) << '\t';
    }
    out << (aligned.has_labels() ? aligned.labels[static_cast<std::size_t>(i)]
                                 : std::string{})
        << '\n';
  }
}

void write_trace_tsv(const std::filesystem::path& path,
                     const std::vector<double>& trace) {
  auto out = open_out(path);
  out << "iteration\tobjective\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << (i + 1) << '\t' << format_number(trace[i]) << '\n';
  }
}

void write_matrix_tsv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out << format_number(m(i, j)) << (j + 1 < m.cols() ? '\t' : '\n');
    }
  }
}

void write_dataset_csv(const std::filesystem::path& path,
                       const PointCloud& cloud,
                       const std::string& label_column) {
  auto out = open_out(path);
  for (Index c = 0; c < cloud.dim(); ++c) {
    if (c > 0) out << ',';
    out << "f" << c;
  }
  const bool with_labels = cloud.has_labels() && !label_column.empty();
  if (with_labels) out << ',' << label_column;
  out << '\n';
  for (Index i = 0; i < cloud.size(); ++i) {
    for (Index c = 0; c < cloud.dim(); ++c) {
      if (c > 0) out << ',';
      out << format_number(cloud.points(i, c));
    }
    if (with_labels) out << ',' << cloud.labels[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

}  // namespace cruot

#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "cruot/bcd.hpp"
#include "cruot/divergence.hpp"
#include "cruot/entropic_map.hpp"
#include "cruot/evaluation.hpp"
#include "cruot/toy.hpp"

namespace cruot::cli {

namespace {

namespace fs = std::filesystem;

struct LoadedPair {
  Dataset source;
  Dataset target;
  // Target before subsampling, for evaluation against the full cloud.
  PointCloud full_target_cloud;
};

RunConfig apply_overrides(RunConfig cfg, const CommonArgs& args) {
  if (args.has_out) cfg.output_dir = args.out_dir;
  if (args.has_seed) {
    cfg.solve.m_init_seed = args.seed;
    if (cfg.subsample_source) cfg.subsample_source->seed = args.seed;
    if (cfg.subsample_target) cfg.subsample_target->seed = args.seed;
  }
  return cfg;
}

LoadedPair load_pair(const RunConfig& cfg) {
  LoadedPair lp;
  lp.source = load_dataset(cfg.source_path, cfg.label_column);
  lp.target = load_dataset(cfg.target_path, cfg.label_column);
  if (cfg.solve.standardize) {
    lp.source.cloud = standardize_features(lp.source.cloud);
    lp.target.cloud = standardize_features(lp.target.cloud);
  }
  lp.full_target_cloud = lp.target.cloud;
  if (cfg.subsample_source) {
    auto sub = subsample(lp.source.cloud, *cfg.subsample_source);
    lp.source.cloud = std::move(sub.cloud);
    lp.source.measure = std::move(sub.measure);
  }
  if (cfg.subsample_target) {
    auto sub = subsample(lp.target.cloud, *cfg.subsample_target);
    lp.target.cloud = std::move(sub.cloud);
    lp.target.measure = std::move(sub.measure);
  }
  return lp;
}

void add_config_echo(ReportDoc& doc, const RunConfig& cfg) {
  doc.add("config.source_path", cfg.source_path.string());
  doc.add("config.target_path", cfg.target_path.string());
  doc.add("config.lambda",
          std::isinf(cfg.lambda) ? std::string("inf")
                                 : format_number(cfg.lambda));
  doc.add("config.epsilon", cfg.solve.epsilon);
  doc.add("config.inner_epsilon", cfg.inner_epsilon);
  doc.add("config.radius", cfg.solve.radius);
  doc.add("config.knn_k", static_cast<Index>(cfg.knn_k));
  doc.add("config.standardize", std::string(cfg.solve.standardize ? "1" : "0"));
}

void add_solve_summary(ReportDoc& doc, const SolveResult& res) {
  doc.add("final_objective", res.objective_trace.empty()
                                 ? std::nan("")
                                 : res.objective_trace.back());
  doc.add("outer_iters", static_cast<Index>(res.outer_iters_used));
  doc.add("converged", std::string(res.converged ? "1" : "0"));
  doc.add("transported_mass", transported_mass(res.plan));
  doc.add("marginal_residual_source", res.marginal_residuals.first);
  doc.add("marginal_residual_target", res.marginal_residuals.second);
  doc.add("cost_map_norm", res.cost_map.frobenius_norm());
}

int run_solve_only(const RunConfig& cfg) {
  const LoadedPair lp = load_pair(cfg);
  const SolveResult res =
      solve_cruot(lp.source.cloud, lp.source.measure, lp.target.cloud,
                  lp.target.measure, cfg.solve);

  ReportDoc doc;
  add_solve_summary(doc, res);
  add_config_echo(doc, cfg);
  write_report(cfg.output_dir / "solve_summary.tsv", doc);
  write_matrix_tsv(cfg.output_dir / "cost_map.tsv", res.cost_map.matrix);
  write_trace_tsv(cfg.output_dir / "trace.tsv", res.objective_trace);
  return res.converged ? kExitOk : kExitNotConverged;
}

struct PipelineOutput {
  SolveResult solve;
  PointCloud aligned;
  std::optional<EvalReport> eval;
};

PipelineOutput run_pipeline(const RunConfig& cfg, const LoadedPair& lp) {
  PipelineOutput out;
  out.solve = solve_cruot(lp.source.cloud, lp.source.measure, lp.target.cloud,
                          lp.target.measure, cfg.solve);
  const EntropicMapModel model =
      fit_map(out.solve.plan, out.solve.cost_map, lp.source.cloud,
              lp.target.cloud, cfg.inner_epsilon);
  out.aligned = align(model, lp.source.cloud);
  const PointCloud& eval_target =
      cfg.knn_on_full_target ? lp.full_target_cloud : lp.target.cloud;
  if (out.aligned.has_labels() && eval_target.has_labels()) {
    out.eval = label_transfer_accuracy(out.aligned, eval_target, cfg.knn_k);
  }
  return out;
}

void write_pipeline_outputs(const fs::path& dir, const RunConfig& cfg,
                            const PipelineOutput& po) {
  ReportDoc doc;
  if (po.eval) {
    doc.add("lta", po.eval->label_transfer_accuracy);
    doc.add("knn_k", static_cast<Index>(po.eval->k));
    doc.add("n_evaluated", po.eval->n_evaluated);
  }
  add_solve_summary(doc, po.solve);
  add_config_echo(doc, cfg);
  if (po.eval) {
    for (const auto& [lbl, acc] : po.eval->per_label_accuracy) {
      doc.add("per_label_accuracy." + lbl, acc);
    }
  }
  write_report(dir / "report.tsv", doc);
  write_aligned_tsv(dir / "aligned.tsv", po.aligned);
  write_trace_tsv(dir / "trace.tsv", po.solve.objective_trace);
}

}  // namespace

double parse_lambda_token(const std::string& token) {
  if (token == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !(v > 0.0)) {
    throw ConfigError("bad lambda token '" + token + "'");
  }
  return v;
}

int cmd_solve(const CommonArgs& args) {
  const RunConfig cfg = apply_overrides(load_run_config(args.config_path), args);
  return run_solve_only(cfg);
}

int cmd_map_eval(const CommonArgs& args) {
  const RunConfig cfg = apply_overrides(load_run_config(args.config_path), args);
  const LoadedPair lp = load_pair(cfg);
  const PipelineOutput po = run_pipeline(cfg, lp);
  write_pipeline_outputs(cfg.output_dir, cfg, po);
  return po.solve.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const CommonArgs& args,
              const std::vector<std::string>& lambda_grid,
              const std::vector<double>& epsilon_grid) {
  if (lambda_grid.empty() == epsilon_grid.empty()) {
    std::cerr << "sweep: exactly one of --lambda-grid or --epsilon-grid "
                 "is required\n";
    return kExitInputError;
  }
  const RunConfig base =
      apply_overrides(load_run_config(args.config_path), args);
  const LoadedPair lp = load_pair(base);

  std::ofstream summary;
  fs::create_directories(base.output_dir);
  summary.open(base.output_dir / "sweep_summary.tsv");
  if (!summary) {
    throw IoError("cannot write sweep summary");
  }

  bool all_converged = true;
  if (!lambda_grid.empty()) {
    summary << "lambda\tlta\ttransported_mass\tfinal_objective\touter_iters\t"
               "converged\n";
    for (const std::string& token : lambda_grid) {
      RunConfig cfg = base;
      cfg.lambda = parse_lambda_token(token);
      cfg.solve.entropy1 = cfg.entropy();
      cfg.solve.entropy2 = cfg.entropy();
      cfg.output_dir = base.output_dir / ("lambda_" + token);
      const PipelineOutput po = run_pipeline(cfg, lp);
      write_pipeline_outputs(cfg.output_dir, cfg, po);
      all_converged = all_converged && po.solve.converged;
      summary << token << '\t'
              << (po.eval ? format_number(po.eval->label_transfer_accuracy)
                          : std::string{})
              << '\t' << format_number(transported_mass(po.solve.plan)) << '\t'
              << format_number(po.solve.objective_trace.back()) << '\t'
              << po.solve.outer_iters_used << '\t'
              << (po.solve.converged ? 1 : 0) << '\n';
    }
  } else {
    summary << "epsilon\tstripped_objective\tlta\ttransported_mass\t"
               "final_objective\touter_iters\tconverged\n";
    std::optional<LinearCostMap> carry;
    for (double eps : epsilon_grid) {
      RunConfig cfg = base;
      cfg.solve.epsilon = eps;
      cfg.output_dir = base.output_dir / ("epsilon_" + format_number(eps));
      PipelineOutput po;
      if (carry) {
        po.solve = solve_cruot_with_init(lp.source.cloud, lp.source.measure,
                                         lp.target.cloud, lp.target.measure,
                                         cfg.solve, *carry);
        const EntropicMapModel model =
            fit_map(po.solve.plan, po.solve.cost_map, lp.source.cloud,
                    lp.target.cloud, cfg.inner_epsilon);
        po.aligned = align(model, lp.source.cloud);
        const PointCloud& eval_target =
            cfg.knn_on_full_target ? lp.full_target_cloud : lp.target.cloud;
        if (po.aligned.has_labels() && eval_target.has_labels()) {
          po.eval = label_transfer_accuracy(po.aligned, eval_target, cfg.knn_k);
        }
      } else {
        po = run_pipeline(cfg, lp);
      }
      carry = po.solve.cost_map;
      write_pipeline_outputs(cfg.output_dir, cfg, po);
      all_converged = all_converged && po.solve.converged;
      const double stripped =
          po.solve.objective_trace.back() -
          eps * kl_plan(po.solve.plan.entries, lp.source.measure.weights,
                        lp.target.measure.weights);
      summary << format_number(eps) << '\t' << format_number(stripped) << '\t'
              << (po.eval ? format_number(po.eval->label_transfer_accuracy)
                          : std::string{})
              << '\t' << format_number(transported_mass(po.solve.plan)) << '\t'
              << format_number(po.solve.objective_trace.back()) << '\t'
              << po.solve.outer_iters_used << '\t'
              << (po.solve.converged ? 1 : 0) << '\n';
    }
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_subsample(const CommonArgs& args) {
  const RunConfig cfg = apply_overrides(load_run_config(args.config_path), args);
  // Dataset preparation works on raw features; standardization is a solve
  // concern and is reapplied at solve time.
  Dataset source = load_dataset(cfg.source_path, cfg.label_column);
  Dataset target = load_dataset(cfg.target_path, cfg.label_column);

  ReportDoc doc;
  auto process = [&](Dataset& ds, const std::optional<SubsampleScheme>& scheme,
                     const std::string& side, const fs::path& out_csv) {
    std::map<std::string, Index> before;
    for (const auto& l : ds.cloud.labels) before[l] += 1;
    if (scheme) {
      auto sub = subsample(ds.cloud, *scheme);
      ds.cloud = std::move(sub.cloud);
      ds.measure = std::move(sub.measure);
    }
    std::map<std::string, Index> after;
    for (const auto& l : ds.cloud.labels) after[l] += 1;
    for (const auto& [lbl, total] : before) {
      doc.add(side + ".kept." + lbl,
              std::to_string(after.count(lbl) ? after[lbl] : 0) + "/" +
                  std::to_string(total));
    }
    doc.add(side + ".n_kept", ds.cloud.size());
    write_dataset_csv(out_csv, ds.cloud, cfg.label_column);
  };
  process(source, cfg.subsample_source, "source",
          cfg.output_dir / "source_subsampled.csv");
  process(target, cfg.subsample_target, "target",
          cfg.output_dir / "target_subsampled.csv");
  write_report(cfg.output_dir / "subsample_summary.tsv", doc);
  return kExitOk;
}

int cmd_toy(const std::filesystem::path& out_dir, std::uint64_t seed,
            long n_source, long n_target) {
  ToyOptions opts;
  opts.n_source = n_source;
  opts.n_target = n_target;
  opts.seed = seed;
  const Dataset source = generate_toy_source(opts);
  const Dataset target = generate_toy_target(opts);
  write_dataset_csv(out_dir / "toy_source.csv", source.cloud, "label");
  write_dataset_csv(out_dir / "toy_target.csv", target.cloud, "label");
  return kExitOk;
}

}  // namespace cruot::cli

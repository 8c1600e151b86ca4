#include "ads/cli.hpp"

#include "ads/evaluation.hpp"
#include "ads/io.hpp"
#include "ads/pipeline.hpp"
#include "ads/synthscene.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace ads::cli {

namespace {

int usage_failure(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kExitUsage;
}

}  // namespace

int run_generate(const GenerateOptions& options) {
  SceneConfig config;
  if (!options.config_path.empty()) {
    try {
      config = load_scene_config(options.config_path);
    } catch (const std::exception& e) {
      return usage_failure(e.what());
    }
  }
  if (options.verbose)
    std::cerr << "generate: count=" << options.count << " pairs=" << options.pairs
              << " seed=" << options.seed << " size=" << options.size << " out=" << options.out
              << "\n";
  try {
    const DatasetResult result = sample_dataset(options.count, options.pairs, options.seed,
                                                options.size, options.size, options.out, config);
    std::cout << result.manifest_path << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return usage_failure(e.what());
  }
}

int run_explain(const ExplainOptions& options) {
  if (options.source.empty() || options.target.empty())
    return usage_failure("--source and --target are required");
  if (options.keypoints.empty() == options.transforms.empty())
    return usage_failure("provide exactly one of --keypoints or --transforms");

  PairInput input;
  try {
    input.source = load_image(options.source);
    input.target = load_image(options.target);
    input.source_mask = options.mask.empty()
                            ? Mask::ones(input.source.width, input.source.height)
                            : load_mask(options.mask);
    if (!options.keypoints.empty())
      input.correspondences =
          load_keypoints(options.keypoints, input.source.width, input.source.height,
                         input.target.width, input.target.height);
    else
      input.transforms = load_transforms(options.transforms);
  } catch (const std::exception& e) {
    return usage_failure(e.what());
  }

  PipelineConfig config;
  config.tps_lambda = options.tps_lambda;
  config.use_ransac = options.use_ransac;
  config.ransac.inlier_threshold = options.ransac_threshold;
  config.ransac.iterations = options.ransac_iterations;
  config.ransac.min_inliers = options.ransac_min_inliers;
  config.ransac.seed = options.seed;

  DifferenceReport report;
  PipelineArtifacts artifacts;
  try {
    report = explain_pair(input, config, options.emit_intermediates ? &artifacts : nullptr);
  } catch (const Error& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return kExitPipeline;
  } catch (const std::exception& e) {
    return usage_failure(e.what());
  }

  try {
    const fs::path out_dir(options.out);
    save_report((out_dir / "report.json").string(), report);
    save_transforms((out_dir / "transforms.json").string(), report.affine, report.tps_control);
    if (options.emit_intermediates) {
      save_png((out_dir / "aligned.png").string(), artifacts.aligned);
      save_png((out_dir / "deformed.png").string(), artifacts.deformed);
      save_mask((out_dir / "warped_mask.png").string(), artifacts.warped_mask);
      save_heatmap_png((out_dir / "heatmap.png").string(), artifacts.residual);
    }
  } catch (const std::exception& e) {
    return usage_failure(e.what());
  }

  char line[160];
  std::snprintf(line, sizeof(line),
                "Align: s=%.2f, t=%.2f, theta=%.1f deg; Deform: d=%.2f; Subtract: a=%.2f\n",
                report.measures.s, report.measures.t, report.measures.theta_deg,
                report.measures.d, report.measures.a);
  std::cout << line;
  return kExitOk;
}

int run_evaluate(const EvaluateOptions& options) {
  if (options.manifest.empty()) return usage_failure("--manifest is required");

  DatasetManifest manifest;
  try {
    manifest = load_manifest(options.manifest);
  } catch (const std::exception& e) {
    return usage_failure(e.what());
  }

  EvaluationConfig config;
  config.pipeline.tps_lambda = options.tps_lambda;
  config.threads = options.threads;
  if (options.verbose)
    std::cerr << "evaluate: " << manifest.entries.size() << " pairs, manifest "
              << options.manifest << "\n";

  const std::string base_dir = fs::path(options.manifest).parent_path().string();
  const EvaluationRun run = evaluate(manifest, base_dir.empty() ? "." : base_dir, config);

  try {
    const fs::path out_dir(options.out);
    write_text_file((out_dir / "correlations.csv").string(), correlation_csv(run.table));
    write_text_file((out_dir / "correlations.txt").string(), correlation_text(run.table));
    for (const auto& series : scatter_series(run.outcomes)) {
      write_text_file((out_dir / ("scatter_" + series.dimension + ".csv")).string(),
                      scatter_csv(series));
      if (series.dimension == "a")
        write_text_file((out_dir / "scatter_a_loglog.csv").string(), scatter_loglog_csv(series));
    }
  } catch (const std::exception& e) {
    return usage_failure(e.what());
  }

  std::cout << correlation_text(run.table);
  std::cout << "pairs ok: " << run.succeeded << ", failed: " << run.failed << "\n";
  for (const auto& outcome : run.outcomes)
    if (!outcome.ok)
      std::cerr << "pair " << outcome.pair_index << " failed: " << outcome.error << "\n";
  return run.degraded ? kExitDegraded : kExitOk;
}

}  // namespace ads::cli

#include "ads/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"align-deform-subtract: disentangled image-pair difference measures"};
  app.require_subcommand(1);

  ads::cli::GenerateOptions gen;
  ads::cli::ExplainOptions exp;
  ads::cli::EvaluateOptions eval;

  CLI::App* generate = app.add_subcommand(
      "generate", "Render a synthetic blob dataset with ground-truth differences");
  generate->add_option("--count", gen.count, "Number of images to render")
      ->capture_default_str();
  generate->add_option("--pairs", gen.pairs, "Number of disjoint source-target pairs")
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "Master RNG seed")->capture_default_str();
  generate->add_option("--size", gen.size, "Image width and height in pixels")
      ->capture_default_str();
  generate->add_option("--out", gen.out, "Output directory")
      ->envname("ADS_OUT")
      ->capture_default_str();
  generate->add_option("--config", gen.config_path, "Generator config file (key = value lines)");
  generate->add_flag("--verbose", gen.verbose, "Echo effective settings to stderr");

  CLI::App* explain = app.add_subcommand(
      "explain", "Run align, deform, subtract on one image pair and report the measures");
  explain->add_option("--source", exp.source, "Source image (PPM or PNG)")->required();
  explain->add_option("--target", exp.target, "Target image (PPM or PNG)")->required();
  explain->add_option("--mask", exp.mask, "Source object mask (PGM or PNG); whole frame if omitted");
  explain->add_option("--keypoints", exp.keypoints, "Keypoint correspondence JSON file");
  explain->add_option("--transforms", exp.transforms, "Previously exported transform JSON file");
  explain->add_option("--out", exp.out, "Output directory for report.json and transforms.json")
      ->envname("ADS_OUT")
      ->capture_default_str();
  explain->add_flag("--emit-intermediates", exp.emit_intermediates,
                    "Also write aligned/deformed/mask/heatmap PNGs");
  explain->add_option("--lambda", exp.tps_lambda, "Spline fit regularizer")
      ->capture_default_str();
  explain->add_flag("--ransac", exp.use_ransac, "Robust affine estimation");
  explain->add_option("--ransac-threshold", exp.ransac_threshold,
                      "Inlier residual threshold (normalized units)")
      ->capture_default_str();
  explain->add_option("--ransac-iterations", exp.ransac_iterations, "Sampling iterations")
      ->capture_default_str();
  explain->add_option("--ransac-min-inliers", exp.ransac_min_inliers,
                      "Consensus quota (0 = max(6, pairs/2))")
      ->capture_default_str();
  explain->add_option("--seed", exp.seed, "RANSAC RNG seed")->capture_default_str();
  explain->add_flag("--verbose", exp.verbose, "Echo effective settings to stderr");

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Run the pipeline over a dataset manifest and correlate against ground truth");
  evaluate->add_option("--manifest", eval.manifest, "Dataset manifest (JSON lines)")->required();
  evaluate->add_option("--out", eval.out, "Output directory for tables and scatter CSVs")
      ->envname("ADS_OUT")
      ->capture_default_str();
  evaluate->add_option("--threads", eval.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  evaluate->add_option("--lambda", eval.tps_lambda, "Spline fit regularizer")
      ->capture_default_str();
  evaluate->add_flag("--verbose", eval.verbose, "Echo effective settings to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ads::cli::kExitOk : ads::cli::kExitUsage;
  }

  if (generate->parsed()) return ads::cli::run_generate(gen);
  if (explain->parsed()) return ads::cli::run_explain(exp);
  return ads::cli::run_evaluate(eval);
}

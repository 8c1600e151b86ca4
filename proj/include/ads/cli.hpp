#pragma once

#include "ads/common.hpp"

#include <cstdint>
#include <string>

namespace ads::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;     // bad flags or unreadable/invalid inputs
inline constexpr int kExitPipeline = 2;  // a pipeline stage failed
inline constexpr int kExitDegraded = 3;  // evaluation exceeded the failure budget

struct GenerateOptions {
  int count = 20;
  int pairs = 10;
  std::uint64_t seed = 0;
  Index size = 128;
  std::string out = ".";
  std::string config_path;  // optional generator config
  bool verbose = false;
};

struct ExplainOptions {
  std::string source;
  std::string target;
  std::string mask;        // optional; whole frame when empty
  std::string keypoints;   // exactly one of keypoints / transforms
  std::string transforms;
  std::string out = ".";
  bool emit_intermediates = false;
  double tps_lambda = 1e-3;
  bool use_ransac = false;
  double ransac_threshold = 0.05;
  int ransac_iterations = 512;
  Index ransac_min_inliers = 0;
  std::uint64_t seed = 0;
  bool verbose = false;
};

struct EvaluateOptions {
  std::string manifest;
  std::string out = ".";
  int threads = 0;
  double tps_lambda = 1e-3;
  bool verbose = false;
};

int run_generate(const GenerateOptions& options);
int run_explain(const ExplainOptions& options);
int run_evaluate(const EvaluateOptions& options);

}  // namespace ads::cli

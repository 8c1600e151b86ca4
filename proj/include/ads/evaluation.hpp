#pragma once

#include "ads/common.hpp"
#include "ads/pipeline.hpp"
#include "ads/synthscene.hpp"

#include <string>
#include <vector>

namespace ads {

// Pearson correlation coefficient. Throws UndefinedCorrelationError for
// fewer than two samples or a zero-variance series.
template <typename DerivedX, typename DerivedY>
double pearson(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson series lengths differ");
  const Index n = x.size();
  if (n < 2) throw UndefinedCorrelationError("correlation needs at least two samples");
  const double mx = x.template cast<double>().mean();
  const double my = y.template cast<double>().mean();
  const Eigen::ArrayXd dx = x.template cast<double>().array() - mx;
  const Eigen::ArrayXd dy = y.template cast<double>().array() - my;
  const double sxx = (dx * dx).sum();
  const double syy = (dy * dy).sum();
  if (sxx == 0.0 || syy == 0.0)
    throw UndefinedCorrelationError("correlation is undefined for a constant series");
  return (dx * dy).sum() / std::sqrt(sxx * syy);
}

// Min-max rescaling to [0, 1]. Throws DegenerateRangeError when the series
// has no spread.
template <typename Derived>
Eigen::VectorXd standardize_unit(const Eigen::MatrixBase<Derived>& series) {
  if (series.size() == 0) throw DegenerateRangeError("cannot standardize an empty series");
  const Eigen::VectorXd v = series.template cast<double>();
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (!(hi > lo)) throw DegenerateRangeError("series has zero range");
  return (v.array() - lo) / (hi - lo);
}

struct EvaluationConfig {
  PipelineConfig pipeline;
  int threads = 0;                     // 0 resolves to hardware concurrency
  double max_failure_fraction = 0.10;  // beyond this the run is degraded
};

struct PairOutcome {
  int pair_index = 0;
  bool ok = false;
  std::string error;  // failure cause when !ok
  GroundTruthDifference gt;
  MeasureSet measures;
  double baseline_mse = 0;
};

struct CorrelationRow {
  std::string dimension;
  double r_mse = 0;
  double r_ours = 0;
  Index n = 0;
};

// Seven rows in fixed order: d, sx, sy, theta, tx, ty, a. Rotation and
// translation correlate magnitudes (their sign is arbitrary under the
// measure); scale correlates |log s|; shape and appearance are raw. The
// signed-rotation correlation is kept separately as a diagnostic.
struct CorrelationTable {
  std::vector<CorrelationRow> rows;
  double r_theta_signed = 0;
};

struct EvaluationRun {
  std::vector<PairOutcome> outcomes;
  CorrelationTable table;
  Index succeeded = 0;
  Index failed = 0;
  bool degraded = false;  // failure fraction exceeded the configured limit
};

// Runs the pipeline over every manifest pair (in parallel, outcomes kept in
// manifest order) and correlates measures against ground truth.
EvaluationRun evaluate(const DatasetManifest& manifest, const std::string& base_dir,
                       const EvaluationConfig& config = {});

CorrelationTable correlate(const std::vector<PairOutcome>& outcomes);

// Fixed-format renderings; both are byte-stable for identical runs.
std::string correlation_csv(const CorrelationTable& table);
std::string correlation_text(const CorrelationTable& table);

// Per-dimension scatter series (ground truth, our measure, baseline MSE)
// plus unit-standardized columns; the appearance dimension also gets a
// log10-log10 variant against the baseline.
struct ScatterSeries {
  std::string dimension;
  std::vector<double> gt;
  std::vector<double> ours;
  std::vector<double> baseline;
};

std::vector<ScatterSeries> scatter_series(const std::vector<PairOutcome>& outcomes);
std::string scatter_csv(const ScatterSeries& series);
std::string scatter_loglog_csv(const ScatterSeries& series);

}  // namespace ads

#include "ads/evaluation.hpp"

#include "ads/io.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace ads {

namespace {

constexpr const char* kDimensions[7] = {"d", "sx", "sy", "theta", "tx", "ty", "a"};

PairOutcome evaluate_one(const ManifestEntry& entry, const std::string& base_dir,
                         const PipelineConfig& cfg) {
  PairOutcome outcome;
  outcome.pair_index = entry.pair_index;
  outcome.gt = entry.gt;
  try {
    const fs::path base(base_dir);
    PairInput input;
    input.source = load_image((base / entry.source_image).string());
    input.source_mask = load_mask((base / entry.source_mask).string());
    input.target = load_image((base / entry.target_image).string());
    input.correspondences =
        load_keypoints((base / entry.keypoint_file).string(), input.source.width,
                       input.source.height, input.target.width, input.target.height);
    const DifferenceReport report = explain_pair(input, cfg);
    outcome.measures = report.measures;
    outcome.baseline_mse = report.baseline_mse;
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
  }
  return outcome;
}

// Correlation pairing per dimension: magnitudes for rotation/translation,
// |log| for scale ratios, raw values for shape and appearance.
void series_for(const PairOutcome& o, int dim, double& gt, double& ours) {
  switch (dim) {
    case 0: gt = o.gt.d; ours = o.measures.d; break;
    case 1: gt = std::abs(std::log(o.gt.sx)); ours = std::abs(std::log(o.measures.sx)); break;
    case 2: gt = std::abs(std::log(o.gt.sy)); ours = std::abs(std::log(o.measures.sy)); break;
    case 3: gt = std::abs(o.gt.theta_deg); ours = std::abs(o.measures.theta_deg); break;
    case 4: gt = std::abs(o.gt.tx); ours = std::abs(o.measures.tx); break;
    case 5: gt = std::abs(o.gt.ty); ours = std::abs(o.measures.ty); break;
    case 6: gt = o.gt.a; ours = o.measures.a; break;
    default: throw std::invalid_argument("bad dimension index");
  }
}

double safe_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return pearson(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Index>(x.size())),
                   Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Index>(y.size())));
  } catch (const UndefinedCorrelationError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

EvaluationRun evaluate(const DatasetManifest& manifest, const std::string& base_dir,
                       const EvaluationConfig& config) {
  const std::size_t n = manifest.entries.size();
  EvaluationRun run;
  run.outcomes.resize(n);

  unsigned thread_count = config.threads > 0
                              ? static_cast<unsigned>(config.threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  thread_count = static_cast<unsigned>(std::min<std::size_t>(thread_count, std::max<std::size_t>(n, 1)));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      run.outcomes[i] = evaluate_one(manifest.entries[i], base_dir, config.pipeline);
    }
  };
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& o : run.outcomes) (o.ok ? run.succeeded : run.failed) += 1;
  run.degraded = n > 0 && static_cast<double>(run.failed) >
                              config.max_failure_fraction * static_cast<double>(n);
  run.table = correlate(run.outcomes);
  return run;
}

CorrelationTable correlate(const std::vector<PairOutcome>& outcomes) {
  CorrelationTable table;
  std::vector<double> baseline;
  for (const auto& o : outcomes)
    if (o.ok) baseline.push_back(o.baseline_mse);

  for (int dim = 0; dim < 7; ++dim) {
    std::vector<double> gt, ours;
    for (const auto& o : outcomes) {
      if (!o.ok) continue;
      double g = 0, m = 0;
      series_for(o, dim, g, m);
      gt.push_back(g);
      ours.push_back(m);
    }
    CorrelationRow row;
    row.dimension = kDimensions[dim];
    row.n = static_cast<Index>(gt.size());
    row.r_mse = safe_pearson(gt, baseline);
    row.r_ours = safe_pearson(gt, ours);
    table.rows.push_back(std::move(row));
  }

  std::vector<double> theta_gt, theta_ours;
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    theta_gt.push_back(o.gt.theta_deg);
    theta_ours.push_back(o.measures.theta_deg);
  }
  table.r_theta_signed = safe_pearson(theta_gt, theta_ours);
  return table;
}

std::string correlation_csv(const CorrelationTable& table) {
  std::ostringstream out;
  out << "dimension,r_mse,r_ours,n\n";
  char buf[128];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%lld\n", row.dimension.c_str(), row.r_mse,
                  row.r_ours, static_cast<long long>(row.n));
    out << buf;
  }
  return out.str();
}

std::string correlation_text(const CorrelationTable& table) {
  std::ostringstream out;
  char buf[64];
  out << "measure ";
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%7s", row.dimension.c_str());
    out << buf;
  }
  out << "\nMSE     ";
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%7.2f", row.r_mse);
    out << buf;
  }
  out << "\nours    ";
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%7.2f", row.r_ours);
    out << buf;
  }
  out << "\npairs   ";
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%7lld", static_cast<long long>(row.n));
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "%.6f", table.r_theta_signed);
  out << "\ntheta signed r = " << buf << "\n";
  return out.str();
}

std::vector<ScatterSeries> scatter_series(const std::vector<PairOutcome>& outcomes) {
  std::vector<ScatterSeries> all(7);
  for (int dim = 0; dim < 7; ++dim) {
    all[static_cast<std::size_t>(dim)].dimension = kDimensions[dim];
    for (const auto& o : outcomes) {
      if (!o.ok) continue;
      double g = 0, m = 0;
      series_for(o, dim, g, m);
      all[static_cast<std::size_t>(dim)].gt.push_back(g);
      all[static_cast<std::size_t>(dim)].ours.push_back(m);
      all[static_cast<std::size_t>(dim)].baseline.push_back(o.baseline_mse);
    }
  }
  return all;
}

namespace {

std::vector<double> unit_or_zero(const std::vector<double>& v) {
  try {
    const Eigen::VectorXd u =
        standardize_unit(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size())));
    return std::vector<double>(u.data(), u.data() + u.size());
  } catch (const DegenerateRangeError&) {
    return std::vector<double>(v.size(), 0.0);
  }
}

}  // namespace

std::string scatter_csv(const ScatterSeries& series) {
  std::ostringstream out;
  out << "gt,ours,mse,gt_unit,ours_unit,mse_unit\n";
  const auto gt_unit = unit_or_zero(series.gt);
  const auto ours_unit = unit_or_zero(series.ours);
  const auto mse_unit = unit_or_zero(series.baseline);
  for (std::size_t i = 0; i < series.gt.size(); ++i) {
    out << format_number(series.gt[i]) << "," << format_number(series.ours[i]) << ","
        << format_number(series.baseline[i]) << "," << format_number(gt_unit[i]) << ","
        << format_number(ours_unit[i]) << "," << format_number(mse_unit[i]) << "\n";
  }
  return out.str();
}

std::string scatter_loglog_csv(const ScatterSeries& series) {
  std::ostringstream out;
  out << "log10_gt,log10_ours,log10_mse\n";
  // Zeros are clamped so log-log plots stay finite.
  auto log10_clamped = [](double v) { return std::log10(std::max(v, 1e-12)); };
  for (std::size_t i = 0; i < series.gt.size(); ++i) {
    out << format_number(log10_clamped(series.gt[i])) << ","
        << format_number(log10_clamped(series.ours[i])) << ","
        << format_number(log10_clamped(series.baseline[i])) << "\n";
  }
  return out.str();
}

}  // namespace ads

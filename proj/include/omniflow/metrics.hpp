#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "omniflow/flowio.hpp"
#include "omniflow/grid.hpp"

namespace omniflow {

struct MetricsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Outlier rule for the Fl metric. A pixel is an outlier when its endpoint
/// error strictly exceeds `threshold_px`; with `kitti_relative` set it must
/// additionally exceed 5% of the ground-truth magnitude.
struct OutlierRule {
  double threshold_px = 3.0;
  bool kitti_relative = false;
};

/// Metrics for one frame pair. Angular error compares the space-time vectors
/// (u, v, 1); endpoint error is the Euclidean distance between flows. Fl
/// values are outlier percentages; fl_bg/fl_fg are absent when the
/// corresponding region holds no evaluated pixel.
struct FrameMetrics {
  double aae_deg = 0.0;
  double aepe_px = 0.0;
  double fl_all_pct = 0.0;
  std::optional<double> fl_bg_pct;
  std::optional<double> fl_fg_pct;
  std::optional<double> aepe_fg_px;
  std::optional<double> aepe_bg_px;

  long long valid_count = 0;
  long long fg_count = 0;
  long long bg_count = 0;
  long long outliers_all = 0;
  long long outliers_fg = 0;
  long long outliers_bg = 0;
};

/// Evaluates `estimate` against `truth` over pixels valid in both fields.
/// `fg_mask` (non-zero = cube) splits Fl into foreground and background.
/// Throws MetricsError on size mismatch or when no pixel is evaluable.
FrameMetrics evaluate_flow(const FlowField& estimate, const FlowField& truth,
                           const Grid<uint8_t>& fg_mask, const OutlierRule& rule = {});

/// One line of the evaluation report.
struct EvalRow {
  std::string experiment;
  std::string method;
  double aae_deg = 0.0;
  double aepe_px = 0.0;
  std::optional<double> fl_bg_pct;
  std::optional<double> fl_fg_pct;
  std::optional<double> fl_all_pct;
};

/// Frame metrics averaged into one row (each frame weighs equally; absent
/// per-frame fl_bg/fl_fg values are skipped).
EvalRow mean_row(const std::string& experiment, const std::string& method,
                 const std::vector<FrameMetrics>& frames);

inline constexpr const char* kReportCsvHeader =
    "experiment,method,aae_deg,aepe_px,fl_bg_pct,fl_fg_pct,fl_all_pct";

struct BestFlags {
  std::string best_aae_method;
  std::string best_aepe_method;
};

/// Accumulates rows and renders them as csv or an aligned text table. The
/// table marks the lowest AAE and AEPE per experiment with a '*'.
class EvalReport {
 public:
  void add_row(EvalRow row);  // rejects duplicate (experiment, method) pairs
  const std::vector<EvalRow>& rows() const { return rows_; }

  std::string to_csv() const;
  static EvalReport from_csv(const std::string& text);

  std::string to_text_table() const;
  BestFlags best_in_experiment(const std::string& experiment) const;
  std::vector<std::string> experiments() const;  // in first-seen order

 private:
  std::vector<EvalRow> rows_;
};

}  // namespace omniflow

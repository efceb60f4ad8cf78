#include "omniflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "omniflow/kernels.hpp"

namespace omniflow {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

struct RegionStats {
  double epe_sum = 0.0;
  double angle_sum = 0.0;  // radians
  long long outliers = 0;
  long long count = 0;
};

RegionStats region_stats(const FlowField& est, const FlowField& gt,
                         const std::vector<uint8_t>& select, const OutlierRule& rule) {
  RegionStats out;
  const size_t n = select.size();
  if (rule.kitti_relative) {
    // The relative rule needs per-pixel ground-truth magnitudes, so it stays
    // on a plain scalar path.
    const float* eu = est.u_data();
    const float* ev = est.v_data();
    const float* gu = gt.u_data();
    const float* gv = gt.v_data();
    for (size_t i = 0; i < n; ++i) {
      if (!select[i]) continue;
      const double du = static_cast<double>(eu[i]) - static_cast<double>(gu[i]);
      const double dv = static_cast<double>(ev[i]) - static_cast<double>(gv[i]);
      const double sq = du * du + dv * dv;
      const double epe = std::sqrt(sq);
      const double gt_mag = std::sqrt(static_cast<double>(gu[i]) * gu[i] +
                                      static_cast<double>(gv[i]) * gv[i]);
      out.epe_sum += epe;
      if (sq > rule.threshold_px * rule.threshold_px && epe > 0.05 * gt_mag) ++out.outliers;
      ++out.count;

      if (eu[i] == gu[i] && ev[i] == gv[i]) continue;  // exactly parallel
      const double num = 1.0 + static_cast<double>(eu[i]) * gu[i] +
                         static_cast<double>(ev[i]) * gv[i];
      const double den =
          std::sqrt(1.0 + static_cast<double>(eu[i]) * eu[i] +
                    static_cast<double>(ev[i]) * ev[i]) *
          std::sqrt(1.0 + static_cast<double>(gu[i]) * gu[i] +
                    static_cast<double>(gv[i]) * gv[i]);
      out.angle_sum += std::acos(std::clamp(num / den, -1.0, 1.0));
    }
    return out;
  }

  const auto& k = kernels::active_kernels();
  const auto epe = k.epe_stats(est.u_data(), est.v_data(), gt.u_data(), gt.v_data(),
                               select.data(), n, rule.threshold_px * rule.threshold_px);
  const auto ang = k.angular_sum(est.u_data(), est.v_data(), gt.u_data(), gt.v_data(),
                                 select.data(), n);
  out.epe_sum = epe.sum;
  out.outliers = epe.outliers;
  out.count = epe.count;
  out.angle_sum = ang.sum;
  return out;
}

double pct(long long outliers, long long count) {
  return 100.0 * static_cast<double>(outliers) / static_cast<double>(count);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_csv_number(const std::string& field, const std::string& what) {
  size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &consumed);
  } catch (const std::exception&) {
    throw MetricsError("report csv: bad " + what + ": '" + field + "'");
  }
  if (consumed != field.size() || !std::isfinite(value))
    throw MetricsError("report csv: bad " + what + ": '" + field + "'");
  return value;
}

}  // namespace

FrameMetrics evaluate_flow(const FlowField& estimate, const FlowField& truth,
                           const Grid<uint8_t>& fg_mask, const OutlierRule& rule) {
  if (estimate.width() != truth.width() || estimate.height() != truth.height())
    throw MetricsError("evaluate_flow: estimate and truth sizes differ");
  if (fg_mask.width() != truth.width() || fg_mask.height() != truth.height())
    throw MetricsError("evaluate_flow: mask size differs from the flow fields");

  const size_t n = truth.size();
  std::vector<uint8_t> sel_all(n), sel_fg(n), sel_bg(n);
  const uint8_t* ev = estimate.valid_data();
  const uint8_t* gv = truth.valid_data();
  const uint8_t* fg = fg_mask.data();
  for (size_t i = 0; i < n; ++i) {
    const uint8_t both = (ev[i] && gv[i]) ? 1 : 0;
    sel_all[i] = both;
    sel_fg[i] = both && fg[i] ? 1 : 0;
    sel_bg[i] = both && !fg[i] ? 1 : 0;
  }

  const RegionStats all = region_stats(estimate, truth, sel_all, rule);
  if (all.count == 0) throw MetricsError("evaluate_flow: no pixel is valid in both fields");
  const RegionStats fgs = region_stats(estimate, truth, sel_fg, rule);
  const RegionStats bgs = region_stats(estimate, truth, sel_bg, rule);

  FrameMetrics m;
  m.valid_count = all.count;
  m.fg_count = fgs.count;
  m.bg_count = bgs.count;
  m.outliers_all = all.outliers;
  m.outliers_fg = fgs.outliers;
  m.outliers_bg = bgs.outliers;
  m.aae_deg = kRadToDeg * all.angle_sum / static_cast<double>(all.count);
  m.aepe_px = all.epe_sum / static_cast<double>(all.count);
  m.fl_all_pct = pct(all.outliers, all.count);
  if (fgs.count > 0) {
    m.fl_fg_pct = pct(fgs.outliers, fgs.count);
    m.aepe_fg_px = fgs.epe_sum / static_cast<double>(fgs.count);
  }
  if (bgs.count > 0) {
    m.fl_bg_pct = pct(bgs.outliers, bgs.count);
    m.aepe_bg_px = bgs.epe_sum / static_cast<double>(bgs.count);
  }
  return m;
}

EvalRow mean_row(const std::string& experiment, const std::string& method,
                 const std::vector<FrameMetrics>& frames) {
  if (frames.empty()) throw MetricsError("mean_row: no frames");
  EvalRow row;
  row.experiment = experiment;
  row.method = method;
  double aae = 0.0, aepe = 0.0, fl_all = 0.0, fl_fg = 0.0, fl_bg = 0.0;
  long long n_fg = 0, n_bg = 0;
  for (const FrameMetrics& f : frames) {
    aae += f.aae_deg;
    aepe += f.aepe_px;
    fl_all += f.fl_all_pct;
    if (f.fl_fg_pct) {
      fl_fg += *f.fl_fg_pct;
      ++n_fg;
    }
    if (f.fl_bg_pct) {
      fl_bg += *f.fl_bg_pct;
      ++n_bg;
    }
  }
  const double n = static_cast<double>(frames.size());
  row.aae_deg = aae / n;
  row.aepe_px = aepe / n;
  row.fl_all_pct = fl_all / n;
  if (n_fg > 0) row.fl_fg_pct = fl_fg / static_cast<double>(n_fg);
  if (n_bg > 0) row.fl_bg_pct = fl_bg / static_cast<double>(n_bg);
  return row;
}

void EvalReport::add_row(EvalRow row) {
  if (row.experiment.empty() || row.method.empty())
    throw MetricsError("report row: experiment and method must not be empty");
  for (const EvalRow& r : rows_)
    if (r.experiment == row.experiment && r.method == row.method)
      throw MetricsError("report row: duplicate entry " + row.experiment + "/" + row.method);
  rows_.push_back(std::move(row));
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << kReportCsvHeader << "\n";
  for (const EvalRow& r : rows_) {
    out << r.experiment << "," << r.method << "," << format_double(r.aae_deg) << ","
        << format_double(r.aepe_px) << "," << format_optional(r.fl_bg_pct) << ","
        << format_optional(r.fl_fg_pct) << "," << format_optional(r.fl_all_pct) << "\n";
  }
  return out.str();
}

EvalReport EvalReport::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw MetricsError("report csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kReportCsvHeader)
    throw MetricsError("report csv: header must be '" + std::string(kReportCsvHeader) + "'");
  EvalReport report;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) throw MetricsError("report csv: expected 7 fields per row");
    EvalRow row;
    row.experiment = fields[0];
    row.method = fields[1];
    row.aae_deg = parse_csv_number(fields[2], "aae_deg");
    row.aepe_px = parse_csv_number(fields[3], "aepe_px");
    if (!fields[4].empty()) row.fl_bg_pct = parse_csv_number(fields[4], "fl_bg_pct");
    if (!fields[5].empty()) row.fl_fg_pct = parse_csv_number(fields[5], "fl_fg_pct");
    if (!fields[6].empty()) row.fl_all_pct = parse_csv_number(fields[6], "fl_all_pct");
    report.add_row(std::move(row));
  }
  return report;
}

std::vector<std::string> EvalReport::experiments() const {
  std::vector<std::string> names;
  for (const EvalRow& r : rows_)
    if (std::find(names.begin(), names.end(), r.experiment) == names.end())
      names.push_back(r.experiment);
  return names;
}

BestFlags EvalReport::best_in_experiment(const std::string& experiment) const {
  BestFlags best;
  double best_aae = 0.0, best_aepe = 0.0;
  for (const EvalRow& r : rows_) {
    if (r.experiment != experiment) continue;
    if (best.best_aae_method.empty() || r.aae_deg < best_aae) {
      best_aae = r.aae_deg;
      best.best_aae_method = r.method;
    }
    if (best.best_aepe_method.empty() || r.aepe_px < best_aepe) {
      best_aepe = r.aepe_px;
      best.best_aepe_method = r.method;
    }
  }
  if (best.best_aae_method.empty())
    throw MetricsError("report: unknown experiment '" + experiment + "'");
  return best;
}

std::string EvalReport::to_text_table() const {
  // Column widths fit the header and the fixed %.3f cells plus a best marker.
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-14s %-16s %12s %12s %11s %11s %11s", "experiment", "method",
                "aae_deg", "aepe_px", "fl_bg_pct", "fl_fg_pct", "fl_all_pct");
  out << buf << "\n";

  auto cell = [](std::optional<double> v, bool starred) {
    if (!v) return std::string("-");
    char num[64];
    std::snprintf(num, sizeof(num), "%.3f%s", *v, starred ? "*" : "");
    return std::string(num);
  };

  for (const EvalRow& r : rows_) {
    const BestFlags best = best_in_experiment(r.experiment);
    const bool star_aae = best.best_aae_method == r.method;
    const bool star_aepe = best.best_aepe_method == r.method;
    std::snprintf(buf, sizeof(buf), "%-14s %-16s %12s %12s %11s %11s %11s", r.experiment.c_str(),
                  r.method.c_str(), cell(r.aae_deg, star_aae).c_str(),
                  cell(r.aepe_px, star_aepe).c_str(), cell(r.fl_bg_pct, false).c_str(),
                  cell(r.fl_fg_pct, false).c_str(), cell(r.fl_all_pct, false).c_str());
    out << buf << "\n";
  }
  return out.str();
}

}  // namespace omniflow

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sentinel/eval.hpp"

namespace sentinel {

// One metric-grid row keyed (train scenario, test subset, encoder,
// classifier, layout).
struct GridRow {
    std::string train_scenario;
    std::string test_subset;
    std::string encoder;
    std::string classifier;
    std::string layout;
    MetricReport metrics;
};

// Columns: train_scenario,test_subset,encoder,classifier,layout,f1,far,frr,brier,n
void write_grid_csv(std::ostream& out, std::span<const GridRow> rows);
std::vector<GridRow> read_grid_csv(std::istream& in);

// Columns: bin_lo,bin_hi,mean_p,emp_freq,count
void write_calibration_csv(std::ostream& out, const CalibrationCurve& curve);
CalibrationCurve read_calibration_csv(std::istream& in, std::size_t bin_count = 10);

// Reliability polyline (one vertex per non-empty bin) plus the diagonal.
std::string calibration_svg(const CalibrationCurve& curve, const std::string& title);
// Cumulative explained-variance curve.
std::string variance_curve_svg(std::span<const double> cumulative, const std::string& title);
// Rows x columns heatmap of a rate in [0, 1]; missing cells render grey "NA".
std::string heatmap_svg(const std::vector<std::string>& row_labels, const std::vector<std::string>& col_labels,
                        const std::vector<std::vector<std::optional<double>>>& values, const std::string& title);

struct NamedCalibration {
    std::string name;
    CalibrationCurve curve;
};

struct NamedVarianceCurve {
    std::string name;
    std::vector<double> ratios;
};

struct ReportBundle {
    std::vector<GridRow> grid;        // per test scenario
    std::vector<GridRow> class_grid;  // per profile class (and the pooled LLM-like view)
    std::vector<NamedCalibration> calibration;
    std::vector<NamedVarianceCurve> variance;
    std::optional<double> brier_far_pearson;
    std::size_t correlation_points = 0;
};

// Writes grid.csv, class_grid.csv, calibration/<name>.csv|.svg,
// pca/<name>.csv|.svg, heatmap_{f1,far}_<layout>_<classifier>.svg and
// correlation.json. Output bytes depend only on the bundle.
void emit_reports(const ReportBundle& bundle, const std::filesystem::path& dir);

// Writes the heatmaps for a grid; used by emit_reports and by the CLI report
// verb when re-rendering an existing grid.csv.
void emit_heatmaps(std::span<const GridRow> rows, const std::filesystem::path& dir);

}  // namespace sentinel

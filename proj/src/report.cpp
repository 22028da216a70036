#include "sentinel/report.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"

namespace sentinel {

namespace {

constexpr std::string_view kGridHeader = "train_scenario,test_subset,encoder,classifier,layout,f1,far,frr,brier,n";

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    return out;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// Plot area shared by the line charts.
constexpr double kLeft = 50.0;
constexpr double kTop = 30.0;
constexpr double kSize = 300.0;

double px(double v) { return kLeft + v * kSize; }
double py(double v) { return kTop + (1.0 - v) * kSize; }

std::string chart_frame(const std::string& title, std::string_view x_label, std::string_view y_label) {
    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"380\" viewBox=\"0 0 400 380\">\n";
    svg += fmt::format("<text x=\"200\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
                       xml_escape(title));
    svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"#333\"/>\n",
                       kLeft, kTop, kSize, kSize);
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = tick / 4.0;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"10\">{:.2f}</text>\n",
                           px(v), kTop + kSize + 14.0, v);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" font-size=\"10\">{:.2f}</text>\n",
                           kLeft - 4.0, py(v) + 3.0, v);
    }
    svg += fmt::format("<text x=\"200\" y=\"372\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n", x_label);
    svg += fmt::format(
        "<text x=\"12\" y=\"180\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 12 180)\">{}</text>\n",
        y_label);
    return svg;
}

}  // namespace

void write_grid_csv(std::ostream& out, std::span<const GridRow> rows) {
    out << kGridHeader << '\n';
    for (const auto& row : rows) {
        const auto& m = row.metrics;
        csv::write_row(out, {row.train_scenario, row.test_subset, row.encoder, row.classifier, row.layout,
                             csv::format_metric(m.f1), csv::format_metric(m.far), csv::format_metric(m.frr),
                             csv::format_metric(m.brier), std::to_string(m.n)});
    }
}

std::vector<GridRow> read_grid_csv(std::istream& in) {
    const auto table = csv::read(in);
    if (table.empty()) {
        throw Error(ErrorCode::Parse, "grid CSV is empty");
    }
    std::vector<GridRow> rows;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const auto& r = table[i];
        if (r.size() != 10) {
            throw Error(ErrorCode::Parse, fmt::format("grid CSV row {} has {} fields", i + 1, r.size()));
        }
        GridRow row{r[0], r[1], r[2], r[3], r[4], {}};
        row.metrics.subset = r[1];
        row.metrics.f1 = csv::parse_metric(r[5]);
        row.metrics.far = csv::parse_metric(r[6]);
        row.metrics.frr = csv::parse_metric(r[7]);
        row.metrics.brier = csv::parse_metric(r[8]);
        row.metrics.n = static_cast<std::size_t>(std::stoull(r[9]));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_calibration_csv(std::ostream& out, const CalibrationCurve& curve) {
    out << "bin_lo,bin_hi,mean_p,emp_freq,count\n";
    for (const auto& bin : curve.bins) {
        out << fmt::format("{:.6f},{:.6f},{:.6f},{:.6f},{}\n", bin.lo, bin.hi, bin.mean_p, bin.emp_freq, bin.count);
    }
}

CalibrationCurve read_calibration_csv(std::istream& in, std::size_t bin_count) {
    const auto table = csv::read(in);
    CalibrationCurve curve;
    curve.bin_count = bin_count;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const auto& r = table[i];
        if (r.size() != 5) {
            throw Error(ErrorCode::Parse, fmt::format("calibration CSV row {} has {} fields", i + 1, r.size()));
        }
        CalibrationBin bin;
        bin.lo = std::stod(r[0]);
        bin.hi = std::stod(r[1]);
        bin.mean_p = std::stod(r[2]);
        bin.emp_freq = std::stod(r[3]);
        bin.count = static_cast<std::size_t>(std::stoull(r[4]));
        bin.index = calibration_bin(bin.lo + 0.5 * (bin.hi - bin.lo), bin_count);
        curve.bins.push_back(bin);
    }
    return curve;
}

std::string calibration_svg(const CalibrationCurve& curve, const std::string& title) {
    std::string svg = chart_frame(title, "mean predicted p(fake)", "empirical fake frequency");
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#999\" "
                       "stroke-dasharray=\"4 3\"/>\n",
                       px(0.0), py(0.0), px(1.0), py(1.0));
    std::string points;
    for (const auto& bin : curve.bins) {
        if (!points.empty()) {
            points.push_back(' ');
        }
        points += fmt::format("{:.2f},{:.2f}", px(bin.mean_p), py(bin.emp_freq));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"{}\"/>\n", points);
    svg += "</svg>\n";
    return svg;
}

std::string variance_curve_svg(std::span<const double> cumulative, const std::string& title) {
    std::string svg = chart_frame(title, "component index (fraction of k)", "cumulative explained variance");
    std::string points;
    const double k = static_cast<double>(cumulative.size());
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        if (!points.empty()) {
            points.push_back(' ');
        }
        points += fmt::format("{:.2f},{:.2f}", px(static_cast<double>(i + 1) / k), py(std::min(cumulative[i], 1.0)));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"{}\"/>\n", points);
    svg += "</svg>\n";
    return svg;
}

std::string heatmap_svg(const std::vector<std::string>& row_labels, const std::vector<std::string>& col_labels,
                        const std::vector<std::vector<std::optional<double>>>& values, const std::string& title) {
    constexpr double kCellW = 90.0;
    constexpr double kCellH = 28.0;
    constexpr double kLabelW = 130.0;
    constexpr double kHeaderH = 44.0;
    const double width = kLabelW + kCellW * static_cast<double>(col_labels.size()) + 10.0;
    const double height = kHeaderH + kCellH * static_cast<double>(row_labels.size()) + 10.0;
    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\">\n",
        width, height);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n", width / 2.0,
                       xml_escape(title));
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
                           kLabelW + kCellW * (static_cast<double>(c) + 0.5), kHeaderH - 8.0,
                           xml_escape(col_labels[c]));
    }
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
        const double y = kHeaderH + kCellH * static_cast<double>(r);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" font-size=\"10\">{}</text>\n",
                           kLabelW - 6.0, y + kCellH / 2.0 + 3.0, xml_escape(row_labels[r]));
        for (std::size_t c = 0; c < col_labels.size(); ++c) {
            const double x = kLabelW + kCellW * static_cast<double>(c);
            std::string fill = "#cccccc";
            std::string label = "NA";
            if (r < values.size() && c < values[r].size() && values[r][c].has_value()) {
                const double value = values[r][c].value();
                const int shade = static_cast<int>(255.0 - 180.0 * std::clamp(value, 0.0, 1.0));
                fill = fmt::format("#ff{:02x}{:02x}", shade, shade);
                label = fmt::format("{:.3f}", value);
            }
            svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\" "
                               "stroke=\"#fff\"/>\n",
                               x, y, kCellW, kCellH, fill);
            svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
                               x + kCellW / 2.0, y + kCellH / 2.0 + 3.0, label);
        }
    }
    svg += "</svg>\n";
    return svg;
}

void emit_heatmaps(std::span<const GridRow> rows, const std::filesystem::path& dir) {
    // Group by (layout, classifier) keeping first-seen order of scenarios and subsets.
    struct Panel {
        std::vector<std::string> train;
        std::vector<std::string> test;
        std::map<std::pair<std::string, std::string>, const MetricReport*> cells;
    };
    std::vector<std::pair<std::string, Panel>> panels;
    for (const auto& row : rows) {
        const std::string key = row.layout + "_" + row.classifier;
        auto it = std::find_if(panels.begin(), panels.end(), [&](const auto& p) { return p.first == key; });
        if (it == panels.end()) {
            panels.emplace_back(key, Panel{});
            it = std::prev(panels.end());
        }
        auto& panel = it->second;
        if (std::find(panel.train.begin(), panel.train.end(), row.train_scenario) == panel.train.end()) {
            panel.train.push_back(row.train_scenario);
        }
        if (std::find(panel.test.begin(), panel.test.end(), row.test_subset) == panel.test.end()) {
            panel.test.push_back(row.test_subset);
        }
        panel.cells[{row.train_scenario, row.test_subset}] = &row.metrics;
    }
    for (const auto& [key, panel] : panels) {
        for (const std::string metric : {"f1", "far"}) {
            std::vector<std::vector<std::optional<double>>> values;
            for (const auto& train : panel.train) {
                auto& line = values.emplace_back();
                for (const auto& test : panel.test) {
                    const auto it = panel.cells.find({train, test});
                    if (it == panel.cells.end()) {
                        line.emplace_back();
                    } else {
                        line.push_back(metric == "f1" ? it->second->f1 : it->second->far);
                    }
                }
            }
            auto out = open_for_write(dir / fmt::format("heatmap_{}_{}.svg", metric, key));
            out << heatmap_svg(panel.train, panel.test, values, fmt::format("{} ({})", metric == "f1" ? "F1" : "FAR", key));
        }
    }
}

void emit_reports(const ReportBundle& bundle, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot create report directory " + dir.string());
    }
    {
        auto out = open_for_write(dir / "grid.csv");
        write_grid_csv(out, bundle.grid);
    }
    if (!bundle.class_grid.empty()) {
        auto out = open_for_write(dir / "class_grid.csv");
        write_grid_csv(out, bundle.class_grid);
    }
    if (!bundle.calibration.empty()) {
        std::filesystem::create_directories(dir / "calibration");
        for (const auto& named : bundle.calibration) {
            auto csv_out = open_for_write(dir / "calibration" / (named.name + ".csv"));
            write_calibration_csv(csv_out, named.curve);
            auto svg_out = open_for_write(dir / "calibration" / (named.name + ".svg"));
            svg_out << calibration_svg(named.curve, "Reliability: " + named.name);
        }
    }
    if (!bundle.variance.empty()) {
        std::filesystem::create_directories(dir / "pca");
        for (const auto& named : bundle.variance) {
            std::vector<double> cumulative;
            double running = 0.0;
            auto csv_out = open_for_write(dir / "pca" / (named.name + ".csv"));
            csv_out << "component_index,ratio,cumulative\n";
            for (std::size_t i = 0; i < named.ratios.size(); ++i) {
                running += named.ratios[i];
                cumulative.push_back(running);
                csv_out << fmt::format("{},{:.6f},{:.6f}\n", i + 1, named.ratios[i], running);
            }
            auto svg_out = open_for_write(dir / "pca" / (named.name + ".svg"));
            svg_out << variance_curve_svg(cumulative, "PCA variance: " + named.name);
        }
    }
    emit_heatmaps(bundle.grid, dir);
    {
        nlohmann::json correlation{{"points", bundle.correlation_points},
                                   {"pearson_r_brier_vs_llm_far",
                                    bundle.brier_far_pearson ? nlohmann::json(csv::format_metric(bundle.brier_far_pearson))
                                                             : nlohmann::json("NA")}};
        auto out = open_for_write(dir / "correlation.json");
        out << correlation.dump(2) << '\n';
    }
}

}  // namespace sentinel

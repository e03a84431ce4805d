#include "fakenews/reports.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fakenews/errors.hpp"
#include "fakenews/render.hpp"

namespace fakenews {

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec || !std::filesystem::is_directory(path)) {
        throw ConfigError("cannot create output directory: " + path);
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write file: " + path);
    }
    out << content;
    if (!content.empty() && content.back() != '\n') {
        out << '\n';
    }
    if (!out) {
        throw ConfigError("failed writing file: " + path);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void emit_reports(const MetricsReport& report, const std::vector<TrainRecord>& records,
                  const std::string& out_dir) {
    ensure_directory(out_dir);
    write_text_file(out_dir + "/metrics.json", report.to_json_string());
    render_heatmap(out_dir + "/confusion.ppm", report.confusion.cells);

    std::vector<double> support;
    for (std::uint64_t count : report.support) {
        support.push_back(static_cast<double>(count));
    }
    render_bar_chart(out_dir + "/class_distribution.ppm", report.class_names, support);

    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::string stem = out_dir + "/curve_fold_" + std::to_string(i);
        records[i].write_curve_csv(stem + ".csv");
        std::vector<double> train_loss, val_loss, train_f1, val_f1;
        for (const auto& stats : records[i].epochs) {
            train_loss.push_back(stats.train_loss);
            val_loss.push_back(stats.val_loss);
            train_f1.push_back(stats.train_f1);
            val_f1.push_back(stats.val_f1);
        }
        render_curves(stem + ".ppm", train_loss, val_loss, train_f1, val_f1);
    }
}

void emit_eda_report(const EdaReport& report, const std::string& split_name,
                     const std::string& out_dir) {
    ensure_directory(out_dir);
    write_text_file(out_dir + "/eda_" + split_name + ".json", report.to_json_string());
    std::vector<double> counts;
    for (std::size_t count : report.class_counts) {
        counts.push_back(static_cast<double>(count));
    }
    render_bar_chart(out_dir + "/class_counts_" + split_name + ".ppm", report.class_names,
                     counts);
}

} // namespace fakenews

#pragma once

#include <string>
#include <vector>

#include "fakenews/corpus.hpp"
#include "fakenews/evaluation.hpp"
#include "fakenews/training.hpp"

namespace fakenews {

/// Writes the run's analysis artifacts into out_dir: metrics.json, a
/// confusion heatmap, one curve CSV + image per training record, and the
/// class-distribution bar chart (true-label support).
void emit_reports(const MetricsReport& report, const std::vector<TrainRecord>& records,
                  const std::string& out_dir);

/// EDA artifacts for one split: eda_<name>.json plus a class-count bar chart.
void emit_eda_report(const EdaReport& report, const std::string& split_name,
                     const std::string& out_dir);

/// Creates the directory (and parents); throws ConfigError when impossible.
void ensure_directory(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace fakenews

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fakenews/corpus.hpp"

namespace fakenews {

/// cell(i, j) = count of true class i predicted as class j, class order from
/// the label vocabulary.
struct ConfusionMatrix {
    std::vector<std::vector<std::uint64_t>> cells;

    std::uint64_t total() const;
    std::uint64_t at(int true_class, int predicted_class) const {
        return cells[static_cast<std::size_t>(true_class)][static_cast<std::size_t>(predicted_class)];
    }
};

struct MetricsReport {
    double accuracy = 0.0;
    std::vector<double> precision; // per class
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<std::uint64_t> support;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    // With the second class treated as the positive one (fake for the default
    // vocabulary): false negatives = positives predicted negative.
    std::string positive_class;
    std::uint64_t false_negatives = 0;
    std::uint64_t false_positives = 0;
    std::vector<std::string> class_names;
    ConfusionMatrix confusion;

    std::string to_json_string() const;
    static MetricsReport from_json_string(const std::string& text);
};

ConfusionMatrix confusion(const std::vector<std::string>& true_labels,
                          const std::vector<std::string>& predicted_labels,
                          const LabelVocabulary& vocabulary);

MetricsReport metrics(const std::vector<std::string>& true_labels,
                      const std::vector<std::string>& predicted_labels,
                      const LabelVocabulary& vocabulary);

/// Index-based variant used inside training loops.
MetricsReport metrics_from_indices(const std::vector<int>& true_indices,
                                   const std::vector<int>& predicted_indices,
                                   const LabelVocabulary& vocabulary);

/// Support-weighted F1 straight from index vectors.
double weighted_f1_score(const std::vector<int>& true_indices,
                         const std::vector<int>& predicted_indices, int num_classes);

} // namespace fakenews

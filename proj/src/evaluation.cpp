#include "fakenews/evaluation.hpp"

#include <numeric>

#include <json.hpp>

#include "fakenews/errors.hpp"

namespace fakenews {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t sum = 0;
    for (const auto& row : cells) {
        sum = std::accumulate(row.begin(), row.end(), sum);
    }
    return sum;
}

namespace {

std::vector<int> to_indices(const std::vector<std::string>& labels,
                            const LabelVocabulary& vocabulary) {
    std::vector<int> indices;
    indices.reserve(labels.size());
    for (const auto& label : labels) {
        int index = vocabulary.index_of(label);
        if (index < 0) {
            throw ValidationError("label not in vocabulary: " + label);
        }
        indices.push_back(index);
    }
    return indices;
}

ConfusionMatrix confusion_from_indices(const std::vector<int>& true_indices,
                                       const std::vector<int>& predicted_indices,
                                       int num_classes) {
    if (true_indices.size() != predicted_indices.size()) {
        throw ValidationError("true/predicted label lists differ in length");
    }
    ConfusionMatrix matrix;
    matrix.cells.assign(static_cast<std::size_t>(num_classes),
                        std::vector<std::uint64_t>(static_cast<std::size_t>(num_classes), 0));
    for (std::size_t i = 0; i < true_indices.size(); ++i) {
        matrix.cells[static_cast<std::size_t>(true_indices[i])]
                    [static_cast<std::size_t>(predicted_indices[i])]++;
    }
    return matrix;
}

} // namespace

ConfusionMatrix confusion(const std::vector<std::string>& true_labels,
                          const std::vector<std::string>& predicted_labels,
                          const LabelVocabulary& vocabulary) {
    return confusion_from_indices(to_indices(true_labels, vocabulary),
                                  to_indices(predicted_labels, vocabulary), vocabulary.size());
}

MetricsReport metrics_from_indices(const std::vector<int>& true_indices,
                                   const std::vector<int>& predicted_indices,
                                   const LabelVocabulary& vocabulary) {
    if (true_indices.empty()) {
        throw ValidationError("metrics require at least one sample");
    }
    const int k = vocabulary.size();
    MetricsReport report;
    report.class_names = vocabulary.classes();
    report.confusion = confusion_from_indices(true_indices, predicted_indices, k);

    const auto& cells = report.confusion.cells;
    const double total = static_cast<double>(report.confusion.total());

    std::uint64_t trace = 0;
    report.precision.resize(static_cast<std::size_t>(k));
    report.recall.resize(static_cast<std::size_t>(k));
    report.f1.resize(static_cast<std::size_t>(k));
    report.support.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        std::uint64_t row_sum = 0;
        std::uint64_t col_sum = 0;
        for (int j = 0; j < k; ++j) {
            row_sum += cells[ci][static_cast<std::size_t>(j)];
            col_sum += cells[static_cast<std::size_t>(j)][ci];
        }
        const std::uint64_t diag = cells[ci][ci];
        trace += diag;
        report.support[ci] = row_sum;
        report.precision[ci] = col_sum == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(col_sum);
        report.recall[ci] = row_sum == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(row_sum);
        const double pr = report.precision[ci] + report.recall[ci];
        report.f1[ci] = pr == 0.0 ? 0.0 : 2.0 * report.precision[ci] * report.recall[ci] / pr;
    }
    report.accuracy = static_cast<double>(trace) / total;

    double wp = 0.0;
    double wr = 0.0;
    double wf = 0.0;
    for (int c = 0; c < k; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        const double w = static_cast<double>(report.support[ci]) / total;
        wp += w * report.precision[ci];
        wr += w * report.recall[ci];
        wf += w * report.f1[ci];
    }
    report.weighted_precision = wp;
    report.weighted_recall = wr;
    report.weighted_f1 = wf;

    // False negative / false positive tally for the positive (last) class.
    const int positive = k - 1;
    report.positive_class = vocabulary.name_of(positive);
    for (int j = 0; j < k; ++j) {
        if (j != positive) {
            report.false_negatives +=
                cells[static_cast<std::size_t>(positive)][static_cast<std::size_t>(j)];
            report.false_positives +=
                cells[static_cast<std::size_t>(j)][static_cast<std::size_t>(positive)];
        }
    }
    return report;
}

MetricsReport metrics(const std::vector<std::string>& true_labels,
                      const std::vector<std::string>& predicted_labels,
                      const LabelVocabulary& vocabulary) {
    return metrics_from_indices(to_indices(true_labels, vocabulary),
                                to_indices(predicted_labels, vocabulary), vocabulary);
}

double weighted_f1_score(const std::vector<int>& true_indices,
                         const std::vector<int>& predicted_indices, int num_classes) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(num_classes));
    for (int c = 0; c < num_classes; ++c) {
        names.push_back("c" + std::to_string(c));
    }
    return metrics_from_indices(true_indices, predicted_indices, LabelVocabulary(names))
        .weighted_f1;
}

std::string MetricsReport::to_json_string() const {
    nlohmann::json doc;
    doc["accuracy"] = accuracy;
    doc["weighted_precision"] = weighted_precision;
    doc["weighted_recall"] = weighted_recall;
    doc["weighted_f1"] = weighted_f1;
    doc["classes"] = class_names; // vocabulary order; per_class keys are sorted
    doc["per_class"] = nlohmann::json::object();
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        doc["per_class"][class_names[c]] = {{"precision", precision[c]},
                                            {"recall", recall[c]},
                                            {"f1", f1[c]},
                                            {"support", support[c]}};
    }
    doc["confusion"] = confusion.cells;
    doc["positive_class"] = positive_class;
    doc["false_negatives"] = false_negatives;
    doc["false_positives"] = false_positives;
    return doc.dump(2);
}

MetricsReport MetricsReport::from_json_string(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    MetricsReport report;
    report.accuracy = doc.at("accuracy").get<double>();
    report.weighted_precision = doc.at("weighted_precision").get<double>();
    report.weighted_recall = doc.at("weighted_recall").get<double>();
    report.weighted_f1 = doc.at("weighted_f1").get<double>();
    report.confusion.cells = doc.at("confusion").get<std::vector<std::vector<std::uint64_t>>>();
    report.positive_class = doc.at("positive_class").get<std::string>();
    report.false_negatives = doc.at("false_negatives").get<std::uint64_t>();
    report.false_positives = doc.at("false_positives").get<std::uint64_t>();
    report.class_names = doc.at("classes").get<std::vector<std::string>>();
    for (const auto& name : report.class_names) {
        const auto& entry = doc.at("per_class").at(name);
        report.precision.push_back(entry.at("precision").get<double>());
        report.recall.push_back(entry.at("recall").get<double>());
        report.f1.push_back(entry.at("f1").get<double>());
        report.support.push_back(entry.at("support").get<std::uint64_t>());
    }
    return report;
}

} // namespace fakenews

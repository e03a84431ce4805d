#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fakenews/corpus.hpp"
#include "fakenews/ensemble.hpp"
#include "fakenews/preprocess.hpp"
#include "fakenews/text_rnn.hpp"
#include "fakenews/training.hpp"

namespace fakenews {

/// Resolved run configuration. Precedence is CLI flag > config file > the
/// defaults below; commands copy the resolved document into the output
/// directory so every run is self-describing.
struct RunConfig {
    // data files
    std::string train_path;
    std::string val_path;
    std::string test_path;
    std::string external_path;
    std::string vectors_path;
    bool use_external = false;

    std::vector<std::string> classes = {"real", "fake"};
    CleanConfig clean;
    std::string stopwords_path; // empty = bundled list
    int eda_top_n = 20;

    // fold planning
    int k_folds = 5;
    FoldStrategy strategy = FoldStrategy::five_model;
    std::vector<std::string> backbones;

    TrainConfig backbone_train; // warmup-cosine + adamw defaults
    TrainConfig textrnn_train;  // step-decay + sgd defaults
    TextRnnConfig textrnn;
    int min_token_frequency = 1;
    double holdout_train_fraction = 0.8;

    PseudoLabelConfig pseudo;
    std::uint64_t seed = 42;
    std::string out_dir = "run-out";
    int parallel_folds = 1;

    RunConfig();

    static RunConfig from_json(const nlohmann::json& doc);
    static RunConfig from_json_file(const std::string& path);
    nlohmann::json to_json() const;

    LabelVocabulary vocabulary() const { return LabelVocabulary(classes); }
};

} // namespace fakenews

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fakenews/classifiers.hpp"
#include "fakenews/corpus.hpp"
#include "fakenews/training.hpp"

namespace fakenews {

struct FoldModelRecord {
    int fold_index = 0;
    std::string backbone_name;
    double ensemble_weight = 0.0; // best validation weighted F1 of the fold model
    std::string checkpoint_ref;
};

struct EnsemblePrediction {
    std::string id;
    ProbVector combined;
    std::string predicted_label;
    double max_probability = 0.0;
};

struct PseudoLabelConfig {
    double threshold = 0.95; // strict: only max_probability > threshold is harvested
    int rounds = 1;
};

struct FoldResult {
    FoldModelRecord record;
    TrainRecord history;
};

struct CvOptions {
    std::string checkpoint_dir; // fold checkpoints land here
    int parallel_folds = 1;
    CleanConfig clean_config;
    const BackboneRegistry* registry = nullptr; // nullptr = process-wide registry
};

/// Trains one model per fold of the plan. extra_train samples (the pseudo
/// pool) are appended to every fold's training split and never validated on.
/// Any fold failure aborts the whole run naming the fold.
std::vector<FoldResult> run_cv(const Corpus& corpus, const FoldPlan& plan,
                               const TrainConfig& train_config, const CvOptions& options,
                               const Corpus* extra_train = nullptr);

/// combined_i = sum_m w_m p_mi / sum_m w_m.
ProbVector soft_vote(const std::vector<ProbVector>& per_model_probs,
                     const std::vector<double>& weights);

/// Argmax with ties resolved toward the lower class index.
EnsemblePrediction make_prediction(const std::string& id, ProbVector combined,
                                   const LabelVocabulary& vocabulary);

/// Loads every fold checkpoint and scores the corpus with F1-weighted soft
/// voting.
std::vector<EnsemblePrediction> predict_ensemble(const std::vector<FoldModelRecord>& records,
                                                 const Corpus& corpus,
                                                 const BackboneRegistry* registry = nullptr);

/// Samples whose ensemble max probability strictly exceeds the threshold,
/// labeled with the predicted class. Gold labels on the scored corpus, when
/// present, are ignored.
Corpus harvest_pseudo_labels(const Corpus& scored_corpus,
                             const std::vector<EnsemblePrediction>& predictions,
                             const PseudoLabelConfig& config);

struct PseudoRoundResult {
    bool retrained = false;
    std::size_t harvested = 0;
    std::size_t augmented_pool_size = 0;
    FoldPlan plan; // retrain plan over the labeled pool; empty when skipped
    std::vector<FoldResult> folds;
    std::vector<EnsemblePrediction> predictions;
};

struct PseudoPlanParams {
    int k_folds = 5;
    FoldStrategy strategy = FoldStrategy::five_model;
    std::vector<std::string> backbones;
    std::uint64_t seed = 0;
};

/// One pseudo-label augmentation round: harvest from prior predictions,
/// re-plan folds over the labeled pool (pseudo samples go to train splits
/// only), retrain every fold from scratch and rescore the test corpus.
/// An empty harvest skips the retrain and returns the prior results.
PseudoRoundResult run_pseudo_label_round(const Corpus& labeled_pool, const Corpus& test_corpus,
                                         const PseudoPlanParams& plan_params,
                                         const TrainConfig& train_config,
                                         const PseudoLabelConfig& pseudo_config,
                                         const std::vector<FoldResult>& prior_folds,
                                         const std::vector<EnsemblePrediction>& prior_predictions,
                                         const CvOptions& options);

std::string manifest_to_json(const std::vector<FoldModelRecord>& records);

void write_predictions_csv(const std::string& path,
                           const std::vector<EnsemblePrediction>& predictions);
void write_predictions_json(const std::string& path,
                            const std::vector<EnsemblePrediction>& predictions,
                            const LabelVocabulary& vocabulary);

} // namespace fakenews

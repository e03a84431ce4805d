#include "fakenews/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <thread>

#include <json.hpp>

#include "fakenews/errors.hpp"
#include "fakenews/rng.hpp"

namespace fakenews {

namespace {

const BackboneRegistry& resolve_registry(const BackboneRegistry* registry) {
    return registry != nullptr ? *registry : backbone_registry();
}

FoldResult train_fold(const Corpus& corpus, const FoldAssignment& assignment,
                      const TrainConfig& train_config, const CvOptions& options,
                      const Corpus* extra_train) {
    Corpus train_corpus = corpus.subset(assignment.train_ids, SplitTag::train);
    if (extra_train != nullptr && extra_train->size() > 0) {
        train_corpus = merge({train_corpus, *extra_train});
    }
    const Corpus val_corpus = corpus.subset(assignment.val_ids, SplitTag::val);

    ClassifierSpec spec;
    spec.kind = ClassifierKind::backbone;
    spec.backbone_name = assignment.backbone_name;

    TrainConfig fold_config = train_config;
    fold_config.seed = mix_seed(train_config.seed, static_cast<std::uint64_t>(assignment.fold_index));

    auto model = make_backbone_classifier(spec, corpus.vocabulary().size(), options.clean_config,
                                          fold_config.seed, resolve_registry(options.registry));

    FoldResult result;
    result.history = train(*model, train_corpus, val_corpus, fold_config);
    result.record.fold_index = assignment.fold_index;
    result.record.backbone_name = assignment.backbone_name;
    result.record.ensemble_weight = result.history.best_val_f1;
    if (!options.checkpoint_dir.empty()) {
        result.record.checkpoint_ref = options.checkpoint_dir + "/fold-" +
                                       std::to_string(assignment.fold_index) + "-" +
                                       assignment.backbone_name + ".ckpt.json";
        save_checkpoint(*model, result.record.checkpoint_ref);
    }
    return result;
}

} // namespace

std::vector<FoldResult> run_cv(const Corpus& corpus, const FoldPlan& plan,
                               const TrainConfig& train_config, const CvOptions& options,
                               const Corpus* extra_train) {
    const BackboneRegistry& registry = resolve_registry(options.registry);
    for (const auto& assignment : plan.assignments) {
        if (!registry.contains(assignment.backbone_name)) {
            throw ConfigError("fold " + std::to_string(assignment.fold_index) +
                              " references unregistered backbone '" + assignment.backbone_name +
                              "'");
        }
    }

    const std::size_t folds = plan.assignments.size();
    std::vector<FoldResult> results(folds);
    std::vector<std::exception_ptr> failures(folds);

    const int workers = std::max(1, std::min<int>(options.parallel_folds,
                                                  static_cast<int>(folds)));
    if (workers == 1) {
        for (std::size_t i = 0; i < folds; ++i) {
            try {
                results[i] = train_fold(corpus, plan.assignments[i], train_config, options,
                                        extra_train);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < folds; i = next.fetch_add(1)) {
                    try {
                        results[i] = train_fold(corpus, plan.assignments[i], train_config,
                                                options, extra_train);
                    } catch (...) {
                        failures[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }

    for (std::size_t i = 0; i < folds; ++i) {
        if (failures[i]) {
            try {
                std::rethrow_exception(failures[i]);
            } catch (const std::exception& e) {
                throw TrainingError("fold " + std::to_string(plan.assignments[i].fold_index) +
                                    " (" + plan.assignments[i].backbone_name +
                                    ") failed: " + e.what());
            }
        }
    }
    return results;
}

ProbVector soft_vote(const std::vector<ProbVector>& per_model_probs,
                     const std::vector<double>& weights) {
    if (per_model_probs.empty() || per_model_probs.size() != weights.size()) {
        throw ValidationError("soft_vote needs matching, non-empty probability/weight lists");
    }
    double weight_sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) {
            throw ValidationError("soft_vote weights must be nonnegative");
        }
        weight_sum += w;
    }
    if (weight_sum == 0.0) {
        throw ValidationError("soft_vote weights must not all be zero");
    }
    const std::size_t k = per_model_probs.front().size();
    ProbVector combined(k, 0.0);
    for (std::size_t m = 0; m < per_model_probs.size(); ++m) {
        if (per_model_probs[m].size() != k) {
            throw ValidationError("soft_vote probability vectors differ in length");
        }
        for (std::size_t i = 0; i < k; ++i) {
            combined[i] += weights[m] * per_model_probs[m][i];
        }
    }
    for (double& value : combined) {
        value /= weight_sum;
    }
    return combined;
}

EnsemblePrediction make_prediction(const std::string& id, ProbVector combined,
                                   const LabelVocabulary& vocabulary) {
    EnsemblePrediction prediction;
    prediction.id = id;
    const int best = argmax_lowest(combined);
    prediction.predicted_label = vocabulary.name_of(best);
    prediction.max_probability = combined[static_cast<std::size_t>(best)];
    prediction.combined = std::move(combined);
    return prediction;
}

std::vector<EnsemblePrediction> predict_ensemble(const std::vector<FoldModelRecord>& records,
                                                 const Corpus& corpus,
                                                 const BackboneRegistry* registry) {
    if (records.empty()) {
        throw ValidationError("predict_ensemble needs at least one fold record");
    }
    const BackboneRegistry& resolved = resolve_registry(registry);
    std::vector<std::vector<ProbVector>> per_model;
    std::vector<double> weights;
    per_model.reserve(records.size());
    weights.reserve(records.size());
    for (const auto& record : records) {
        auto model = load_checkpoint(record.checkpoint_ref, resolved);
        per_model.push_back(model->predict_corpus(corpus));
        weights.push_back(record.ensemble_weight);
    }

    std::vector<EnsemblePrediction> predictions;
    predictions.reserve(corpus.size());
    std::vector<ProbVector> stacked(records.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::size_t m = 0; m < records.size(); ++m) {
            stacked[m] = per_model[m][i];
        }
        predictions.push_back(make_prediction(corpus.samples()[i].id,
                                              soft_vote(stacked, weights),
                                              corpus.vocabulary()));
    }
    return predictions;
}

Corpus harvest_pseudo_labels(const Corpus& scored_corpus,
                             const std::vector<EnsemblePrediction>& predictions,
                             const PseudoLabelConfig& config) {
    if (!(config.threshold > 0.5 && config.threshold < 1.0)) {
        throw ValidationError("pseudo-label threshold must be in (0.5, 1)");
    }
    std::vector<Sample> harvested;
    for (const auto& prediction : predictions) {
        if (prediction.max_probability > config.threshold) {
            Sample sample = scored_corpus.sample_by_id(prediction.id);
            sample.label = prediction.predicted_label;
            harvested.push_back(std::move(sample));
        }
    }
    return Corpus(std::move(harvested), scored_corpus.vocabulary(), SplitTag::pseudo);
}

PseudoRoundResult run_pseudo_label_round(const Corpus& labeled_pool, const Corpus& test_corpus,
                                         const PseudoPlanParams& plan_params,
                                         const TrainConfig& train_config,
                                         const PseudoLabelConfig& pseudo_config,
                                         const std::vector<FoldResult>& prior_folds,
                                         const std::vector<EnsemblePrediction>& prior_predictions,
                                         const CvOptions& options) {
    PseudoRoundResult result;
    const Corpus pseudo = harvest_pseudo_labels(test_corpus, prior_predictions, pseudo_config);
    result.harvested = pseudo.size();
    result.augmented_pool_size = labeled_pool.size() + pseudo.size();
    if (pseudo.size() == 0) {
        std::cerr << "warning: empty pseudo-label harvest at threshold "
                  << pseudo_config.threshold << "; retrain skipped\n";
        result.retrained = false;
        result.folds = prior_folds;
        result.predictions = prior_predictions;
        return result;
    }

    // Folds are planned over the labeled pool only; pseudo samples join every
    // fold's training split and never a validation split.
    result.plan = plan_folds(labeled_pool, plan_params.k_folds, plan_params.strategy,
                             plan_params.backbones, plan_params.seed);
    result.retrained = true;
    result.folds = run_cv(labeled_pool, result.plan, train_config, options, &pseudo);

    std::vector<FoldModelRecord> records;
    records.reserve(result.folds.size());
    for (const auto& fold : result.folds) {
        records.push_back(fold.record);
    }
    result.predictions = predict_ensemble(records, test_corpus, options.registry);
    return result;
}

std::string manifest_to_json(const std::vector<FoldModelRecord>& records) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& record : records) {
        doc.push_back({{"fold_index", record.fold_index},
                       {"backbone", record.backbone_name},
                       {"ensemble_weight", record.ensemble_weight},
                       {"checkpoint", record.checkpoint_ref}});
    }
    return doc.dump(2);
}

void write_predictions_csv(const std::string& path,
                           const std::vector<EnsemblePrediction>& predictions) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write predictions csv: " + path);
    }
    out << "id,label\n";
    for (const auto& prediction : predictions) {
        out << prediction.id << ',' << prediction.predicted_label << '\n';
    }
}

void write_predictions_json(const std::string& path,
                            const std::vector<EnsemblePrediction>& predictions,
                            const LabelVocabulary& vocabulary) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& prediction : predictions) {
        nlohmann::json probs = nlohmann::json::object();
        for (int c = 0; c < vocabulary.size(); ++c) {
            probs[vocabulary.name_of(c)] = prediction.combined[static_cast<std::size_t>(c)];
        }
        doc.push_back({{"id", prediction.id},
                       {"label", prediction.predicted_label},
                       {"max_probability", prediction.max_probability},
                       {"probabilities", probs}});
    }
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write predictions json: " + path);
    }
    out << doc.dump(2) << '\n';
}

} // namespace fakenews

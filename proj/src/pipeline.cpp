#include "fakenews/pipeline.hpp"

#include <fstream>
#include <iostream>
#include <unordered_map>

#include "fakenews/errors.hpp"
#include "fakenews/evaluation.hpp"
#include "fakenews/render.hpp"
#include "fakenews/reports.hpp"
#include "fakenews/strings.hpp"

namespace fakenews {

namespace {

void write_resolved_config(const RunConfig& config) {
    ensure_directory(config.out_dir);
    write_text_file(config.out_dir + "/resolved_config.json", config.to_json().dump(2));
}

Corpus load_required(const std::string& path, const char* what, SplitTag tag,
                     const LabelVocabulary& vocabulary) {
    if (path.empty()) {
        throw ConfigError(std::string("missing required data path: ") + what);
    }
    return load_corpus(path, tag, vocabulary);
}

/// train + val, plus the external corpus when the flag enables it.
Corpus load_training_pool(const RunConfig& config) {
    const LabelVocabulary vocabulary = config.vocabulary();
    std::vector<Corpus> parts;
    parts.push_back(load_required(config.train_path, "train", SplitTag::train, vocabulary));
    parts.push_back(load_required(config.val_path, "val", SplitTag::val, vocabulary));
    if (config.use_external) {
        parts.push_back(
            load_required(config.external_path, "external", SplitTag::external, vocabulary));
    }
    return merge(parts);
}

std::vector<std::string> true_labels_of(const Corpus& corpus) {
    std::vector<std::string> labels;
    labels.reserve(corpus.size());
    for (const auto& sample : corpus.samples()) {
        labels.push_back(*sample.label);
    }
    return labels;
}

void write_manifest(const RunConfig& config, const std::vector<FoldResult>& folds,
                    const nlohmann::json& pseudo_info) {
    nlohmann::json doc;
    doc["k_folds"] = config.k_folds;
    doc["strategy"] = to_string(config.strategy);
    doc["seed"] = config.seed;
    doc["folds"] = nlohmann::json::array();
    for (const auto& fold : folds) {
        doc["folds"].push_back({{"fold_index", fold.record.fold_index},
                                {"backbone", fold.record.backbone_name},
                                {"ensemble_weight", fold.record.ensemble_weight},
                                {"checkpoint", fold.record.checkpoint_ref}});
    }
    if (!pseudo_info.is_null()) {
        doc["pseudo"] = pseudo_info;
    }
    write_text_file(config.out_dir + "/manifest.json", doc.dump(2));
}

void write_fold_curves(const std::vector<FoldResult>& folds, const std::string& out_dir) {
    for (const auto& fold : folds) {
        const std::string stem =
            out_dir + "/curve_fold_" + std::to_string(fold.record.fold_index);
        write_text_file(stem + ".json", fold.history.to_json_string());
        fold.history.write_curve_csv(stem + ".csv");
        std::vector<double> train_loss, val_loss, train_f1, val_f1;
        for (const auto& stats : fold.history.epochs) {
            train_loss.push_back(stats.train_loss);
            val_loss.push_back(stats.val_loss);
            train_f1.push_back(stats.train_f1);
            val_f1.push_back(stats.val_f1);
        }
        render_curves(stem + ".ppm", train_loss, val_loss, train_f1, val_f1);
    }
}

void write_ensemble_outputs(const RunConfig& config, const Corpus& test_corpus,
                            const std::vector<FoldResult>& folds,
                            const std::vector<EnsemblePrediction>& predictions) {
    write_predictions_csv(config.out_dir + "/predictions.csv", predictions);
    write_predictions_json(config.out_dir + "/predictions.json", predictions,
                           test_corpus.vocabulary());
    write_fold_curves(folds, config.out_dir);
    if (test_corpus.fully_labeled()) {
        std::vector<std::string> predicted;
        predicted.reserve(predictions.size());
        for (const auto& prediction : predictions) {
            predicted.push_back(prediction.predicted_label);
        }
        const MetricsReport report =
            metrics(true_labels_of(test_corpus), predicted, test_corpus.vocabulary());
        write_text_file(config.out_dir + "/metrics.json", report.to_json_string());
        render_heatmap(config.out_dir + "/confusion.ppm", report.confusion.cells);
        std::cout << "test_weighted_f1=" << report.weighted_f1
                  << " accuracy=" << report.accuracy << '\n';
    } else {
        std::cout << "test corpus has no labels; wrote predictions only\n";
    }
}

struct CvRun {
    Corpus pool;
    Corpus test_corpus;
    std::vector<FoldResult> folds;
    std::vector<EnsemblePrediction> predictions;
};

CvRun execute_cv(const RunConfig& config) {
    CvRun run{load_training_pool(config),
              load_required(config.test_path, "test", SplitTag::test, config.vocabulary()),
              {},
              {}};

    const FoldPlan plan =
        plan_folds(run.pool, config.k_folds, config.strategy, config.backbones, config.seed);
    write_text_file(config.out_dir + "/fold_plan.json", plan.to_json_string());

    CvOptions options;
    options.checkpoint_dir = config.out_dir + "/checkpoints";
    options.parallel_folds = config.parallel_folds;
    options.clean_config = config.clean;
    ensure_directory(options.checkpoint_dir);

    TrainConfig train_config = config.backbone_train;
    train_config.seed = config.seed;
    run.folds = run_cv(run.pool, plan, train_config, options);

    std::vector<FoldModelRecord> records;
    records.reserve(run.folds.size());
    for (const auto& fold : run.folds) {
        records.push_back(fold.record);
    }
    run.predictions = predict_ensemble(records, run.test_corpus);
    return run;
}

} // namespace

void cmd_eda(const RunConfig& config) {
    write_resolved_config(config);
    const LabelVocabulary vocabulary = config.vocabulary();
    const auto stopwords = config.stopwords_path.empty() ? default_stopwords()
                                                         : load_stopwords(config.stopwords_path);
    bool wrote_any = false;
    const std::pair<const char*, std::pair<std::string, SplitTag>> splits[] = {
        {"train", {config.train_path, SplitTag::train}},
        {"val", {config.val_path, SplitTag::val}},
        {"test", {config.test_path, SplitTag::test}},
        {"external", {config.external_path, SplitTag::external}},
    };
    for (const auto& [name, entry] : splits) {
        const auto& [path, tag] = entry;
        if (path.empty()) {
            continue;
        }
        const Corpus corpus = load_corpus(path, tag, vocabulary);
        const EdaReport report =
            eda_report(corpus, static_cast<std::size_t>(config.eda_top_n), stopwords);
        emit_eda_report(report, name, config.out_dir);
        wrote_any = true;
    }
    if (!wrote_any) {
        throw ConfigError("eda needs at least one data path (train/val/test/external)");
    }
}

void cmd_train_textrnn(const RunConfig& config) {
    write_resolved_config(config);
    if (config.vectors_path.empty()) {
        throw ConfigError("train-textrnn requires data.vectors (pretrained vector file)");
    }
    const Corpus pool = load_training_pool(config);
    const auto [train_corpus, val_corpus] =
        split_holdout(pool, config.holdout_train_fraction, config.seed);

    const TokenVocabulary vocab =
        fit_vocabulary(train_corpus, config.clean, config.min_token_frequency);
    write_text_file(config.out_dir + "/vocabulary.json", vocab.to_json_string());
    Eigen::MatrixXd embeddings =
        load_pretrained_vectors(config.vectors_path, vocab, config.textrnn.embedding_dim,
                                config.seed);

    TextRnnConfig rnn_config = config.textrnn;
    rnn_config.num_classes = static_cast<int>(config.classes.size());
    TextRnnClassifier model(rnn_config, config.clean, vocab, std::move(embeddings), config.seed);

    TrainConfig train_config = config.textrnn_train;
    train_config.seed = config.seed;
    const TrainRecord record = train(model, train_corpus, val_corpus, train_config);
    save_checkpoint(model, config.out_dir + "/textrnn.ckpt.json");
    write_text_file(config.out_dir + "/train_record.json", record.to_json_string());

    Corpus eval_corpus = val_corpus;
    if (!config.test_path.empty()) {
        const Corpus test_corpus =
            load_corpus(config.test_path, SplitTag::test, config.vocabulary());
        const auto probs = model.predict_corpus(test_corpus);
        std::vector<EnsemblePrediction> predictions;
        predictions.reserve(probs.size());
        for (std::size_t i = 0; i < probs.size(); ++i) {
            predictions.push_back(make_prediction(test_corpus.samples()[i].id, probs[i],
                                                  test_corpus.vocabulary()));
        }
        write_predictions_csv(config.out_dir + "/predictions.csv", predictions);
        if (test_corpus.fully_labeled()) {
            eval_corpus = test_corpus;
        }
    }

    const auto eval_probs = model.predict_corpus(eval_corpus);
    std::vector<std::string> predicted;
    predicted.reserve(eval_probs.size());
    for (const auto& probs : eval_probs) {
        predicted.push_back(eval_corpus.vocabulary().name_of(argmax_lowest(probs)));
    }
    const MetricsReport report =
        metrics(true_labels_of(eval_corpus), predicted, eval_corpus.vocabulary());
    emit_reports(report, {record}, config.out_dir);
    std::cout << "eval_split=" << to_string(eval_corpus.split_tag())
              << " weighted_f1=" << report.weighted_f1 << " accuracy=" << report.accuracy
              << " best_epoch=" << record.best_epoch << '\n';
}

void cmd_cv(const RunConfig& config) {
    write_resolved_config(config);
    const CvRun run = execute_cv(config);
    write_manifest(config, run.folds, nlohmann::json());
    write_ensemble_outputs(config, run.test_corpus, run.folds, run.predictions);
}

void cmd_pseudo(const RunConfig& config) {
    write_resolved_config(config);
    const CvRun run = execute_cv(config);

    PseudoPlanParams plan_params;
    plan_params.k_folds = config.k_folds;
    plan_params.strategy = config.strategy;
    plan_params.backbones = config.backbones;
    plan_params.seed = config.seed;

    TrainConfig train_config = config.backbone_train;
    train_config.seed = config.seed;

    // Each round harvests from the latest predictions and retrains from
    // scratch on pool + fresh harvest; an empty harvest stops the loop.
    std::vector<FoldResult> folds = run.folds;
    std::vector<EnsemblePrediction> predictions = run.predictions;
    PseudoRoundResult round;
    int rounds_run = 0;
    for (int r = 1; r <= config.pseudo.rounds; ++r) {
        CvOptions options;
        options.checkpoint_dir = config.out_dir + "/checkpoints_pseudo_round" + std::to_string(r);
        options.parallel_folds = config.parallel_folds;
        options.clean_config = config.clean;
        ensure_directory(options.checkpoint_dir);

        round = run_pseudo_label_round(run.pool, run.test_corpus, plan_params, train_config,
                                       config.pseudo, folds, predictions, options);
        folds = round.folds;
        predictions = round.predictions;
        if (!round.retrained) {
            break;
        }
        ++rounds_run;
    }

    nlohmann::json pseudo_info = {{"threshold", config.pseudo.threshold},
                                  {"rounds", config.pseudo.rounds},
                                  {"rounds_run", rounds_run},
                                  {"harvested", round.harvested},
                                  {"retrained", round.retrained},
                                  {"augmented_pool_size", round.augmented_pool_size}};
    write_manifest(config, folds, pseudo_info);
    write_ensemble_outputs(config, run.test_corpus, folds, predictions);
    std::cout << "pseudo_harvested=" << round.harvested << " rounds_run=" << rounds_run << '\n';
}

void cmd_evaluate(const RunConfig& config, const std::string& predictions_csv,
                  const std::string& gold_tsv) {
    write_resolved_config(config);
    const Corpus gold = load_corpus(gold_tsv, SplitTag::test, config.vocabulary());
    if (!gold.fully_labeled()) {
        throw ConfigError("gold file has unlabeled rows: " + gold_tsv);
    }

    std::ifstream in(predictions_csv);
    if (!in) {
        throw ConfigError("cannot open predictions file: " + predictions_csv);
    }
    std::unordered_map<std::string, std::string> predicted_by_id;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || (line_no == 1 && line == "id,label")) {
            continue;
        }
        const auto fields = split_on(line, ',');
        if (fields.size() != 2) {
            throw ParseError("prediction row needs id,label", line_no);
        }
        predicted_by_id[fields[0]] = to_lower_copy(trim_copy(fields[1]));
    }

    std::vector<std::string> truth;
    std::vector<std::string> predicted;
    for (const auto& sample : gold.samples()) {
        auto it = predicted_by_id.find(sample.id);
        if (it == predicted_by_id.end()) {
            throw ConfigError("predictions file is missing id: " + sample.id);
        }
        truth.push_back(*sample.label);
        predicted.push_back(it->second);
    }
    const MetricsReport report = metrics(truth, predicted, gold.vocabulary());
    emit_reports(report, {}, config.out_dir);
    std::cout << "weighted_f1=" << report.weighted_f1 << " accuracy=" << report.accuracy << '\n';
}

} // namespace fakenews

#include "fakenews/run_config.hpp"

#include <fstream>

#include "fakenews/errors.hpp"
#include "fakenews/toy_backbone.hpp"

namespace fakenews {

namespace {

std::string to_string(ScheduleMode mode) {
    return mode == ScheduleMode::warmup_cosine ? "warmup_cosine" : "step_decay";
}

ScheduleMode schedule_mode_from_string(const std::string& name) {
    if (name == "warmup_cosine") {
        return ScheduleMode::warmup_cosine;
    }
    if (name == "step_decay") {
        return ScheduleMode::step_decay;
    }
    throw ConfigError("unknown schedule mode: " + name);
}

std::string to_string(OptimizerKind kind) {
    return kind == OptimizerKind::sgd ? "sgd" : "adamw";
}

OptimizerKind optimizer_from_string(const std::string& name) {
    if (name == "sgd") {
        return OptimizerKind::sgd;
    }
    if (name == "adamw") {
        return OptimizerKind::adamw;
    }
    throw ConfigError("unknown optimizer: " + name);
}

nlohmann::json schedule_to_json(const ScheduleConfig& schedule) {
    return {{"mode", to_string(schedule.mode)},
            {"floor_lr", schedule.floor_lr},
            {"peak_lr", schedule.peak_lr},
            {"warmup_epochs", schedule.warmup_epochs},
            {"decay_epochs", schedule.decay_epochs},
            {"base_lr", schedule.base_lr},
            {"decay_factor", schedule.decay_factor},
            {"decay_period_epochs", schedule.decay_period_epochs}};
}

ScheduleConfig schedule_from_json(const nlohmann::json& doc, ScheduleConfig defaults) {
    ScheduleConfig schedule = defaults;
    if (doc.contains("mode")) {
        schedule.mode = schedule_mode_from_string(doc.at("mode").get<std::string>());
    }
    schedule.floor_lr = doc.value("floor_lr", defaults.floor_lr);
    schedule.peak_lr = doc.value("peak_lr", defaults.peak_lr);
    schedule.warmup_epochs = doc.value("warmup_epochs", defaults.warmup_epochs);
    schedule.decay_epochs = doc.value("decay_epochs", defaults.decay_epochs);
    schedule.base_lr = doc.value("base_lr", defaults.base_lr);
    schedule.decay_factor = doc.value("decay_factor", defaults.decay_factor);
    schedule.decay_period_epochs = doc.value("decay_period_epochs", defaults.decay_period_epochs);
    return schedule;
}

nlohmann::json train_to_json(const TrainConfig& config) {
    return {{"epochs", config.epochs},
            {"batch_size", config.batch_size},
            {"schedule", schedule_to_json(config.schedule)},
            {"smoothing_epsilon", config.smoothing.epsilon},
            {"optimizer", to_string(config.optimizer)},
            {"weight_decay", config.weight_decay},
            {"clip_norm", config.clip_norm}};
}

TrainConfig train_from_json(const nlohmann::json& doc, TrainConfig defaults) {
    TrainConfig config = defaults;
    config.epochs = doc.value("epochs", defaults.epochs);
    config.batch_size = doc.value("batch_size", defaults.batch_size);
    if (doc.contains("schedule")) {
        config.schedule = schedule_from_json(doc.at("schedule"), defaults.schedule);
    }
    config.smoothing.epsilon = doc.value("smoothing_epsilon", defaults.smoothing.epsilon);
    if (doc.contains("optimizer")) {
        config.optimizer = optimizer_from_string(doc.at("optimizer").get<std::string>());
    }
    config.weight_decay = doc.value("weight_decay", defaults.weight_decay);
    config.clip_norm = doc.value("clip_norm", defaults.clip_norm);
    return config;
}

} // namespace

RunConfig::RunConfig() {
    backbones = toy_backbone_names();

    backbone_train.epochs = 12;
    backbone_train.batch_size = 256;
    backbone_train.schedule.mode = ScheduleMode::warmup_cosine;
    backbone_train.smoothing.epsilon = 0.01;
    backbone_train.optimizer = OptimizerKind::adamw;
    backbone_train.clip_norm = 1.0;

    textrnn_train.epochs = 120;
    textrnn_train.batch_size = 128;
    textrnn_train.schedule.mode = ScheduleMode::step_decay;
    textrnn_train.smoothing.epsilon = 0.0; // smoothing off for the recurrent baseline
    textrnn_train.optimizer = OptimizerKind::sgd;
    textrnn_train.clip_norm = 0.0;
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
    RunConfig defaults;
    RunConfig config;
    if (doc.contains("data")) {
        const auto& data = doc.at("data");
        config.train_path = data.value("train", "");
        config.val_path = data.value("val", "");
        config.test_path = data.value("test", "");
        config.external_path = data.value("external", "");
        config.vectors_path = data.value("vectors", "");
    }
    config.use_external = doc.value("use_external", defaults.use_external);
    config.classes = doc.value("classes", defaults.classes);
    if (doc.contains("clean")) {
        const auto& clean_doc = doc.at("clean");
        config.clean.strip_urls = clean_doc.value("strip_urls", defaults.clean.strip_urls);
        config.clean.lowercase = clean_doc.value("lowercase", defaults.clean.lowercase);
        config.clean.max_length = clean_doc.value("max_length", defaults.clean.max_length);
    }
    config.stopwords_path = doc.value("stopwords", defaults.stopwords_path);
    config.eda_top_n = doc.value("eda_top_n", defaults.eda_top_n);

    if (doc.contains("folds")) {
        const auto& folds = doc.at("folds");
        config.k_folds = folds.value("k", defaults.k_folds);
        if (folds.contains("strategy")) {
            config.strategy = fold_strategy_from_string(folds.at("strategy").get<std::string>());
        }
        config.backbones = folds.value("backbones", defaults.backbones);
    }

    if (doc.contains("backbone_train")) {
        config.backbone_train = train_from_json(doc.at("backbone_train"), defaults.backbone_train);
    }
    if (doc.contains("textrnn_train")) {
        config.textrnn_train = train_from_json(doc.at("textrnn_train"), defaults.textrnn_train);
    }
    if (doc.contains("textrnn")) {
        const auto& rnn = doc.at("textrnn");
        config.textrnn.embedding_dim = rnn.value("embedding_dim", defaults.textrnn.embedding_dim);
        config.textrnn.hidden_size = rnn.value("hidden_size", defaults.textrnn.hidden_size);
        config.textrnn.dropout = rnn.value("dropout", defaults.textrnn.dropout);
    }
    config.min_token_frequency = doc.value("min_token_frequency", defaults.min_token_frequency);
    config.holdout_train_fraction =
        doc.value("holdout_train_fraction", defaults.holdout_train_fraction);

    if (doc.contains("pseudo")) {
        const auto& pseudo = doc.at("pseudo");
        config.pseudo.threshold = pseudo.value("threshold", defaults.pseudo.threshold);
        config.pseudo.rounds = pseudo.value("rounds", defaults.pseudo.rounds);
    }
    config.seed = doc.value("seed", defaults.seed);
    config.out_dir = doc.value("out_dir", defaults.out_dir);
    config.parallel_folds = doc.value("parallel_folds", defaults.parallel_folds);
    return config;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed config file " + path + ": " + e.what());
    }
    return from_json(doc);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json doc;
    doc["data"] = {{"train", train_path},
                   {"val", val_path},
                   {"test", test_path},
                   {"external", external_path},
                   {"vectors", vectors_path}};
    doc["use_external"] = use_external;
    doc["classes"] = classes;
    doc["clean"] = {{"strip_urls", clean.strip_urls},
                    {"lowercase", clean.lowercase},
                    {"max_length", clean.max_length}};
    doc["stopwords"] = stopwords_path;
    doc["eda_top_n"] = eda_top_n;
    doc["folds"] = {{"k", k_folds},
                    {"strategy", to_string(strategy)},
                    {"backbones", backbones}};
    doc["backbone_train"] = train_to_json(backbone_train);
    doc["textrnn_train"] = train_to_json(textrnn_train);
    doc["textrnn"] = {{"embedding_dim", textrnn.embedding_dim},
                      {"hidden_size", textrnn.hidden_size},
                      {"dropout", textrnn.dropout}};
    doc["min_token_frequency"] = min_token_frequency;
    doc["holdout_train_fraction"] = holdout_train_fraction;
    doc["pseudo"] = {{"threshold", pseudo.threshold}, {"rounds", pseudo.rounds}};
    doc["seed"] = seed;
    doc["out_dir"] = out_dir;
    doc["parallel_folds"] = parallel_folds;
    return doc;
}

} // namespace fakenews

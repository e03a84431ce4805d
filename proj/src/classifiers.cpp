#include "fakenews/classifiers.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fakenews/errors.hpp"
#include "fakenews/rng.hpp"
#include "fakenews/text_rnn.hpp"
#include "fakenews/toy_backbone.hpp"

namespace fakenews {

bool on_probability_simplex(const ProbVector& probs, double tolerance) {
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0 || p > 1.0) {
            return false;
        }
        sum += p;
    }
    return std::abs(sum - 1.0) <= tolerance;
}

ProbVector softmax_row(const Eigen::RowVectorXd& logits) {
    const double peak = logits.maxCoeff();
    Eigen::RowVectorXd exps = (logits.array() - peak).exp();
    exps /= exps.sum();
    return ProbVector(exps.data(), exps.data() + exps.size());
}

std::string to_string(ClassifierKind kind) {
    switch (kind) {
    case ClassifierKind::text_rnn: return "text_rnn";
    case ClassifierKind::backbone: return "backbone";
    case ClassifierKind::toy: return "toy";
    }
    return "unknown";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
    for (ClassifierKind kind :
         {ClassifierKind::text_rnn, ClassifierKind::backbone, ClassifierKind::toy}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw ValidationError("unknown classifier kind: " + name);
}

void TextClassifier::zero_grad() {
    for (ParamTensor* tensor : parameters()) {
        tensor->grad.setZero();
    }
}

std::vector<ProbVector> TextClassifier::eval_proba(std::span<const PreparedInput> batch) {
    Eigen::MatrixXd logits = forward(batch, /*training=*/false);
    std::vector<ProbVector> probs;
    probs.reserve(batch.size());
    for (Eigen::Index row = 0; row < logits.rows(); ++row) {
        probs.push_back(softmax_row(logits.row(row)));
    }
    return probs;
}

std::vector<ProbVector> TextClassifier::predict_proba(std::span<const PreparedInput> batch) {
    if (!trained_) {
        throw std::logic_error("predict_proba called on an untrained model");
    }
    return eval_proba(batch);
}

std::vector<ProbVector> TextClassifier::predict_corpus(const Corpus& corpus) {
    const auto inputs = prepare(corpus);
    return predict_proba(std::span<const PreparedInput>(inputs));
}

BackboneClassifier::BackboneClassifier(std::unique_ptr<BackboneEncoder> encoder,
                                       ClassifierSpec spec, int num_classes,
                                       CleanConfig clean_config, std::uint64_t seed)
    : encoder_(std::move(encoder)), spec_(std::move(spec)), num_classes_(num_classes),
      clean_config_(clean_config),
      head_weight_("head.weight", num_classes, encoder_->output_dim()),
      head_bias_("head.bias", num_classes, 1) {
    SeededRng rng(mix_seed(seed, 0x4eadULL));
    const double scale = 1.0 / std::sqrt(static_cast<double>(encoder_->output_dim()));
    for (Eigen::Index r = 0; r < head_weight_.value.rows(); ++r) {
        for (Eigen::Index c = 0; c < head_weight_.value.cols(); ++c) {
            head_weight_.value(r, c) = rng.next_double(-scale, scale);
        }
    }
}

Eigen::MatrixXd BackboneClassifier::forward(std::span<const PreparedInput> batch, bool training) {
    Eigen::MatrixXd pooled = encoder_->encode(batch, training);
    if (training) {
        pooled_cache_ = pooled;
        cache_valid_ = true;
    } else {
        cache_valid_ = false;
    }
    Eigen::MatrixXd logits = pooled * head_weight_.value.transpose();
    logits.rowwise() += head_bias_.value.transpose().row(0);
    return logits;
}

void BackboneClassifier::backward(const Eigen::MatrixXd& grad_logits) {
    if (!cache_valid_ || pooled_cache_.rows() != grad_logits.rows()) {
        throw ValidationError("backward called without a matching training-mode forward");
    }
    head_weight_.grad += grad_logits.transpose() * pooled_cache_;
    head_bias_.grad += grad_logits.colwise().sum().transpose();
    encoder_->backward(grad_logits * head_weight_.value);
}

std::vector<ParamTensor*> BackboneClassifier::parameters() {
    std::vector<ParamTensor*> tensors = encoder_->parameters();
    tensors.push_back(&head_weight_);
    tensors.push_back(&head_bias_);
    return tensors;
}

std::vector<PreparedInput> BackboneClassifier::prepare(const Corpus& corpus) const {
    return prepare_inputs(corpus, clean_config_, nullptr);
}

nlohmann::json BackboneClassifier::checkpoint_json() const {
    nlohmann::json doc;
    doc["format"] = "fakenews-checkpoint-v1";
    doc["kind"] = "backbone";
    doc["backbone_name"] = spec_.backbone_name;
    doc["num_classes"] = num_classes_;
    doc["clean_config"] = detail::clean_config_to_json(clean_config_);
    doc["hyperparameters"] = spec_.hyperparameters;
    doc["encoder_config"] = encoder_->config_json();
    std::vector<const ParamTensor*> tensors;
    for (auto* tensor : const_cast<BackboneClassifier*>(this)->parameters()) {
        tensors.push_back(tensor);
    }
    doc["tensors"] = detail::tensors_to_json(tensors);
    return doc;
}

void BackboneRegistry::add(const std::string& name, Factory factory) {
    factories_[name] = std::move(factory);
}

bool BackboneRegistry::contains(const std::string& name) const {
    return factories_.count(name) > 0;
}

std::vector<std::string> BackboneRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(factories_.size());
    for (const auto& [name, factory] : factories_) {
        out.push_back(name);
    }
    return out;
}

std::unique_ptr<BackboneEncoder> BackboneRegistry::make(const std::string& name,
                                                        const ClassifierSpec& spec,
                                                        std::uint64_t seed) const {
    auto it = factories_.find(name);
    if (it == factories_.end()) {
        std::ostringstream msg;
        msg << "unknown backbone '" << name << "'; registered backbones:";
        for (const auto& available : names()) {
            msg << ' ' << available;
        }
        throw ConfigError(msg.str());
    }
    return it->second(spec, seed);
}

BackboneRegistry& backbone_registry() {
    static BackboneRegistry registry = [] {
        BackboneRegistry built;
        register_toy_backbones(built);
        return built;
    }();
    return registry;
}

std::unique_ptr<BackboneClassifier> make_backbone_classifier(const ClassifierSpec& spec,
                                                             int num_classes,
                                                             const CleanConfig& clean_config,
                                                             std::uint64_t seed,
                                                             const BackboneRegistry& registry) {
    if (spec.backbone_name.empty()) {
        throw ConfigError("backbone classifier requires a backbone_name");
    }
    auto encoder = registry.make(spec.backbone_name, spec, seed);
    return std::make_unique<BackboneClassifier>(std::move(encoder), spec, num_classes,
                                                clean_config, seed);
}

void save_checkpoint(const TextClassifier& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write checkpoint: " + path);
    }
    out << model.checkpoint_json().dump(2) << '\n';
    if (!out) {
        throw ConfigError("failed writing checkpoint: " + path);
    }
}

std::unique_ptr<TextClassifier> load_checkpoint(const std::string& path,
                                                const BackboneRegistry& registry) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open checkpoint: " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed checkpoint " + path + ": " + e.what());
    }
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "text_rnn") {
        return TextRnnClassifier::from_checkpoint_json(doc);
    }
    if (kind == "backbone") {
        ClassifierSpec spec;
        spec.kind = ClassifierKind::backbone;
        spec.backbone_name = doc.at("backbone_name").get<std::string>();
        spec.hyperparameters =
            doc.at("hyperparameters").get<std::map<std::string, double>>();
        CleanConfig clean_config = detail::clean_config_from_json(doc.at("clean_config"));
        auto model = make_backbone_classifier(spec, doc.at("num_classes").get<int>(),
                                              clean_config, /*seed=*/0, registry);
        detail::tensors_from_json(doc.at("tensors"), model->parameters());
        model->mark_trained();
        return model;
    }
    throw ParseError("unknown checkpoint kind: " + kind);
}

namespace detail {

nlohmann::json tensors_to_json(const std::vector<const ParamTensor*>& tensors) {
    nlohmann::json doc = nlohmann::json::object();
    for (const ParamTensor* tensor : tensors) {
        std::vector<double> data;
        data.reserve(static_cast<std::size_t>(tensor->value.size()));
        for (Eigen::Index r = 0; r < tensor->value.rows(); ++r) {
            for (Eigen::Index c = 0; c < tensor->value.cols(); ++c) {
                data.push_back(tensor->value(r, c));
            }
        }
        doc[tensor->name] = {{"rows", tensor->value.rows()},
                             {"cols", tensor->value.cols()},
                             {"data", std::move(data)}};
    }
    return doc;
}

void tensors_from_json(const nlohmann::json& doc, const std::vector<ParamTensor*>& tensors) {
    for (ParamTensor* tensor : tensors) {
        if (!doc.contains(tensor->name)) {
            throw ParseError("checkpoint is missing tensor: " + tensor->name);
        }
        const auto& entry = doc.at(tensor->name);
        const Eigen::Index rows = entry.at("rows").get<Eigen::Index>();
        const Eigen::Index cols = entry.at("cols").get<Eigen::Index>();
        if (rows != tensor->value.rows() || cols != tensor->value.cols()) {
            throw ParseError("checkpoint tensor " + tensor->name +
                             " has mismatched shape (model/vocabulary mismatch)");
        }
        const auto data = entry.at("data").get<std::vector<double>>();
        if (data.size() != static_cast<std::size_t>(rows * cols)) {
            throw ParseError("checkpoint tensor " + tensor->name + " has wrong element count");
        }
        std::size_t i = 0;
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                tensor->value(r, c) = data[i++];
            }
        }
    }
}

nlohmann::json clean_config_to_json(const CleanConfig& config) {
    return {{"strip_urls", config.strip_urls},
            {"lowercase", config.lowercase},
            {"max_length", config.max_length}};
}

CleanConfig clean_config_from_json(const nlohmann::json& doc) {
    CleanConfig config;
    config.strip_urls = doc.at("strip_urls").get<bool>();
    config.lowercase = doc.at("lowercase").get<bool>();
    config.max_length = doc.at("max_length").get<int>();
    return config;
}

} // namespace detail

} // namespace fakenews

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fakenews/corpus.hpp"
#include "fakenews/preprocess.hpp"

namespace fakenews {

/// Per-class probabilities; entries in [0,1] summing to 1 within 1e-6.
using ProbVector = std::vector<double>;

bool on_probability_simplex(const ProbVector& probs, double tolerance = 1e-6);

/// Numerically stable softmax of one logit row.
ProbVector softmax_row(const Eigen::RowVectorXd& logits);

enum class ClassifierKind { text_rnn, backbone, toy };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::backbone;
    std::string backbone_name; // required for backbone/toy kinds
    std::map<std::string, double> hyperparameters;
};

/// A named parameter matrix with its gradient accumulator.
struct ParamTensor {
    std::string name;
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;

    ParamTensor(std::string tensor_name, Eigen::Index rows, Eigen::Index cols)
        : name(std::move(tensor_name)), value(Eigen::MatrixXd::Zero(rows, cols)),
          grad(Eigen::MatrixXd::Zero(rows, cols)) {}
};

/// Common contract for all classifier kinds. forward/backward operate on
/// batches of PreparedInput; each kind reads the representation it needs
/// (token ids for the recurrent model, cleaned strings for backbones).
class TextClassifier {
public:
    virtual ~TextClassifier() = default;

    virtual std::string kind() const = 0;
    virtual int num_classes() const = 0;

    /// Returns batch-size x num_classes logits. In training mode dropout is
    /// live and activations are cached for the next backward() call.
    virtual Eigen::MatrixXd forward(std::span<const PreparedInput> batch, bool training) = 0;

    /// Accumulates parameter gradients for the last training-mode forward.
    virtual void backward(const Eigen::MatrixXd& grad_logits) = 0;

    virtual std::vector<ParamTensor*> parameters() = 0;

    /// Model-specific preprocessing of a raw corpus.
    virtual std::vector<PreparedInput> prepare(const Corpus& corpus) const = 0;

    virtual nlohmann::json checkpoint_json() const = 0;

    void zero_grad();

    /// Evaluation-mode probabilities; requires a trained model.
    std::vector<ProbVector> predict_proba(std::span<const PreparedInput> batch);
    std::vector<ProbVector> predict_corpus(const Corpus& corpus);

    /// Same computation without the trained-state guard; used by the training
    /// loop for per-epoch validation.
    std::vector<ProbVector> eval_proba(std::span<const PreparedInput> batch);

    bool is_trained() const { return trained_; }
    void mark_trained() { trained_ = true; }

private:
    bool trained_ = false;
};

/// A pretrained (or toy) text encoder: cleaned strings in, pooled vectors out.
/// All parameters are trainable.
class BackboneEncoder {
public:
    virtual ~BackboneEncoder() = default;

    virtual std::string name() const = 0;
    virtual int output_dim() const = 0;
    virtual Eigen::MatrixXd encode(std::span<const PreparedInput> batch, bool training) = 0;
    virtual void backward(const Eigen::MatrixXd& grad_pooled) = 0;
    virtual std::vector<ParamTensor*> parameters() = 0;
    virtual nlohmann::json config_json() const = 0;
};

/// Encoder plus a trainable affine head mapping the pooled vector to logits.
class BackboneClassifier : public TextClassifier {
public:
    BackboneClassifier(std::unique_ptr<BackboneEncoder> encoder, ClassifierSpec spec,
                       int num_classes, CleanConfig clean_config, std::uint64_t seed);

    std::string kind() const override { return "backbone"; }
    int num_classes() const override { return num_classes_; }
    const std::string& backbone_name() const { return spec_.backbone_name; }

    Eigen::MatrixXd forward(std::span<const PreparedInput> batch, bool training) override;
    void backward(const Eigen::MatrixXd& grad_logits) override;
    std::vector<ParamTensor*> parameters() override;
    std::vector<PreparedInput> prepare(const Corpus& corpus) const override;
    nlohmann::json checkpoint_json() const override;

private:
    std::unique_ptr<BackboneEncoder> encoder_;
    ClassifierSpec spec_;
    int num_classes_;
    CleanConfig clean_config_;
    ParamTensor head_weight_;
    ParamTensor head_bias_;
    Eigen::MatrixXd pooled_cache_;
    bool cache_valid_ = false;
};

/// Maps backbone names to encoder factories, so real pretrained encoders and
/// toy stand-ins are interchangeable configuration.
class BackboneRegistry {
public:
    using Factory = std::function<std::unique_ptr<BackboneEncoder>(const ClassifierSpec& spec,
                                                                   std::uint64_t seed)>;

    void add(const std::string& name, Factory factory);
    bool contains(const std::string& name) const;
    std::vector<std::string> names() const; // sorted
    std::unique_ptr<BackboneEncoder> make(const std::string& name, const ClassifierSpec& spec,
                                          std::uint64_t seed) const;

private:
    std::map<std::string, Factory> factories_;
};

/// Process-wide registry preloaded with the five toy variants.
BackboneRegistry& backbone_registry();

std::unique_ptr<BackboneClassifier> make_backbone_classifier(const ClassifierSpec& spec,
                                                             int num_classes,
                                                             const CleanConfig& clean_config,
                                                             std::uint64_t seed,
                                                             const BackboneRegistry& registry);

void save_checkpoint(const TextClassifier& model, const std::string& path);
std::unique_ptr<TextClassifier> load_checkpoint(const std::string& path,
                                                const BackboneRegistry& registry);

namespace detail {
nlohmann::json tensors_to_json(const std::vector<const ParamTensor*>& tensors);
void tensors_from_json(const nlohmann::json& doc, const std::vector<ParamTensor*>& tensors);
nlohmann::json clean_config_to_json(const CleanConfig& config);
CleanConfig clean_config_from_json(const nlohmann::json& doc);
} // namespace detail

} // namespace fakenews

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fakenews/classifiers.hpp"
#include "fakenews/preprocess.hpp"

namespace fakenews {

struct SmoothingConfig {
    double epsilon = 0.01;
    int k = 2;
};

/// target[label] = 1 - epsilon, every other entry epsilon / (k - 1).
std::vector<double> smooth_targets(int label_index, const SmoothingConfig& config);

/// -sum_i target_i * ln(probs_i) with probs clamped below at 1e-12.
double smoothed_cross_entropy(const ProbVector& probs, const std::vector<double>& target);

enum class ScheduleMode { warmup_cosine, step_decay };

struct ScheduleConfig {
    ScheduleMode mode = ScheduleMode::warmup_cosine;
    // warmup_cosine: linear floor->peak over warmup_epochs, half-cosine
    // peak->floor over decay_epochs, floor afterwards.
    double floor_lr = 1e-6;
    double peak_lr = 5e-5;
    double warmup_epochs = 6.0;
    double decay_epochs = 6.0;
    // step_decay: base_lr * decay_factor^floor(t / decay_period_epochs).
    double base_lr = 0.01;
    double decay_factor = 0.1;
    double decay_period_epochs = 30.0;

    void validate() const;
};

/// Learning rate after `epoch_progress` fractional epochs.
double lr_at(double epoch_progress, const ScheduleConfig& config);

enum class OptimizerKind { sgd, adamw };

struct TrainConfig {
    int epochs = 12;
    int batch_size = 256;
    std::uint64_t seed = 0;
    ScheduleConfig schedule;
    SmoothingConfig smoothing; // epsilon 0 disables smoothing
    OptimizerKind optimizer = OptimizerKind::adamw;
    double weight_decay = 0.01; // adamw only, decoupled
    double clip_norm = 1.0;     // global gradient norm cap; 0 disables
};

struct EpochStats {
    int epoch = 0; // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double train_f1 = 0.0;
    double val_f1 = 0.0;
    double lr = 0.0; // learning rate at the first optimizer step of the epoch
};

struct TrainRecord {
    std::vector<EpochStats> epochs;
    int best_epoch = 0; // first epoch attaining best_val_f1
    double best_val_f1 = 0.0;

    std::string to_json_string() const;
    /// CSV columns: epoch,train_loss,val_loss,train_f1,val_f1,lr
    void write_curve_csv(const std::string& path) const;
};

class Optimizer {
public:
    virtual ~Optimizer() = default;
    virtual void step(const std::vector<ParamTensor*>& tensors, double lr) = 0;
};

class SgdOptimizer : public Optimizer {
public:
    void step(const std::vector<ParamTensor*>& tensors, double lr) override;
};

/// Adaptive moments with decoupled weight decay.
class AdamWOptimizer : public Optimizer {
public:
    explicit AdamWOptimizer(double weight_decay = 0.01, double beta1 = 0.9, double beta2 = 0.999,
                            double epsilon = 1e-8);
    void step(const std::vector<ParamTensor*>& tensors, double lr) override;

private:
    double weight_decay_;
    double beta1_;
    double beta2_;
    double epsilon_;
    long step_count_ = 0;
    std::vector<Eigen::MatrixXd> first_moment_;
    std::vector<Eigen::MatrixXd> second_moment_;
};

/// Mini-batch training with seeded shuffling, per-step learning rate, and
/// best-epoch selection by validation weighted F1 (first attainment wins).
/// The model is left holding the best epoch's parameters.
TrainRecord train(TextClassifier& model, const std::vector<PreparedInput>& train_inputs,
                  const std::vector<PreparedInput>& val_inputs, const TrainConfig& config);

TrainRecord train(TextClassifier& model, const Corpus& train_corpus, const Corpus& val_corpus,
                  const TrainConfig& config);

/// Index of the largest probability; ties go to the lower class index.
int argmax_lowest(const ProbVector& probs);

} // namespace fakenews

#include "fakenews/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fakenews/errors.hpp"
#include "fakenews/evaluation.hpp"
#include "fakenews/rng.hpp"

namespace fakenews {

std::vector<double> smooth_targets(int label_index, const SmoothingConfig& config) {
    if (config.k < 2) {
        throw ValidationError("smoothing requires k >= 2");
    }
    if (!(config.epsilon >= 0.0 && config.epsilon < 1.0)) {
        throw ValidationError("smoothing epsilon must be in [0, 1)");
    }
    if (label_index < 0 || label_index >= config.k) {
        throw ValidationError("label index " + std::to_string(label_index) +
                              " out of range for k=" + std::to_string(config.k));
    }
    std::vector<double> target(static_cast<std::size_t>(config.k),
                               config.epsilon / static_cast<double>(config.k - 1));
    target[static_cast<std::size_t>(label_index)] = 1.0 - config.epsilon;
    return target;
}

double smoothed_cross_entropy(const ProbVector& probs, const std::vector<double>& target) {
    if (probs.size() != target.size()) {
        throw ValidationError("probability/target length mismatch");
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        loss -= target[i] * std::log(std::max(probs[i], 1e-12));
    }
    return loss;
}

void ScheduleConfig::validate() const {
    if (mode == ScheduleMode::warmup_cosine) {
        if (!(floor_lr >= 0.0 && peak_lr > 0.0 && floor_lr <= peak_lr)) {
            throw ValidationError("schedule requires 0 <= floor_lr <= peak_lr, peak_lr > 0");
        }
        if (warmup_epochs < 0.0 || decay_epochs <= 0.0) {
            throw ValidationError("schedule requires warmup_epochs >= 0 and decay_epochs > 0");
        }
    } else {
        if (base_lr <= 0.0 || decay_factor <= 0.0 || decay_period_epochs <= 0.0) {
            throw ValidationError("step decay requires positive base_lr, factor and period");
        }
    }
}

double lr_at(double epoch_progress, const ScheduleConfig& config) {
    config.validate();
    if (epoch_progress < 0.0) {
        throw ValidationError("epoch_progress must be >= 0");
    }
    if (config.mode == ScheduleMode::step_decay) {
        const double drops = std::floor(epoch_progress / config.decay_period_epochs);
        return config.base_lr * std::pow(config.decay_factor, drops);
    }
    const double warm = config.warmup_epochs;
    const double span = config.peak_lr - config.floor_lr;
    if (epoch_progress <= warm) {
        if (warm == 0.0) {
            return config.peak_lr;
        }
        return config.floor_lr + span * (epoch_progress / warm);
    }
    if (epoch_progress <= warm + config.decay_epochs) {
        const double phase = (epoch_progress - warm) / config.decay_epochs;
        return config.floor_lr + span * (1.0 + std::cos(M_PI * phase)) / 2.0;
    }
    return config.floor_lr;
}

void SgdOptimizer::step(const std::vector<ParamTensor*>& tensors, double lr) {
    for (ParamTensor* tensor : tensors) {
        tensor->value -= lr * tensor->grad;
    }
}

AdamWOptimizer::AdamWOptimizer(double weight_decay, double beta1, double beta2, double epsilon)
    : weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void AdamWOptimizer::step(const std::vector<ParamTensor*>& tensors, double lr) {
    if (first_moment_.empty()) {
        for (const ParamTensor* tensor : tensors) {
            first_moment_.emplace_back(
                Eigen::MatrixXd::Zero(tensor->value.rows(), tensor->value.cols()));
            second_moment_.emplace_back(
                Eigen::MatrixXd::Zero(tensor->value.rows(), tensor->value.cols()));
        }
    }
    if (first_moment_.size() != tensors.size()) {
        throw std::logic_error("optimizer bound to a different parameter set");
    }
    ++step_count_;
    const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
    const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        ParamTensor& tensor = *tensors[i];
        auto& m = first_moment_[i];
        auto& v = second_moment_[i];
        m = beta1_ * m + (1.0 - beta1_) * tensor.grad;
        v = beta2_ * v + (1.0 - beta2_) * tensor.grad.cwiseProduct(tensor.grad);
        const Eigen::MatrixXd m_hat = m / bias1;
        const Eigen::MatrixXd v_hat = v / bias2;
        tensor.value -=
            lr * (m_hat.array() / (v_hat.array().sqrt() + epsilon_)).matrix();
        if (weight_decay_ > 0.0) {
            tensor.value -= lr * weight_decay_ * tensor.value;
        }
    }
}

namespace {

double global_grad_norm(const std::vector<ParamTensor*>& tensors) {
    double sum = 0.0;
    for (const ParamTensor* tensor : tensors) {
        sum += tensor->grad.squaredNorm();
    }
    return std::sqrt(sum);
}

struct EvalOutcome {
    double mean_loss = 0.0;
    double weighted_f1 = 0.0;
};

EvalOutcome evaluate_split(TextClassifier& model, const std::vector<PreparedInput>& inputs,
                           const SmoothingConfig& smoothing, int batch_size) {
    EvalOutcome outcome;
    std::vector<int> truth;
    std::vector<int> predicted;
    truth.reserve(inputs.size());
    predicted.reserve(inputs.size());
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < inputs.size();
         start += static_cast<std::size_t>(batch_size)) {
        const std::size_t count =
            std::min(static_cast<std::size_t>(batch_size), inputs.size() - start);
        const std::span<const PreparedInput> batch(inputs.data() + start, count);
        const auto probs = model.eval_proba(batch);
        for (std::size_t i = 0; i < count; ++i) {
            const auto& input = batch[i];
            if (!input.label) {
                throw ValidationError("evaluation input " + input.id + " is unlabeled");
            }
            loss_sum += smoothed_cross_entropy(probs[i], smooth_targets(*input.label, smoothing));
            truth.push_back(*input.label);
            predicted.push_back(argmax_lowest(probs[i]));
        }
    }
    outcome.mean_loss = loss_sum / static_cast<double>(inputs.size());
    outcome.weighted_f1 = weighted_f1_score(truth, predicted, model.num_classes());
    return outcome;
}

} // namespace

int argmax_lowest(const ProbVector& probs) {
    int best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
        if (probs[i] > probs[static_cast<std::size_t>(best)]) {
            best = static_cast<int>(i);
        }
    }
    return best;
}

TrainRecord train(TextClassifier& model, const std::vector<PreparedInput>& train_inputs,
                  const std::vector<PreparedInput>& val_inputs, const TrainConfig& config) {
    if (config.epochs < 1 || config.batch_size < 1) {
        throw ValidationError("train requires epochs >= 1 and batch_size >= 1");
    }
    if (train_inputs.empty() || val_inputs.empty()) {
        throw ValidationError("train requires non-empty train and validation sets");
    }
    config.schedule.validate();
    SmoothingConfig smoothing = config.smoothing;
    smoothing.k = model.num_classes();
    for (const auto& input : train_inputs) {
        if (!input.label) {
            throw ValidationError("training input " + input.id + " is unlabeled");
        }
    }

    const std::size_t n = train_inputs.size();
    const long steps_per_epoch =
        static_cast<long>((n + static_cast<std::size_t>(config.batch_size) - 1) /
                          static_cast<std::size_t>(config.batch_size));

    std::unique_ptr<Optimizer> optimizer;
    if (config.optimizer == OptimizerKind::adamw) {
        optimizer = std::make_unique<AdamWOptimizer>(config.weight_decay);
    } else {
        optimizer = std::make_unique<SgdOptimizer>();
    }
    const auto tensors = model.parameters();

    SeededRng rng(config.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainRecord record;
    record.best_val_f1 = -1.0;
    std::vector<Eigen::MatrixXd> best_params;
    long steps_done = 0;

    std::vector<PreparedInput> batch;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        const double epoch_start_lr =
            lr_at(static_cast<double>(steps_done) / static_cast<double>(steps_per_epoch),
                  config.schedule);
        double epoch_loss_sum = 0.0;

        for (std::size_t start = 0; start < n;
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t count =
                std::min(static_cast<std::size_t>(config.batch_size), n - start);
            batch.clear();
            for (std::size_t i = 0; i < count; ++i) {
                batch.push_back(train_inputs[order[start + i]]);
            }
            const double lr =
                lr_at(static_cast<double>(steps_done) / static_cast<double>(steps_per_epoch),
                      config.schedule);

            Eigen::MatrixXd logits = model.forward(batch, /*training=*/true);
            Eigen::MatrixXd grad_logits(logits.rows(), logits.cols());
            double batch_loss_sum = 0.0;
            for (Eigen::Index row = 0; row < logits.rows(); ++row) {
                const ProbVector probs = softmax_row(logits.row(row));
                const auto target =
                    smooth_targets(*batch[static_cast<std::size_t>(row)].label, smoothing);
                batch_loss_sum += smoothed_cross_entropy(probs, target);
                for (Eigen::Index col = 0; col < logits.cols(); ++col) {
                    grad_logits(row, col) = (probs[static_cast<std::size_t>(col)] -
                                             target[static_cast<std::size_t>(col)]) /
                                            static_cast<double>(count);
                }
            }
            if (!std::isfinite(batch_loss_sum)) {
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                                    ", step " + std::to_string(steps_done + 1));
            }
            epoch_loss_sum += batch_loss_sum;

            model.zero_grad();
            model.backward(grad_logits);
            if (config.clip_norm > 0.0) {
                const double norm = global_grad_norm(tensors);
                if (norm > config.clip_norm) {
                    const double scale = config.clip_norm / norm;
                    for (ParamTensor* tensor : tensors) {
                        tensor->grad *= scale;
                    }
                }
            }
            optimizer->step(tensors, lr);
            ++steps_done;
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.lr = epoch_start_lr;
        stats.train_loss = epoch_loss_sum / static_cast<double>(n);
        stats.train_f1 =
            evaluate_split(model, train_inputs, smoothing, config.batch_size).weighted_f1;
        const EvalOutcome val = evaluate_split(model, val_inputs, smoothing, config.batch_size);
        stats.val_loss = val.mean_loss;
        stats.val_f1 = val.weighted_f1;
        record.epochs.push_back(stats);

        if (val.weighted_f1 > record.best_val_f1) {
            record.best_val_f1 = val.weighted_f1;
            record.best_epoch = epoch;
            best_params.clear();
            for (const ParamTensor* tensor : tensors) {
                best_params.push_back(tensor->value);
            }
        }
    }

    for (std::size_t i = 0; i < tensors.size(); ++i) {
        tensors[i]->value = best_params[i];
    }
    model.mark_trained();
    return record;
}

TrainRecord train(TextClassifier& model, const Corpus& train_corpus, const Corpus& val_corpus,
                  const TrainConfig& config) {
    return train(model, model.prepare(train_corpus), model.prepare(val_corpus), config);
}

std::string TrainRecord::to_json_string() const {
    nlohmann::json doc;
    doc["best_epoch"] = best_epoch;
    doc["best_val_f1"] = best_val_f1;
    doc["epochs"] = nlohmann::json::array();
    for (const auto& stats : epochs) {
        doc["epochs"].push_back({{"epoch", stats.epoch},
                                 {"train_loss", stats.train_loss},
                                 {"val_loss", stats.val_loss},
                                 {"train_f1", stats.train_f1},
                                 {"val_f1", stats.val_f1},
                                 {"lr", stats.lr}});
    }
    return doc.dump(2);
}

void TrainRecord::write_curve_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write curve csv: " + path);
    }
    out << "epoch,train_loss,val_loss,train_f1,val_f1,lr\n";
    out.precision(17);
    for (const auto& stats : epochs) {
        out << stats.epoch << ',' << stats.train_loss << ',' << stats.val_loss << ','
            << stats.train_f1 << ',' << stats.val_f1 << ',' << stats.lr << '\n';
    }
}

} // namespace fakenews

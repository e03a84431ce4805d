#include "fakenews/text_rnn.hpp"

#include <cmath>

#include "fakenews/errors.hpp"

namespace fakenews {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void seeded_uniform_init(Eigen::MatrixXd& matrix, double scale, SeededRng& rng) {
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
            matrix(r, c) = rng.next_double(-scale, scale);
        }
    }
}

} // namespace

TextRnnClassifier::DirectionParams::DirectionParams(const std::string& prefix, int hidden,
                                                    int embed)
    : input_weight(prefix + ".input_weight", 4 * hidden, embed),
      hidden_weight(prefix + ".hidden_weight", 4 * hidden, hidden),
      bias(prefix + ".bias", 4 * hidden, 1) {}

TextRnnClassifier::TextRnnClassifier(TextRnnConfig config, CleanConfig clean_config,
                                     TokenVocabulary vocab, Eigen::MatrixXd embeddings,
                                     std::uint64_t seed)
    : config_(config), clean_config_(clean_config), vocab_(std::move(vocab)),
      embedding_("embedding", embeddings.rows(), embeddings.cols()),
      forward_dir_("lstm_forward", config.hidden_size, config.embedding_dim),
      backward_dir_("lstm_backward", config.hidden_size, config.embedding_dim),
      head_weight_("head.weight", config.num_classes, 2 * config.hidden_size),
      head_bias_("head.bias", config.num_classes, 1),
      dropout_rng_(mix_seed(seed, 0x5d0)) {
    if (config_.hidden_size < 1) {
        throw ValidationError("hidden_size must be >= 1");
    }
    if (!(config_.dropout >= 0.0 && config_.dropout < 1.0)) {
        throw ValidationError("dropout must be in [0, 1)");
    }
    if (embeddings.rows() != vocab_.size() || embeddings.cols() != config_.embedding_dim) {
        throw ValidationError("embedding matrix shape does not match vocabulary/config");
    }
    embedding_.value = std::move(embeddings);

    SeededRng rng(seed);
    const double recurrent_scale = 1.0 / std::sqrt(static_cast<double>(config_.hidden_size));
    for (DirectionParams* dir : {&forward_dir_, &backward_dir_}) {
        seeded_uniform_init(dir->input_weight.value, recurrent_scale, rng);
        seeded_uniform_init(dir->hidden_weight.value, recurrent_scale, rng);
        dir->bias.value.setZero();
    }
    seeded_uniform_init(head_weight_.value,
                        1.0 / std::sqrt(static_cast<double>(2 * config_.hidden_size)), rng);
    head_bias_.value.setZero();
}

Eigen::VectorXd TextRnnClassifier::run_direction(const DirectionParams& params,
                                                 const std::vector<int>& token_ids, int length,
                                                 bool reversed,
                                                 std::vector<StepCache>* cache) const {
    const int hidden = config_.hidden_size;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(hidden);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(hidden);
    for (int step = 0; step < length; ++step) {
        const int position = reversed ? length - 1 - step : step;
        const int token_id = token_ids[static_cast<std::size_t>(position)];
        Eigen::VectorXd pre = params.input_weight.value *
                                  embedding_.value.row(token_id).transpose() +
                              params.hidden_weight.value * h + params.bias.value;
        Eigen::VectorXd gate_i(hidden), gate_f(hidden), gate_g(hidden), gate_o(hidden);
        for (int j = 0; j < hidden; ++j) {
            gate_i(j) = sigmoid(pre(j));
            gate_f(j) = sigmoid(pre(hidden + j));
            gate_g(j) = std::tanh(pre(2 * hidden + j));
            gate_o(j) = sigmoid(pre(3 * hidden + j));
        }
        Eigen::VectorXd c_next = gate_f.cwiseProduct(c) + gate_i.cwiseProduct(gate_g);
        Eigen::VectorXd h_next = gate_o.cwiseProduct(c_next.array().tanh().matrix());
        if (cache != nullptr) {
            StepCache entry;
            entry.gate_i = gate_i;
            entry.gate_f = gate_f;
            entry.gate_g = gate_g;
            entry.gate_o = gate_o;
            entry.cell = c_next;
            entry.cell_prev = c;
            entry.hidden_prev = h;
            entry.token_id = token_id;
            cache->push_back(std::move(entry));
        }
        c = std::move(c_next);
        h = std::move(h_next);
    }
    return h;
}

Eigen::MatrixXd TextRnnClassifier::forward(std::span<const PreparedInput> batch, bool training) {
    const int hidden = config_.hidden_size;
    Eigen::MatrixXd logits(static_cast<Eigen::Index>(batch.size()), config_.num_classes);
    batch_cache_.clear();
    if (training) {
        batch_cache_.resize(batch.size());
    }

    for (std::size_t b = 0; b < batch.size(); ++b) {
        const EncodedSample& encoded = batch[b].encoded;
        if (encoded.token_ids.empty()) {
            throw ValidationError("input " + batch[b].id +
                                  " was not encoded for the recurrent model");
        }
        SampleCache* cache = training ? &batch_cache_[b] : nullptr;
        Eigen::VectorXd concat = Eigen::VectorXd::Zero(2 * hidden);
        if (encoded.true_length > 0) {
            concat.head(hidden) = run_direction(forward_dir_, encoded.token_ids,
                                                encoded.true_length, false,
                                                cache ? &cache->forward_steps : nullptr);
            concat.tail(hidden) = run_direction(backward_dir_, encoded.token_ids,
                                                encoded.true_length, true,
                                                cache ? &cache->backward_steps : nullptr);
        }

        Eigen::VectorXd dropped = concat;
        if (training) {
            cache->true_length = encoded.true_length;
            cache->concat = concat;
            cache->dropout_mask = Eigen::VectorXd::Ones(2 * hidden);
            if (config_.dropout > 0.0) {
                const double keep = 1.0 - config_.dropout;
                for (int j = 0; j < 2 * hidden; ++j) {
                    cache->dropout_mask(j) = dropout_rng_.next_double() < keep ? 1.0 / keep : 0.0;
                }
                dropped = concat.cwiseProduct(cache->dropout_mask);
            }
        }
        logits.row(static_cast<Eigen::Index>(b)) =
            (head_weight_.value * dropped + head_bias_.value).transpose();
    }
    return logits;
}

void TextRnnClassifier::backprop_direction(DirectionParams& params,
                                           const std::vector<StepCache>& steps,
                                           const Eigen::VectorXd& grad_final) {
    const int hidden = config_.hidden_size;
    Eigen::VectorXd grad_h = grad_final;
    Eigen::VectorXd grad_c = Eigen::VectorXd::Zero(hidden);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        const StepCache& step = *it;
        const Eigen::ArrayXd tanh_c = step.cell.array().tanh();

        const Eigen::ArrayXd grad_o = grad_h.array() * tanh_c;
        Eigen::ArrayXd grad_cell = grad_c.array() + grad_h.array() * step.gate_o.array() *
                                                        (1.0 - tanh_c.square());
        const Eigen::ArrayXd grad_i = grad_cell * step.gate_g.array();
        const Eigen::ArrayXd grad_g = grad_cell * step.gate_i.array();
        const Eigen::ArrayXd grad_f = grad_cell * step.cell_prev.array();

        Eigen::VectorXd grad_pre(4 * hidden);
        grad_pre.segment(0, hidden) =
            (grad_i * step.gate_i.array() * (1.0 - step.gate_i.array())).matrix();
        grad_pre.segment(hidden, hidden) =
            (grad_f * step.gate_f.array() * (1.0 - step.gate_f.array())).matrix();
        grad_pre.segment(2 * hidden, hidden) =
            (grad_g * (1.0 - step.gate_g.array().square())).matrix();
        grad_pre.segment(3 * hidden, hidden) =
            (grad_o * step.gate_o.array() * (1.0 - step.gate_o.array())).matrix();

        params.input_weight.grad += grad_pre * embedding_.value.row(step.token_id);
        params.hidden_weight.grad += grad_pre * step.hidden_prev.transpose();
        params.bias.grad += grad_pre;
        embedding_.grad.row(step.token_id) +=
            (params.input_weight.value.transpose() * grad_pre).transpose();

        grad_h = params.hidden_weight.value.transpose() * grad_pre;
        grad_c = (grad_cell * step.gate_f.array()).matrix();
    }
}

void TextRnnClassifier::backward(const Eigen::MatrixXd& grad_logits) {
    if (batch_cache_.size() != static_cast<std::size_t>(grad_logits.rows())) {
        throw ValidationError("backward called without a matching training-mode forward");
    }
    const int hidden = config_.hidden_size;
    for (std::size_t b = 0; b < batch_cache_.size(); ++b) {
        const SampleCache& cache = batch_cache_[b];
        const Eigen::VectorXd grad_row =
            grad_logits.row(static_cast<Eigen::Index>(b)).transpose();
        const Eigen::VectorXd dropped = config_.dropout > 0.0
                                            ? cache.concat.cwiseProduct(cache.dropout_mask)
                                            : cache.concat;

        head_weight_.grad += grad_row * dropped.transpose();
        head_bias_.grad += grad_row;

        Eigen::VectorXd grad_concat = head_weight_.value.transpose() * grad_row;
        if (config_.dropout > 0.0) {
            grad_concat = grad_concat.cwiseProduct(cache.dropout_mask);
        }
        if (cache.true_length > 0) {
            backprop_direction(forward_dir_, cache.forward_steps, grad_concat.head(hidden));
            backprop_direction(backward_dir_, cache.backward_steps, grad_concat.tail(hidden));
        }
    }
}

std::vector<ParamTensor*> TextRnnClassifier::parameters() {
    return {&embedding_,
            &forward_dir_.input_weight,
            &forward_dir_.hidden_weight,
            &forward_dir_.bias,
            &backward_dir_.input_weight,
            &backward_dir_.hidden_weight,
            &backward_dir_.bias,
            &head_weight_,
            &head_bias_};
}

std::vector<PreparedInput> TextRnnClassifier::prepare(const Corpus& corpus) const {
    return prepare_inputs(corpus, clean_config_, &vocab_);
}

nlohmann::json TextRnnClassifier::checkpoint_json() const {
    nlohmann::json doc;
    doc["format"] = "fakenews-checkpoint-v1";
    doc["kind"] = "text_rnn";
    doc["num_classes"] = config_.num_classes;
    doc["config"] = {{"embedding_dim", config_.embedding_dim},
                     {"hidden_size", config_.hidden_size},
                     {"dropout", config_.dropout}};
    doc["clean_config"] = detail::clean_config_to_json(clean_config_);
    doc["token_vocabulary"] = nlohmann::json::parse(vocab_.to_json_string());
    std::vector<const ParamTensor*> tensors;
    for (const auto* tensor :
         const_cast<TextRnnClassifier*>(this)->parameters()) {
        tensors.push_back(tensor);
    }
    doc["tensors"] = detail::tensors_to_json(tensors);
    return doc;
}

std::unique_ptr<TextRnnClassifier> TextRnnClassifier::from_checkpoint_json(
    const nlohmann::json& doc) {
    TextRnnConfig config;
    config.embedding_dim = doc.at("config").at("embedding_dim").get<int>();
    config.hidden_size = doc.at("config").at("hidden_size").get<int>();
    config.dropout = doc.at("config").at("dropout").get<double>();
    config.num_classes = doc.at("num_classes").get<int>();
    CleanConfig clean_config = detail::clean_config_from_json(doc.at("clean_config"));
    TokenVocabulary vocab = TokenVocabulary::from_json_string(doc.at("token_vocabulary").dump());

    Eigen::MatrixXd embeddings = Eigen::MatrixXd::Zero(vocab.size(), config.embedding_dim);
    auto model = std::make_unique<TextRnnClassifier>(config, clean_config, std::move(vocab),
                                                     std::move(embeddings), 0);
    detail::tensors_from_json(doc.at("tensors"), model->parameters());
    model->mark_trained();
    return model;
}

} // namespace fakenews

#pragma once

#include <cstdint>
#include <vector>

#include "fakenews/classifiers.hpp"
#include "fakenews/preprocess.hpp"
#include "fakenews/rng.hpp"

namespace fakenews {

struct TextRnnConfig {
    int embedding_dim = 200;
    int hidden_size = 128;
    double dropout = 0.2;
    int num_classes = 2;
};

/// Bidirectional LSTM classifier: embedding lookup, one recurrent layer per
/// direction, concatenation of the final forward state (position
/// true_length-1) and final backward state (position 0), dropout, affine head.
/// Zero-length inputs use the zero state vector.
class TextRnnClassifier : public TextClassifier {
public:
    TextRnnClassifier(TextRnnConfig config, CleanConfig clean_config, TokenVocabulary vocab,
                      Eigen::MatrixXd embeddings, std::uint64_t seed);

    std::string kind() const override { return "text_rnn"; }
    int num_classes() const override { return config_.num_classes; }
    const TextRnnConfig& config() const { return config_; }
    const TokenVocabulary& vocabulary() const { return vocab_; }

    Eigen::MatrixXd forward(std::span<const PreparedInput> batch, bool training) override;
    void backward(const Eigen::MatrixXd& grad_logits) override;
    std::vector<ParamTensor*> parameters() override;
    std::vector<PreparedInput> prepare(const Corpus& corpus) const override;
    nlohmann::json checkpoint_json() const override;

    static std::unique_ptr<TextRnnClassifier> from_checkpoint_json(const nlohmann::json& doc);

private:
    struct DirectionParams {
        ParamTensor input_weight;  // 4H x E, gate order i,f,g,o
        ParamTensor hidden_weight; // 4H x H
        ParamTensor bias;          // 4H x 1

        DirectionParams(const std::string& prefix, int hidden, int embed);
    };

    struct StepCache {
        Eigen::VectorXd gate_i, gate_f, gate_g, gate_o;
        Eigen::VectorXd cell, cell_prev, hidden_prev;
        int token_id = 0;
    };

    struct SampleCache {
        std::vector<StepCache> forward_steps;  // in processing order
        std::vector<StepCache> backward_steps; // in processing order (reversed input)
        Eigen::VectorXd concat;                // 2H, pre-dropout
        Eigen::VectorXd dropout_mask;          // 2H, inverted-dropout scaling
        int true_length = 0;
    };

    Eigen::VectorXd run_direction(const DirectionParams& params,
                                  const std::vector<int>& token_ids, int length, bool reversed,
                                  std::vector<StepCache>* cache) const;
    void backprop_direction(DirectionParams& params, const std::vector<StepCache>& steps,
                            const Eigen::VectorXd& grad_final);

    TextRnnConfig config_;
    CleanConfig clean_config_;
    TokenVocabulary vocab_;
    ParamTensor embedding_; // |vocab| x E
    DirectionParams forward_dir_;
    DirectionParams backward_dir_;
    ParamTensor head_weight_; // k x 2H
    ParamTensor head_bias_;   // k x 1
    SeededRng dropout_rng_;
    std::vector<SampleCache> batch_cache_;
};

} // namespace fakenews

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fakenews/classifiers.hpp"

namespace fakenews {

struct ToyBackboneConfig {
    std::string name = "toy-1";
    int table_size = 512;   // hashed embedding rows
    int embedding_dim = 32; // also the pooled output width
    int max_tokens = 140;   // encoder-side truncation
    std::uint64_t variant_seed = 1;
};

/// Desk-scale stand-in for a pretrained encoder: hashed bag-of-embeddings
/// with mean pooling and one tanh layer. Initialization mixes the variant
/// seed with the caller seed, so distinct registered variants start from
/// different parameters on identical inputs.
class ToyBackboneEncoder : public BackboneEncoder {
public:
    ToyBackboneEncoder(ToyBackboneConfig config, std::uint64_t seed);

    std::string name() const override { return config_.name; }
    int output_dim() const override { return config_.embedding_dim; }
    Eigen::MatrixXd encode(std::span<const PreparedInput> batch, bool training) override;
    void backward(const Eigen::MatrixXd& grad_pooled) override;
    std::vector<ParamTensor*> parameters() override;
    nlohmann::json config_json() const override;

private:
    struct SampleCache {
        std::vector<int> rows; // hashed table rows, one per token
        Eigen::VectorXd mean;
        Eigen::VectorXd pooled;
    };

    ToyBackboneConfig config_;
    ParamTensor table_;        // table_size x embedding_dim
    ParamTensor dense_weight_; // embedding_dim x embedding_dim
    ParamTensor dense_bias_;   // embedding_dim x 1
    std::vector<SampleCache> cache_;
};

/// Registers the five toy variants (toy-1 .. toy-5) with distinct widths and
/// variant seeds.
void register_toy_backbones(BackboneRegistry& registry);

const std::vector<std::string>& toy_backbone_names();

} // namespace fakenews

#include "fakenews/toy_backbone.hpp"

#include <cmath>

#include "fakenews/rng.hpp"
#include "fakenews/strings.hpp"

namespace fakenews {

namespace {

std::uint64_t fnv1a(const std::string& token) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : token) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

} // namespace

ToyBackboneEncoder::ToyBackboneEncoder(ToyBackboneConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      table_("toy.table", config_.table_size, config_.embedding_dim),
      dense_weight_("toy.dense_weight", config_.embedding_dim, config_.embedding_dim),
      dense_bias_("toy.dense_bias", config_.embedding_dim, 1) {
    SeededRng rng(mix_seed(config_.variant_seed, seed));
    const double table_scale = 0.5;
    for (Eigen::Index r = 0; r < table_.value.rows(); ++r) {
        for (Eigen::Index c = 0; c < table_.value.cols(); ++c) {
            table_.value(r, c) = rng.next_double(-table_scale, table_scale);
        }
    }
    const double dense_scale = 1.0 / std::sqrt(static_cast<double>(config_.embedding_dim));
    for (Eigen::Index r = 0; r < dense_weight_.value.rows(); ++r) {
        for (Eigen::Index c = 0; c < dense_weight_.value.cols(); ++c) {
            dense_weight_.value(r, c) = rng.next_double(-dense_scale, dense_scale);
        }
    }
}

Eigen::MatrixXd ToyBackboneEncoder::encode(std::span<const PreparedInput> batch, bool training) {
    const int dim = config_.embedding_dim;
    Eigen::MatrixXd pooled(static_cast<Eigen::Index>(batch.size()), dim);
    cache_.clear();
    if (training) {
        cache_.resize(batch.size());
    }
    for (std::size_t b = 0; b < batch.size(); ++b) {
        auto tokens = split_whitespace(batch[b].cleaned);
        if (tokens.size() > static_cast<std::size_t>(config_.max_tokens)) {
            tokens.resize(static_cast<std::size_t>(config_.max_tokens));
        }
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
        std::vector<int> rows;
        rows.reserve(tokens.size());
        for (const auto& token : tokens) {
            const int row = static_cast<int>(fnv1a(token) %
                                             static_cast<std::uint64_t>(config_.table_size));
            rows.push_back(row);
            mean += table_.value.row(row).transpose();
        }
        if (!tokens.empty()) {
            mean /= static_cast<double>(tokens.size());
        }
        Eigen::VectorXd out =
            (dense_weight_.value * mean + dense_bias_.value).array().tanh().matrix();
        pooled.row(static_cast<Eigen::Index>(b)) = out.transpose();
        if (training) {
            cache_[b].rows = std::move(rows);
            cache_[b].mean = std::move(mean);
            cache_[b].pooled = std::move(out);
        }
    }
    return pooled;
}

void ToyBackboneEncoder::backward(const Eigen::MatrixXd& grad_pooled) {
    if (cache_.size() != static_cast<std::size_t>(grad_pooled.rows())) {
        throw std::logic_error("toy encoder backward without a training-mode encode");
    }
    for (std::size_t b = 0; b < cache_.size(); ++b) {
        const SampleCache& cache = cache_[b];
        const Eigen::VectorXd grad_out =
            grad_pooled.row(static_cast<Eigen::Index>(b)).transpose();
        const Eigen::VectorXd grad_pre =
            grad_out.cwiseProduct((1.0 - cache.pooled.array().square()).matrix());
        dense_weight_.grad += grad_pre * cache.mean.transpose();
        dense_bias_.grad += grad_pre;
        if (!cache.rows.empty()) {
            const Eigen::VectorXd grad_mean = dense_weight_.value.transpose() * grad_pre /
                                              static_cast<double>(cache.rows.size());
            for (int row : cache.rows) {
                table_.grad.row(row) += grad_mean.transpose();
            }
        }
    }
}

std::vector<ParamTensor*> ToyBackboneEncoder::parameters() {
    return {&table_, &dense_weight_, &dense_bias_};
}

nlohmann::json ToyBackboneEncoder::config_json() const {
    return {{"type", "toy"},
            {"name", config_.name},
            {"table_size", config_.table_size},
            {"embedding_dim", config_.embedding_dim},
            {"max_tokens", config_.max_tokens},
            {"variant_seed", config_.variant_seed}};
}

void register_toy_backbones(BackboneRegistry& registry) {
    struct Variant {
        const char* name;
        int embedding_dim;
        std::uint64_t variant_seed;
    };
    static constexpr Variant kVariants[] = {
        {"toy-1", 24, 101}, {"toy-2", 28, 202}, {"toy-3", 32, 303},
        {"toy-4", 36, 404}, {"toy-5", 40, 505},
    };
    for (const Variant& variant : kVariants) {
        ToyBackboneConfig config;
        config.name = variant.name;
        config.embedding_dim = variant.embedding_dim;
        config.variant_seed = variant.variant_seed;
        registry.add(variant.name, [config](const ClassifierSpec& spec, std::uint64_t seed) {
            ToyBackboneConfig resolved = config;
            auto it = spec.hyperparameters.find("max_tokens");
            if (it != spec.hyperparameters.end() && it->second >= 1.0) {
                resolved.max_tokens = static_cast<int>(it->second);
            }
            return std::make_unique<ToyBackboneEncoder>(resolved, seed);
        });
    }
}

const std::vector<std::string>& toy_backbone_names() {
    static const std::vector<std::string> names = {"toy-1", "toy-2", "toy-3", "toy-4", "toy-5"};
    return names;
}

} // namespace fakenews

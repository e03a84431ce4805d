#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "fakenews/corpus.hpp"

namespace fakenews {

struct CleanConfig {
    bool strip_urls = true;
    bool lowercase = true;
    int max_length = 140; // tokens
};

/// Token-to-index map for the recurrent path. Index 0 is padding, index 1 is
/// the unknown token; both are reserved and never produced by real tokens.
class TokenVocabulary {
public:
    static constexpr int kPadIndex = 0;
    static constexpr int kUnkIndex = 1;

    TokenVocabulary() = default;
    TokenVocabulary(std::vector<std::string> tokens, int min_frequency);

    int size() const { return static_cast<int>(tokens_.size()) + 2; }
    int min_frequency() const { return min_frequency_; }
    int index_of(const std::string& token) const; // kUnkIndex when absent
    const std::vector<std::string>& tokens() const { return tokens_; }

    std::string to_json_string() const;
    static TokenVocabulary from_json_string(const std::string& text);

    bool operator==(const TokenVocabulary& other) const {
        return tokens_ == other.tokens_ && min_frequency_ == other.min_frequency_;
    }

private:
    std::vector<std::string> tokens_; // index i maps to id i + 2
    std::unordered_map<std::string, int> index_;
    int min_frequency_ = 1;
};

struct EncodedSample {
    std::string id;
    std::vector<int> token_ids; // length exactly max_length, right-padded
    int true_length = 0;
    std::optional<int> label_index;

    bool degenerate() const { return true_length == 0; }
};

/// Normalized input handed to classifiers: the cleaned string for backbone
/// adapters and the fixed-length id sequence for the recurrent path.
struct PreparedInput {
    std::string id;
    std::string cleaned;
    EncodedSample encoded;
    std::optional<int> label;
};

/// Removes http(s)://... runs (when enabled), lowercases (when enabled),
/// collapses whitespace and trims. Idempotent.
std::string clean(const std::string& text, const CleanConfig& config);

/// Deterministic vocabulary over the cleaned, whitespace-tokenized corpus.
/// Tokens are ordered by (-count, lexicographic) after the reserved indices.
TokenVocabulary fit_vocabulary(const Corpus& corpus, const CleanConfig& config,
                               int min_frequency);

EncodedSample encode(const Sample& sample, const TokenVocabulary& vocab,
                     const CleanConfig& config);

/// Reads a word2vec-style text file (token then `dim` floats per line) into a
/// size() x dim matrix. Tokens missing from the file get seeded uniform rows
/// in [-0.05, 0.05]; the padding row is all zeros.
Eigen::MatrixXd load_pretrained_vectors(const std::string& path, const TokenVocabulary& vocab,
                                        int dim, std::uint64_t seed = 0);

/// Seeded uniform [-0.05, 0.05] matrix with a zero padding row; stand-in when
/// no pretrained vector file is configured.
Eigen::MatrixXd random_embedding_matrix(int rows, int dim, std::uint64_t seed);

/// Cleans (and, when a vocabulary is given, encodes) every sample of a corpus.
std::vector<PreparedInput> prepare_inputs(const Corpus& corpus, const CleanConfig& config,
                                          const TokenVocabulary* vocab = nullptr);

} // namespace fakenews

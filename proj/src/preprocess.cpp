#include "fakenews/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fakenews/errors.hpp"
#include "fakenews/rng.hpp"
#include "fakenews/strings.hpp"

namespace fakenews {

namespace {

bool matches_url_scheme(const std::string& text, std::size_t pos) {
    static const std::string http = "http://";
    static const std::string https = "https://";
    auto matches = [&](const std::string& scheme) {
        if (pos + scheme.size() > text.size()) {
            return false;
        }
        for (std::size_t i = 0; i < scheme.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(text[pos + i])) != scheme[i]) {
                return false;
            }
        }
        return true;
    };
    return matches(http) || matches(https);
}

std::string strip_urls(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (matches_url_scheme(text, i)) {
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
                ++i;
            }
            continue;
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

std::string collapse_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool in_gap = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_gap = true;
            continue;
        }
        if (in_gap && !out.empty()) {
            out.push_back(' ');
        }
        in_gap = false;
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string clean(const std::string& text, const CleanConfig& config) {
    std::string out = config.strip_urls ? strip_urls(text) : text;
    if (config.lowercase) {
        out = to_lower_copy(out);
    }
    return collapse_whitespace(out);
}

TokenVocabulary::TokenVocabulary(std::vector<std::string> tokens, int min_frequency)
    : tokens_(std::move(tokens)), min_frequency_(min_frequency) {
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        index_.emplace(tokens_[i], static_cast<int>(i) + 2);
    }
}

int TokenVocabulary::index_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnkIndex : it->second;
}

std::string TokenVocabulary::to_json_string() const {
    nlohmann::json doc;
    doc["min_frequency"] = min_frequency_;
    doc["pad_index"] = kPadIndex;
    doc["unk_index"] = kUnkIndex;
    doc["tokens"] = tokens_;
    return doc.dump(2);
}

TokenVocabulary TokenVocabulary::from_json_string(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    return TokenVocabulary(doc.at("tokens").get<std::vector<std::string>>(),
                           doc.at("min_frequency").get<int>());
}

TokenVocabulary fit_vocabulary(const Corpus& corpus, const CleanConfig& config,
                               int min_frequency) {
    if (corpus.size() == 0) {
        throw ValidationError("fit_vocabulary requires a non-empty corpus");
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& sample : corpus.samples()) {
        for (const auto& token : split_whitespace(clean(sample.text, config))) {
            counts[token]++;
        }
    }
    std::vector<std::pair<std::string, std::size_t>> ranked;
    ranked.reserve(counts.size());
    for (const auto& entry : counts) {
        if (entry.second >= static_cast<std::size_t>(min_frequency)) {
            ranked.push_back(entry);
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    std::vector<std::string> tokens;
    tokens.reserve(ranked.size());
    for (auto& entry : ranked) {
        tokens.push_back(std::move(entry.first));
    }
    return TokenVocabulary(std::move(tokens), min_frequency);
}

EncodedSample encode(const Sample& sample, const TokenVocabulary& vocab,
                     const CleanConfig& config) {
    if (config.max_length < 1) {
        throw ValidationError("max_length must be >= 1");
    }
    EncodedSample out;
    out.id = sample.id;
    out.token_ids.assign(static_cast<std::size_t>(config.max_length), TokenVocabulary::kPadIndex);
    const auto tokens = split_whitespace(clean(sample.text, config));
    const std::size_t n = std::min(tokens.size(), static_cast<std::size_t>(config.max_length));
    for (std::size_t i = 0; i < n; ++i) {
        out.token_ids[i] = vocab.index_of(tokens[i]);
    }
    out.true_length = static_cast<int>(n);
    return out;
}

Eigen::MatrixXd random_embedding_matrix(int rows, int dim, std::uint64_t seed) {
    SeededRng rng(seed);
    Eigen::MatrixXd matrix(rows, dim);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < dim; ++c) {
            matrix(r, c) = rng.next_double(-0.05, 0.05);
        }
    }
    matrix.row(TokenVocabulary::kPadIndex).setZero();
    return matrix;
}

Eigen::MatrixXd load_pretrained_vectors(const std::string& path, const TokenVocabulary& vocab,
                                        int dim, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open vector file: " + path);
    }

    // Unknown-token rows first, so the fallback for any given vocabulary and
    // seed does not depend on the file contents.
    Eigen::MatrixXd matrix = random_embedding_matrix(vocab.size(), dim, seed);

    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string token;
        fields >> token;
        if (token.empty()) {
            throw ParseError("vector row without a token", line_no);
        }
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(dim));
        double v = 0.0;
        while (fields >> v) {
            values.push_back(v);
        }
        if (!fields.eof()) {
            throw ParseError("unreadable vector value for token '" + token + "'", line_no);
        }
        if (values.size() != static_cast<std::size_t>(dim)) {
            throw ParseError("vector for token '" + token + "' has " +
                                 std::to_string(values.size()) + " dims, expected " +
                                 std::to_string(dim),
                             line_no);
        }
        const int row = vocab.index_of(token);
        if (row == TokenVocabulary::kUnkIndex) {
            continue; // token outside the fitted vocabulary
        }
        for (int c = 0; c < dim; ++c) {
            matrix(row, c) = values[static_cast<std::size_t>(c)];
        }
    }
    matrix.row(TokenVocabulary::kPadIndex).setZero();
    return matrix;
}

std::vector<PreparedInput> prepare_inputs(const Corpus& corpus, const CleanConfig& config,
                                          const TokenVocabulary* vocab) {
    std::vector<PreparedInput> inputs;
    inputs.reserve(corpus.size());
    std::size_t degenerate = 0;
    for (const auto& sample : corpus.samples()) {
        PreparedInput input;
        input.id = sample.id;
        input.cleaned = clean(sample.text, config);
        if (vocab != nullptr) {
            input.encoded = encode(sample, *vocab, config);
            if (input.encoded.degenerate()) {
                ++degenerate;
            }
        }
        if (sample.label) {
            input.label = corpus.vocabulary().index_of(*sample.label);
        }
        inputs.push_back(std::move(input));
    }
    // Degenerate samples are kept (classified through bias terms); dropping
    // them would desynchronize id-aligned outputs.
    if (degenerate > 0) {
        std::cerr << "warning: " << degenerate
                  << " sample(s) encode to all padding (url-only or empty after cleaning)\n";
    }
    return inputs;
}

} // namespace fakenews

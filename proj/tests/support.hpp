#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fakenews/corpus.hpp"
#include "fakenews/rng.hpp"

namespace testsup {

/// Unique scratch directory per test binary run, removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path() / "fakenews-tests";
        std::filesystem::create_directories(base);
        static int counter = 0;
        path_ = base / ("run-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string dir() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

/// Two-class corpus with disjoint token distributions: class 0 texts draw
/// from one word list, class 1 from another, so the task is separable.
inline fakenews::Corpus separable_corpus(std::size_t per_class, std::uint64_t seed,
                                         fakenews::SplitTag tag = fakenews::SplitTag::train,
                                         bool labeled = true,
                                         const std::string& id_prefix = "s") {
    static const std::vector<std::string> real_words = {"orchard", "meadow",  "harvest",
                                                        "lantern", "granite", "willow"};
    static const std::vector<std::string> fake_words = {"quasar", "nebula", "ionized",
                                                        "plasma", "vortex", "zenith"};
    fakenews::SeededRng rng(seed);
    std::vector<fakenews::Sample> samples;
    const fakenews::LabelVocabulary vocab;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int label = static_cast<int>(i % 2);
        const auto& words = label == 0 ? real_words : fake_words;
        const std::size_t len = 4 + rng.next_below(5);
        std::string text;
        for (std::size_t w = 0; w < len; ++w) {
            if (w > 0) {
                text += ' ';
            }
            text += words[rng.next_below(words.size())];
        }
        fakenews::Sample sample;
        sample.id = id_prefix + std::to_string(i);
        sample.text = text;
        if (labeled) {
            sample.label = vocab.name_of(label);
        }
        samples.push_back(std::move(sample));
    }
    return fakenews::Corpus(std::move(samples), vocab, tag);
}

/// Random-label corpus with a configurable class imbalance, for property
/// tests over fold planning. The first 2*min_per_class samples alternate
/// labels so each class is guaranteed at least that many members.
inline fakenews::Corpus random_corpus(std::size_t n, double fake_fraction, std::uint64_t seed,
                                      std::size_t min_per_class = 5,
                                      fakenews::SplitTag tag = fakenews::SplitTag::train) {
    fakenews::SeededRng rng(seed);
    const fakenews::LabelVocabulary vocab;
    std::vector<fakenews::Sample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        fakenews::Sample sample;
        sample.id = "r" + std::to_string(i);
        sample.text = "token" + std::to_string(rng.next_below(50)) + " filler";
        if (i < 2 * min_per_class) {
            sample.label = i % 2 == 0 ? "real" : "fake";
        } else {
            sample.label = rng.next_double() < fake_fraction ? "fake" : "real";
        }
        samples.push_back(std::move(sample));
    }
    return fakenews::Corpus(std::move(samples), vocab, tag);
}

inline std::string corpus_to_tsv(const fakenews::Corpus& corpus) {
    std::string out = "id\ttweet\tlabel\n";
    for (const auto& sample : corpus.samples()) {
        out += sample.id + "\t" + sample.text + "\t" + (sample.label ? *sample.label : "") + "\n";
    }
    return out;
}

} // namespace testsup

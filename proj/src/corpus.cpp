#include "fakenews/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "fakenews/errors.hpp"
#include "fakenews/rng.hpp"
#include "fakenews/strings.hpp"

namespace fakenews {

LabelVocabulary::LabelVocabulary(std::vector<std::string> classes) : classes_(std::move(classes)) {
    if (classes_.size() < 2) {
        throw ValidationError("label vocabulary needs at least 2 classes");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : classes_) {
        if (name.empty()) {
            throw ValidationError("label vocabulary contains an empty class name");
        }
        if (!seen.insert(name).second) {
            throw ValidationError("duplicate class name in label vocabulary: " + name);
        }
    }
}

const std::string& LabelVocabulary::name_of(int index) const {
    if (index < 0 || index >= size()) {
        throw ValidationError("class index out of range: " + std::to_string(index));
    }
    return classes_[static_cast<std::size_t>(index)];
}

int LabelVocabulary::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

std::string to_string(SplitTag tag) {
    switch (tag) {
    case SplitTag::train: return "train";
    case SplitTag::val: return "val";
    case SplitTag::test: return "test";
    case SplitTag::merged: return "merged";
    case SplitTag::external: return "external";
    case SplitTag::pseudo: return "pseudo";
    }
    return "unknown";
}

SplitTag split_tag_from_string(const std::string& name) {
    for (SplitTag tag : {SplitTag::train, SplitTag::val, SplitTag::test, SplitTag::merged,
                         SplitTag::external, SplitTag::pseudo}) {
        if (to_string(tag) == name) {
            return tag;
        }
    }
    throw ValidationError("unknown split tag: " + name);
}

namespace {

bool tag_requires_labels(SplitTag tag) {
    return tag != SplitTag::test;
}

} // namespace

Corpus::Corpus(std::vector<Sample> samples, LabelVocabulary vocabulary, SplitTag split_tag)
    : samples_(std::move(samples)), vocabulary_(std::move(vocabulary)), split_tag_(split_tag) {
    std::unordered_set<std::string> ids;
    ids.reserve(samples_.size());
    for (const auto& sample : samples_) {
        if (!ids.insert(sample.id).second) {
            throw ValidationError("duplicate sample id: " + sample.id);
        }
        if (trim_copy(sample.text).empty()) {
            throw ValidationError("sample " + sample.id + " has empty text");
        }
        if (sample.label) {
            if (vocabulary_.index_of(*sample.label) < 0) {
                throw ValidationError("sample " + sample.id + " has unknown label: " +
                                      *sample.label);
            }
        } else if (tag_requires_labels(split_tag_)) {
            throw ValidationError("sample " + sample.id + " is unlabeled in a " +
                                  to_string(split_tag_) + " corpus");
        }
    }
}

bool Corpus::fully_labeled() const {
    return std::all_of(samples_.begin(), samples_.end(),
                       [](const Sample& s) { return s.label.has_value(); });
}

std::vector<std::size_t> Corpus::class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(vocabulary_.size()), 0);
    for (const auto& sample : samples_) {
        if (sample.label) {
            counts[static_cast<std::size_t>(vocabulary_.index_of(*sample.label))]++;
        }
    }
    return counts;
}

const Sample& Corpus::sample_by_id(const std::string& id) const {
    for (const auto& sample : samples_) {
        if (sample.id == id) {
            return sample;
        }
    }
    throw ValidationError("no sample with id: " + id);
}

Corpus Corpus::subset(const std::vector<std::string>& ids, SplitTag tag) const {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        index.emplace(samples_[i].id, i);
    }
    std::vector<Sample> picked;
    picked.reserve(ids.size());
    for (const auto& id : ids) {
        auto it = index.find(id);
        if (it == index.end()) {
            throw ValidationError("subset references missing id: " + id);
        }
        picked.push_back(samples_[it->second]);
    }
    return Corpus(std::move(picked), vocabulary_, tag);
}

Corpus load_corpus(const std::string& path, SplitTag split_tag,
                   const LabelVocabulary& vocabulary) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open corpus file: " + path);
    }

    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("empty corpus file (missing header): " + path);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "id\ttweet\tlabel") {
        throw ParseError("bad header, expected id<TAB>tweet<TAB>label", line_no);
    }

    std::vector<Sample> samples;
    std::unordered_set<std::string> seen_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::size_t first_tab = line.find('\t');
        std::size_t last_tab = line.rfind('\t');
        if (first_tab == std::string::npos || last_tab == first_tab) {
            throw ParseError("row needs three tab-separated columns", line_no);
        }
        Sample sample;
        sample.id = line.substr(0, first_tab);
        sample.text = line.substr(first_tab + 1, last_tab - first_tab - 1);
        std::string raw_label = trim_copy(line.substr(last_tab + 1));
        if (sample.id.empty()) {
            throw ParseError("row has empty id", line_no);
        }
        if (!seen_ids.insert(sample.id).second) {
            throw ValidationError("duplicate id '" + sample.id + "' at line " +
                                  std::to_string(line_no));
        }
        if (trim_copy(sample.text).empty()) {
            throw ValidationError("empty tweet text at line " + std::to_string(line_no));
        }
        if (!raw_label.empty()) {
            std::string normalized = to_lower_copy(raw_label);
            if (vocabulary.index_of(normalized) < 0) {
                throw ValidationError("unknown label '" + raw_label + "' at line " +
                                      std::to_string(line_no));
            }
            sample.label = normalized;
        } else if (tag_requires_labels(split_tag)) {
            throw ValidationError("missing label at line " + std::to_string(line_no) +
                                  " in a " + to_string(split_tag) + " corpus");
        }
        samples.push_back(std::move(sample));
    }
    return Corpus(std::move(samples), vocabulary, split_tag);
}

Corpus merge(const std::vector<Corpus>& corpora) {
    if (corpora.empty()) {
        throw ValidationError("merge of zero corpora");
    }
    const LabelVocabulary& vocab = corpora.front().vocabulary();
    std::vector<Sample> merged;
    std::unordered_set<std::string> ids;
    std::vector<std::string> collisions;
    for (const auto& corpus : corpora) {
        if (!(corpus.vocabulary() == vocab)) {
            throw ValidationError("merge requires a shared label vocabulary");
        }
        for (const auto& sample : corpus.samples()) {
            if (!ids.insert(sample.id).second) {
                collisions.push_back(sample.id);
                continue;
            }
            merged.push_back(sample);
        }
    }
    if (!collisions.empty()) {
        std::ostringstream msg;
        msg << "id collision on merge:";
        for (const auto& id : collisions) {
            msg << ' ' << id;
        }
        throw ValidationError(msg.str());
    }
    return Corpus(std::move(merged), vocab, SplitTag::merged);
}

namespace {

std::vector<std::vector<std::size_t>> indices_per_class(const Corpus& corpus) {
    std::vector<std::vector<std::size_t>> by_class(
        static_cast<std::size_t>(corpus.vocabulary().size()));
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& label = corpus.samples()[i].label;
        by_class[static_cast<std::size_t>(corpus.vocabulary().index_of(*label))].push_back(i);
    }
    return by_class;
}

} // namespace

std::pair<Corpus, Corpus> split_holdout(const Corpus& corpus, double train_fraction,
                                        std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ValidationError("train_fraction must be in (0, 1)");
    }
    if (!corpus.fully_labeled()) {
        throw ValidationError("split_holdout requires a fully labeled corpus");
    }

    SeededRng rng(seed);
    std::vector<bool> in_train(corpus.size(), false);
    for (auto& class_indices : indices_per_class(corpus)) {
        const std::size_t n = class_indices.size();
        if (n < 2) {
            throw ValidationError("stratification error: class with fewer than 2 samples");
        }
        rng.shuffle(class_indices);
        auto want = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
        want = std::clamp<std::size_t>(want, 1, n - 1);
        for (std::size_t i = 0; i < want; ++i) {
            in_train[class_indices[i]] = true;
        }
    }

    std::vector<Sample> train_samples;
    std::vector<Sample> val_samples;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        (in_train[i] ? train_samples : val_samples).push_back(corpus.samples()[i]);
    }
    return {Corpus(std::move(train_samples), corpus.vocabulary(), SplitTag::train),
            Corpus(std::move(val_samples), corpus.vocabulary(), SplitTag::val)};
}

FoldPlan plan_folds(const Corpus& corpus, int k, FoldStrategy strategy,
                    const std::vector<std::string>& backbones, std::uint64_t seed) {
    if (k < 2) {
        throw ValidationError("plan_folds requires k >= 2");
    }
    if (!corpus.fully_labeled()) {
        throw ValidationError("plan_folds requires a fully labeled corpus");
    }
    if (strategy == FoldStrategy::five_model &&
        backbones.size() != static_cast<std::size_t>(k)) {
        throw ValidationError("five_model strategy needs exactly one backbone per fold (got " +
                              std::to_string(backbones.size()) + " for k=" + std::to_string(k) +
                              ")");
    }
    if (strategy == FoldStrategy::single_model && backbones.size() != 1) {
        throw ValidationError("single_model strategy needs exactly one backbone name");
    }

    const std::size_t kk = static_cast<std::size_t>(k);
    SeededRng rng(seed);
    std::vector<int> fold_of(corpus.size(), -1);
    std::size_t extra_offset = 0;
    for (auto& class_indices : indices_per_class(corpus)) {
        const std::size_t n = class_indices.size();
        if (n < kk) {
            throw ValidationError("stratification error: k exceeds smallest class count");
        }
        rng.shuffle(class_indices);
        const std::size_t base = n / kk;
        const std::size_t extra = n % kk;
        // Folds [extra_offset, extra_offset+extra) get one surplus sample of
        // this class; the offset rotates per class to balance fold sizes.
        std::size_t cursor = 0;
        for (std::size_t fold = 0; fold < kk; ++fold) {
            std::size_t count = base;
            if (extra > 0) {
                std::size_t rel = (fold + kk - extra_offset % kk) % kk;
                if (rel < extra) {
                    ++count;
                }
            }
            for (std::size_t j = 0; j < count; ++j) {
                fold_of[class_indices[cursor++]] = static_cast<int>(fold);
            }
        }
        extra_offset += extra;
    }

    FoldPlan plan;
    plan.k_folds = k;
    plan.seed = seed;
    plan.assignments.resize(kk);
    for (std::size_t fold = 0; fold < kk; ++fold) {
        auto& assignment = plan.assignments[fold];
        assignment.fold_index = static_cast<int>(fold);
        assignment.backbone_name =
            strategy == FoldStrategy::five_model ? backbones[fold] : backbones[0];
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const std::string& id = corpus.samples()[i].id;
        for (std::size_t fold = 0; fold < kk; ++fold) {
            auto& assignment = plan.assignments[fold];
            if (fold_of[i] == static_cast<int>(fold)) {
                assignment.val_ids.push_back(id);
            } else {
                assignment.train_ids.push_back(id);
            }
        }
    }
    return plan;
}

std::string FoldPlan::to_json_string() const {
    nlohmann::json doc;
    doc["k_folds"] = k_folds;
    doc["seed"] = seed;
    doc["assignments"] = nlohmann::json::array();
    for (const auto& assignment : assignments) {
        doc["assignments"].push_back({{"fold_index", assignment.fold_index},
                                      {"backbone", assignment.backbone_name},
                                      {"train_ids", assignment.train_ids},
                                      {"val_ids", assignment.val_ids}});
    }
    return doc.dump(2);
}

std::string to_string(FoldStrategy strategy) {
    return strategy == FoldStrategy::single_model ? "single_model" : "five_model";
}

FoldStrategy fold_strategy_from_string(const std::string& name) {
    if (name == "single_model") {
        return FoldStrategy::single_model;
    }
    if (name == "five_model") {
        return FoldStrategy::five_model;
    }
    throw ValidationError("unknown fold strategy: " + name);
}

EdaReport eda_report(const Corpus& corpus, std::size_t top_n,
                     const std::unordered_set<std::string>& stopwords) {
    if (corpus.size() == 0) {
        throw ValidationError("eda_report requires a non-empty corpus");
    }
    EdaReport report;
    report.class_names = corpus.vocabulary().classes();
    report.class_counts = corpus.class_counts();
    for (const auto& sample : corpus.samples()) {
        if (!sample.label) {
            report.unlabeled_count++;
        }
    }

    std::map<std::string, std::size_t> counts;
    for (const auto& sample : corpus.samples()) {
        for (const auto& token : split_whitespace(to_lower_copy(sample.text))) {
            if (stopwords.count(token) == 0) {
                counts[token]++;
            }
        }
    }
    report.top_tokens.assign(counts.begin(), counts.end());
    std::sort(report.top_tokens.begin(), report.top_tokens.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) {
                      return a.second > b.second;
                  }
                  return a.first < b.first;
              });
    if (report.top_tokens.size() > top_n) {
        report.top_tokens.resize(top_n);
    }
    return report;
}

std::string EdaReport::to_json_string() const {
    nlohmann::json doc;
    doc["class_counts"] = nlohmann::json::object();
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        doc["class_counts"][class_names[i]] = class_counts[i];
    }
    doc["unlabeled_count"] = unlabeled_count;
    doc["top_tokens"] = nlohmann::json::array();
    for (const auto& [token, count] : top_tokens) {
        doc["top_tokens"].push_back({{"token", token}, {"count", count}});
    }
    return doc.dump(2);
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open stopword file: " + path);
    }
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::string word = trim_copy(line);
        if (word.empty() || word[0] == '#') {
            continue;
        }
        words.insert(to_lower_copy(word));
    }
    return words;
}

} // namespace fakenews

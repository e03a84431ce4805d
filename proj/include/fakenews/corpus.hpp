#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace fakenews {

/// Ordered, fixed set of class names. Index of a class is its position in
/// the list and stays stable for the whole run.
class LabelVocabulary {
public:
    LabelVocabulary() : LabelVocabulary({"real", "fake"}) {}
    explicit LabelVocabulary(std::vector<std::string> classes);

    int size() const { return static_cast<int>(classes_.size()); }
    const std::vector<std::string>& classes() const { return classes_; }
    const std::string& name_of(int index) const;
    int index_of(const std::string& name) const; // -1 when unknown

    bool operator==(const LabelVocabulary& other) const { return classes_ == other.classes_; }

private:
    std::vector<std::string> classes_;
};

struct Sample {
    std::string id;
    std::string text;
    std::optional<std::string> label;
};

enum class SplitTag { train, val, test, merged, external, pseudo };

std::string to_string(SplitTag tag);
SplitTag split_tag_from_string(const std::string& name);

/// Immutable collection of validated samples sharing one label vocabulary.
/// Train/val/merged corpora must be fully labeled; test corpora may carry
/// unlabeled rows.
class Corpus {
public:
    Corpus(std::vector<Sample> samples, LabelVocabulary vocabulary, SplitTag split_tag);

    const std::vector<Sample>& samples() const { return samples_; }
    const LabelVocabulary& vocabulary() const { return vocabulary_; }
    SplitTag split_tag() const { return split_tag_; }
    std::size_t size() const { return samples_.size(); }

    bool fully_labeled() const;
    /// Number of labeled samples per class, aligned with the vocabulary order.
    std::vector<std::size_t> class_counts() const;
    const Sample& sample_by_id(const std::string& id) const;
    Corpus subset(const std::vector<std::string>& ids, SplitTag tag) const;

private:
    std::vector<Sample> samples_;
    LabelVocabulary vocabulary_;
    SplitTag split_tag_;
};

struct FoldAssignment {
    int fold_index = 0;
    std::vector<std::string> train_ids;
    std::vector<std::string> val_ids;
    std::string backbone_name;
};

struct FoldPlan {
    int k_folds = 5;
    std::vector<FoldAssignment> assignments;
    std::uint64_t seed = 0;

    std::string to_json_string() const;
};

enum class FoldStrategy { single_model, five_model };

std::string to_string(FoldStrategy strategy);
FoldStrategy fold_strategy_from_string(const std::string& name);

struct EdaReport {
    std::vector<std::string> class_names;
    std::vector<std::size_t> class_counts;      // aligned with class_names
    std::size_t unlabeled_count = 0;
    std::vector<std::pair<std::string, std::size_t>> top_tokens;

    std::string to_json_string() const;
};

/// Reads a UTF-8 TSV file with header `id<TAB>tweet<TAB>label`. The label
/// column may be empty for test data; labels are matched case-insensitively
/// and normalized to lowercase.
Corpus load_corpus(const std::string& path, SplitTag split_tag, const LabelVocabulary& vocabulary);

/// Concatenates corpora into a single merged corpus. Ids must stay unique.
Corpus merge(const std::vector<Corpus>& corpora);

/// Stratified random train/holdout split. Per-class counts are rounded to
/// nearest and clamped so both sides keep at least one sample of each class.
std::pair<Corpus, Corpus> split_holdout(const Corpus& corpus, double train_fraction,
                                        std::uint64_t seed);

/// Stratified k-fold partition with a backbone assigned to each fold.
/// five_model expects one backbone per fold, single_model exactly one name.
FoldPlan plan_folds(const Corpus& corpus, int k, FoldStrategy strategy,
                    const std::vector<std::string>& backbones, std::uint64_t seed);

/// Class counts plus descending (token, count) list over whitespace-tokenized,
/// lowercased, stopword-filtered text. Ties broken lexicographically.
EdaReport eda_report(const Corpus& corpus, std::size_t top_n,
                     const std::unordered_set<std::string>& stopwords);

/// Bundled English stopword list (mirrors data/stopwords_en.txt).
const std::unordered_set<std::string>& default_stopwords();

/// One lowercased word per line; '#' lines are comments.
std::unordered_set<std::string> load_stopwords(const std::string& path);

} // namespace fakenews

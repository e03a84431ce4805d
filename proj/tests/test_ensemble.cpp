#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fakenews/ensemble.hpp"
#include "fakenews/toy_backbone.hpp"
#include "fakenews/errors.hpp"
#include "fakenews/rng.hpp"

#include "support.hpp"

using namespace fakenews;

namespace {

TrainConfig quick_config(std::uint64_t seed, int epochs = 6) {
    TrainConfig config;
    config.epochs = epochs;
    config.batch_size = 16;
    config.seed = seed;
    config.schedule.floor_lr = 1e-3;
    config.schedule.peak_lr = 5e-2;
    config.schedule.warmup_epochs = 2;
    config.schedule.decay_epochs = 4;
    return config;
}

/// Long-double weighted average, independent of soft_vote's code path.
ProbVector brute_force_vote(const std::vector<ProbVector>& probs,
                            const std::vector<double>& weights) {
    long double total = 0.0L;
    for (double w : weights) {
        total += static_cast<long double>(w);
    }
    ProbVector out(probs.front().size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        long double acc = 0.0L;
        for (std::size_t m = 0; m < probs.size(); ++m) {
            acc += static_cast<long double>(weights[m]) *
                   static_cast<long double>(probs[m][i]);
        }
        out[i] = static_cast<double>(acc / total);
    }
    return out;
}

ProbVector random_simplex(SeededRng& rng) {
    const double p = rng.next_double();
    return {p, 1.0 - p};
}

} // namespace

TEST_CASE("soft_vote matches the hand-derived examples") {
    const std::vector<ProbVector> probs = {{0.6, 0.4}, {0.2, 0.8}};

    const ProbVector equal = soft_vote(probs, {1.0, 1.0});
    CHECK(equal[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(equal[1] == doctest::Approx(0.6).epsilon(1e-12));

    const ProbVector weighted = soft_vote(probs, {0.9, 0.6});
    CHECK(std::abs(weighted[0] - 0.44) <= 1e-12);
    CHECK(std::abs(weighted[1] - 0.56) <= 1e-12);

    const ProbVector single = soft_vote({{0.3, 0.7}}, {0.5});
    CHECK(single[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(single[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("soft_vote rejects degenerate inputs") {
    CHECK_THROWS_AS(soft_vote({}, {}), ValidationError);
    CHECK_THROWS_AS(soft_vote({{0.5, 0.5}}, {0.0}), ValidationError);
    CHECK_THROWS_AS(soft_vote({{0.5, 0.5}, {0.5, 0.5}}, {0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(soft_vote({{0.5, 0.5}}, {-1.0}), ValidationError);
    CHECK_THROWS_AS(soft_vote({{0.5, 0.5}, {0.2, 0.3, 0.5}}, {1.0, 1.0}), ValidationError);
}

TEST_CASE("soft_vote properties: simplex output, scale invariance, unanimity") {
    SeededRng rng(606);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t models = 1 + rng.next_below(4);
        std::vector<ProbVector> probs;
        std::vector<double> weights;
        for (std::size_t m = 0; m < models; ++m) {
            probs.push_back(random_simplex(rng));
            weights.push_back(rng.next_double(0.01, 1.0));
        }
        const ProbVector combined = soft_vote(probs, weights);
        CHECK(on_probability_simplex(combined, 1e-9));

        // weight scaling leaves the vote unchanged (same normalization)
        const double scale = rng.next_double(0.1, 10.0);
        std::vector<double> scaled = weights;
        for (double& w : scaled) {
            w *= scale;
        }
        const ProbVector combined_scaled = soft_vote(probs, scaled);
        for (std::size_t i = 0; i < combined.size(); ++i) {
            CHECK(std::abs(combined[i] - combined_scaled[i]) <= 1e-12);
        }
        CHECK(argmax_lowest(combined) == argmax_lowest(combined_scaled));

        // identical per-model probabilities pass through unchanged
        std::vector<ProbVector> unanimous(models, probs.front());
        const ProbVector same = soft_vote(unanimous, weights);
        for (std::size_t i = 0; i < same.size(); ++i) {
            CHECK(std::abs(same[i] - probs.front()[i]) <= 1e-12);
        }
    }
}

TEST_CASE("soft_vote agrees with an independent brute-force oracle") {
    SeededRng rng(707);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t models = 1 + rng.next_below(3); // <= 3 models
        std::vector<ProbVector> probs;
        std::vector<double> weights;
        for (std::size_t m = 0; m < models; ++m) {
            probs.push_back(random_simplex(rng));
            weights.push_back(rng.next_double(0.001, 1.0));
        }
        const ProbVector ours = soft_vote(probs, weights);
        const ProbVector expected = brute_force_vote(probs, weights);
        for (std::size_t i = 0; i < ours.size(); ++i) {
            CHECK(std::abs(ours[i] - expected[i]) <= 1e-12);
        }
    }
}

TEST_CASE("make_prediction applies the lower-index tie rule") {
    const LabelVocabulary vocab;
    const EnsemblePrediction tie = make_prediction("x", {0.5, 0.5}, vocab);
    CHECK(tie.predicted_label == "real"); // index 0 wins ties
    CHECK(tie.max_probability == 0.5);

    const EnsemblePrediction fake_wins = make_prediction("y", {0.1, 0.9}, vocab);
    CHECK(fake_wins.predicted_label == "fake");
    CHECK(fake_wins.max_probability == 0.9);
}

TEST_CASE("run_cv trains one record per fold in fold order") {
    testsup::TempDir tmp;
    const Corpus corpus = testsup::separable_corpus(30, 17); // 60 samples
    const FoldPlan plan = plan_folds(corpus, 5, FoldStrategy::five_model, toy_backbone_names(),
                                     11);
    CvOptions options;
    options.checkpoint_dir = tmp.dir();
    const auto folds = run_cv(corpus, plan, quick_config(11, 4), options);

    REQUIRE(folds.size() == 5);
    std::set<std::string> names;
    for (std::size_t i = 0; i < folds.size(); ++i) {
        CHECK(folds[i].record.fold_index == static_cast<int>(i));
        CHECK(folds[i].record.ensemble_weight >= 0.0);
        CHECK(folds[i].record.ensemble_weight <= 1.0);
        CHECK(folds[i].record.ensemble_weight == folds[i].history.best_val_f1);
        CHECK(std::filesystem::exists(folds[i].record.checkpoint_ref));
        names.insert(folds[i].record.backbone_name);
    }
    CHECK(names.size() == 5); // five distinct backbones
}

TEST_CASE("run_cv single_model uses one backbone across folds") {
    testsup::TempDir tmp;
    const Corpus corpus = testsup::separable_corpus(15, 19);
    const FoldPlan plan = plan_folds(corpus, 3, FoldStrategy::single_model, {"toy-2"}, 13);
    CvOptions options;
    options.checkpoint_dir = tmp.dir();
    const auto folds = run_cv(corpus, plan, quick_config(13, 3), options);
    REQUIRE(folds.size() == 3);
    for (const auto& fold : folds) {
        CHECK(fold.record.backbone_name == "toy-2");
    }
}

TEST_CASE("run_cv identifies the failing fold") {
    testsup::TempDir tmp;
    const Corpus corpus = testsup::separable_corpus(10, 23);
    FoldPlan plan = plan_folds(corpus, 2, FoldStrategy::single_model, {"toy-1"}, 17);
    plan.assignments[1].backbone_name = "not-registered";
    CvOptions options;
    options.checkpoint_dir = tmp.dir();
    CHECK_THROWS_WITH_AS(run_cv(corpus, plan, quick_config(17, 2), options),
                         doctest::Contains("not-registered"), ConfigError);
}

TEST_CASE("parallel fold execution matches the sequential result") {
    testsup::TempDir tmp_a, tmp_b;
    const Corpus corpus = testsup::separable_corpus(25, 29);
    const FoldPlan plan = plan_folds(corpus, 5, FoldStrategy::five_model, toy_backbone_names(),
                                     19);
    CvOptions sequential;
    sequential.checkpoint_dir = tmp_a.dir();
    sequential.parallel_folds = 1;
    CvOptions parallel;
    parallel.checkpoint_dir = tmp_b.dir();
    parallel.parallel_folds = 4;

    const auto folds_seq = run_cv(corpus, plan, quick_config(19, 3), sequential);
    const auto folds_par = run_cv(corpus, plan, quick_config(19, 3), parallel);
    REQUIRE(folds_seq.size() == folds_par.size());
    for (std::size_t i = 0; i < folds_seq.size(); ++i) {
        CHECK(folds_seq[i].record.ensemble_weight == folds_par[i].record.ensemble_weight);
        CHECK(folds_seq[i].history.to_json_string() == folds_par[i].history.to_json_string());
    }
}

TEST_CASE("predict_ensemble combines loaded fold models by weighted vote") {
    testsup::TempDir tmp;
    const Corpus corpus = testsup::separable_corpus(20, 31);
    const Corpus test_corpus = testsup::separable_corpus(8, 32, SplitTag::test, false, "te");
    const FoldPlan plan = plan_folds(corpus, 2, FoldStrategy::single_model, {"toy-3"}, 23);
    CvOptions options;
    options.checkpoint_dir = tmp.dir();
    const auto folds = run_cv(corpus, plan, quick_config(23, 5), options);

    std::vector<FoldModelRecord> records;
    std::vector<double> weights;
    std::vector<std::vector<ProbVector>> per_model;
    for (const auto& fold : folds) {
        records.push_back(fold.record);
        weights.push_back(fold.record.ensemble_weight);
        auto model = load_checkpoint(fold.record.checkpoint_ref, backbone_registry());
        per_model.push_back(model->predict_corpus(test_corpus));
    }
    const auto predictions = predict_ensemble(records, test_corpus);
    REQUIRE(predictions.size() == test_corpus.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        CHECK(predictions[i].id == test_corpus.samples()[i].id);
        const ProbVector expected = soft_vote({per_model[0][i], per_model[1][i]}, weights);
        for (std::size_t c = 0; c < expected.size(); ++c) {
            CHECK(predictions[i].combined[c] == doctest::Approx(expected[c]).epsilon(1e-12));
        }
        CHECK(on_probability_simplex(predictions[i].combined, 1e-9));
    }
}

TEST_CASE("harvest_pseudo_labels is strict at the threshold") {
    const Corpus test_corpus = testsup::separable_corpus(3, 41, SplitTag::test, false, "te");
    const LabelVocabulary vocab;
    std::vector<EnsemblePrediction> predictions;
    predictions.push_back(make_prediction(test_corpus.samples()[0].id, {0.04, 0.96}, vocab));
    predictions.push_back(make_prediction(test_corpus.samples()[1].id, {0.05, 0.95}, vocab));
    predictions.push_back(make_prediction(test_corpus.samples()[2].id, {0.50, 0.50}, vocab));

    const Corpus harvested = harvest_pseudo_labels(test_corpus, predictions, {0.95, 1});
    REQUIRE(harvested.size() == 1); // only the 0.96 one; 0.95 exactly is excluded
    CHECK(harvested.samples()[0].id == test_corpus.samples()[0].id);
    CHECK(harvested.samples()[0].label.value() == "fake");
    CHECK(harvested.split_tag() == SplitTag::pseudo);
    CHECK(harvested.samples()[0].text == test_corpus.samples()[0].text);
}

TEST_CASE("harvest_pseudo_labels over random predictions never crosses the threshold") {
    const Corpus test_corpus = testsup::separable_corpus(100, 43, SplitTag::test, false, "te");
    SeededRng rng(44);
    std::vector<EnsemblePrediction> predictions;
    std::size_t above = 0;
    const double threshold = 0.95;
    for (const auto& sample : test_corpus.samples()) {
        const double p = rng.next_double();
        predictions.push_back(make_prediction(sample.id, {p, 1.0 - p}, LabelVocabulary()));
        if (predictions.back().max_probability > threshold) {
            ++above;
        }
    }
    const Corpus harvested = harvest_pseudo_labels(test_corpus, predictions, {threshold, 1});
    CHECK(harvested.size() == above);
    CHECK(harvested.size() <= predictions.size());
    for (const auto& sample : harvested.samples()) {
        const auto it = std::find_if(predictions.begin(), predictions.end(),
                                     [&](const auto& p) { return p.id == sample.id; });
        REQUIRE(it != predictions.end());
        CHECK(it->max_probability > threshold);
    }
}

TEST_CASE("pseudo round augments the pool and keeps pseudo ids out of validation") {
    testsup::TempDir tmp;
    const Corpus pool = testsup::separable_corpus(30, 51, SplitTag::train, true, "po");
    const Corpus test_corpus = testsup::separable_corpus(20, 52, SplitTag::test, false, "te");

    PseudoPlanParams plan_params;
    plan_params.k_folds = 2;
    plan_params.strategy = FoldStrategy::single_model;
    plan_params.backbones = {"toy-1"};
    plan_params.seed = 29;

    CvOptions options;
    options.checkpoint_dir = tmp.dir();
    const TrainConfig config = quick_config(29, 6);

    const FoldPlan plan = plan_folds(pool, 2, FoldStrategy::single_model, {"toy-1"}, 29);
    const auto folds = run_cv(pool, plan, config, options);
    std::vector<FoldModelRecord> records;
    for (const auto& fold : folds) {
        records.push_back(fold.record);
    }
    const auto predictions = predict_ensemble(records, test_corpus);

    PseudoLabelConfig pseudo_config; // threshold 0.95
    const PseudoRoundResult round = run_pseudo_label_round(
        pool, test_corpus, plan_params, config, pseudo_config, folds, predictions, options);

    std::size_t confident = 0;
    for (const auto& prediction : predictions) {
        if (prediction.max_probability > pseudo_config.threshold) {
            ++confident;
        }
    }
    CHECK(round.harvested == confident);
    CHECK(round.augmented_pool_size == pool.size() + round.harvested);
    if (round.harvested > 0) {
        CHECK(round.retrained);
        CHECK(round.folds.size() == 2);
        CHECK(round.predictions.size() == test_corpus.size());

        // pseudo samples never land in a validation split of the retrain plan
        std::set<std::string> test_ids;
        for (const auto& sample : test_corpus.samples()) {
            test_ids.insert(sample.id);
        }
        for (const auto& assignment : round.plan.assignments) {
            for (const auto& id : assignment.val_ids) {
                CHECK(test_ids.count(id) == 0);
            }
        }
    }
}

TEST_CASE("pseudo round with an unreachable threshold returns the prior results") {
    testsup::TempDir tmp;
    const Corpus pool = testsup::separable_corpus(20, 61, SplitTag::train, true, "po");
    const Corpus test_corpus = testsup::separable_corpus(10, 62, SplitTag::test, false, "te");

    PseudoPlanParams plan_params;
    plan_params.k_folds = 2;
    plan_params.strategy = FoldStrategy::single_model;
    plan_params.backbones = {"toy-2"};
    plan_params.seed = 31;

    CvOptions options;
    options.checkpoint_dir = tmp.dir();
    const TrainConfig config = quick_config(31, 3);
    const FoldPlan plan = plan_folds(pool, 2, FoldStrategy::single_model, {"toy-2"}, 31);
    const auto folds = run_cv(pool, plan, config, options);
    std::vector<FoldModelRecord> records;
    for (const auto& fold : folds) {
        records.push_back(fold.record);
    }
    const auto predictions = predict_ensemble(records, test_corpus);

    PseudoLabelConfig strict;
    strict.threshold = 0.9999;
    const PseudoRoundResult round = run_pseudo_label_round(
        pool, test_corpus, plan_params, config, strict, folds, predictions, options);
    CHECK_FALSE(round.retrained);
    CHECK(round.harvested == 0);
    REQUIRE(round.predictions.size() == predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        CHECK(round.predictions[i].predicted_label == predictions[i].predicted_label);
    }
}

TEST_CASE("manifest and prediction files serialize expected fields") {
    testsup::TempDir tmp;
    std::vector<FoldModelRecord> records = {{0, "toy-1", 0.91, "ck0.json"},
                                            {1, "toy-2", 0.88, "ck1.json"}};
    const std::string manifest = manifest_to_json(records);
    CHECK(manifest.find("\"toy-1\"") != std::string::npos);
    CHECK(manifest.find("0.91") != std::string::npos);

    std::vector<EnsemblePrediction> predictions = {
        make_prediction("a", {0.7, 0.3}, LabelVocabulary()),
        make_prediction("b", {0.2, 0.8}, LabelVocabulary())};
    const auto csv_path = tmp.file("predictions.csv");
    write_predictions_csv(csv_path, predictions);
    std::ifstream in(csv_path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "id,label");
    std::getline(in, line);
    CHECK(line == "a,real");
    std::getline(in, line);
    CHECK(line == "b,fake");
}

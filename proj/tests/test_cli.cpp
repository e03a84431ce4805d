#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>
#include <sys/wait.h>

#include "fakenews/corpus.hpp"
#include "fakenews/reports.hpp"
#include "fakenews/run_config.hpp"

#include "support.hpp"

using namespace fakenews;

namespace {

int run_cli(const std::string& args) {
    const std::string command = std::string(FAKENEWS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct DataFiles {
    testsup::TempDir tmp;
    std::string train, val, test, vectors;

    DataFiles() {
        train = tmp.file("train.tsv");
        val = tmp.file("val.tsv");
        test = tmp.file("test.tsv");
        vectors = tmp.file("vectors.txt");
        testsup::write_file(train,
                            testsup::corpus_to_tsv(testsup::separable_corpus(
                                40, 1001, SplitTag::train, true, "tr")));
        testsup::write_file(val, testsup::corpus_to_tsv(testsup::separable_corpus(
                                     10, 1002, SplitTag::val, true, "va")));
        testsup::write_file(test, testsup::corpus_to_tsv(testsup::separable_corpus(
                                      12, 1003, SplitTag::test, true, "te")));
        // small random vector file covering a few tokens
        testsup::write_file(vectors, "orchard 0.1 0.2 0.3 0.4\nquasar -0.1 -0.2 -0.3 -0.4\n");
    }

    std::string out(const std::string& name) { return tmp.file(name); }
};

} // namespace

TEST_CASE("eda command writes per-split reports") {
    DataFiles data;
    const std::string out = data.out("eda-out");
    const int code = run_cli("eda --train " + data.train + " --val " + data.val + " --out " + out);
    CHECK(code == 0);
    CHECK(std::filesystem::exists(out + "/eda_train.json"));
    CHECK(std::filesystem::exists(out + "/eda_val.json"));
    CHECK(std::filesystem::exists(out + "/class_counts_train.ppm"));
    CHECK(std::filesystem::exists(out + "/resolved_config.json"));

    const auto doc = nlohmann::json::parse(read_text_file(out + "/eda_train.json"));
    CHECK(doc.at("class_counts").at("real").get<int>() == 40);
    CHECK(doc.at("class_counts").at("fake").get<int>() == 40);
}

TEST_CASE("eda exits 2 on a missing file") {
    DataFiles data;
    const int code = run_cli("eda --train /nonexistent/file.tsv --out " + data.out("x"));
    CHECK(code == 2);
}

TEST_CASE("external corpus is a config-gated addition to the pool") {
    DataFiles data;
    const std::string external = data.out("external.tsv");
    testsup::write_file(external, testsup::corpus_to_tsv(testsup::separable_corpus(
                                      6, 1004, SplitTag::external, true, "ex")));
    const std::string out = data.out("eda-ext");
    CHECK(run_cli("eda --external " + external + " --out " + out) == 0);
    CHECK(std::filesystem::exists(out + "/eda_external.json"));

    // asking for the external pool without a path is a config error
    CHECK(run_cli("cv --train " + data.train + " --val " + data.val + " --test " + data.test +
                  " --use-external --out " + data.out("ext-missing")) == 2);
}

TEST_CASE("cv runs a toy five-fold five-model ensemble end to end") {
    DataFiles data;
    const std::string out = data.out("cv-out");
    const int code = run_cli("cv --train " + data.train + " --val " + data.val + " --test " +
                             data.test + " --out " + out + " --seed 11 --epochs 4");
    CHECK(code == 0);
    CHECK(std::filesystem::exists(out + "/manifest.json"));
    CHECK(std::filesystem::exists(out + "/predictions.csv"));
    CHECK(std::filesystem::exists(out + "/predictions.json"));
    CHECK(std::filesystem::exists(out + "/metrics.json"));
    CHECK(std::filesystem::exists(out + "/fold_plan.json"));
    CHECK(std::filesystem::exists(out + "/curve_fold_0.csv"));
    CHECK(std::filesystem::exists(out + "/curve_fold_4.ppm"));

    const auto manifest = nlohmann::json::parse(read_text_file(out + "/manifest.json"));
    CHECK(manifest.at("folds").size() == 5);
    CHECK(manifest.at("strategy").get<std::string>() == "five_model");
}

TEST_CASE("cv exits 2 when the backbone list length mismatches the strategy") {
    DataFiles data;
    const int code =
        run_cli("cv --train " + data.train + " --val " + data.val + " --test " + data.test +
                " --out " + data.out("bad") + " --backbones toy-1,toy-2,toy-3,toy-4");
    CHECK(code == 2);
}

TEST_CASE("cv exits 2 for an unknown backbone") {
    DataFiles data;
    const int code = run_cli("cv --train " + data.train + " --val " + data.val + " --test " +
                             data.test + " --out " + data.out("bad2") +
                             " --strategy single_model --backbones gpt-7");
    CHECK(code == 2);
}

TEST_CASE("cv artifacts are byte-identical across reruns with one seed") {
    DataFiles data;
    const std::string out_a = data.out("rerun-a");
    const std::string out_b = data.out("rerun-b");
    const std::string args = "cv --train " + data.train + " --val " + data.val + " --test " +
                             data.test + " --seed 77 --epochs 3 --strategy single_model "
                             "--backbones toy-1 --k 3";
    CHECK(run_cli(args + " --out " + out_a) == 0);
    CHECK(run_cli(args + " --out " + out_b) == 0);
    for (const char* name : {"/fold_plan.json", "/predictions.json", "/metrics.json"}) {
        CHECK(read_text_file(out_a + name) == read_text_file(out_b + name));
    }
    // manifests differ only in checkpoint paths, which embed the out dir
    auto manifest_a = nlohmann::json::parse(read_text_file(out_a + "/manifest.json"));
    auto manifest_b = nlohmann::json::parse(read_text_file(out_b + "/manifest.json"));
    for (auto& fold : manifest_a.at("folds")) {
        fold.erase("checkpoint");
    }
    for (auto& fold : manifest_b.at("folds")) {
        fold.erase("checkpoint");
    }
    CHECK(manifest_a == manifest_b);
}

TEST_CASE("train-textrnn writes checkpoint, record and metrics") {
    DataFiles data;
    const std::string out = data.out("rnn-out");
    // tiny dimensions keep the smoke test quick
    nlohmann::json config = {
        {"textrnn", {{"embedding_dim", 4}, {"hidden_size", 6}, {"dropout", 0.2}}},
        {"textrnn_train", {{"epochs", 3}, {"batch_size", 16}}},
        {"clean", {{"max_length", 12}}},
    };
    const std::string config_path = data.out("rnn_config.json");
    testsup::write_file(config_path, config.dump(2));

    const int code = run_cli("train-textrnn --config " + config_path + " --train " + data.train +
                             " --val " + data.val + " --test " + data.test + " --vectors " +
                             data.vectors + " --out " + out + " --seed 5");
    CHECK(code == 0);
    CHECK(std::filesystem::exists(out + "/textrnn.ckpt.json"));
    CHECK(std::filesystem::exists(out + "/train_record.json"));
    CHECK(std::filesystem::exists(out + "/metrics.json"));
    CHECK(std::filesystem::exists(out + "/vocabulary.json"));
    CHECK(std::filesystem::exists(out + "/predictions.csv"));

    const auto record = nlohmann::json::parse(read_text_file(out + "/train_record.json"));
    CHECK(record.at("epochs").size() == 3); // --epochs from config respected
}

TEST_CASE("train-textrnn epoch override lands in the record") {
    DataFiles data;
    const std::string out = data.out("rnn-out2");
    nlohmann::json config = {
        {"textrnn", {{"embedding_dim", 4}, {"hidden_size", 4}, {"dropout", 0.0}}},
        {"textrnn_train", {{"epochs", 9}, {"batch_size", 32}}},
        {"clean", {{"max_length", 10}}},
    };
    const std::string config_path = data.out("rnn_config2.json");
    testsup::write_file(config_path, config.dump(2));
    const int code = run_cli("train-textrnn --config " + config_path + " --train " + data.train +
                             " --val " + data.val + " --vectors " + data.vectors + " --out " +
                             out + " --seed 5 --epochs 2");
    CHECK(code == 0);
    const auto record = nlohmann::json::parse(read_text_file(out + "/train_record.json"));
    CHECK(record.at("epochs").size() == 2); // flag beats config file
}

TEST_CASE("train-textrnn requires a vector file") {
    DataFiles data;
    const int code = run_cli("train-textrnn --train " + data.train + " --val " + data.val +
                             " --out " + data.out("rnn-novec"));
    CHECK(code == 2);
}

TEST_CASE("pseudo records the threshold in the manifest") {
    DataFiles data;
    const std::string out = data.out("pseudo-out");
    const int code = run_cli("pseudo --train " + data.train + " --val " + data.val + " --test " +
                             data.test + " --out " + out +
                             " --seed 13 --epochs 5 --strategy single_model --backbones toy-1 "
                             "--k 2");
    CHECK(code == 0);
    const auto manifest = nlohmann::json::parse(read_text_file(out + "/manifest.json"));
    CHECK(manifest.at("pseudo").at("threshold").get<double>() == 0.95);

    const std::string out2 = data.out("pseudo-out2");
    const int code2 = run_cli("pseudo --train " + data.train + " --val " + data.val +
                              " --test " + data.test + " --out " + out2 +
                              " --seed 13 --epochs 5 --strategy single_model --backbones toy-1 "
                              "--k 2 --threshold 0.99");
    CHECK(code2 == 0);
    const auto manifest2 = nlohmann::json::parse(read_text_file(out2 + "/manifest.json"));
    CHECK(manifest2.at("pseudo").at("threshold").get<double>() == 0.99);
}

TEST_CASE("evaluate scores a predictions file against gold") {
    DataFiles data;
    const std::string out = data.out("eval-out");
    // perfect predictions derived straight from the gold labels
    const Corpus gold = load_corpus(data.test, SplitTag::test, LabelVocabulary());
    std::string csv = "id,label\n";
    for (const auto& sample : gold.samples()) {
        csv += sample.id + "," + *sample.label + "\n";
    }
    const std::string pred_path = data.out("predictions.csv");
    testsup::write_file(pred_path, csv);

    const int code = run_cli("evaluate --pred " + pred_path + " --gold " + data.test + " --out " +
                             out);
    CHECK(code == 0);
    const auto metrics_doc = nlohmann::json::parse(read_text_file(out + "/metrics.json"));
    CHECK(metrics_doc.at("accuracy").get<double>() == 1.0);
    CHECK(metrics_doc.at("weighted_f1").get<double>() == 1.0);

    // missing id -> config error
    const std::string partial = data.out("partial.csv");
    testsup::write_file(partial, "id,label\n" + gold.samples().front().id + ",real\n");
    CHECK(run_cli("evaluate --pred " + partial + " --gold " + data.test + " --out " +
                  data.out("eval-bad")) == 2);
}

TEST_CASE("run config defaults pin the documented hyperparameters") {
    const RunConfig config;
    CHECK(config.clean.max_length == 140);
    CHECK(config.clean.strip_urls);
    CHECK(config.clean.lowercase);

    CHECK(config.textrnn.embedding_dim == 200);
    CHECK(config.textrnn.hidden_size == 128);
    CHECK(config.textrnn.dropout == 0.2);
    CHECK(config.textrnn_train.epochs == 120);
    CHECK(config.textrnn_train.batch_size == 128);
    CHECK(config.textrnn_train.schedule.mode == ScheduleMode::step_decay);
    CHECK(config.textrnn_train.schedule.base_lr == 0.01);
    CHECK(config.textrnn_train.schedule.decay_factor == 0.1);
    CHECK(config.textrnn_train.schedule.decay_period_epochs == 30.0);
    CHECK(config.textrnn_train.smoothing.epsilon == 0.0);
    CHECK(config.textrnn_train.optimizer == OptimizerKind::sgd);

    CHECK(config.backbone_train.epochs == 12);
    CHECK(config.backbone_train.batch_size == 256);
    CHECK(config.backbone_train.schedule.mode == ScheduleMode::warmup_cosine);
    CHECK(config.backbone_train.schedule.floor_lr == 1e-6);
    CHECK(config.backbone_train.schedule.peak_lr == 5e-5);
    CHECK(config.backbone_train.schedule.warmup_epochs == 6.0);
    CHECK(config.backbone_train.schedule.decay_epochs == 6.0);
    CHECK(config.backbone_train.smoothing.epsilon == 0.01);
    CHECK(config.backbone_train.optimizer == OptimizerKind::adamw);
    CHECK(config.backbone_train.clip_norm == 1.0);

    CHECK(config.k_folds == 5);
    CHECK(config.strategy == FoldStrategy::five_model);
    CHECK(config.pseudo.threshold == 0.95);
    CHECK(config.pseudo.rounds == 1);
    CHECK(config.holdout_train_fraction == 0.8);
    CHECK(config.classes == std::vector<std::string>{"real", "fake"});
}

TEST_CASE("bundled stopword file stays in sync with the built-in list") {
    const auto from_file =
        load_stopwords(std::string(FAKENEWS_SOURCE_DIR) + "/data/stopwords_en.txt");
    CHECK(from_file == default_stopwords());
}

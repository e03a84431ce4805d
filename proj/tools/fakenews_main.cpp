#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fakenews/errors.hpp"
#include "fakenews/pipeline.hpp"
#include "fakenews/run_config.hpp"
#include "fakenews/strings.hpp"

namespace {

// Flags shared by every subcommand; only flags the user actually passed
// override the config file (flag > file > default).
struct CommonFlags {
    std::string config_path;
    std::string train, val, test, external, vectors, stopwords;
    std::string out;
    std::string strategy;
    std::string backbones; // comma-separated
    std::uint64_t seed = 0;
    double threshold = 0.0;
    int parallel_folds = 0;
    int epochs = 0;
    int k_folds = 0;
    bool use_external = false;
};

void attach_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--train", flags.train, "training TSV path");
    cmd->add_option("--val", flags.val, "validation TSV path");
    cmd->add_option("--test", flags.test, "test TSV path");
    cmd->add_option("--external", flags.external, "external TSV path");
    cmd->add_option("--vectors", flags.vectors, "pretrained word-vector file");
    cmd->add_option("--stopwords", flags.stopwords, "stopword list (default: bundled)");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--seed", flags.seed, "run seed");
    cmd->add_option("--strategy", flags.strategy, "single_model or five_model");
    cmd->add_option("--backbones", flags.backbones, "comma-separated backbone names");
    cmd->add_option("--threshold", flags.threshold, "pseudo-label confidence threshold");
    cmd->add_option("--parallel-folds", flags.parallel_folds, "max concurrent fold trainings");
    cmd->add_option("--epochs", flags.epochs, "override training epochs");
    cmd->add_option("--k", flags.k_folds, "number of folds");
    cmd->add_flag("--use-external", flags.use_external, "merge the external corpus into the pool");
}

fakenews::RunConfig resolve_config(const CLI::App* cmd, const CommonFlags& flags,
                                   bool epochs_apply_to_textrnn) {
    fakenews::RunConfig config;
    if (cmd->count("--config") > 0) {
        config = fakenews::RunConfig::from_json_file(flags.config_path);
    }
    if (cmd->count("--train") > 0) config.train_path = flags.train;
    if (cmd->count("--val") > 0) config.val_path = flags.val;
    if (cmd->count("--test") > 0) config.test_path = flags.test;
    if (cmd->count("--external") > 0) config.external_path = flags.external;
    if (cmd->count("--vectors") > 0) config.vectors_path = flags.vectors;
    if (cmd->count("--stopwords") > 0) config.stopwords_path = flags.stopwords;
    if (cmd->count("--out") > 0) config.out_dir = flags.out;
    if (cmd->count("--seed") > 0) config.seed = flags.seed;
    if (cmd->count("--strategy") > 0) {
        config.strategy = fakenews::fold_strategy_from_string(flags.strategy);
    }
    if (cmd->count("--backbones") > 0) {
        config.backbones.clear();
        for (const auto& name : fakenews::split_on(flags.backbones, ',')) {
            const std::string trimmed = fakenews::trim_copy(name);
            if (!trimmed.empty()) {
                config.backbones.push_back(trimmed);
            }
        }
    }
    if (cmd->count("--threshold") > 0) config.pseudo.threshold = flags.threshold;
    if (cmd->count("--parallel-folds") > 0) config.parallel_folds = flags.parallel_folds;
    if (cmd->count("--k") > 0) config.k_folds = flags.k_folds;
    if (cmd->count("--use-external") > 0) config.use_external = true;
    if (cmd->count("--epochs") > 0) {
        if (epochs_apply_to_textrnn) {
            config.textrnn_train.epochs = flags.epochs;
        } else {
            config.backbone_train.epochs = flags.epochs;
        }
    }
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fakenews: k-fold ensemble toolkit for fake-news tweet classification"};
    app.require_subcommand(1);

    CommonFlags eda_flags, rnn_flags, cv_flags, pseudo_flags, eval_flags;
    std::string eval_pred, eval_gold;

    CLI::App* eda = app.add_subcommand("eda", "class counts and token frequencies per split");
    attach_common(eda, eda_flags);

    CLI::App* rnn = app.add_subcommand("train-textrnn", "train the recurrent baseline");
    attach_common(rnn, rnn_flags);

    CLI::App* cv = app.add_subcommand("cv", "k-fold ensemble training and prediction");
    attach_common(cv, cv_flags);

    CLI::App* pseudo = app.add_subcommand("pseudo", "cv plus one pseudo-label round");
    attach_common(pseudo, pseudo_flags);

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a predictions file against gold");
    attach_common(evaluate, eval_flags);
    evaluate->add_option("--pred", eval_pred, "predictions CSV (id,label)")->required();
    evaluate->add_option("--gold", eval_gold, "gold TSV (id,tweet,label)")->required();

    try {
        app.parse(argc, argv);
        if (eda->parsed()) {
            fakenews::cmd_eda(resolve_config(eda, eda_flags, false));
        } else if (rnn->parsed()) {
            fakenews::cmd_train_textrnn(resolve_config(rnn, rnn_flags, true));
        } else if (cv->parsed()) {
            fakenews::cmd_cv(resolve_config(cv, cv_flags, false));
        } else if (pseudo->parsed()) {
            fakenews::cmd_pseudo(resolve_config(pseudo, pseudo_flags, false));
        } else if (evaluate->parsed()) {
            fakenews::cmd_evaluate(resolve_config(evaluate, eval_flags, false), eval_pred,
                                   eval_gold);
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const fakenews::TrainingError& e) {
        std::cerr << "training error: " << e.what() << '\n';
        return 3;
    } catch (const fakenews::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const fakenews::ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const fakenews::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

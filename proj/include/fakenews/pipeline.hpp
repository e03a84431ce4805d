#pragma once

#include <string>

#include "fakenews/run_config.hpp"

namespace fakenews {

/// Class-count and token-frequency reports for every configured split.
void cmd_eda(const RunConfig& config);

/// Recurrent baseline: merge train+val, stratified re-split, step-decay
/// training, metrics on the test split when its labels are present.
void cmd_train_textrnn(const RunConfig& config);

/// K-fold ensemble: merge, plan folds, train one backbone per fold, soft-vote
/// the test corpus, write manifest/predictions/metrics.
void cmd_cv(const RunConfig& config);

/// cmd_cv followed by one pseudo-label augmentation round.
void cmd_pseudo(const RunConfig& config);

/// Metrics for a predictions CSV against a gold TSV.
void cmd_evaluate(const RunConfig& config, const std::string& predictions_csv,
                  const std::string& gold_tsv);

} // namespace fakenews

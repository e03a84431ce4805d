#pragma once

#include <stdexcept>
#include <string>

namespace fakenews {

/// Malformed input file (TSV rows, vector files, checkpoints). Carries the
/// 1-based line number when one is known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    long line() const { return line_; }

private:
    long line_;
};

/// Domain invariant violated: duplicate ids, unknown labels, bad fractions.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad run configuration or CLI usage. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training aborted at runtime (NaN loss, fold failure). Maps to exit code 3.
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fakenews

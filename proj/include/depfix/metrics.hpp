// Completion and fixing metrics: AUP, DUR, FR, ES, EM, plus grouped
// report emission (JSON / CSV).
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "depfix/annotator.hpp"
#include "depfix/fixer.hpp"

namespace depfix {

struct UndefinedMetric : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fraction of plausible (good or bad) verdicts. Throws UndefinedMetric on
/// an empty dataset.
double aup(const std::vector<VerdictLabel>& verdicts);

/// Fraction of plausible verdicts that are bad. Throws UndefinedMetric
/// when no verdict is plausible.
double dur(const std::vector<VerdictLabel>& verdicts);

/// |fixed| / |attempted|; strategy-unsupported outcomes are excluded from
/// the denominator. Throws UndefinedMetric when nothing was attempted.
double fixed_rate(const std::vector<FixStatus>& outcomes);

/// Normalized character-level Levenshtein similarity after stripping
/// leading/trailing whitespace: 1 - dist/max(|a|,|b|). ES("","") = 1.
double edit_similarity(const std::string& a, const std::string& b);

/// Character-level Levenshtein distance (no normalization or stripping).
std::size_t levenshtein(const std::string& a, const std::string& b);

/// Replaces each assignment-target element left of a top-level `=` with
/// `_` ("x, y = f(a)" -> "_, _ = f(a)"). Non-assignment lines pass
/// through unchanged. `failed`, when given, is set if the line could not
/// be analyzed (the line is then returned unchanged).
std::string normalize_return_values(const std::string& line, bool* failed = nullptr);

/// Byte equality of both lines after return-value normalization and
/// surrounding-whitespace strip.
bool exact_match(const std::string& pred, const std::string& truth);

// ---------------------------------------------------------------------------
// grouped reports

struct AnnotatedRecord {
    std::string id;
    std::string backend;
    std::string library;
    std::string dataset;  // "O" or "U"
    VerdictLabel label = VerdictLabel::irrelevant;
};

struct FixRecord {
    std::string id;
    std::string backend;
    std::string library;
    std::string dataset;
    std::string strategy;
    FixStatus status = FixStatus::not_fixed;
    std::string fixed_comp;
    std::string ground_truth;
};

struct MetricRow {
    std::string backend, library, dataset;  // "*" when not grouped by that key
    std::size_t n_samples = 0, n_good = 0, n_bad = 0, n_irrelevant = 0;
    std::optional<double> aup;  // absent only when n_samples = 0
    std::optional<double> dur;  // absent when n_good + n_bad = 0
};

struct FixMetricRow {
    std::string backend, library, dataset, strategy;
    std::size_t n = 0;  // attempted (strategy-unsupported excluded)
    std::size_t n_unsupported = 0;
    std::optional<double> fr;
    std::optional<double> es;  // mean over outcomes with a completion
    std::optional<double> em;
};

struct Report {
    std::vector<MetricRow> rows;
    std::vector<FixMetricRow> fix_rows;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Groups records by the requested keys (subset of backend, library,
/// dataset; fix rows always also group by strategy). Grouping by dataset
/// emits O, U, and All rows. Throws UsageError on an unknown key.
Report build_report(const std::vector<AnnotatedRecord>& annotated,
                    const std::vector<FixRecord>& fixed,
                    const std::vector<std::string>& group_by);

/// Byte-stable emitters; numbers at 3 decimals, undefined metrics as "—"
/// (CSV) or null (JSON).
std::string report_to_json(const Report& report);
std::string report_to_csv(const Report& report);

/// 3-decimal fixed formatting used by both emitters.
std::string format_metric(const std::optional<double>& value);

}  // namespace depfix

#pragma once

#include "tti/evalkit/evaluation.hpp"

#include <string>
#include <vector>

namespace tti::inference {

/// One evaluated configuration: a strategy (and horizon) with its episodes.
struct StrategyRun {
    std::string label;
    int horizon = 0;
    evalkit::EvaluationRun run;
};

struct ComputeMatchRow {
    std::string label;
    int horizon = 0;
    double mean_policy_queries = 0.0;
    double success_rate = 0.0;
    double mean_h_stop = 0.0;
    std::size_t episodes = 0;

    bool operator==(const ComputeMatchRow&) const = default;
};

/// Rows sorted by mean policy queries (ties by label). Throws MismatchedRuns
/// unless every run covers the same (task, seed) pairs.
std::vector<ComputeMatchRow> compute_match(const std::vector<StrategyRun>& runs);

/// True when |a - b| <= tolerance * max(a, b).
bool queries_matched(double a, double b, double tolerance = 0.10);

std::string compute_match_csv_header();
std::string compute_match_csv_row(const ComputeMatchRow& row);

} // namespace tti::inference

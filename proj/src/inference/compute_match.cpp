#include "tti/inference/compute_match.hpp"

#include "tti/core/csv.hpp"
#include "tti/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace tti::inference {

namespace {

std::multiset<std::pair<std::uint64_t, std::uint64_t>> coverage(const evalkit::EvaluationRun& run) {
    std::multiset<std::pair<std::uint64_t, std::uint64_t>> out;
    for (const auto& e : run.episodes) out.emplace(e.task_id, e.seed);
    return out;
}

} // namespace

std::vector<ComputeMatchRow> compute_match(const std::vector<StrategyRun>& runs) {
    std::vector<ComputeMatchRow> rows;
    if (runs.empty()) return rows;
    const auto reference = coverage(runs.front().run);
    for (const auto& r : runs) {
        if (coverage(r.run) != reference) {
            throw Error(ErrorCode::MismatchedRuns, "run '" + r.label + "' covers different (task, seed) pairs");
        }
        rows.push_back({r.label, r.horizon, r.run.metrics.mean_policy_queries, r.run.metrics.success_rate,
                        r.run.metrics.mean_h_stop, r.run.metrics.episodes});
    }
    std::sort(rows.begin(), rows.end(), [](const ComputeMatchRow& a, const ComputeMatchRow& b) {
        return std::tie(a.mean_policy_queries, a.label) < std::tie(b.mean_policy_queries, b.label);
    });
    return rows;
}

bool queries_matched(double a, double b, double tolerance) {
    return std::abs(a - b) <= tolerance * std::max(a, b);
}

std::string compute_match_csv_header() {
    return "label,horizon,mean_policy_queries,success_rate,mean_h_stop,episodes";
}

std::string compute_match_csv_row(const ComputeMatchRow& r) {
    std::ostringstream out;
    out.precision(10);
    out << csv_cell(r.label) << ',' << r.horizon << ',' << r.mean_policy_queries << ',' << r.success_rate << ','
        << r.mean_h_stop << ',' << r.episodes;
    return out.str();
}

} // namespace tti::inference

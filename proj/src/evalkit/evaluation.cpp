#include "tti/evalkit/evaluation.hpp"

#include "tti/core/csv.hpp"
#include "tti/core/error.hpp"
#include "tti/core/hash.hpp"
#include "tti/core/parallel.hpp"
#include "tti/core/rng.hpp"

#include <cstdio>
#include <sstream>

namespace tti::evalkit {

using nlohmann::json;

Verdict gt_evaluate(const trainer::Trajectory& trajectory, const env::Task& task) {
    if (trajectory.task_id != task.task_id) {
        throw Error(ErrorCode::TaskMismatch, "trajectory for task " + std::to_string(trajectory.task_id) +
                                                 " evaluated against task " + std::to_string(task.task_id));
    }
    return {trajectory.final_answer.has_value() && *trajectory.final_answer == task.correct_answer,
            VerdictSource::GroundTruth};
}

void NoisyVerifier::validate() const {
    if (!(accuracy >= 0.5 && accuracy <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "verifier accuracy must lie in [0.5, 1]");
    }
    for (const auto& r : {false_positive_rate, false_negative_rate}) {
        if (r && !(*r >= 0.0 && *r <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "verifier error rates must lie in [0, 1]");
        }
    }
}

Verdict noisy_evaluate(const NoisyVerifier& verifier, const trainer::Trajectory& trajectory, const env::Task& task) {
    verifier.validate();
    const bool truth = gt_evaluate(trajectory, task).success;
    const std::uint64_t key = derive_seed(verifier.seed, {trajectory.task_id, trajectory.seed,
                                                          static_cast<std::uint64_t>(trajectory.horizon),
                                                          fnv1a(trajectory.strategy)});
    const double u = hash_uniform01(key);
    double flip = 1.0 - verifier.accuracy;
    if (truth && verifier.false_negative_rate) flip = *verifier.false_negative_rate;
    if (!truth && verifier.false_positive_rate) flip = *verifier.false_positive_rate;
    return {u < flip ? !truth : truth, VerdictSource::Noisy};
}

Verdict Evaluator::evaluate(const trainer::Trajectory& trajectory, const env::Task& task) const {
    return kind == Kind::Noisy ? noisy_evaluate(verifier, trajectory, task) : gt_evaluate(trajectory, task);
}

json to_json(const Evaluator& e) {
    if (e.kind == Evaluator::Kind::GroundTruth) return {{"kind", "ground_truth"}};
    json j{{"kind", "noisy"}, {"accuracy", e.verifier.accuracy}, {"seed", e.verifier.seed}};
    if (e.verifier.false_positive_rate) j["false_positive_rate"] = *e.verifier.false_positive_rate;
    if (e.verifier.false_negative_rate) j["false_negative_rate"] = *e.verifier.false_negative_rate;
    return j;
}

Evaluator evaluator_from_json(const json& doc) {
    Evaluator e;
    try {
        const auto kind = doc.at("kind").get<std::string>();
        if (kind == "ground_truth") {
            e.kind = Evaluator::Kind::GroundTruth;
        } else if (kind == "noisy") {
            e.kind = Evaluator::Kind::Noisy;
            e.verifier.accuracy = doc.value("accuracy", e.verifier.accuracy);
            e.verifier.seed = doc.value("seed", e.verifier.seed);
            if (doc.contains("false_positive_rate")) e.verifier.false_positive_rate = doc["false_positive_rate"].get<double>();
            if (doc.contains("false_negative_rate")) e.verifier.false_negative_rate = doc["false_negative_rate"].get<double>();
            e.verifier.validate();
        } else {
            throw Error(ErrorCode::ConfigError, "unknown evaluator kind '" + kind + "'");
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::ConfigError, std::string("evaluator: ") + ex.what());
    }
    return e;
}

EpisodeSummary summarize(const trainer::Trajectory& t, const env::Task& task, bool success) {
    EpisodeSummary s;
    s.task_id = t.task_id;
    s.seed = t.seed;
    s.family = task.family;
    s.success = success;
    s.h_stop = t.h_stop;
    s.policy_queries = t.compute_queries;
    s.rechecks_used = t.rechecks_used;
    s.answer_changes = t.answer_changes;
    for (const auto& step : t.steps) ++s.action_counts[static_cast<std::size_t>(env::kind_of(step.action))];
    return s;
}

MetricsRecord aggregate(const std::vector<EpisodeSummary>& episodes, std::vector<std::uint64_t> seeds) {
    MetricsRecord m;
    m.seeds = std::move(seeds);
    m.episodes = episodes.size();
    if (episodes.empty()) return m;
    double successes = 0.0;
    double h_total = 0.0;
    double q_total = 0.0;
    double actions = 0.0;
    int changes = 0;
    std::map<env::TaskFamily, int> family_success;
    for (const auto& e : episodes) {
        successes += e.success ? 1.0 : 0.0;
        h_total += e.h_stop;
        q_total += e.policy_queries;
        m.rechecks += e.rechecks_used;
        changes += e.answer_changes;
        ++m.family_episodes[e.family];
        family_success[e.family] += e.success ? 1 : 0;
        for (std::size_t k = 0; k < env::kActionKindCount; ++k) {
            m.action_frequencies[k] += e.action_counts[k];
            actions += e.action_counts[k];
        }
    }
    const auto n = static_cast<double>(episodes.size());
    m.success_rate = successes / n;
    m.mean_h_stop = h_total / n;
    m.mean_policy_queries = q_total / n;
    if (actions > 0.0) {
        for (double& f : m.action_frequencies) f /= actions;
    }
    for (const auto& [family, count] : m.family_episodes) {
        m.family_success[family] = static_cast<double>(family_success[family]) / count;
    }
    m.recheck_change_rate = m.rechecks > 0 ? static_cast<double>(changes) / m.rechecks : 0.0;
    return m;
}

EvaluationRun evaluate_policy(const inference::Agent& agent, const policy::Encoder& encoder,
                              const policy::ActionSpace& space, const env::WebGraph& graph,
                              const std::vector<env::Task>& tasks, int eval_horizon,
                              const inference::InferenceStrategy& strategy, const std::vector<std::uint64_t>& seeds,
                              const EvalOptions& options) {
    if (tasks.empty() || seeds.empty()) {
        throw Error(ErrorCode::InvalidArgument, "evaluate_policy needs tasks and seeds");
    }
    inference::validate(strategy);
    EvaluationRun run;
    run.episodes.resize(tasks.size() * seeds.size());
    parallel_for(run.episodes.size(), options.workers, [&](std::size_t i) {
        const env::Task& task = tasks[i / seeds.size()];
        const std::uint64_t seed = seeds[i % seeds.size()];
        auto result = inference::rollout_with_strategy(agent, encoder, space, graph, task, eval_horizon, strategy,
                                                       options.temperature, seed);
        run.episodes[i] = summarize(result.trajectory, task, gt_evaluate(result.trajectory, task).success);
    });
    run.metrics = aggregate(run.episodes, seeds);
    return run;
}

std::string metrics_csv_header() {
    return "label,episodes,success_rate,lookup_success,multi_hop_success,compare_success,popup_noise_success,"
           "mean_h_stop,mean_policy_queries,click_rate,scroll_rate,back_rate,search_rate,stop_rate,"
           "rechecks,recheck_change_rate";
}

std::string metrics_csv_row(const std::string& label, const MetricsRecord& m) {
    std::ostringstream out;
    out.precision(10);
    out << csv_cell(label) << ',' << m.episodes << ',' << m.success_rate;
    for (env::TaskFamily f : env::kAllTaskFamilies) {
        out << ',';
        if (auto it = m.family_success.find(f); it != m.family_success.end()) out << it->second;
    }
    out << ',' << m.mean_h_stop << ',' << m.mean_policy_queries;
    for (double f : m.action_frequencies) out << ',' << f;
    out << ',' << m.rechecks << ',' << m.recheck_change_rate;
    return out.str();
}

json metrics_to_json(const MetricsRecord& m) {
    json j;
    j["success_rate"] = m.success_rate;
    json families = json::object();
    for (const auto& [f, rate] : m.family_success) {
        families[std::string(env::to_string(f))] = {{"success_rate", rate}, {"episodes", m.family_episodes.at(f)}};
    }
    j["families"] = std::move(families);
    j["mean_h_stop"] = m.mean_h_stop;
    json actions = json::object();
    for (env::ActionKind k : env::kAllActionKinds) actions[std::string(env::to_string(k))] = m.rate(k);
    j["action_frequencies"] = std::move(actions);
    j["mean_policy_queries"] = m.mean_policy_queries;
    j["episodes"] = m.episodes;
    j["seeds"] = m.seeds;
    j["rechecks"] = m.rechecks;
    j["recheck_change_rate"] = m.recheck_change_rate;
    return j;
}

} // namespace tti::evalkit

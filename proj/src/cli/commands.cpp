#include "tti/cli/commands.hpp"

#include "tti/core/csv.hpp"
#include "tti/core/error.hpp"
#include "tti/core/hash.hpp"
#include "tti/core/parallel.hpp"
#include "tti/env/serialize.hpp"
#include "tti/evalkit/evaluation.hpp"
#include "tti/inference/compute_match.hpp"
#include "tti/inference/strategy.hpp"
#include "tti/policy/checkpoint.hpp"
#include "tti/taskgen/generator.hpp"
#include "tti/trainer/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace tti::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// A missing or malformed config field.
struct FieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    json config;
    std::uint64_t seed = 0;
    std::string config_hash;
    fs::path output_dir;
    std::size_t workers = 1;
    std::ostream* out = nullptr;

    json header() const { return {{"config_hash", config_hash}, {"seed", seed}}; }
    std::string header_line() const { return "# " + header().dump(); }
};

const json& field(const json& obj, const std::string& path) {
    const json* cur = &obj;
    std::string walked;
    std::size_t start = 0;
    while (start <= path.size()) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        walked += (walked.empty() ? "" : ".") + key;
        if (!cur->is_object() || !cur->contains(key) || (*cur)[key].is_null()) {
            throw FieldError("missing config field '" + walked + "'");
        }
        cur = &(*cur)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return *cur;
}

template <class T>
T field_as(const json& obj, const std::string& path) {
    try {
        return field(obj, path).get<T>();
    } catch (const json::exception&) {
        throw FieldError("config field '" + path + "' has the wrong type");
    }
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
    return f;
}

void write_json(const fs::path& path, const json& doc) {
    auto f = open_output(path);
    f << doc.dump(2) << '\n';
    if (!f) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

taskgen::WorldConfig world_config(const Context& ctx) {
    if (ctx.config.contains("world")) return taskgen::world_config_from_json(ctx.config["world"]);
    const auto path = field_as<std::string>(ctx.config, "world_config");
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read world config " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, "world config " + path + ": " + e.what());
    }
    return taskgen::world_config_from_json(doc);
}

env::WebGraph graph_of(const Context& ctx) { return env::load_graph(field_as<std::string>(ctx.config, "graph")); }

std::vector<env::Task> tasks_of(const Context& ctx, const env::WebGraph& graph, const std::string& which) {
    return env::load_tasks(field_as<std::string>(ctx.config, "task_files." + which), graph);
}

trainer::TrainConfig train_config(const Context& ctx) {
    json doc = ctx.config.contains("train") ? ctx.config["train"] : json::object();
    if (!doc.is_object()) throw FieldError("config field 'train' must be an object");
    doc["seed"] = ctx.seed;
    doc["workers"] = ctx.workers;
    return trainer::train_config_from_json(doc);
}

std::vector<inference::InferenceStrategy> strategies_of(const json& list, const std::string& name) {
    if (!list.is_array() || list.empty()) throw FieldError("config field '" + name + "' must be a nonempty array");
    std::vector<inference::InferenceStrategy> out;
    for (const auto& s : list) out.push_back(inference::strategy_from_json(s));
    return out;
}

struct EvalSettings {
    int horizon = 30;
    int episodes = 1;
    double temperature = 1.0;
    std::vector<int> horizons;  // optional extra horizons for check-again style sweeps
};

EvalSettings eval_settings(const Context& ctx) {
    EvalSettings s;
    if (!ctx.config.contains("eval")) return s;
    const json& e = ctx.config["eval"];
    s.horizon = e.value("horizon", s.horizon);
    s.episodes = e.value("episodes", s.episodes);
    s.temperature = e.value("temperature", s.temperature);
    if (s.horizon < 1 || s.episodes < 1 || s.temperature < 0.0) {
        throw Error(ErrorCode::ConfigError, "eval settings out of range");
    }
    return s;
}

std::vector<std::uint64_t> episode_seeds(std::uint64_t seed, int episodes) {
    std::vector<std::uint64_t> out;
    for (int j = 0; j < episodes; ++j) out.push_back(derive_seed(seed, {0x6576616c, static_cast<std::uint64_t>(j)}));
    return out;
}

// gen-world: writes graph.json and a manifest.
int gen_world(const Context& ctx) {
    const auto wc = world_config(ctx);
    const auto graph = taskgen::generate_graph(wc, ctx.seed);
    json doc = env::graph_to_json(graph);
    doc["header"] = ctx.header();
    write_json(ctx.output_dir / "graph.json", doc);
    write_json(ctx.output_dir / "world_manifest.json",
               {{"header", ctx.header()}, {"world", taskgen::to_json(wc)}, {"pages", graph.pages().size()}});
    *ctx.out << "wrote " << (ctx.output_dir / "graph.json").string() << '\n';
    return kExitOk;
}

// gen-tasks: writes train.jsonl, test.jsonl and a manifest.
int gen_tasks(const Context& ctx) {
    const auto graph = graph_of(ctx);
    const json& spec = field(ctx.config, "tasks");
    const int count = field_as<int>(ctx.config, "tasks.count");
    taskgen::FamilyMix mix;
    if (spec.contains("mix")) {
        for (const auto& [name, weight] : spec["mix"].items()) {
            mix[env::task_family_from_string(name)] = weight.get<double>();
        }
    } else {
        for (env::TaskFamily f : env::kAllTaskFamilies) mix[f] = 1.0;
    }
    taskgen::TaskGenOptions opts;
    opts.h_max = spec.value("h_max", opts.h_max);
    opts.min_certificate_len = spec.value("min_certificate_len", opts.min_certificate_len);
    const double test_fraction = spec.value("test_fraction", 0.2);
    const auto tasks = taskgen::generate_tasks(graph, count, mix, ctx.seed, opts);
    const auto [train, test] = taskgen::split(tasks, test_fraction, derive_seed(ctx.seed, {0x73706c6974}));
    for (const auto& [name, part] : {std::pair{"train.jsonl", &train}, std::pair{"test.jsonl", &test}}) {
        auto f = open_output(ctx.output_dir / name);
        f << json{{"header", ctx.header()}}.dump() << '\n';
        env::write_tasks_jsonl(f, *part, graph.vocabulary());
        if (!f) throw Error(ErrorCode::Io, std::string("failed writing ") + name);
    }
    std::map<std::string, int> per_family;
    for (const auto& t : tasks) ++per_family[std::string(env::to_string(t.family))];
    write_json(ctx.output_dir / "tasks_manifest.json", {{"header", ctx.header()},
                                                        {"count", tasks.size()},
                                                        {"train", train.size()},
                                                        {"test", test.size()},
                                                        {"families", per_family}});
    *ctx.out << "wrote " << train.size() << " train and " << test.size() << " test tasks\n";
    return kExitOk;
}

int train(const Context& ctx) {
    const auto graph = graph_of(ctx);
    const auto train_tasks = tasks_of(ctx, graph, "train");
    const auto test_tasks = tasks_of(ctx, graph, "test");
    const auto config = train_config(ctx);
    trainer::World world(graph);
    trainer::RunOptions opts;
    opts.output_dir = ctx.output_dir;
    opts.header = ctx.header();
    opts.warn = [&](const std::string& msg) { *ctx.out << "warning: " << msg << '\n'; };
    const auto result = trainer::run_tti(config, world, train_tasks, test_tasks, opts);
    for (const auto& r : result.reports) {
        *ctx.out << "iteration " << r.iteration << " h=" << r.horizon << " rollout_success=" << r.rollout_success_rate;
        if (r.eval) *ctx.out << " eval_success=" << r.eval->success_rate;
        *ctx.out << '\n';
    }
    return kExitOk;
}

void write_metrics(const Context& ctx, const std::string& stem, const std::vector<std::string>& labels,
                   const std::vector<evalkit::MetricsRecord>& records) {
    auto csv = open_output(ctx.output_dir / (stem + ".csv"));
    csv << ctx.header_line() << '\n' << evalkit::metrics_csv_header() << '\n';
    json sidecar{{"header", ctx.header()}, {"runs", json::array()}};
    for (std::size_t i = 0; i < records.size(); ++i) {
        csv << evalkit::metrics_csv_row(labels[i], records[i]) << '\n';
        json entry = evalkit::metrics_to_json(records[i]);
        entry["label"] = labels[i];
        sidecar["runs"].push_back(std::move(entry));
    }
    if (!csv) throw Error(ErrorCode::Io, "failed writing " + stem + ".csv");
    write_json(ctx.output_dir / (stem + ".json"), sidecar);
}

void write_compute_match(const Context& ctx, const std::string& name, const std::vector<inference::StrategyRun>& runs) {
    auto csv = open_output(ctx.output_dir / name);
    csv << ctx.header_line() << '\n' << inference::compute_match_csv_header() << '\n';
    for (const auto& row : inference::compute_match(runs)) csv << inference::compute_match_csv_row(row) << '\n';
    if (!csv) throw Error(ErrorCode::Io, "failed writing " + name);
}

std::vector<inference::StrategyRun> run_strategies(const Context& ctx, const env::WebGraph& graph,
                                                   const policy::PolicyParams& params,
                                                   const std::vector<env::Task>& tasks,
                                                   const std::vector<inference::InferenceStrategy>& strategies,
                                                   const EvalSettings& settings, std::uint64_t seed) {
    const trainer::World world(graph, params.feature_dim);
    if (params.layout != world.space) throw Error(ErrorCode::CorruptCheckpoint, "checkpoint layout does not match the graph");
    const inference::LinearAgent agent(params);
    const auto seeds = episode_seeds(seed, settings.episodes);
    std::vector<inference::StrategyRun> runs;
    for (const auto& s : strategies) {
        inference::StrategyRun r;
        r.label = inference::describe(s);
        r.horizon = settings.horizon;
        r.run = evalkit::evaluate_policy(agent, world.encoder, world.space, graph, tasks, settings.horizon, s, seeds,
                                         {settings.temperature, ctx.workers});
        runs.push_back(std::move(r));
    }
    return runs;
}

int eval(const Context& ctx) {
    const auto graph = graph_of(ctx);
    const auto tasks = tasks_of(ctx, graph, "test");
    const auto checkpoint = policy::load_checkpoint(field_as<std::string>(ctx.config, "eval.checkpoint"),
                                                    graph.vocabulary());
    const auto settings = eval_settings(ctx);
    const auto strategies = ctx.config["eval"].contains("strategies")
                                ? strategies_of(ctx.config["eval"]["strategies"], "eval.strategies")
                                : std::vector<inference::InferenceStrategy>{inference::Plain{}};
    const auto runs = run_strategies(ctx, graph, checkpoint.params, tasks, strategies, settings, ctx.seed);
    std::vector<std::string> labels;
    std::vector<evalkit::MetricsRecord> records;
    for (const auto& r : runs) {
        labels.push_back(r.label);
        records.push_back(r.run.metrics);
        *ctx.out << r.label << ": success=" << r.run.metrics.success_rate
                 << " mean_queries=" << r.run.metrics.mean_policy_queries << '\n';
    }
    write_metrics(ctx, "eval", labels, records);
    write_compute_match(ctx, "eval_compute.csv", runs);
    return kExitOk;
}

std::vector<std::uint64_t> sweep_seeds(const Context& ctx) {
    const json& sweep = field(ctx.config, "sweep");
    if (!sweep.contains("seeds")) return {ctx.seed};
    try {
        auto seeds = sweep["seeds"].get<std::vector<std::uint64_t>>();
        if (seeds.empty()) throw FieldError("config field 'sweep.seeds' must be nonempty");
        return seeds;
    } catch (const json::exception&) {
        throw FieldError("config field 'sweep.seeds' has the wrong type");
    }
}

int sweep(const Context& ctx) {
    const auto graph = graph_of(ctx);
    const json& spec = field(ctx.config, "sweep");
    const auto seeds = sweep_seeds(ctx);
    const auto test_tasks = tasks_of(ctx, graph, "test");
    auto csv = open_output(ctx.output_dir / "sweep.csv");
    csv << ctx.header_line() << '\n' << "seed," << evalkit::metrics_csv_header() << '\n';

    if (spec.contains("schedules")) {
        const auto train_tasks = tasks_of(ctx, graph, "train");
        std::vector<trainer::CurriculumSchedule> schedules;
        for (const auto& s : field(ctx.config, "sweep.schedules")) schedules.push_back(trainer::schedule_from_json(s));
        const trainer::World world(graph);
        for (const auto& schedule : schedules) {
            for (std::uint64_t seed : seeds) {
                Context run_ctx = ctx;
                run_ctx.seed = seed;
                auto config = train_config(run_ctx);
                config.schedule = schedule;
                config.eval_episodes = std::max(config.eval_episodes, 1);
                trainer::RunOptions opts;
                std::string label = trainer::describe(schedule);
                std::replace(label.begin(), label.end(), ',', '_');
                opts.output_dir = ctx.output_dir / (label + "_seed" + std::to_string(seed));
                opts.header = run_ctx.header();
                opts.header["schedule"] = trainer::describe(schedule);
                opts.warn = [&](const std::string& msg) { *ctx.out << "warning: " << msg << '\n'; };
                const auto result = trainer::run_tti(config, world, train_tasks, test_tasks, opts);
                const auto& final_eval = *result.reports.back().eval;
                csv << seed << ',' << evalkit::metrics_csv_row(trainer::describe(schedule), final_eval)
                    << '\n';
                *ctx.out << trainer::describe(schedule) << " seed " << seed << ": success=" << final_eval.success_rate
                         << '\n';
            }
        }
    } else if (spec.contains("strategies")) {
        const auto strategies = strategies_of(spec["strategies"], "sweep.strategies");
        const auto checkpoint = policy::load_checkpoint(field_as<std::string>(ctx.config, "sweep.checkpoint"),
                                                        graph.vocabulary());
        auto settings = eval_settings(ctx);
        std::vector<int> horizons{settings.horizon};
        if (spec.contains("horizons")) horizons = spec["horizons"].get<std::vector<int>>();
        std::vector<inference::StrategyRun> all;
        for (std::uint64_t seed : seeds) {
            std::vector<inference::StrategyRun> per_seed;
            for (int h : horizons) {
                settings.horizon = h;
                for (auto& r : run_strategies(ctx, graph, checkpoint.params, test_tasks, strategies, settings, seed)) {
                    r.label += "@h" + std::to_string(h);
                    csv << seed << ',' << evalkit::metrics_csv_row(r.label, r.run.metrics) << '\n';
                    per_seed.push_back(std::move(r));
                }
            }
            write_compute_match(ctx, "compute_seed" + std::to_string(seed) + ".csv", per_seed);
        }
    } else {
        throw FieldError("missing config field 'sweep.schedules' or 'sweep.strategies'");
    }
    if (!csv) throw Error(ErrorCode::Io, "failed writing sweep.csv");
    return kExitOk;
}

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw Error(ErrorCode::Io, "report input lacks column " + name);
        return static_cast<std::size_t>(it - columns.begin());
    }
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    out.push_back(std::move(cell));
    return out;
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (t.columns.empty()) {
            t.columns = split_csv_line(line);
        } else {
            t.rows.push_back(split_csv_line(line));
        }
    }
    return t;
}

std::vector<fs::path> find_files(const fs::path& root, const std::string& name) {
    std::vector<fs::path> out;
    if (fs::is_regular_file(root) && root.filename() == name) out.push_back(root);
    if (fs::is_directory(root)) {
        for (const auto& e : fs::recursive_directory_iterator(root)) {
            if (e.is_regular_file() && e.path().filename() == name) out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// report: turns train/eval/sweep outputs into plot-ready tables. Reads files only.
int report(const Context& ctx) {
    const json& inputs = field(ctx.config, "report.inputs");
    if (!inputs.is_array() || inputs.empty()) throw FieldError("config field 'report.inputs' must be a nonempty array");
    std::vector<fs::path> iteration_files;
    std::vector<fs::path> compute_files;
    for (const auto& in : inputs) {
        const fs::path root = in.get<std::string>();
        if (!fs::exists(root)) throw Error(ErrorCode::Io, "report input " + root.string() + " does not exist");
        for (auto& p : find_files(root, "iterations.csv")) iteration_files.push_back(p);
        for (auto& p : find_files(root, "eval_compute.csv")) compute_files.push_back(p);
        for (const auto& e : fs::recursive_directory_iterator(root)) {
            const auto name = e.path().filename().string();
            if (e.is_regular_file() && name.rfind("compute_seed", 0) == 0) compute_files.push_back(e.path());
        }
    }
    std::sort(compute_files.begin(), compute_files.end());

    auto success = open_output(ctx.output_dir / "success_vs_iteration.csv");
    auto hstop = open_output(ctx.output_dir / "hstop_vs_iteration.csv");
    auto actions = open_output(ctx.output_dir / "action_rate_vs_iteration.csv");
    auto compute = open_output(ctx.output_dir / "success_vs_compute.csv");
    for (auto* f : {&success, &hstop, &actions, &compute}) *f << ctx.header_line() << '\n';
    success << "run,iteration,horizon,rollout_success_rate,eval_success_rate\n";
    hstop << "run,iteration,horizon,rollout_mean_h_stop,eval_mean_h_stop\n";
    actions << "run,iteration,click_rate,scroll_rate,back_rate,search_rate,stop_rate,eval_back_rate,eval_search_rate\n";
    compute << "run,label,horizon,mean_policy_queries,success_rate,mean_h_stop\n";

    for (const auto& path : iteration_files) {
        const auto t = read_csv(path);
        const std::string run = path.parent_path().string();
        auto get = [&](const std::vector<std::string>& row, const char* col) { return row.at(t.column(col)); };
        for (const auto& row : t.rows) {
            success << csv_cell(run) << ',' << get(row, "iteration") << ',' << get(row, "horizon") << ','
                    << get(row, "rollout_true_success_rate") << ',' << get(row, "eval_success_rate") << '\n';
            hstop << csv_cell(run) << ',' << get(row, "iteration") << ',' << get(row, "horizon") << ','
                  << get(row, "mean_h_stop") << ',' << get(row, "eval_mean_h_stop") << '\n';
            actions << csv_cell(run) << ',' << get(row, "iteration");
            for (const char* c : {"click_rate", "scroll_rate", "back_rate", "search_rate", "stop_rate",
                                  "eval_back_rate", "eval_search_rate"}) {
                actions << ',' << get(row, c);
            }
            actions << '\n';
        }
    }
    for (const auto& path : compute_files) {
        const auto t = read_csv(path);
        const std::string run = path.string();
        for (const auto& row : t.rows) {
            compute << csv_cell(run) << ',' << csv_cell(row.at(t.column("label"))) << ',' << row.at(t.column("horizon"))
                    << ',' << row.at(t.column("mean_policy_queries")) << ',' << row.at(t.column("success_rate"))
                    << ',' << row.at(t.column("mean_h_stop")) << '\n';
        }
    }
    for (auto* f : {&success, &hstop, &actions, &compute}) {
        if (!*f) throw Error(ErrorCode::Io, "failed writing report");
    }
    *ctx.out << "report: " << iteration_files.size() << " training runs, " << compute_files.size()
             << " compute tables\n";
    return kExitOk;
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::CorruptCheckpoint: return kExitCorruptCheckpoint;
    case ErrorCode::ConfigError: return kExitConfig;
    default: return kExitFailure;
    }
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interaction-scaling experiments on synthetic web graphs"};
    app.require_subcommand(1);
    std::string config_path;
    std::size_t workers = 0;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"gen-world", "generate a web graph"},
        {"gen-tasks", "generate and split tasks with certificates"},
        {"train", "run curriculum training"},
        {"eval", "evaluate a checkpoint under inference strategies"},
        {"sweep", "cross schedules or strategies with seeds"},
        {"report", "aggregate outputs into plot-ready tables"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("-w,--workers", workers, "parallel episode workers (default: hardware threads)");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    Context ctx;
    ctx.out = &out;
    try {
        std::ifstream in(config_path);
        if (!in) {
            err << "error: cannot read config " << config_path << '\n';
            return kExitConfig;
        }
        try {
            ctx.config = json::parse(in);
        } catch (const json::exception& e) {
            err << "error: config is not valid JSON: " << e.what() << '\n';
            return kExitConfig;
        }
        if (!ctx.config.is_object()) throw FieldError("config must be a JSON object");
        if (!ctx.config.contains("seed") || ctx.config["seed"].is_null()) {
            err << "error: seed is mandatory\n";
            return kExitConfig;
        }
        ctx.seed = field_as<std::uint64_t>(ctx.config, "seed");
        ctx.config_hash = hex(fnv1a(ctx.config.dump()));
        ctx.output_dir = field_as<std::string>(ctx.config, "output_dir");
        ctx.workers = workers > 0 ? workers : ctx.config.value("workers", default_workers());
        fs::create_directories(ctx.output_dir);

        if (command == "gen-world") return gen_world(ctx);
        if (command == "gen-tasks") return gen_tasks(ctx);
        if (command == "train") return train(ctx);
        if (command == "eval") return eval(ctx);
        if (command == "sweep") return sweep(ctx);
        return report(ctx);
    } catch (const FieldError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace tti::cli

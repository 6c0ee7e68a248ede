#include "tti/env/serialize.hpp"

#include "tti/core/error.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace tti::env {

using nlohmann::json;

json graph_to_json(const WebGraph& graph) {
    const Vocabulary& vocab = graph.vocabulary();
    json doc;
    doc["version"] = kGraphFormatVersion;
    json tokens = json::array();
    for (TokenId t = 0; t < vocab.size(); ++t) {
        tokens.push_back({vocab.text(t), std::string(to_string(vocab.kind(t)))});
    }
    doc["vocabulary"] = std::move(tokens);
    json pages = json::array();
    for (const Page& p : graph.pages()) {
        json jp;
        jp["id"] = p.id;
        jp["kind"] = std::string(to_string(p.kind));
        json desc = json::array();
        for (TokenId d : p.descriptors) {
            desc.push_back(vocab.text(d));
        }
        jp["descriptors"] = std::move(desc);
        json links = json::array();
        for (const Link& l : p.links) {
            links.push_back({vocab.text(l.label), l.target});
        }
        jp["links"] = std::move(links);
        json facts = json::object();
        for (const Fact& f : p.facts) {
            facts[vocab.text(f.attribute)] = vocab.text(f.value);
        }
        jp["facts"] = std::move(facts);
        jp["window_size"] = p.window_size;
        jp["popup_prob"] = p.popup_prob;
        pages.push_back(std::move(jp));
    }
    doc["pages"] = std::move(pages);
    doc["start_page"] = graph.start_page();
    json index = json::object();
    for (const auto& [query, results] : graph.search_index()) {
        index[vocab.text(query)] = results;
    }
    doc["search_index"] = std::move(index);
    doc["results_window"] = graph.results_window();
    return doc;
}

WebGraph graph_from_json(const json& doc) {
    try {
        if (doc.at("version").get<int>() != kGraphFormatVersion) {
            throw Error(ErrorCode::InvalidGraph, "unsupported graph version " + doc.at("version").dump());
        }
        Vocabulary vocab;
        for (const auto& entry : doc.at("vocabulary")) {
            vocab.intern(entry.at(0).get<std::string>(), token_kind_from_string(entry.at(1).get<std::string>()));
        }
        std::vector<Page> pages;
        for (const auto& jp : doc.at("pages")) {
            Page p;
            p.id = jp.at("id").get<PageId>();
            p.kind = page_kind_from_string(jp.at("kind").get<std::string>());
            for (const auto& d : jp.at("descriptors")) {
                p.descriptors.push_back(vocab.id(d.get<std::string>()));
            }
            for (const auto& l : jp.at("links")) {
                p.links.push_back({vocab.id(l.at(0).get<std::string>()), l.at(1).get<PageId>()});
            }
            for (const auto& [attr, value] : jp.at("facts").items()) {
                p.facts.push_back({vocab.id(attr), vocab.id(value.get<std::string>())});
            }
            p.window_size = jp.at("window_size").get<int>();
            p.popup_prob = jp.at("popup_prob").get<double>();
            pages.push_back(std::move(p));
        }
        std::sort(pages.begin(), pages.end(), [](const Page& a, const Page& b) { return a.id < b.id; });
        std::map<TokenId, std::vector<PageId>> index;
        for (const auto& [query, results] : doc.at("search_index").items()) {
            index[vocab.id(query)] = results.get<std::vector<PageId>>();
        }
        return WebGraph(std::move(vocab), std::move(pages), doc.at("start_page").get<PageId>(), std::move(index),
                        doc.at("results_window").get<int>());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidGraph, std::string("malformed graph document: ") + e.what());
    }
}

json task_to_json(const Task& task, const Vocabulary& vocab) {
    json doc;
    doc["task_id"] = task.task_id;
    doc["family"] = std::string(to_string(task.family));
    doc["attribute"] = vocab.text(task.goal.attribute);
    json desc = json::array();
    for (TokenId d : task.goal.descriptors) {
        desc.push_back(vocab.text(d));
    }
    doc["descriptors"] = std::move(desc);
    doc["correct_answer"] = vocab.text(task.correct_answer);
    doc["evidence"] = task.evidence;
    json cert = json::array();
    for (const Action& a : task.certificate) {
        cert.push_back(format_action(a, vocab));
    }
    doc["certificate"] = std::move(cert);
    doc["certificate_len"] = task.certificate_len;
    doc["popups"] = task.popups;
    return doc;
}

Task task_from_json(const json& doc, const Vocabulary& vocab) {
    try {
        Task task;
        task.task_id = doc.at("task_id").get<std::uint64_t>();
        task.family = task_family_from_string(doc.at("family").get<std::string>());
        task.goal.attribute = vocab.id(doc.at("attribute").get<std::string>());
        for (const auto& d : doc.at("descriptors")) {
            task.goal.descriptors.push_back(vocab.id(d.get<std::string>()));
        }
        task.correct_answer = vocab.id(doc.at("correct_answer").get<std::string>());
        task.evidence = doc.at("evidence").get<std::vector<PageId>>();
        for (const auto& a : doc.at("certificate")) {
            task.certificate.push_back(parse_action(a.get<std::string>(), vocab));
        }
        task.certificate_len = doc.at("certificate_len").get<int>();
        task.popups = doc.at("popups").get<bool>();
        return task;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::UnknownTask, std::string("malformed task record: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::UnknownTask, e.what());
    }
}

void write_tasks_jsonl(std::ostream& out, const std::vector<Task>& tasks, const Vocabulary& vocab) {
    for (const Task& t : tasks) {
        out << task_to_json(t, vocab).dump() << '\n';
    }
}

std::vector<Task> read_tasks_jsonl(std::istream& in, const Vocabulary& vocab) {
    std::vector<Task> tasks;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::UnknownTask, std::string("malformed task line: ") + e.what());
        }
        if (doc.contains("header")) {
            continue;
        }
        tasks.push_back(task_from_json(doc, vocab));
    }
    return tasks;
}

WebGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open graph file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidGraph, path.string() + ": " + e.what());
    }
    return graph_from_json(doc);
}

std::vector<Task> load_tasks(const std::filesystem::path& path, const WebGraph& graph) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open task file " + path.string());
    }
    auto tasks = read_tasks_jsonl(in, graph.vocabulary());
    for (const Task& t : tasks) {
        validate_task(t, graph);
    }
    return tasks;
}

} // namespace tti::env

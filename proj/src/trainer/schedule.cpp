#include "tti/trainer/schedule.hpp"

#include "tti/core/error.hpp"

#include <algorithm>

namespace tti::trainer {

CurriculumSchedule CurriculumSchedule::fixed(int h) {
    CurriculumSchedule s;
    s.kind = ScheduleKind::Fixed;
    s.fixed_h = h;
    s.h_min = h;
    s.h_max = h;
    s.validate();
    return s;
}

CurriculumSchedule CurriculumSchedule::additive(int h_min, int h_max) {
    CurriculumSchedule s;
    s.kind = ScheduleKind::Additive;
    s.h_min = h_min;
    s.h_max = h_max;
    s.validate();
    return s;
}

CurriculumSchedule CurriculumSchedule::multiplicative(int h_min, int h_max) {
    CurriculumSchedule s;
    s.kind = ScheduleKind::Multiplicative;
    s.h_min = h_min;
    s.h_max = h_max;
    s.validate();
    return s;
}

CurriculumSchedule CurriculumSchedule::explicit_list(std::vector<int> list) {
    CurriculumSchedule s;
    s.kind = ScheduleKind::Explicit;
    if (!list.empty()) {
        s.h_min = *std::min_element(list.begin(), list.end());
        s.h_max = *std::max_element(list.begin(), list.end());
    }
    s.list = std::move(list);
    s.validate();
    return s;
}

void CurriculumSchedule::validate() const {
    switch (kind) {
    case ScheduleKind::Fixed:
        if (fixed_h < 1) throw Error(ErrorCode::InvalidHorizon, "fixed horizon must be >= 1");
        break;
    case ScheduleKind::Additive:
    case ScheduleKind::Multiplicative:
        if (h_min < 1 || h_min > h_max) throw Error(ErrorCode::InvalidHorizon, "need 1 <= h_min <= h_max");
        break;
    case ScheduleKind::Explicit:
        if (list.empty()) throw Error(ErrorCode::InvalidHorizon, "explicit schedule is empty");
        for (int h : list) {
            if (h < 1 || h > h_max) throw Error(ErrorCode::InvalidHorizon, "explicit entry out of [1, h_max]");
        }
        break;
    }
}

int CurriculumSchedule::max_horizon() const {
    switch (kind) {
    case ScheduleKind::Fixed: return fixed_h;
    case ScheduleKind::Explicit: return *std::max_element(list.begin(), list.end());
    default: return h_max;
    }
}

int get_schedule(int i, const CurriculumSchedule& s) {
    if (i < 1) throw Error(ErrorCode::InvalidArgument, "iteration index starts at 1");
    switch (s.kind) {
    case ScheduleKind::Fixed: return s.fixed_h;
    case ScheduleKind::Additive:
        return static_cast<int>(std::min<long long>(static_cast<long long>(s.h_min) + (i - 1), s.h_max));
    case ScheduleKind::Multiplicative:
        return static_cast<int>(std::min<long long>(static_cast<long long>(s.h_min) * i, s.h_max));
    case ScheduleKind::Explicit:
        return static_cast<std::size_t>(i) <= s.list.size() ? s.list[static_cast<std::size_t>(i) - 1] : s.list.back();
    }
    return s.h_max;
}

std::string describe(const CurriculumSchedule& s) {
    switch (s.kind) {
    case ScheduleKind::Fixed: return "fixed(" + std::to_string(s.fixed_h) + ")";
    case ScheduleKind::Additive: return "additive(" + std::to_string(s.h_min) + "," + std::to_string(s.h_max) + ")";
    case ScheduleKind::Multiplicative:
        return "multiplicative(" + std::to_string(s.h_min) + "," + std::to_string(s.h_max) + ")";
    case ScheduleKind::Explicit: {
        std::string out = "explicit(";
        for (std::size_t i = 0; i < s.list.size(); ++i) out += (i ? "," : "") + std::to_string(s.list[i]);
        return out + ")";
    }
    }
    return "unknown";
}

nlohmann::json to_json(const CurriculumSchedule& s) {
    switch (s.kind) {
    case ScheduleKind::Fixed: return {{"kind", "fixed"}, {"h", s.fixed_h}};
    case ScheduleKind::Additive: return {{"kind", "additive"}, {"h_min", s.h_min}, {"h_max", s.h_max}};
    case ScheduleKind::Multiplicative: return {{"kind", "multiplicative"}, {"h_min", s.h_min}, {"h_max", s.h_max}};
    case ScheduleKind::Explicit: return {{"kind", "explicit"}, {"list", s.list}};
    }
    return {};
}

CurriculumSchedule schedule_from_json(const nlohmann::json& doc) {
    try {
        const auto kind = doc.at("kind").get<std::string>();
        if (kind == "fixed") return CurriculumSchedule::fixed(doc.at("h").get<int>());
        if (kind == "additive") {
            return CurriculumSchedule::additive(doc.at("h_min").get<int>(), doc.at("h_max").get<int>());
        }
        if (kind == "multiplicative") {
            return CurriculumSchedule::multiplicative(doc.at("h_min").get<int>(), doc.at("h_max").get<int>());
        }
        if (kind == "explicit") return CurriculumSchedule::explicit_list(doc.at("list").get<std::vector<int>>());
        throw Error(ErrorCode::ConfigError, "unknown schedule kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("schedule: ") + e.what());
    }
}

} // namespace tti::trainer

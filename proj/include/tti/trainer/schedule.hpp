#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace tti::trainer {

enum class ScheduleKind : std::uint8_t { Fixed, Additive, Multiplicative, Explicit };

/// Interaction-horizon schedule over iterations i = 1, 2, ...
struct CurriculumSchedule {
    ScheduleKind kind = ScheduleKind::Multiplicative;
    int h_min = 10;
    int h_max = 30;
    int fixed_h = 30;
    std::vector<int> list;

    static CurriculumSchedule fixed(int h);
    static CurriculumSchedule additive(int h_min, int h_max);
    static CurriculumSchedule multiplicative(int h_min, int h_max);
    static CurriculumSchedule explicit_list(std::vector<int> list);

    /// Throws InvalidHorizon.
    void validate() const;
    /// Largest horizon the schedule can produce.
    int max_horizon() const;

    bool operator==(const CurriculumSchedule&) const = default;
};

/// fixed(h) -> h; additive -> min(h_min + i - 1, h_max);
/// multiplicative -> min(h_min * i, h_max); explicit -> list[i], repeating the
/// last entry past the end. Throws InvalidArgument for i < 1.
int get_schedule(int i, const CurriculumSchedule& schedule);

std::string describe(const CurriculumSchedule& schedule);
nlohmann::json to_json(const CurriculumSchedule& schedule);
CurriculumSchedule schedule_from_json(const nlohmann::json& doc);

} // namespace tti::trainer

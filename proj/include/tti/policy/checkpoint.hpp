#pragma once

#include "tti/env/vocabulary.hpp"
#include "tti/policy/policy.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>

namespace tti::policy {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary checkpoint:
///   8-byte magic "TTICKPT\0", u32 version, u64 header length, header JSON
///   (feature_dim, slots, layout {max_window, queries, values} as token text,
///   plus caller metadata such as config_hash and seed), u64 weight count,
///   then the weights as little-endian IEEE-754 doubles.
struct Checkpoint {
    PolicyParams params;
    nlohmann::json metadata = nlohmann::json::object();
};

void write_checkpoint(std::ostream& out, const PolicyParams& params, const env::Vocabulary& vocabulary,
                      const nlohmann::json& metadata = nlohmann::json::object());
/// Throws CorruptCheckpoint on any format or layout error.
Checkpoint read_checkpoint(std::istream& in, const env::Vocabulary& vocabulary);

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params,
                     const env::Vocabulary& vocabulary, const nlohmann::json& metadata = nlohmann::json::object());
Checkpoint load_checkpoint(const std::filesystem::path& path, const env::Vocabulary& vocabulary);

} // namespace tti::policy

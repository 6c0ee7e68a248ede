#pragma once

#include "tti/env/action.hpp"
#include "tti/env/episode.hpp"
#include "tti/env/vocabulary.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace tti::policy {

inline constexpr std::size_t kDefaultFeatureDim = 4096;

/// A fixed-length real vector stored sparsely: sorted unique indices below dim.
struct FeatureVector {
    std::size_t dim = kDefaultFeatureDim;
    std::vector<std::uint32_t> indices;
    std::vector<double> values;

    std::vector<double> to_dense() const;
    double dot(std::span<const double> row) const;

    bool operator==(const FeatureVector&) const = default;
};

/// Collects (index, value) pairs; duplicates are summed on finish().
class FeatureBuilder {
public:
    explicit FeatureBuilder(std::size_t dim) : dim_(dim) {}

    void add(std::uint32_t index, double value = 1.0) { entries_.emplace_back(index % dim_, value); }
    FeatureVector finish();

private:
    std::size_t dim_;
    std::vector<std::pair<std::uint32_t, double>> entries_;
};

/// Hashed observation/history encoder.
///
/// Encodes the goal tokens, the current page (kind, match against the goal's
/// entities, pop-up state, visible link labels by slot, facts for the goal
/// attribute), the answer candidate that the last three observations support,
/// scroll state, step fraction t/h, the re-check pass, a count histogram over
/// all past action variants, and the ids of the last three pages seen.
///
/// The encoder keeps a reference to the vocabulary, which must outlive it.
class Encoder {
public:
    explicit Encoder(const env::Vocabulary& vocabulary, std::size_t dim = kDefaultFeatureDim);

    std::size_t dim() const noexcept { return dim_; }

    /// `recent` holds at most the last three observations, oldest first; the
    /// last one is the current observation. Older entries are ignored.
    FeatureVector encode(std::span<const env::Observation> recent, std::span<const env::Action> history,
                         int horizon) const;

private:
    const env::Vocabulary* vocabulary_;
    std::size_t dim_;
};

} // namespace tti::policy

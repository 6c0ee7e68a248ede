#pragma once

#include "tti/core/rng.hpp"
#include "tti/trainer/trajectory.hpp"

#include <optional>
#include <vector>

namespace tti::trainer {

/// Recency-weighted buffer: the k-th trajectory added is drawn with
/// probability proportional to k. Never cleared; an optional capacity evicts
/// the oldest entries, and the survivors are renumbered 1..|D|.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::optional<std::size_t> capacity = std::nullopt);

    /// Assigns the next insertion indices.
    void add(std::vector<Trajectory> trajectories);
    /// m draws with replacement. Throws EmptyBuffer or InvalidArgument (m < 1).
    std::vector<Trajectory> sample(std::size_t m, Rng& rng) const;
    /// Normalized sampling probabilities in insertion order.
    std::vector<double> probabilities() const;

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<Trajectory>& entries() const noexcept { return entries_; }
    std::optional<std::size_t> capacity() const noexcept { return capacity_; }

private:
    std::optional<std::size_t> capacity_;
    std::vector<Trajectory> entries_;
};

} // namespace tti::trainer

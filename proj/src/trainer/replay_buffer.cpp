#include "tti/trainer/replay_buffer.hpp"

#include "tti/core/error.hpp"

namespace tti::trainer {

ReplayBuffer::ReplayBuffer(std::optional<std::size_t> capacity) : capacity_(capacity) {
    if (capacity_ && *capacity_ == 0) throw Error(ErrorCode::InvalidArgument, "buffer capacity must be >= 1");
}

void ReplayBuffer::add(std::vector<Trajectory> trajectories) {
    for (auto& t : trajectories) entries_.push_back(std::move(t));
    if (capacity_ && entries_.size() > *capacity_) {
        entries_.erase(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(entries_.size() - *capacity_));
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i].insertion_index = i + 1;
}

std::vector<double> ReplayBuffer::probabilities() const {
    const double n = static_cast<double>(entries_.size());
    const double total = n * (n + 1.0) / 2.0;
    std::vector<double> p(entries_.size());
    for (std::size_t k = 1; k <= entries_.size(); ++k) p[k - 1] = static_cast<double>(k) / total;
    return p;
}

std::vector<Trajectory> ReplayBuffer::sample(std::size_t m, Rng& rng) const {
    if (entries_.empty()) throw Error(ErrorCode::EmptyBuffer, "cannot sample from an empty buffer");
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
    const auto weights = probabilities();
    std::vector<Trajectory> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.push_back(entries_[sample_weighted(rng, weights)]);
    return out;
}

} // namespace tti::trainer

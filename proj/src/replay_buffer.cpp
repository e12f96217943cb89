#include "fedsac/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace fedsac {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::add(std::span<const double> state, std::span<const double> action, double reward,
                       std::span<const double> next_state, bool done) {
    if (state.size() != static_cast<std::size_t>(state_dim_) || next_state.size() != state.size() ||
        action.size() != static_cast<std::size_t>(action_dim_))
        throw std::invalid_argument("ReplayBuffer::add: dimension mismatch");

    if (size_ < capacity_ && next_ == size_) {
        states_.insert(states_.end(), state.begin(), state.end());
        actions_.insert(actions_.end(), action.begin(), action.end());
        rewards_.push_back(reward);
        next_states_.insert(next_states_.end(), next_state.begin(), next_state.end());
        dones_.push_back(done ? 1.0 : 0.0);
    } else {
        std::copy(state.begin(), state.end(), states_.begin() + next_ * state_dim_);
        std::copy(action.begin(), action.end(), actions_.begin() + next_ * action_dim_);
        rewards_[next_] = reward;
        std::copy(next_state.begin(), next_state.end(), next_states_.begin() + next_ * state_dim_);
        dones_[next_] = done ? 1.0 : 0.0;
    }
    next_ = (next_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

void ReplayBuffer::gather(const std::vector<std::size_t>& slots, Batch& out) const {
    const auto b = static_cast<Eigen::Index>(slots.size());
    out.states.resize(state_dim_, b);
    out.actions.resize(action_dim_, b);
    out.rewards.resize(b);
    out.next_states.resize(state_dim_, b);
    out.dones.resize(b);
    for (Eigen::Index j = 0; j < b; ++j) {
        const std::size_t s = slots[j];
        std::copy_n(states_.data() + s * state_dim_, state_dim_, out.states.col(j).data());
        std::copy_n(actions_.data() + s * action_dim_, action_dim_, out.actions.col(j).data());
        out.rewards(j) = rewards_[s];
        std::copy_n(next_states_.data() + s * state_dim_, state_dim_, out.next_states.col(j).data());
        out.dones(j) = dones_[s];
    }
}

Batch ReplayBuffer::sample(std::size_t batch_size, std::mt19937_64& rng) const {
    if (batch_size > size_) throw std::invalid_argument("ReplayBuffer::sample: not enough transitions");
    // Floyd's algorithm: distinct indices in O(batch) expected time.
    std::vector<std::size_t> picked;
    picked.reserve(batch_size);
    for (std::size_t j = size_ - batch_size; j < size_; ++j) {
        const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
        if (std::find(picked.begin(), picked.end(), t) == picked.end())
            picked.push_back(t);
        else
            picked.push_back(j);
    }
    Batch out;
    gather(picked, out);
    return out;
}

Batch ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("ReplayBuffer::at");
    const std::size_t oldest = size_ < capacity_ ? 0 : next_;
    Batch out;
    gather({(oldest + i) % capacity_}, out);
    return out;
}

}  // namespace fedsac

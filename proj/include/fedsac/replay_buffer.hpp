#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fedsac {

/// Column-per-sample view of a minibatch.
struct Batch {
    Eigen::MatrixXd states;       // state_dim x B
    Eigen::MatrixXd actions;      // action_dim x B
    Eigen::RowVectorXd rewards;   // 1 x B
    Eigen::MatrixXd next_states;  // state_dim x B
    Eigen::RowVectorXd dones;     // 1 x B, 1.0 when terminal

    Eigen::Index size() const { return states.cols(); }
};

/// FIFO ring of transitions. Storage grows on demand up to `capacity`.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

    void add(std::span<const double> state, std::span<const double> action, double reward,
             std::span<const double> next_state, bool done);

    /// `batch_size` distinct transitions, uniformly at random.
    Batch sample(std::size_t batch_size, std::mt19937_64& rng) const;

    /// Transition at logical position i (0 = oldest still stored).
    Batch at(std::size_t i) const;

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }

private:
    void gather(const std::vector<std::size_t>& slots, Batch& out) const;

    std::size_t capacity_;
    int state_dim_;
    int action_dim_;
    std::size_t size_ = 0;
    std::size_t next_ = 0;  // slot the next insertion writes
    std::vector<double> states_, actions_, rewards_, next_states_, dones_;
};

}  // namespace fedsac

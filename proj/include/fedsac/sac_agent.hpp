#pragma once

// Soft Actor-Critic with a tanh-squashed Gaussian policy, twin critics with
// Polyak-averaged targets and an automatically tuned entropy coefficient.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fedsac/env_config.hpp"
#include "fedsac/environment.hpp"
#include "fedsac/metrics.hpp"
#include "fedsac/mlp.hpp"
#include "fedsac/replay_buffer.hpp"
#include "fedsac/schedulers.hpp"

namespace fedsac {

struct SacConfig {
    std::vector<int> hidden{256, 256};
    std::size_t batch_size = 256;
    double lr = 1e-3;
    double lr_decay = 0.99;
    long lr_decay_every_episodes = 6000;
    double init_alpha = 0.8;
    std::optional<double> target_entropy;  // defaults to -action_dim
    double tau = 0.005;
    long train_every = 1000;
    long gradient_steps = 1000;
    long warmup_steps = 100;
    double gamma = 1.0;
    std::size_t buffer_capacity = 2'000'000;

    /// 2 x 256 for up to ten workers, 3 x 512 above.
    static SacConfig for_workers(int workers);
};

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Frozen policy network plus what is needed to interpret it.
struct TrainedPolicy {
    int workers = 0;
    Mlp net;  // outputs [mean (A); log_std (A)]
    NormalizationCaps caps;

    /// Deterministic action tanh(mean) for a raw environment state.
    std::vector<double> act(const EnvState& state) const;
};

/// Squashed Gaussian evaluated on a batch with externally supplied noise.
template <typename T>
struct PolicySample {
    using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
    Matrix mean, log_std, std, noise, pre_tanh, action;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> log_std_clamped;
    Eigen::Matrix<T, 1, Eigen::Dynamic> log_prob;
    typename BasicMlp<T>::Cache cache;
};

template <typename T>
PolicySample<T> evaluate_policy(const BasicMlp<T>& policy, const typename BasicMlp<T>::Matrix& states,
                                const typename BasicMlp<T>::Matrix& noise);

struct LossReport {
    double critic_loss = 0.0;
    double policy_loss = 0.0;
    double alpha_loss = 0.0;
    double entropy = 0.0;  // -mean log pi
    double alpha = 0.0;
    bool aborted = false;
};

/// The learner. T is the arithmetic type of the networks; training uses
/// float, gradient checks use double.
template <typename T>
class BasicSacAgent {
public:
    using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

    BasicSacAgent(int workers, NormalizationCaps caps, SacConfig cfg, std::uint64_t seed);

    /// Raw action in (-1, 1)^{2K} for a normalized state.
    std::vector<double> select_action(std::span<const double> normalized_state, bool stochastic);

    /// One SAC gradient step on `batch`. Non-finite losses abort the step
    /// before any parameter is touched by the offending optimizer.
    LossReport update(const Batch& batch);

    // Loss functions with fixed noise, exposed for gradient checking. The
    // gradients are with respect to the live (non-target) networks.
    double critic_loss(const Batch& batch, const Matrix& next_noise, double alpha, Vector* grad_q1,
                       Vector* grad_q2) const;
    double policy_loss(const Batch& batch, const Matrix& noise, double alpha, Vector* grad_policy) const;

    struct TrainStats {
        long env_steps = 0;
        long gradient_steps = 0;
        long aborted_updates = 0;
        long first_gradient_at_step = -1;
    };

    /// Offline training: runs `episodes` episodes on env, storing every
    /// transition and updating on the configured schedule. `sink` receives
    /// one EpisodeMetrics per episode.
    TrainStats train(Environment& env, long episodes, std::uint64_t seed,
                     const std::function<void(const EpisodeMetrics&)>& sink = {});

    TrainedPolicy export_policy() const;

    BasicMlp<T>& policy() { return policy_; }
    BasicMlp<T>& q1() { return q1_; }
    BasicMlp<T>& q2() { return q2_; }
    const BasicMlp<T>& q1_target() const { return q1_target_; }
    const BasicMlp<T>& q2_target() const { return q2_target_; }
    double alpha() const;
    double log_alpha() const { return static_cast<double>(log_alpha_(0)); }
    double learning_rate() const { return policy_opt_.lr(); }
    const SacConfig& config() const { return cfg_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    int action_dim() const { return 2 * workers_; }
    int state_dim() const { return 6 * workers_ + 1; }
    double target_entropy() const { return target_entropy_; }

private:
    struct TypedBatch {
        Matrix states, actions, next_states;
        Eigen::Matrix<T, 1, Eigen::Dynamic> rewards, dones;
    };
    static TypedBatch typed(const Batch& b);
    double critic_loss(const TypedBatch& batch, const Matrix& next_noise, double alpha, Vector* grad_q1,
                       Vector* grad_q2) const;
    double policy_loss(const TypedBatch& batch, const PolicySample<T>& ps, double alpha, Vector* grad_policy) const;
    Matrix critic_input(const Matrix& states, const Matrix& actions) const;
    Matrix gaussian(Eigen::Index rows, Eigen::Index cols);
    void decay_learning_rates();

    int workers_;
    NormalizationCaps caps_;
    SacConfig cfg_;
    std::mt19937_64 rng_;
    BasicMlp<T> policy_, q1_, q2_, q1_target_, q2_target_;
    BasicAdam<T> policy_opt_, q1_opt_, q2_opt_, alpha_opt_;
    Vector log_alpha_;
    double target_entropy_;
    ReplayBuffer buffer_;
};

using SacAgent = BasicSacAgent<float>;

extern template class BasicSacAgent<float>;
extern template class BasicSacAgent<double>;

/// Agent adapter that runs a frozen policy deterministically.
class SacPolicyAgent final : public Agent {
public:
    explicit SacPolicyAgent(TrainedPolicy policy) : policy_(std::move(policy)) {}
    std::vector<double> act(const EnvState& state, std::mt19937_64& rng) override;
    std::string name() const override { return "sac"; }

private:
    TrainedPolicy policy_;
};

}  // namespace fedsac

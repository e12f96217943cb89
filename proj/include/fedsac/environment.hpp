#pragma once

// Episodic MDP around the energy model and the FL emulator. One step is one
// global iteration: the agent grants (f, p) to every worker, the workers
// train and upload (or discard late updates), the coordinator aggregates and
// the step reward is the negated energy plus constraint penalties.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fedsac/env_config.hpp"
#include "fedsac/fl_emulator.hpp"
#include "fedsac/population.hpp"

namespace fedsac {

/// Observation: previous round's outcome plus the capabilities the workers
/// report for the coming round.
struct EnvState {
    std::vector<double> prev_local_iters;
    std::vector<double> prev_wasted_j;
    double prev_rate = 1.0;
    std::vector<double> f_max_hz;
    std::vector<double> p_max_w;
    std::vector<double> bandwidth_hz;
    std::vector<double> samples;

    int workers() const { return static_cast<int>(f_max_hz.size()); }

    /// [I (K), E^W (K), e, f_max (K), p_max (K), b (K), s (K)], length 6K+1.
    std::vector<double> flatten() const;
};

/// Every feature divided by its cap and clamped to [0, 1]; the rate feature
/// is already in [0, 1].
std::vector<double> normalize_state(const EnvState& state, const NormalizationCaps& caps);

struct ChannelUse {
    int accesses = 0;
    double occupation_s = 0.0;
    int unnecessary_accesses = 0;
    double unnecessary_s = 0.0;
};

/// What happened to one worker during one round.
struct WorkerRound {
    Allocation alloc;
    bool selected = false;  // f > 0 and p > 0
    int local_iters = 0;
    double comp_time_s = 0.0;
    double tx_time_s = 0.0;
    double comp_j = 0.0;  // already gated by Omega
    double tx_j = 0.0;
    double wasted_j = 0.0;
    bool late = false;  // P1
    bool transmitted = false;
    bool valid = false;
};

struct StepOutcome {
    double reward = 0.0;
    EnvState next_state;
    bool done = false;
    bool converged = false;
    std::vector<WorkerRound> workers;
    int p1 = 0;
    int p2 = 0;
    ChannelUse channel;
    double round_time_s = 0.0;
    double valid_fraction = 0.0;
    double global_rate = 1.0;

    double comp_j() const;
    double tx_j() const;
    double wasted_j() const;
};

/// Dead-zone affine decode of a raw action in [-1, 1]^{2K}: the first K
/// entries scale f_max, the last K scale p_max. Values below
/// `deadzone_frac * cap` become exactly zero. Returns the number of entries
/// that had to be clamped into [-1, 1] through `clamped` when non-null.
std::vector<Allocation> decode_action(std::span<const double> raw, std::span<const WorkerCaps> caps,
                                      double deadzone_frac, int* clamped = nullptr);

class Environment {
public:
    explicit Environment(EnvConfig cfg);

    /// Starts a new episode. In the static environment the device classes,
    /// capabilities and distances are fixed for the lifetime of the object
    /// (drawn from cfg.seed); datasets are redrawn every episode.
    EnvState reset(std::uint64_t episode_seed);

    /// Applies one raw action. Throws std::logic_error once the episode is over.
    StepOutcome step(std::span<const double> raw_action);

    const EnvConfig& config() const { return cfg_; }
    const EnvState& state() const { return state_; }
    const Population& population() const { return pop_; }
    const EmulatedRun& run() const { return run_; }
    const std::vector<int>& local_iters() const { return local_iters_; }
    bool done() const { return done_; }
    int round() const { return round_; }
    long clamped_entries() const { return clamped_entries_; }

private:
    EnvState build_state(std::span<const double> iters, std::span<const double> wasted, double rate) const;

    EnvConfig cfg_;
    Population pop_;
    std::mt19937_64 rng_;
    EmulatedRun run_;
    std::vector<int> local_iters_;
    EnvState state_;
    int round_ = 0;
    bool done_ = true;
    long clamped_entries_ = 0;
};

}  // namespace fedsac

#pragma once

// Scheduler (agent) interface and the non-learned baselines.

#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fedsac/environment.hpp"

namespace fedsac {

/// Anything that can drive an Environment. act() returns raw entries in
/// [-1, 1]^{2K}; decoding onto capacities is the environment's job.
class Agent {
public:
    virtual ~Agent() = default;
    virtual std::vector<double> act(const EnvState& state, std::mt19937_64& rng) = 0;
    virtual void observe(const StepOutcome& /*outcome*/) {}
    virtual void reset_episode() {}
    virtual std::string name() const = 0;
};

/// BES: every worker at full capacity, every round.
class BestEffortScheduler final : public Agent {
public:
    std::vector<double> act(const EnvState& state, std::mt19937_64& rng) override;
    std::string name() const override { return "bes"; }
};

/// RSS: every raw entry i.i.d. Uniform(-1, 1).
class RandomScheduler final : public Agent {
public:
    std::vector<double> act(const EnvState& state, std::mt19937_64& rng) override;
    std::string name() const override { return "rss"; }
};

std::vector<double> uniform_action(int workers, std::mt19937_64& rng);

struct GreedyMemory {
    std::optional<std::vector<double>> best_action;
    double best_round_energy = std::numeric_limits<double>::infinity();
};

/// Uniform-random rounds GSS spends filling its memory. With a single
/// random round the replayed action is just one random draw, so the result
/// swings with the seed; a few episodes' worth of candidates fixes that.
inline constexpr long kGssExploreRounds = 100;

/// GSS: replays the joint action with the lowest per-round energy
/// (E^C + E^T + E^W) seen so far. The first `explore_rounds` rounds of a
/// run are uniform random so that there is something to be greedy about.
/// Memory lives for the whole run, across episodes.
class GreedyScheduler final : public Agent {
public:
    explicit GreedyScheduler(long explore_rounds = kGssExploreRounds) : explore_rounds_(explore_rounds) {}

    std::vector<double> act(const EnvState& state, std::mt19937_64& rng) override;
    void observe(const StepOutcome& outcome) override;
    std::string name() const override { return "gss"; }

    const GreedyMemory& memory() const { return memory_; }

private:
    long explore_rounds_;
    long rounds_seen_ = 0;
    GreedyMemory memory_;
    std::vector<double> last_action_;
};

/// Per-round energy GSS ranks actions by.
double round_energy(const StepOutcome& outcome);

}  // namespace fedsac

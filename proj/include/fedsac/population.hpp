#pragma once

// Worker population generators for the static and dynamic network
// environments.

#include <random>
#include <vector>

#include "fedsac/env_config.hpp"

namespace fedsac {

struct Population {
    std::vector<WorkerCaps> workers;
    std::vector<bool> low_end;

    int size() const { return static_cast<int>(workers.size()); }
    int low_end_count() const;
};

/// Draws a value from N(mean, std) restricted to [bounds.lo, bounds.hi].
double sample_truncated_normal(double mean, double std, Range bounds, std::mt19937_64& rng);

/// Number of low-end devices for one episode.
int draw_low_end_count(const EnvConfig& cfg, std::mt19937_64& rng);

/// Full population: device classes, capabilities, channels and datasets.
Population generate_environment(const EnvConfig& cfg, std::mt19937_64& rng);

/// Redraws the round-varying quantities (f_max, p_max, distance, bandwidth)
/// of every worker within its class. Dynamic environment only.
void resample_round_conditions(Population& pop, const EnvConfig& cfg, std::mt19937_64& rng);

/// Redraws dataset sizes and variances.
void resample_datasets(Population& pop, const EnvConfig& cfg, std::mt19937_64& rng);

}  // namespace fedsac

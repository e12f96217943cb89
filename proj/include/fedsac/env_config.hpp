#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "fedsac/energy_model.hpp"
#include "fedsac/fl_emulator.hpp"

namespace fedsac {

enum class EnvKind { Static, Dynamic };
enum class SyncMode { WorkerSide, CoordinatorSide };

std::string to_string(EnvKind kind);
std::string to_string(SyncMode mode);
EnvKind parse_env_kind(const std::string& s);
SyncMode parse_sync_mode(const std::string& s);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Capabilities of one device class. In the static environment the ranges
/// collapse to a single value.
struct TierSpec {
    Range f_hz;
    Range p_w;
    double flops_per_cycle = 1.0;
};

/// Upper bounds used to scale observations into [0, 1].
struct NormalizationCaps {
    double f_hz = 1.0;
    double p_w = 1.0;
    double bandwidth_hz = 1.0;
    double samples = 1.0;
    double local_iters = 1.0;
    double wasted_j = 1.0;
};

struct EnvConfig {
    EnvKind kind = EnvKind::Static;
    int workers = 5;
    FLModelSpec model;

    TierSpec low_end;
    TierSpec high_end;
    double switched_capacitance = 1e-28;
    double n0_w_per_hz = 0.0;

    // Share of low-end devices: fixed in the static environment, drawn per
    // episode from a truncated normal (in percent) in the dynamic one.
    double low_end_fraction = 0.2;
    double low_end_pct_mean = 15.0;
    double low_end_pct_std = 12.0;
    Range low_end_pct_bounds{0.0, 60.0};

    Range distance_km{0.010, 0.500};
    Range bandwidth_hz{20e6, 20e6};
    Range samples{800, 1200};
    Range variance{0.1, 0.9};

    EmulatorParams emulator;
    SyncMode sync = SyncMode::WorkerSide;
    double deadzone_frac = 0.05;
    double mu1 = 0.1;
    double mu2 = 0.9;
    std::uint64_t seed = 1;

    void validate() const;
    int state_dim() const { return 6 * workers + 1; }
    int action_dim() const { return 2 * workers; }
    NormalizationCaps normalization_caps() const;
};

/// Penalty weights for K workers: {0.1, 0.2, 0.4} at K = {5, 10, 20},
/// piecewise linear in between, constant outside, mu2 = 1 - mu1.
std::pair<double, double> default_penalty_weights(int workers);

EnvConfig static_preset(int workers);
EnvConfig dynamic_preset(int workers);

/// Reads a `key = value` config file. `env_kind` and `workers` select the
/// preset the remaining keys override. Throws std::runtime_error on unknown
/// keys or unreadable input.
EnvConfig load_env_config(const std::string& path);
EnvConfig parse_env_config(std::istream& in);

/// Resolves "static5", "dynamic20", ... to a preset.
EnvConfig preset_by_name(const std::string& name);

}  // namespace fedsac

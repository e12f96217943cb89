#pragma once

// Cheap stand-in for a real federated training run. Instead of training a
// network it produces the quantities the scheduler and the energy model
// need: local iteration counts per worker, a global iteration budget and a
// monotone global performance-rate curve that reaches epsilon0 once enough
// valid updates have been aggregated.

#include <random>
#include <vector>

namespace fedsac {

struct EmulatorParams {
    int local_iters_lo = 2;
    int local_iters_hi = 11;
    int global_iters_lo = 10;
    int global_iters_hi = 22;
    double init_acc_lo = 0.15;
    double init_acc_hi = 0.18;
    double jitter = 0.0;
    int max_rounds_safeguard = 200;

    void validate() const;
};

/// Round-half-up for the affine integer maps.
int round_half_up(double x);

/// Affine map of `variance` from [v_min, v_max] onto the local iteration
/// range. A degenerate variance range maps to the midpoint.
int sample_local_iters(double variance, double v_min, double v_max, const EmulatorParams& params);

/// Global iteration budget, inversely (affinely) related to the mean local
/// iteration count and clamped to the configured range.
int sample_global_budget(double mean_local_iters, const EmulatorParams& params);

/// Normalized distance to the optimum, (F - F*) / (F_init - F*).
double performance_rate(double current, double initial, double f_star);

/// Local performance rate after `iters_done` of `iters_needed` passes, with
/// the objective moving linearly from `init_acc` to the value that meets
/// `eta` exactly at `iters_needed`.
double local_rate(double init_acc, int iters_done, int iters_needed, double f_star, double eta);

/// Progress of one emulated training run.
class EmulatedRun {
public:
    EmulatedRun() = default;
    EmulatedRun(int global_budget, double epsilon0, double jitter);

    struct RoundResult {
        double e_next;
        bool converged;
    };

    /// Aggregate one round in which `valid_fraction` of the total
    /// (variance-weighted) update mass arrived on time.
    RoundResult advance_round(double valid_fraction, std::mt19937_64& rng);

    int global_budget() const { return global_budget_; }
    double progress() const { return progress_; }
    double current_rate() const { return e_; }
    bool converged() const { return converged_; }
    const std::vector<double>& rate_curve() const { return curve_; }

private:
    int global_budget_ = 1;
    double epsilon0_ = 0.04;
    double jitter_ = 0.0;
    double progress_ = 0.0;
    double e_ = 1.0;
    bool converged_ = false;
    std::vector<double> curve_{1.0};
};

}  // namespace fedsac

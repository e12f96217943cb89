#include "fedsac/fl_emulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fedsac {

void EmulatorParams::validate() const {
    if (local_iters_lo < 2 || local_iters_lo > local_iters_hi)
        throw std::invalid_argument("EmulatorParams: need 2 <= local_iters_lo <= local_iters_hi");
    if (global_iters_lo < 1 || global_iters_lo > global_iters_hi)
        throw std::invalid_argument("EmulatorParams: need 1 <= global_iters_lo <= global_iters_hi");
    if (!(init_acc_lo > 0.0 && init_acc_lo <= init_acc_hi && init_acc_hi < 1.0))
        throw std::invalid_argument("EmulatorParams: need 0 < init_acc_lo <= init_acc_hi < 1");
    if (!(jitter >= 0.0 && jitter < 1.0)) throw std::invalid_argument("EmulatorParams: jitter must lie in [0, 1)");
    if (max_rounds_safeguard < 1) throw std::invalid_argument("EmulatorParams: safeguard must be positive");
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

int sample_local_iters(double variance, double v_min, double v_max, const EmulatorParams& params) {
    const double lo = params.local_iters_lo;
    const double hi = params.local_iters_hi;
    double t = 0.5;
    if (v_max > v_min) t = std::clamp((variance - v_min) / (v_max - v_min), 0.0, 1.0);
    return round_half_up(lo + t * (hi - lo));
}

int sample_global_budget(double mean_local_iters, const EmulatorParams& params) {
    const double ilo = params.local_iters_lo;
    const double ihi = params.local_iters_hi;
    double t = 0.5;
    if (ihi > ilo) t = std::clamp((mean_local_iters - ilo) / (ihi - ilo), 0.0, 1.0);
    const double g = params.global_iters_hi + t * (params.global_iters_lo - params.global_iters_hi);
    return std::clamp(round_half_up(g), params.global_iters_lo, params.global_iters_hi);
}

double performance_rate(double current, double initial, double f_star) {
    return (current - f_star) / (initial - f_star);
}

double local_rate(double init_acc, int iters_done, int iters_needed, double f_star, double eta) {
    if (iters_needed <= 0) return 1.0;
    const double target = f_star + eta * (init_acc - f_star);
    const double frac = std::clamp(static_cast<double>(iters_done) / iters_needed, 0.0, 1.0);
    const double current = init_acc + frac * (target - init_acc);
    return performance_rate(current, init_acc, f_star);
}

EmulatedRun::EmulatedRun(int global_budget, double epsilon0, double jitter)
    : global_budget_(global_budget), epsilon0_(epsilon0), jitter_(jitter) {
    if (global_budget < 1) throw std::invalid_argument("EmulatedRun: budget must be positive");
}

EmulatedRun::RoundResult EmulatedRun::advance_round(double valid_fraction, std::mt19937_64& rng) {
    progress_ += std::clamp(valid_fraction, 0.0, 1.0);
    const double prev = e_;

    if (progress_ >= global_budget_) {
        converged_ = true;
        e_ = epsilon0_;
    } else {
        double e = std::exp(std::log(epsilon0_) * progress_ / global_budget_);
        if (jitter_ > 0.0) {
            std::uniform_real_distribution<double> u(-jitter_, jitter_);
            e *= 1.0 + u(rng);
        }
        // Not converged means strictly above the target, and the curve never rises.
        const double floor = std::nextafter(epsilon0_, std::numeric_limits<double>::infinity());
        e_ = std::min(prev, std::max(e, floor));
    }
    curve_.push_back(e_);
    return {e_, converged_};
}

}  // namespace fedsac

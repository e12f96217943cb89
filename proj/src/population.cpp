#include "fedsac/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fedsac {

int Population::low_end_count() const {
    return static_cast<int>(std::count(low_end.begin(), low_end.end(), true));
}

namespace {

double uniform(Range r, std::mt19937_64& rng) {
    if (r.hi <= r.lo) return r.lo;
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

const TierSpec& tier_of(const EnvConfig& cfg, bool low) { return low ? cfg.low_end : cfg.high_end; }

}  // namespace

double sample_truncated_normal(double mean, double std, Range bounds, std::mt19937_64& rng) {
    std::normal_distribution<double> n(mean, std);
    // Rejection is cheap here: the configured window holds most of the mass.
    for (int i = 0; i < 10000; ++i) {
        const double x = n(rng);
        if (x >= bounds.lo && x <= bounds.hi) return x;
    }
    return std::clamp(mean, bounds.lo, bounds.hi);
}

int draw_low_end_count(const EnvConfig& cfg, std::mt19937_64& rng) {
    double fraction = cfg.low_end_fraction;
    if (cfg.kind == EnvKind::Dynamic)
        fraction = sample_truncated_normal(cfg.low_end_pct_mean, cfg.low_end_pct_std, cfg.low_end_pct_bounds, rng) / 100.0;
    return std::clamp(round_half_up(fraction * cfg.workers), 0, cfg.workers);
}

Population generate_environment(const EnvConfig& cfg, std::mt19937_64& rng) {
    Population pop;
    pop.workers.resize(cfg.workers);
    pop.low_end.assign(cfg.workers, false);

    const int n_low = draw_low_end_count(cfg, rng);
    std::vector<int> order(cfg.workers);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < n_low; ++i) pop.low_end[order[i]] = true;

    for (int k = 0; k < cfg.workers; ++k) {
        WorkerCaps& w = pop.workers[k];
        w.flops_per_cycle = tier_of(cfg, pop.low_end[k]).flops_per_cycle;
        w.switched_capacitance = cfg.switched_capacitance;
    }
    resample_round_conditions(pop, cfg, rng);
    resample_datasets(pop, cfg, rng);
    return pop;
}

void resample_round_conditions(Population& pop, const EnvConfig& cfg, std::mt19937_64& rng) {
    for (int k = 0; k < pop.size(); ++k) {
        WorkerCaps& w = pop.workers[k];
        const TierSpec& tier = tier_of(cfg, pop.low_end[k]);
        w.f_max_hz = uniform(tier.f_hz, rng);
        w.p_max_w = uniform(tier.p_w, rng);
        w.distance_km = uniform(cfg.distance_km, rng);
        w.bandwidth_hz = uniform(cfg.bandwidth_hz, rng);
    }
}

void resample_datasets(Population& pop, const EnvConfig& cfg, std::mt19937_64& rng) {
    const int s_lo = static_cast<int>(std::lround(cfg.samples.lo));
    const int s_hi = static_cast<int>(std::lround(cfg.samples.hi));
    std::uniform_int_distribution<int> samples(s_lo, s_hi);
    for (auto& w : pop.workers) {
        w.n_samples = samples(rng);
        w.data_variance = uniform(cfg.variance, rng);
    }
}

}  // namespace fedsac

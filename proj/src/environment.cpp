#include "fedsac/environment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "fedsac/energy_model.hpp"

namespace fedsac {

std::vector<double> EnvState::flatten() const {
    std::vector<double> v;
    v.reserve(6 * workers() + 1);
    v.insert(v.end(), prev_local_iters.begin(), prev_local_iters.end());
    v.insert(v.end(), prev_wasted_j.begin(), prev_wasted_j.end());
    v.push_back(prev_rate);
    v.insert(v.end(), f_max_hz.begin(), f_max_hz.end());
    v.insert(v.end(), p_max_w.begin(), p_max_w.end());
    v.insert(v.end(), bandwidth_hz.begin(), bandwidth_hz.end());
    v.insert(v.end(), samples.begin(), samples.end());
    return v;
}

std::vector<double> normalize_state(const EnvState& state, const NormalizationCaps& caps) {
    const int k = state.workers();
    std::vector<double> v = state.flatten();
    const double per_block[] = {caps.local_iters, caps.wasted_j};
    const double tail[] = {caps.f_hz, caps.p_w, caps.bandwidth_hz, caps.samples};
    auto scale = [](double x, double cap) { return std::clamp(x / cap, 0.0, 1.0); };
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < k; ++i) v[b * k + i] = scale(v[b * k + i], per_block[b]);
    v[2 * k] = std::clamp(v[2 * k], 0.0, 1.0);
    for (int b = 0; b < 4; ++b)
        for (int i = 0; i < k; ++i) {
            const int idx = 2 * k + 1 + b * k + i;
            v[idx] = scale(v[idx], tail[b]);
        }
    return v;
}

double StepOutcome::comp_j() const {
    return std::accumulate(workers.begin(), workers.end(), 0.0, [](double a, const WorkerRound& w) { return a + w.comp_j; });
}

double StepOutcome::tx_j() const {
    return std::accumulate(workers.begin(), workers.end(), 0.0, [](double a, const WorkerRound& w) { return a + w.tx_j; });
}

double StepOutcome::wasted_j() const {
    return std::accumulate(workers.begin(), workers.end(), 0.0,
                           [](double a, const WorkerRound& w) { return a + w.wasted_j; });
}

std::vector<Allocation> decode_action(std::span<const double> raw, std::span<const WorkerCaps> caps,
                                      double deadzone_frac, int* clamped) {
    const std::size_t k = caps.size();
    if (raw.size() != 2 * k)
        throw std::invalid_argument("decode_action: expected " + std::to_string(2 * k) + " entries, got " +
                                    std::to_string(raw.size()));
    int n_clamped = 0;
    auto map = [&](double x, double cap) {
        if (!std::isfinite(x)) throw std::invalid_argument("decode_action: non-finite action entry");
        if (x < -1.0 || x > 1.0) {
            ++n_clamped;
            x = std::clamp(x, -1.0, 1.0);
        }
        const double v = 0.5 * (x + 1.0) * cap;
        return v < deadzone_frac * cap ? 0.0 : v;
    };
    std::vector<Allocation> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        out[i].f_hz = map(raw[i], caps[i].f_max_hz);
        out[i].p_w = map(raw[k + i], caps[i].p_max_w);
    }
    if (clamped) *clamped = n_clamped;
    return out;
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.kind == EnvKind::Static) {
        std::mt19937_64 population_rng(cfg_.seed);
        pop_ = generate_environment(cfg_, population_rng);
    }
}

EnvState Environment::build_state(std::span<const double> iters, std::span<const double> wasted, double rate) const {
    EnvState s;
    s.prev_local_iters.assign(iters.begin(), iters.end());
    s.prev_wasted_j.assign(wasted.begin(), wasted.end());
    s.prev_rate = rate;
    for (const auto& w : pop_.workers) {
        s.f_max_hz.push_back(w.f_max_hz);
        s.p_max_w.push_back(w.p_max_w);
        s.bandwidth_hz.push_back(w.bandwidth_hz);
        s.samples.push_back(w.n_samples);
    }
    return s;
}

EnvState Environment::reset(std::uint64_t episode_seed) {
    rng_.seed(episode_seed);
    if (cfg_.kind == EnvKind::Dynamic)
        pop_ = generate_environment(cfg_, rng_);
    else
        resample_datasets(pop_, cfg_, rng_);

    local_iters_.resize(cfg_.workers);
    double iter_sum = 0.0;
    for (int k = 0; k < cfg_.workers; ++k) {
        local_iters_[k] =
            sample_local_iters(pop_.workers[k].data_variance, cfg_.variance.lo, cfg_.variance.hi, cfg_.emulator);
        iter_sum += local_iters_[k];
    }
    const int budget = sample_global_budget(iter_sum / cfg_.workers, cfg_.emulator);
    run_ = EmulatedRun(budget, cfg_.model.epsilon0, cfg_.emulator.jitter);

    const std::vector<double> zeros(cfg_.workers, 0.0);
    state_ = build_state(zeros, zeros, 1.0);
    round_ = 0;
    done_ = false;
    return state_;
}

StepOutcome Environment::step(std::span<const double> raw_action) {
    if (done_) throw std::logic_error("Environment::step called on a finished episode (call reset first)");

    int clamped = 0;
    const auto allocs = decode_action(raw_action, pop_.workers, cfg_.deadzone_frac, &clamped);
    if (clamped > 0) {
        if (clamped_entries_ == 0)
            std::clog << "fedsac: warning: action entries outside [-1, 1] were clamped\n";
        clamped_entries_ += clamped;
    }

    const FLModelSpec& model = cfg_.model;
    const double h = model.deadline_s;
    StepOutcome out;
    out.workers.resize(cfg_.workers);

    double f_sum = 0.0;
    double variance_all = 0.0;
    double variance_valid = 0.0;
    int n_valid = 0;
    bool any_selected = false;
    bool any_late = false;
    double slowest = 0.0;

    for (int k = 0; k < cfg_.workers; ++k) {
        const WorkerCaps& caps = pop_.workers[k];
        WorkerRound& w = out.workers[k];
        w.alloc = allocs[k];
        f_sum += w.alloc.f_hz;
        variance_all += caps.data_variance;

        // No power means no local training (Omega gate); no frequency means
        // nothing to upload. Either way the worker sits this round out.
        w.selected = w.alloc.f_hz > 0.0 && omega(w.alloc.p_w) == 1;
        if (!w.selected) continue;
        any_selected = true;

        w.local_iters = local_iters_[k];
        w.comp_time_s = comp_time(caps, model, w.local_iters, w.alloc.f_hz);
        const double rate =
            data_rate(caps.bandwidth_hz, channel_gain_linear(caps.distance_km), w.alloc.p_w, cfg_.n0_w_per_hz);
        w.tx_time_s = tx_time(model, w.alloc.p_w, rate);
        w.comp_j = comp_energy(caps, model, w.local_iters, w.alloc.f_hz);
        const double tx_j = tx_energy(model, w.alloc.p_w, rate);

        if (deadline_ok(w.comp_time_s, w.tx_time_s, h)) {
            w.tx_j = tx_j;
            w.transmitted = true;
            w.valid = true;
            ++n_valid;
            variance_valid += caps.data_variance;
            out.channel.accesses += 1;
            out.channel.occupation_s += w.tx_time_s;
            slowest = std::max(slowest, w.comp_time_s + w.tx_time_s);
            continue;
        }

        w.late = true;
        any_late = true;
        if (cfg_.sync == SyncMode::WorkerSide) {
            // The worker knows it will miss H and drops the update locally.
            w.wasted_j = w.comp_j;
        } else {
            w.tx_j = tx_j;
            w.transmitted = true;
            w.wasted_j = w.comp_j + w.tx_j;
            out.channel.accesses += 1;
            out.channel.occupation_s += w.tx_time_s;
            out.channel.unnecessary_accesses += 1;
            out.channel.unnecessary_s += w.tx_time_s;
        }
    }

    out.p2 = f_sum > 0.0 ? 0 : 1;
    for (const auto& w : out.workers) out.p1 += w.late ? 1 : 0;

    if (variance_all > 0.0)
        out.valid_fraction = variance_valid / variance_all;
    else
        out.valid_fraction = static_cast<double>(n_valid) / cfg_.workers;

    const auto progress = run_.advance_round(out.valid_fraction, rng_);
    out.global_rate = progress.e_next;
    out.converged = progress.converged;

    if (!any_selected)
        out.round_time_s = 0.0;
    else if (any_late)
        out.round_time_s = h;
    else
        out.round_time_s = slowest;

    double energy = 0.0;
    for (const auto& w : out.workers) energy += w.comp_j + w.tx_j + w.wasted_j;
    out.reward = -(energy + cfg_.mu1 * out.p1 + cfg_.mu2 * out.p2);

    ++round_;
    done_ = out.converged || round_ >= cfg_.emulator.max_rounds_safeguard;
    out.done = done_;

    if (cfg_.kind == EnvKind::Dynamic && !done_) resample_round_conditions(pop_, cfg_, rng_);

    std::vector<double> iters(cfg_.workers), wasted(cfg_.workers);
    for (int k = 0; k < cfg_.workers; ++k) {
        iters[k] = out.workers[k].local_iters;
        wasted[k] = out.workers[k].wasted_j;
    }
    state_ = build_state(iters, wasted, out.global_rate);
    out.next_state = state_;
    return out;
}

}  // namespace fedsac

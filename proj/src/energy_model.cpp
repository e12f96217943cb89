#include "fedsac/energy_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fedsac {

void FLModelSpec::validate() const {
    if (!(alpha_flops > 0.0) || !(m_bits > 0.0) || !(deadline_s > 0.0))
        throw std::invalid_argument("FLModelSpec: alpha, m and deadline must be positive");
    if (!(eta > 0.0 && eta <= 1.0) || !(epsilon0 > 0.0 && epsilon0 <= 1.0))
        throw std::invalid_argument("FLModelSpec: eta and epsilon0 must lie in (0, 1]");
}

void WorkerCaps::validate() const {
    if (!(f_max_hz > 0.0) || !(p_max_w > 0.0) || !(flops_per_cycle > 0.0) || !(bandwidth_hz > 0.0))
        throw std::invalid_argument("WorkerCaps: f_max, p_max, c and bandwidth must be positive");
    if (n_samples < 1 || data_variance < 0.0 || !(distance_km > 0.0))
        throw std::invalid_argument("WorkerCaps: invalid dataset size, variance or distance");
}

double dataset_variance(const Matrix& rows) {
    if (rows.size() < 2)
        throw std::invalid_argument("dataset_variance: need at least 2 rows, got " +
                                    std::to_string(rows.size()));
    const std::size_t width = rows.front().size();
    std::vector<double> mean(width, 0.0);
    for (const auto& r : rows) {
        if (r.size() != width) throw std::invalid_argument("dataset_variance: ragged rows");
        for (std::size_t j = 0; j < width; ++j) mean[j] += r[j];
    }
    const double n = static_cast<double>(rows.size());
    for (auto& m : mean) m /= n;

    // Only the diagonal of the covariance is needed for the trace.
    double trace = 0.0;
    for (const auto& r : rows)
        for (std::size_t j = 0; j < width; ++j) {
            const double d = r[j] - mean[j];
            trace += d * d;
        }
    return trace / (n - 1.0);
}

double comp_energy(const WorkerCaps& caps, const FLModelSpec& spec, int local_iters, double f_hz) {
    return caps.switched_capacitance * local_iters * spec.alpha_flops * caps.n_samples * f_hz * f_hz /
           caps.flops_per_cycle;
}

double comp_time(const WorkerCaps& caps, const FLModelSpec& spec, int local_iters, double f_hz) {
    if (local_iters == 0) return 0.0;
    if (!(f_hz > 0.0))
        throw std::domain_error("comp_time: zero frequency means the worker is excluded");
    return local_iters * spec.alpha_flops * caps.n_samples / (caps.flops_per_cycle * f_hz);
}

double channel_gain_linear(double distance_km) {
    if (!(distance_km > 0.0)) throw std::domain_error("channel_gain_linear: distance must be positive");
    const double loss_db = 127.0 + 30.0 * std::log10(distance_km);
    return std::pow(10.0, -loss_db / 10.0);
}

double data_rate(double bandwidth_hz, double gain, double p_w, double n0_w_per_hz) {
    if (p_w <= 0.0) return 0.0;
    return bandwidth_hz * std::log2(1.0 + gain * p_w / (bandwidth_hz * n0_w_per_hz));
}

double tx_energy(const FLModelSpec& spec, double p_w, double rate_bps) {
    if (p_w <= 0.0) return 0.0;
    if (!(rate_bps > 0.0)) throw std::logic_error("tx_energy: positive power with zero rate");
    return spec.m_bits * p_w / rate_bps;
}

double tx_time(const FLModelSpec& spec, double p_w, double rate_bps) {
    if (p_w <= 0.0) return 0.0;
    if (!(rate_bps > 0.0)) throw std::logic_error("tx_time: positive power with zero rate");
    return spec.m_bits / rate_bps;
}

bool deadline_ok(double tau_s, double t_s, double deadline_s) { return tau_s + t_s < deadline_s; }

int omega(double p_w) { return p_w > 0.0 ? 1 : 0; }

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

double dbm_per_hz_to_watt_per_hz(double dbm_per_hz) { return dbm_to_watt(dbm_per_hz); }

}  // namespace fedsac

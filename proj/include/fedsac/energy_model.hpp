#pragma once

// Physical model of one federated-learning round: computation and
// transmission energy, achievable rate, latencies and the constraint
// indicators. Everything here is SI (Hz, W, J, s, bits) and free of state.

#include <cstddef>
#include <span>
#include <vector>

namespace fedsac {

/// Constants of the model being trained.
struct FLModelSpec {
    double alpha_flops = 1.8e6;  // complexity of one pass over one sample
    double m_bits = 2.008e7;     // size of the transmitted update
    double eta = 0.5;            // local performance target
    double epsilon0 = 0.04;      // global performance target
    double f_star = 1.0;         // optimal objective value
    double deadline_s = 13.0;    // round time threshold H

    void validate() const;
};

/// Capabilities and channel of a single worker for the current round.
struct WorkerCaps {
    double f_max_hz = 0.0;
    double p_max_w = 0.0;
    double flops_per_cycle = 1.0;
    double switched_capacitance = 1e-28;  // Watt / Hz^3
    double bandwidth_hz = 0.0;
    double distance_km = 0.0;
    int n_samples = 1;
    double data_variance = 0.0;

    void validate() const;
};

/// Resources granted to one worker for one round. Zero means "not used".
struct Allocation {
    double f_hz = 0.0;
    double p_w = 0.0;
};

using Matrix = std::vector<std::vector<double>>;

/// Trace of the sample covariance (divisor s-1) of the groundtruth rows.
/// Throws std::invalid_argument on fewer than two rows or ragged input.
double dataset_variance(const Matrix& rows);

/// Computation energy of `local_iters` passes at frequency `f_hz`.
double comp_energy(const WorkerCaps& caps, const FLModelSpec& spec, int local_iters, double f_hz);

/// Local training time. Returns 0 when there is nothing to compute; throws
/// std::domain_error when asked to compute at zero frequency.
double comp_time(const WorkerCaps& caps, const FLModelSpec& spec, int local_iters, double f_hz);

/// Linear channel gain for a path loss of 127 + 30 log10(d_km) dB.
double channel_gain_linear(double distance_km);

/// Shannon rate b log2(1 + g p / (b N0)) in bits/s.
double data_rate(double bandwidth_hz, double gain, double p_w, double n0_w_per_hz);

/// Energy and time to upload one update. Both are zero when p = 0.
double tx_energy(const FLModelSpec& spec, double p_w, double rate_bps);
double tx_time(const FLModelSpec& spec, double p_w, double rate_bps);

/// Strict deadline: tau + t < H.
bool deadline_ok(double tau_s, double t_s, double deadline_s);

/// Omega gate of the objective: 1 iff the worker has transmit power.
int omega(double p_w);

// Unit conversions used when reading configuration.
double dbm_to_watt(double dbm);
double watt_to_dbm(double w);
double dbm_per_hz_to_watt_per_hz(double dbm_per_hz);

}  // namespace fedsac

#include "fedsac/env_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <stdexcept>

#include <boost/program_options.hpp>

namespace fedsac {

namespace po = boost::program_options;

std::string to_string(EnvKind kind) { return kind == EnvKind::Static ? "static" : "dynamic"; }

std::string to_string(SyncMode mode) { return mode == SyncMode::WorkerSide ? "worker" : "coordinator"; }

EnvKind parse_env_kind(const std::string& s) {
    if (s == "static") return EnvKind::Static;
    if (s == "dynamic") return EnvKind::Dynamic;
    throw std::invalid_argument("unknown env_kind '" + s + "' (expected static|dynamic)");
}

SyncMode parse_sync_mode(const std::string& s) {
    if (s == "worker" || s == "worker-side") return SyncMode::WorkerSide;
    if (s == "coordinator" || s == "coordinator-side") return SyncMode::CoordinatorSide;
    throw std::invalid_argument("unknown sync mode '" + s + "' (expected worker|coordinator)");
}

namespace {

void check_range(const Range& r, const char* what, bool allow_zero = false) {
    const bool lo_ok = allow_zero ? r.lo >= 0.0 : r.lo > 0.0;
    if (!lo_ok || !(r.hi >= r.lo) || !std::isfinite(r.hi))
        throw std::invalid_argument(std::string("EnvConfig: invalid range for ") + what);
}

}  // namespace

void EnvConfig::validate() const {
    if (workers < 1) throw std::invalid_argument("EnvConfig: need at least one worker");
    model.validate();
    emulator.validate();
    for (const TierSpec* t : {&low_end, &high_end}) {
        check_range(t->f_hz, "f_max");
        check_range(t->p_w, "p_max");
        if (!(t->flops_per_cycle > 0.0)) throw std::invalid_argument("EnvConfig: flops per cycle must be positive");
    }
    check_range(distance_km, "distance");
    check_range(bandwidth_hz, "bandwidth");
    check_range(samples, "samples");
    check_range(variance, "variance", true);
    check_range(low_end_pct_bounds, "low-end percentage", true);
    if (low_end_pct_bounds.hi > 100.0) throw std::invalid_argument("EnvConfig: low-end percentage above 100");
    if (!(low_end_pct_std > 0.0)) throw std::invalid_argument("EnvConfig: low-end percentage std must be positive");
    if (!(low_end_fraction >= 0.0 && low_end_fraction <= 1.0))
        throw std::invalid_argument("EnvConfig: low_end_fraction must lie in [0, 1]");
    if (!(switched_capacitance > 0.0) || !(n0_w_per_hz > 0.0))
        throw std::invalid_argument("EnvConfig: capacitance and N0 must be positive");
    if (!(deadzone_frac >= 0.0 && deadzone_frac < 1.0)) throw std::invalid_argument("EnvConfig: deadzone in [0, 1)");
    if (mu1 < 0.0 || mu2 < 0.0) throw std::invalid_argument("EnvConfig: penalty weights must be nonnegative");
}

NormalizationCaps EnvConfig::normalization_caps() const {
    NormalizationCaps caps;
    caps.f_hz = std::max(low_end.f_hz.hi, high_end.f_hz.hi);
    caps.p_w = std::max(low_end.p_w.hi, high_end.p_w.hi);
    caps.bandwidth_hz = bandwidth_hz.hi;
    caps.samples = samples.hi;
    caps.local_iters = emulator.local_iters_hi;

    WorkerCaps worst;
    worst.switched_capacitance = switched_capacitance;
    worst.flops_per_cycle = std::min(low_end.flops_per_cycle, high_end.flops_per_cycle);
    worst.n_samples = static_cast<int>(samples.hi);
    caps.wasted_j = comp_energy(worst, model, emulator.local_iters_hi, caps.f_hz);
    return caps;
}

std::pair<double, double> default_penalty_weights(int workers) {
    double mu1 = 0.1;
    if (workers >= 20) {
        mu1 = 0.4;
    } else if (workers >= 10) {
        mu1 = 0.2 + (workers - 10) * (0.4 - 0.2) / 10.0;
    } else if (workers > 5) {
        mu1 = 0.1 + (workers - 5) * (0.2 - 0.1) / 5.0;
    }
    return {mu1, 1.0 - mu1};
}

namespace {

EnvConfig common_preset(int workers) {
    EnvConfig c;
    c.workers = workers;
    c.n0_w_per_hz = dbm_per_hz_to_watt_per_hz(-158.0);
    std::tie(c.mu1, c.mu2) = default_penalty_weights(workers);
    return c;
}

}  // namespace

EnvConfig static_preset(int workers) {
    EnvConfig c = common_preset(workers);
    c.kind = EnvKind::Static;
    c.low_end = {{1e9, 1e9}, {dbm_to_watt(28.0), dbm_to_watt(28.0)}, 4.0};
    c.high_end = {{3e9, 3e9}, {dbm_to_watt(33.0), dbm_to_watt(33.0)}, 2.0};
    c.bandwidth_hz = {20e6, 20e6};
    return c;
}

EnvConfig dynamic_preset(int workers) {
    EnvConfig c = common_preset(workers);
    c.kind = EnvKind::Dynamic;
    c.low_end = {{1e9, 3e9}, {dbm_to_watt(23.0), dbm_to_watt(28.0)}, 4.0};
    c.high_end = {{3.2e9, 5e9}, {dbm_to_watt(29.0), dbm_to_watt(33.0)}, 2.0};
    c.bandwidth_hz = {5e6, 20e6};
    return c;
}

EnvConfig preset_by_name(const std::string& name) {
    static const std::regex re("(static|dynamic)([0-9]+)");
    std::smatch m;
    if (!std::regex_match(name, m, re)) throw std::invalid_argument("unknown preset '" + name + "'");
    const int k = std::stoi(m[2].str());
    return m[1].str() == "static" ? static_preset(k) : dynamic_preset(k);
}

namespace {

using Setter = std::function<void(EnvConfig&, double)>;

const std::map<std::string, Setter>& numeric_keys() {
    static const std::map<std::string, Setter> keys = {
        {"seed", [](EnvConfig& c, double v) { c.seed = static_cast<std::uint64_t>(v); }},
        {"alpha_flops", [](EnvConfig& c, double v) { c.model.alpha_flops = v; }},
        {"model_size_mb", [](EnvConfig& c, double v) { c.model.m_bits = v * 8e6; }},
        {"eta", [](EnvConfig& c, double v) { c.model.eta = v; }},
        {"epsilon0", [](EnvConfig& c, double v) { c.model.epsilon0 = v; }},
        {"f_star", [](EnvConfig& c, double v) { c.model.f_star = v; }},
        {"deadline_s", [](EnvConfig& c, double v) { c.model.deadline_s = v; }},
        {"switched_capacitance", [](EnvConfig& c, double v) { c.switched_capacitance = v; }},
        {"n0_dbm_per_hz", [](EnvConfig& c, double v) { c.n0_w_per_hz = dbm_per_hz_to_watt_per_hz(v); }},
        {"low_f_min_ghz", [](EnvConfig& c, double v) { c.low_end.f_hz.lo = v * 1e9; }},
        {"low_f_max_ghz", [](EnvConfig& c, double v) { c.low_end.f_hz.hi = v * 1e9; }},
        {"low_p_min_dbm", [](EnvConfig& c, double v) { c.low_end.p_w.lo = dbm_to_watt(v); }},
        {"low_p_max_dbm", [](EnvConfig& c, double v) { c.low_end.p_w.hi = dbm_to_watt(v); }},
        {"low_flops_per_cycle", [](EnvConfig& c, double v) { c.low_end.flops_per_cycle = v; }},
        {"high_f_min_ghz", [](EnvConfig& c, double v) { c.high_end.f_hz.lo = v * 1e9; }},
        {"high_f_max_ghz", [](EnvConfig& c, double v) { c.high_end.f_hz.hi = v * 1e9; }},
        {"high_p_min_dbm", [](EnvConfig& c, double v) { c.high_end.p_w.lo = dbm_to_watt(v); }},
        {"high_p_max_dbm", [](EnvConfig& c, double v) { c.high_end.p_w.hi = dbm_to_watt(v); }},
        {"high_flops_per_cycle", [](EnvConfig& c, double v) { c.high_end.flops_per_cycle = v; }},
        {"low_end_fraction", [](EnvConfig& c, double v) { c.low_end_fraction = v; }},
        {"low_end_pct_mean", [](EnvConfig& c, double v) { c.low_end_pct_mean = v; }},
        {"low_end_pct_std", [](EnvConfig& c, double v) { c.low_end_pct_std = v; }},
        {"low_end_pct_min", [](EnvConfig& c, double v) { c.low_end_pct_bounds.lo = v; }},
        {"low_end_pct_max", [](EnvConfig& c, double v) { c.low_end_pct_bounds.hi = v; }},
        {"distance_min_m", [](EnvConfig& c, double v) { c.distance_km.lo = v / 1000.0; }},
        {"distance_max_m", [](EnvConfig& c, double v) { c.distance_km.hi = v / 1000.0; }},
        {"bandwidth_min_mhz", [](EnvConfig& c, double v) { c.bandwidth_hz.lo = v * 1e6; }},
        {"bandwidth_max_mhz", [](EnvConfig& c, double v) { c.bandwidth_hz.hi = v * 1e6; }},
        {"samples_min", [](EnvConfig& c, double v) { c.samples.lo = v; }},
        {"samples_max", [](EnvConfig& c, double v) { c.samples.hi = v; }},
        {"variance_min", [](EnvConfig& c, double v) { c.variance.lo = v; }},
        {"variance_max", [](EnvConfig& c, double v) { c.variance.hi = v; }},
        {"local_iters_min", [](EnvConfig& c, double v) { c.emulator.local_iters_lo = static_cast<int>(v); }},
        {"local_iters_max", [](EnvConfig& c, double v) { c.emulator.local_iters_hi = static_cast<int>(v); }},
        {"global_iters_min", [](EnvConfig& c, double v) { c.emulator.global_iters_lo = static_cast<int>(v); }},
        {"global_iters_max", [](EnvConfig& c, double v) { c.emulator.global_iters_hi = static_cast<int>(v); }},
        {"init_acc_min", [](EnvConfig& c, double v) { c.emulator.init_acc_lo = v; }},
        {"init_acc_max", [](EnvConfig& c, double v) { c.emulator.init_acc_hi = v; }},
        {"jitter", [](EnvConfig& c, double v) { c.emulator.jitter = v; }},
        {"max_rounds", [](EnvConfig& c, double v) { c.emulator.max_rounds_safeguard = static_cast<int>(v); }},
        {"deadzone_frac", [](EnvConfig& c, double v) { c.deadzone_frac = v; }},
        {"mu1", [](EnvConfig& c, double v) { c.mu1 = v; }},
        {"mu2", [](EnvConfig& c, double v) { c.mu2 = v; }},
    };
    return keys;
}

double to_number(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw std::runtime_error("config: value of '" + key + "' is not a number: '" + text + "'");
    return v;
}

}  // namespace

EnvConfig parse_env_config(std::istream& in) {
    po::options_description desc;
    desc.add_options()("env_kind", po::value<std::string>())("workers", po::value<std::string>())(
        "sync_mode", po::value<std::string>());
    for (const auto& [key, setter] : numeric_keys()) desc.add_options()(key.c_str(), po::value<std::string>());

    po::variables_map vm;
    try {
        po::store(po::parse_config_file(in, desc, false), vm);
    } catch (const po::error& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }

    const EnvKind kind = vm.count("env_kind") ? parse_env_kind(vm["env_kind"].as<std::string>()) : EnvKind::Static;
    int workers = 5;
    if (vm.count("workers")) workers = static_cast<int>(to_number("workers", vm["workers"].as<std::string>()));
    if (workers < 1) throw std::runtime_error("config: workers must be at least 1");

    EnvConfig cfg = kind == EnvKind::Static ? static_preset(workers) : dynamic_preset(workers);
    if (vm.count("sync_mode")) cfg.sync = parse_sync_mode(vm["sync_mode"].as<std::string>());
    for (const auto& [key, setter] : numeric_keys())
        if (vm.count(key)) setter(cfg, to_number(key, vm[key].as<std::string>()));
    if (vm.count("mu1") && !vm.count("mu2")) cfg.mu2 = 1.0 - cfg.mu1;

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
    return cfg;
}

EnvConfig load_env_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    return parse_env_config(in);
}

}  // namespace fedsac

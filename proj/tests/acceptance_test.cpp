// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// selected criterion fails.
//
//   fedsac_acceptance [--cli PATH] [--workdir DIR] [--only 1,2,...] [--skip 6]

#include <sys/wait.h>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fedsac/energy_model.hpp"
#include "fedsac/env_config.hpp"
#include "fedsac/environment.hpp"
#include "fedsac/experiments.hpp"
#include "fedsac/fl_emulator.hpp"
#include "fedsac/metrics.hpp"
#include "fedsac/sac_agent.hpp"
#include "fedsac/seeding.hpp"
#include "gradcheck.hpp"
#include "oracle.hpp"

using namespace fedsac;
namespace fs = std::filesystem;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
};

struct Options {
    std::string cli;
    fs::path workdir = fs::temp_directory_path() / "fedsac_acceptance";
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 1. Closed-form values against direct arithmetic.
Result formula_oracles(const Options&) {
    const auto t0 = std::chrono::steady_clock::now();
    FLModelSpec spec;
    WorkerCaps w;
    w.flops_per_cycle = 4;
    w.n_samples = 1000;
    WorkerCaps w2 = w;
    w2.flops_per_cycle = 2;
    w2.n_samples = 800;

    const double n0 = std::pow(10.0, -18.8);
    const double g = std::pow(10.0, -9.7);
    const double p = std::pow(10.0, 0.3);
    const double rate = 20e6 * std::log2(1.0 + g * p / (20e6 * n0));

    struct Check {
        const char* name;
        double got, want;
    };
    const Check checks[] = {
        {"comp_energy a", comp_energy(w, spec, 5, 1e9), 0.225},
        {"comp_energy b", comp_energy(w2, spec, 2, 3e9), 1.296},
        {"comp_time", comp_time(w, spec, 5, 1e9), 2.25},
        {"gain 1 km", channel_gain_linear(1.0), std::pow(10.0, -12.7)},
        {"gain 0.1 km", channel_gain_linear(0.1), g},
        {"data_rate", data_rate(20e6, g, dbm_to_watt(33.0), dbm_per_hz_to_watt_per_hz(-158.0)), rate},
        {"tx_energy", tx_energy(spec, 1.995, 1.396e8), 2.008e7 * 1.995 / 1.396e8},
        {"tx_time", tx_time(spec, 1.995, 1.396e8), 2.008e7 / 1.396e8},
        {"variance 2-D", dataset_variance({{0, 1}, {1, 0}}), 1.0},
        {"variance 1-D", dataset_variance({{0}, {2}, {4}}), 4.0},
        {"performance_rate", performance_rate(0.6, 0.16, 1.0), 0.4 / 0.84},
        {"local_rate", local_rate(0.16, 5, 5, 1.0, 0.5), 0.5},
    };
    double worst = 0.0;
    std::string worst_name;
    for (const auto& c : checks) {
        const double r = rel(c.got, c.want);
        if (!(r <= worst)) {
            worst = r;
            worst_name = c.name;
        }
    }
    // Reference values quoted to four significant digits, agreement to the last one.
    const bool rounded = std::abs(rate - 1.396e8) < 0.001e8 && std::abs(2.008e7 * 1.995 / 1.396e8 - 0.287) < 0.0005 &&
                         std::abs(2.008e7 / 1.396e8 - 0.1438) < 0.00005 && std::abs(0.4 / 0.84 - 0.476) < 0.0005;
    const double secs = seconds_since(t0);
    return {worst <= 1e-9 && rounded && secs < 1.0,
            fmt::format("{} values, max rel err {:.2e} ({}), rounded refs {}, {:.3f} s", std::size(checks), worst,
                        worst_name, rounded ? "agree" : "DISAGREE", secs)};
}

// 2. Reward identity on 10,000 random steps.
Result reward_identity(const Options&) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    long steps = 0;
    double worst = 0.0;
    int config = 0;
    while (steps < 10000) {
        const int workers = (config % 3 == 0) ? 5 : (config % 3 == 1 ? 10 : 20);
        EnvConfig cfg = (config / 3) % 2 == 0 ? static_preset(workers) : dynamic_preset(workers);
        cfg.sync = (config / 6) % 2 == 0 ? SyncMode::WorkerSide : SyncMode::CoordinatorSide;
        cfg.model.deadline_s = std::array{13.0, 8.0, 6.0}[(config / 12) % 3];
        Environment env(cfg);
        env.reset(derive_seed(7, config, kEnvStream));
        while (!env.done() && steps < 10000) {
            std::vector<double> raw(cfg.action_dim());
            for (auto& x : raw) x = u(rng);
            const auto pop = env.population();
            const auto iters = env.local_iters();
            const auto out = env.step(raw);
            const auto b = testing::book(cfg, pop, iters, raw);
            const double expected = testing::expected_reward(cfg, b, testing::all_idle(cfg, raw));
            worst = std::max(worst, std::abs(out.reward - expected));
            ++steps;
        }
        ++config;
    }
    return {worst <= 1e-9, fmt::format("{} steps over {} episodes, max abs err {:.2e}", steps, config, worst)};
}

// 3. Worker- versus coordinator-side synchronization.
Result sync_study_check(const Options&) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> hs{13, 8, 6};
    const auto rows = sync_study(dynamic_preset(5), hs, 200, 1, "rss");
    bool ok = true;
    std::string detail;
    for (auto mode : {SyncMode::WorkerSide, SyncMode::CoordinatorSide}) {
        std::vector<double> wasted;
        for (const auto& r : rows) {
            if (r.mode != mode) continue;
            wasted.push_back(r.summary["wasted_J"].mean);
            const double ua = r.summary["unnec_accesses"].mean, us = r.summary["unnec_occ_s"].mean;
            if (mode == SyncMode::WorkerSide) {
                const bool zero = r.summary["unnec_accesses"].mean == 0.0 && r.summary["unnec_accesses"].std == 0.0 &&
                                  us == 0.0 && r.summary["unnec_occ_s"].std == 0.0;
                ok = ok && zero;
            } else if (r.deadline_s == 6.0) {
                ok = ok && ua > 0.0 && us > 0.0;
                detail += fmt::format("coordinator H=6: {:.2f} unnecessary accesses, {:.1f} s; ", ua, us);
            }
        }
        for (std::size_t i = 1; i < wasted.size(); ++i) ok = ok && wasted[i] >= wasted[i - 1];  // H decreasing
        detail += fmt::format("{} wasted J at H=13/8/6: {:.2f}/{:.2f}/{:.2f}; ", to_string(mode), wasted[0], wasted[1],
                              wasted[2]);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 60.0;
    return {ok, detail + fmt::format("{:.1f} s", secs)};
}

// 4. BES > RSS > GSS on the static 5-worker environment.
Result baseline_ordering(const Options&) {
    const auto t0 = std::chrono::steady_clock::now();
    const long n = 100;
    const auto c = compare(static_preset(5), {"bes", "rss", "gss"}, n, 1);
    const auto& bes = c.summaries[0]["total_J"];
    const auto& rss = c.summaries[1]["total_J"];
    const auto& gss = c.summaries[2]["total_J"];
    auto se_diff = [&](const Stat& a, const Stat& b) { return std::sqrt((a.std * a.std + b.std * b.std) / n); };
    const double gap1 = (bes.mean - rss.mean) / se_diff(bes, rss);
    const double gap2 = (rss.mean - gss.mean) / se_diff(rss, gss);
    const double tb = c.summaries[0]["mean_round_s"].mean, tr = c.summaries[1]["mean_round_s"].mean,
                 tg = c.summaries[2]["mean_round_s"].mean;
    const double secs = seconds_since(t0);
    const bool ok = gap1 > 2.0 && gap2 > 2.0 && tb < tr && tb < tg && secs < 60.0;
    return {ok, fmt::format("total J BES {:.1f} > RSS {:.1f} > GSS {:.1f} (gaps {:.1f} and {:.1f} SE); round s "
                            "BES {:.2f}, RSS {:.2f}, GSS {:.2f}; {:.1f} s",
                            bes.mean, rss.mean, gss.mean, gap1, gap2, tb, tr, tg, secs)};
}

// 5. Emulator ranges under full-capacity actions.
Result emulator_ranges(const Options&) {
    const auto cfg = static_preset(5);
    Environment env(cfg);
    const std::vector<double> full(cfg.action_dim(), 1.0);
    int budget_lo = 1 << 30, budget_hi = 0, iters_lo = 1 << 30, iters_hi = 0;
    bool monotone = true, terminal = true, budget_used = true;
    for (int ep = 0; ep < 1000; ++ep) {
        env.reset(derive_seed(5, ep, kEnvStream));
        const int budget = env.run().global_budget();
        budget_lo = std::min(budget_lo, budget);
        budget_hi = std::max(budget_hi, budget);
        int rounds = 0;
        while (!env.done()) {
            for (int it : env.local_iters()) {
                iters_lo = std::min(iters_lo, it);
                iters_hi = std::max(iters_hi, it);
            }
            env.step(full);
            ++rounds;
        }
        const auto& curve = env.run().rate_curve();
        for (std::size_t i = 1; i < curve.size(); ++i) monotone = monotone && curve[i] <= curve[i - 1];
        terminal = terminal && env.run().converged() && curve.back() <= 0.04;
        budget_used = budget_used && rounds == budget;
    }
    const bool ok = budget_lo >= 10 && budget_hi <= 22 && iters_lo >= 2 && iters_hi <= 11 && monotone && terminal;
    return {ok, fmt::format("global iterations in [{}, {}], local iterations in [{}, {}], e_n monotone: {}, "
                            "terminal e <= 0.04: {}, rounds == budget: {}",
                            budget_lo, budget_hi, iters_lo, iters_hi, monotone, terminal, budget_used)};
}

// 6. Learning signal on the dynamic 5-worker environment.
Result sac_learning(const Options& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const long episodes = 20000, window = 1000;
    const auto cfg = dynamic_preset(5);
    SacAgent agent(cfg.workers, cfg.normalization_caps(), SacConfig::for_workers(cfg.workers), 1);
    Environment env(cfg);
    fs::create_directories(opt.workdir);
    std::ofstream csv(opt.workdir / "c6_train.csv");
    write_csv_header(csv);
    std::vector<double> reward, violations;
    agent.train(env, episodes, 1, [&](const EpisodeMetrics& m) {
        write_csv_row(csv, m);
        reward.push_back(m.reward);
        violations.push_back(m.violations_per_worker(cfg.workers));
        if ((m.episode + 1) % 1000 == 0)
            std::cerr << fmt::format("  c6: {} episodes, {:.0f} s\n", m.episode + 1, seconds_since(t0));
    });
    auto mean = [](auto first, auto last) { return std::accumulate(first, last, 0.0) / std::distance(first, last); };
    const double first = mean(reward.begin(), reward.begin() + window);
    const double last = mean(reward.end() - window, reward.end());
    const double viol = mean(violations.end() - window, violations.end());
    const double improvement = (last - first) / std::abs(first);
    const double minutes = seconds_since(t0) / 60.0;
    const bool ok = improvement >= 0.30 && viol < 2.0;
    return {ok, fmt::format("mean reward first 1000 {:.2f}, last 1000 {:.2f} ({:+.1f}%), violations per worker "
                            "{:.2f}; {:.1f} min (target 30 min {})",
                            first, last, 100 * improvement, viol, minutes, minutes < 30 ? "met" : "missed")};
}

// 7. Finite-difference gradient checks on a 2 x 8 network.
Result gradient_checks(const Options&) {
    SacConfig cfg;
    cfg.hidden = {8, 8};
    std::mt19937_64 rng(77);
    testing::GradCheck critic, policy;
    for (int b = 0; b < 20; ++b) {
        testing::DoubleAgent agent(2, dynamic_preset(2).normalization_caps(), cfg, 1000 + b);
        const int n = 4 + b % 13;
        const Batch batch = testing::random_batch(agent.state_dim(), agent.action_dim(), n, rng);
        const auto c = testing::check_critic(agent, batch, testing::random_noise(agent.action_dim(), n, rng), 0.8);
        const auto p = testing::check_policy(agent, batch, testing::random_noise(agent.action_dim(), n, rng), 0.8);
        for (auto [acc, r] : {std::pair{&critic, c}, std::pair{&policy, p}}) {
            acc->checked += r.checked;
            acc->skipped += r.skipped;
            acc->max_rel = std::max(acc->max_rel, r.max_rel);
        }
    }
    const bool ok = critic.max_rel <= 1e-3 && policy.max_rel <= 1e-3 && critic.checked > 0 && policy.checked > 0;
    return {ok, fmt::format("critic max rel {:.1e} over {} params ({} kink-skipped), policy max rel {:.1e} over {} "
                            "params ({} kink-skipped), 20 batches",
                            critic.max_rel, critic.checked, critic.skipped, policy.max_rel, policy.checked,
                            policy.skipped)};
}

// 8. Repeated CLI invocations are byte-identical.
int run_shell(const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Result determinism(const Options& opt) {
    if (opt.cli.empty()) return {false, "no --cli given"};
    fs::create_directories(opt.workdir);
    const std::string cli = opt.cli;
    struct Case {
        std::string name, args;
    };
    const std::vector<Case> cases = {
        {"train", "train --preset dynamic5 --episodes 30 --seed 3 --hidden 16 16 --train-every 50 "
                  "--gradient-steps 20 --batch 32 --warmup 100 --checkpoint {dir}/policy{i}.bin --csv {out}"},
        {"eval-sac", "eval --preset dynamic5 --agent sac --checkpoint {dir}/policy{i}.bin --episodes 20 --seed 4 "
                     "--csv {out}"},
        {"eval-rss", "eval --preset static10 --agent rss --episodes 20 --seed 5 --csv {out}"},
        {"compare", "compare --preset static5 --agents bes,rss,gss --episodes 20 --seed 6 --summary {out}"},
        {"sync-study", "sync-study --preset dynamic5 --h 13,6 --episodes 10 --seed 7 --out {out}"},
        {"plot-data", "plot-data --input {dir}/train{i}.csv --window 7 --out {out}"},
    };
    int identical = 0;
    std::string failed;
    for (const auto& c : cases) {
        std::string outputs[2];
        for (int i = 0; i < 2; ++i) {
            const auto out = opt.workdir / fmt::format("{}{}.csv", c.name, i);
            std::string args = c.args;
            for (auto [key, value] : {std::pair<std::string, std::string>{"{dir}", opt.workdir.string()},
                                      {"{i}", std::to_string(i)}, {"{out}", out.string()}})
                for (std::size_t pos; (pos = args.find(key)) != std::string::npos;) args.replace(pos, key.size(), value);
            if (run_shell(cli + " " + args + " > /dev/null 2>&1") != 0) {
                failed += c.name + "(exit) ";
                outputs[i] = "\x01" + std::to_string(i);
                continue;
            }
            outputs[i] = slurp(out);
        }
        if (outputs[0] == outputs[1] && !outputs[0].empty())
            ++identical;
        else if (failed.find(c.name) == std::string::npos)
            failed += c.name + " ";
    }
    const bool ckpt_same = slurp(opt.workdir / "policy0.bin") == slurp(opt.workdir / "policy1.bin");
    const bool ok = identical == static_cast<int>(cases.size()) && ckpt_same;
    return {ok, fmt::format("{}/{} subcommand outputs byte-identical, checkpoints identical: {}{}", identical,
                            cases.size(), ckpt_same, failed.empty() ? "" : "; differing: " + failed)};
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
    Options opt;
    std::vector<int> only, skip;
    std::string workdir;
    CLI::App app{"fedsac acceptance suite"};
    app.add_option("--cli", opt.cli, "path to the fedsac executable");
    app.add_option("--workdir", workdir, "scratch directory");
    app.add_option("--only", only, "criteria to run")->delimiter(',');
    app.add_option("--skip", skip, "criteria to leave out")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    if (!workdir.empty()) opt.workdir = workdir;

    const std::vector<std::pair<std::string, std::function<Result(const Options&)>>> criteria = {
        {"formula oracles", formula_oracles},   {"reward identity", reward_identity},
        {"synchronization study", sync_study_check}, {"baseline ordering", baseline_ordering},
        {"emulator ranges", emulator_ranges},   {"SAC learning signal", sac_learning},
        {"gradient checks", gradient_checks},   {"CLI determinism", determinism},
    };
    const std::set<int> only_set(only.begin(), only.end()), skip_set(skip.begin(), skip.end());
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if ((!only_set.empty() && !only_set.count(id)) || skip_set.count(id)) continue;
        Result r;
        try {
            r = criteria[i].second(opt);
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        failures += r.pass ? 0 : 1;
        std::cout << fmt::format("[{}] {}. {}: {}", r.pass ? "PASS" : "FAIL", id, criteria[i].first, r.detail)
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}

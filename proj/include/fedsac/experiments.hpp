#pragma once

// Experiment drivers shared by the CLI and the acceptance suite.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fedsac/env_config.hpp"
#include "fedsac/metrics.hpp"
#include "fedsac/sac_agent.hpp"
#include "fedsac/schedulers.hpp"

namespace fedsac {

using StepHook = std::function<void(const Environment&, std::span<const double> action, const StepOutcome&)>;

/// Runs `episodes` episodes of `agent` on one environment built from cfg.
/// Episode i uses env seed derive_seed(seed, i, kEnvStream) and an agent RNG
/// seeded with derive_seed(seed, i, kAgentStream), so two agents run with the
/// same seed face identical episode draws. `hook` sees every step.
std::vector<EpisodeMetrics> run_episodes(const EnvConfig& cfg, Agent& agent, long episodes, std::uint64_t seed,
                                         const StepHook& hook = {});

struct AgentOptions {
    long gss_explore_rounds = kGssExploreRounds;
    std::optional<TrainedPolicy> policy;  // required for "sac"
};

/// "bes", "rss", "gss" or "sac". Throws std::invalid_argument otherwise.
std::unique_ptr<Agent> make_agent(const std::string& name, const AgentOptions& opts = {});

struct Comparison {
    std::vector<Summary> summaries;
    std::vector<std::vector<EpisodeMetrics>> rows;  // per scheduler, same order
};

/// Every scheduler on the same episode seeds.
Comparison compare(const EnvConfig& cfg, const std::vector<std::string>& agents, long episodes, std::uint64_t seed,
                   const AgentOptions& opts = {});

/// Human-readable table of mean +- STD; names in `absent` are listed as not
/// implemented.
void write_comparison_table(std::ostream& out, const std::vector<Summary>& summaries,
                            const std::vector<std::string>& absent = {"gas"});

struct SyncStudyRow {
    SyncMode mode;
    double deadline_s;
    Summary summary;
};

/// Same seeds for every (mode, H) pair.
std::vector<SyncStudyRow> sync_study(const EnvConfig& cfg, const std::vector<double>& deadlines, long episodes,
                                     std::uint64_t seed, const std::string& agent = "rss",
                                     const AgentOptions& opts = {});

void write_sync_study_csv(std::ostream& out, const std::vector<SyncStudyRow>& rows);

}  // namespace fedsac

#include "fedsac/experiments.hpp"

#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fedsac/seeding.hpp"

namespace fedsac {

std::vector<EpisodeMetrics> run_episodes(const EnvConfig& cfg, Agent& agent, long episodes, std::uint64_t seed,
                                         const StepHook& hook) {
    Environment env(cfg);
    std::vector<EpisodeMetrics> rows;
    rows.reserve(static_cast<std::size_t>(std::max(episodes, 0L)));
    for (long ep = 0; ep < episodes; ++ep) {
        EnvState state = env.reset(derive_seed(seed, static_cast<std::uint64_t>(ep), kEnvStream));
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(ep), kAgentStream));
        agent.reset_episode();
        EpisodeAccumulator acc(ep);
        while (!env.done()) {
            const std::vector<double> action = agent.act(state, rng);
            StepOutcome out = env.step(action);
            if (hook) hook(env, action, out);
            agent.observe(out);
            acc.add(out);
            state = std::move(out.next_state);
        }
        rows.push_back(acc.finish());
    }
    return rows;
}

std::unique_ptr<Agent> make_agent(const std::string& name, const AgentOptions& opts) {
    if (name == "bes") return std::make_unique<BestEffortScheduler>();
    if (name == "rss") return std::make_unique<RandomScheduler>();
    if (name == "gss") return std::make_unique<GreedyScheduler>(opts.gss_explore_rounds);
    if (name == "sac") {
        if (!opts.policy) throw std::invalid_argument("agent 'sac' needs a trained policy checkpoint");
        return std::make_unique<SacPolicyAgent>(*opts.policy);
    }
    throw std::invalid_argument(fmt::format("unknown agent '{}' (expected bes, rss, gss or sac)", name));
}

Comparison compare(const EnvConfig& cfg, const std::vector<std::string>& agents, long episodes, std::uint64_t seed,
                   const AgentOptions& opts) {
    Comparison c;
    for (const auto& name : agents) {
        auto agent = make_agent(name, opts);
        c.rows.push_back(run_episodes(cfg, *agent, episodes, seed));
        c.summaries.push_back(summarize(name, c.rows.back()));
    }
    return c;
}

void write_comparison_table(std::ostream& out, const std::vector<Summary>& summaries,
                            const std::vector<std::string>& absent) {
    constexpr const char* kCols[] = {"total_J", "comp_J", "tx_J", "wasted_J", "reward", "p1", "p2", "rounds",
                                     "mean_round_s"};
    fmt::print(out, "{:<6}", "agent");
    for (const char* c : kCols) fmt::print(out, " {:>24}", c);
    fmt::print(out, "\n");
    for (const auto& s : summaries) {
        fmt::print(out, "{:<6}", s.label);
        for (const char* c : kCols) {
            const Stat& st = s[c];
            fmt::print(out, " {:>24}", fmt::format("{:.4g} +- {:.3g}", st.mean, st.std));
        }
        fmt::print(out, "\n");
    }
    for (const auto& name : absent) fmt::print(out, "{:<6} absent (not implemented)\n", name);
}

std::vector<SyncStudyRow> sync_study(const EnvConfig& cfg, const std::vector<double>& deadlines, long episodes,
                                     std::uint64_t seed, const std::string& agent, const AgentOptions& opts) {
    std::vector<SyncStudyRow> out;
    for (SyncMode mode : {SyncMode::WorkerSide, SyncMode::CoordinatorSide}) {
        for (double h : deadlines) {
            EnvConfig c = cfg;
            c.sync = mode;
            c.model.deadline_s = h;
            c.validate();
            auto a = make_agent(agent, opts);
            out.push_back({mode, h, summarize(to_string(mode), run_episodes(c, *a, episodes, seed))});
        }
    }
    return out;
}

void write_sync_study_csv(std::ostream& out, const std::vector<SyncStudyRow>& rows) {
    out << "# fedsac sync study v1\n";
    out << "mode,H_s,episodes";
    constexpr const char* kCols[] = {"wasted_J", "unnec_accesses", "unnec_occ_s", "accesses", "occ_s", "total_J",
                                     "p1"};
    for (const char* c : kCols) out << ',' << c << "_mean," << c << "_std";
    out << '\n';
    for (const auto& r : rows) {
        out << to_string(r.mode) << ',' << format_number(r.deadline_s) << ',' << r.summary.episodes;
        for (const char* c : kCols)
            out << ',' << format_number(r.summary[c].mean) << ',' << format_number(r.summary[c].std);
        out << '\n';
    }
}

}  // namespace fedsac

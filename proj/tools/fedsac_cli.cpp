// fedsac: train, evaluate and compare FL resource schedulers.

#include <CLI11.hpp>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fedsac/env_config.hpp"
#include "fedsac/experiments.hpp"
#include "fedsac/metrics.hpp"
#include "fedsac/policy_io.hpp"
#include "fedsac/sac_agent.hpp"

using namespace fedsac;

namespace {

struct EnvArgs {
    std::string file;
    std::string preset;
    std::optional<std::string> sync;
    std::optional<double> deadline;

    void add_to(CLI::App* app) {
        auto* f = app->add_option("--env", file, "environment config file");
        auto* p = app->add_option("--preset", preset, "built-in environment: static5|10|20, dynamic5|10|20");
        f->excludes(p);
        app->add_option("--sync", sync, "synchronization mode: worker|coordinator");
        app->add_option("--deadline", deadline, "override the round deadline H in seconds");
    }

    EnvConfig load() const {
        EnvConfig cfg = !file.empty() ? load_env_config(file) : preset_by_name(preset.empty() ? "static5" : preset);
        if (sync) cfg.sync = parse_sync_mode(*sync);
        if (deadline) cfg.model.deadline_s = *deadline;
        cfg.validate();
        return cfg;
    }
};

// "-" or empty means stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(fmt::format("bad list entry '{}'", item));
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
    // Training allocates and frees the same few hundred-kilobyte matrices
    // millions of times; keep them on the heap instead of mmap round trips.
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
    CLI::App app{"Energy-aware resource scheduling for federated learning"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "offline SAC training");
    EnvArgs train_env;
    train_env.add_to(train);
    long train_episodes = 20000;
    std::uint64_t train_seed = 1;
    std::string train_ckpt = "policy.bin", train_csv = "train.csv";
    SacConfig sac;
    train->add_option("--episodes", train_episodes)->check(CLI::PositiveNumber);
    train->add_option("--seed", train_seed);
    train->add_option("--checkpoint", train_ckpt, "where to write the policy");
    train->add_option("--csv", train_csv, "per-episode metrics CSV ('-' for stdout)");
    train->add_option("--hidden", sac.hidden, "hidden layer widths");
    train->add_option("--train-every", sac.train_every)->check(CLI::PositiveNumber);
    train->add_option("--gradient-steps", sac.gradient_steps)->check(CLI::NonNegativeNumber);
    train->add_option("--batch", sac.batch_size)->check(CLI::PositiveNumber);
    train->add_option("--warmup", sac.warmup_steps)->check(CLI::NonNegativeNumber);
    train->add_option("--lr", sac.lr)->check(CLI::PositiveNumber);

    // eval
    auto* eval = app.add_subcommand("eval", "run one scheduler and summarize");
    EnvArgs eval_env;
    eval_env.add_to(eval);
    std::string eval_agent = "bes", eval_ckpt, eval_csv, eval_summary = "-";
    long eval_episodes = 100, gss_explore = kGssExploreRounds;
    std::uint64_t eval_seed = 1;
    eval->add_option("--agent", eval_agent)->check(CLI::IsMember({"bes", "rss", "gss", "sac"}));
    eval->add_option("--checkpoint", eval_ckpt, "trained policy (required for --agent sac)");
    eval->add_option("--episodes", eval_episodes)->check(CLI::PositiveNumber);
    eval->add_option("--seed", eval_seed);
    eval->add_option("--csv", eval_csv, "per-episode metrics CSV");
    eval->add_option("--summary", eval_summary, "summary CSV ('-' for stdout)");
    eval->add_option("--gss-explore", gss_explore, "random rounds before GSS starts replaying")
        ->check(CLI::NonNegativeNumber);

    // compare
    auto* cmp = app.add_subcommand("compare", "several schedulers on shared seeds");
    EnvArgs cmp_env;
    cmp_env.add_to(cmp);
    std::string cmp_agents = "bes,rss,gss", cmp_ckpt, cmp_summary;
    long cmp_episodes = 100, cmp_explore = kGssExploreRounds;
    std::uint64_t cmp_seed = 1;
    cmp->add_option("--agents", cmp_agents, "comma-separated list of bes,rss,gss,sac");
    cmp->add_option("--checkpoint", cmp_ckpt);
    cmp->add_option("--episodes", cmp_episodes)->check(CLI::PositiveNumber);
    cmp->add_option("--seed", cmp_seed);
    cmp->add_option("--summary", cmp_summary, "also write the summary as CSV");
    cmp->add_option("--gss-explore", cmp_explore)->check(CLI::NonNegativeNumber);

    // sync-study
    auto* sync = app.add_subcommand("sync-study", "worker- vs coordinator-side synchronization");
    EnvArgs sync_env;
    sync_env.add_to(sync);
    std::string sync_h = "13,8,6", sync_agent = "rss", sync_ckpt, sync_out = "-";
    long sync_episodes = 200;
    std::uint64_t sync_seed = 1;
    sync->set_help_flag("--help", "Print this help message and exit");
    sync->add_option("--h", sync_h, "comma-separated deadlines in seconds");
    sync->add_option("--agent", sync_agent)->check(CLI::IsMember({"bes", "rss", "gss", "sac"}));
    sync->add_option("--checkpoint", sync_ckpt);
    sync->add_option("--episodes", sync_episodes)->check(CLI::PositiveNumber);
    sync->add_option("--seed", sync_seed);
    sync->add_option("--out", sync_out, "CSV output ('-' for stdout)");

    // plot-data
    auto* plot = app.add_subcommand("plot-data", "windowed means of a training CSV");
    std::string plot_in, plot_out = "-";
    long window = 2500;
    plot->add_option("--input", plot_in, "per-episode CSV")->required();
    plot->add_option("--window", window)->check(CLI::PositiveNumber);
    plot->add_option("--out", plot_out);

    CLI11_PARSE(app, argc, argv);

    auto policy_for = [](const std::string& agent, const std::string& ckpt, int workers) {
        AgentOptions o;
        if (agent == "sac" || !ckpt.empty()) {
            if (ckpt.empty()) throw std::invalid_argument("--agent sac requires --checkpoint");
            o.policy = load_policy(ckpt, workers);
        }
        return o;
    };

    try {
        if (*train) {
            const EnvConfig cfg = train_env.load();
            if (train->count("--hidden") == 0) sac.hidden = SacConfig::for_workers(cfg.workers).hidden;
            Output csv(train_csv);
            write_csv_header(csv.stream());
            SacAgent agent(cfg.workers, cfg.normalization_caps(), sac, train_seed);
            Environment env(cfg);
            const auto stats = agent.train(env, train_episodes, train_seed,
                                           [&](const EpisodeMetrics& m) { write_csv_row(csv.stream(), m); });
            save_policy(train_ckpt, agent.export_policy());
            std::cerr << fmt::format("trained {} episodes: {} env steps, {} gradient steps, {} aborted updates\n",
                                     train_episodes, stats.env_steps, stats.gradient_steps, stats.aborted_updates);
        } else if (*eval) {
            const EnvConfig cfg = eval_env.load();
            AgentOptions opts = policy_for(eval_agent, eval_ckpt, cfg.workers);
            opts.gss_explore_rounds = gss_explore;
            auto agent = make_agent(eval_agent, opts);
            const auto rows = run_episodes(cfg, *agent, eval_episodes, eval_seed);
            if (!eval_csv.empty()) {
                Output csv(eval_csv);
                write_csv(csv.stream(), rows);
            }
            Output out(eval_summary);
            write_summary_csv(out.stream(), {summarize(eval_agent, rows)});
        } else if (*cmp) {
            const EnvConfig cfg = cmp_env.load();
            const auto names = split_names(cmp_agents);
            AgentOptions opts;
            for (const auto& n : names)
                if (n == "sac") opts = policy_for(n, cmp_ckpt, cfg.workers);
            opts.gss_explore_rounds = cmp_explore;
            const Comparison c = compare(cfg, names, cmp_episodes, cmp_seed, opts);
            write_comparison_table(std::cout, c.summaries);
            if (!cmp_summary.empty()) {
                Output out(cmp_summary);
                write_summary_csv(out.stream(), c.summaries);
            }
        } else if (*sync) {
            const EnvConfig cfg = sync_env.load();
            const AgentOptions opts = policy_for(sync_agent, sync_ckpt, cfg.workers);
            const auto rows = sync_study(cfg, parse_list(sync_h), sync_episodes, sync_seed, sync_agent, opts);
            Output out(sync_out);
            write_sync_study_csv(out.stream(), rows);
        } else if (*plot) {
            std::ifstream in(plot_in);
            if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", plot_in));
            const auto rows = read_csv(in);
            Output out(plot_out);
            write_window_csv(out.stream(), window_means(rows, window));
        }
    } catch (const std::exception& e) {
        std::cerr << "fedsac: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

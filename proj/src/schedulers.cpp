#include "fedsac/schedulers.hpp"

namespace fedsac {

std::vector<double> BestEffortScheduler::act(const EnvState& state, std::mt19937_64& /*rng*/) {
    return std::vector<double>(2 * state.workers(), 1.0);
}

std::vector<double> uniform_action(int workers, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> a(2 * workers);
    for (auto& x : a) x = u(rng);
    return a;
}

std::vector<double> RandomScheduler::act(const EnvState& state, std::mt19937_64& rng) {
    return uniform_action(state.workers(), rng);
}

double round_energy(const StepOutcome& outcome) { return outcome.comp_j() + outcome.tx_j() + outcome.wasted_j(); }

std::vector<double> GreedyScheduler::act(const EnvState& state, std::mt19937_64& rng) {
    if (!memory_.best_action || rounds_seen_ < explore_rounds_)
        last_action_ = uniform_action(state.workers(), rng);
    else
        last_action_ = *memory_.best_action;
    return last_action_;
}

void GreedyScheduler::observe(const StepOutcome& outcome) {
    ++rounds_seen_;
    const double e = round_energy(outcome);
    if (e < memory_.best_round_energy) {
        memory_.best_round_energy = e;
        memory_.best_action = last_action_;
    }
}

}  // namespace fedsac

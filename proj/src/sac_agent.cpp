#include "fedsac/sac_agent.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "fedsac/seeding.hpp"

namespace fedsac {

SacConfig SacConfig::for_workers(int workers) {
    SacConfig c;
    if (workers > 10) c.hidden = {512, 512, 512};
    return c;
}

namespace {

// log(1 - tanh(u)^2) without cancellation for large |u|.
template <typename Derived>
auto log_one_minus_tanh_sq(const Eigen::ArrayBase<Derived>& u) {
    using T = typename Derived::Scalar;
    using A = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic>;
    const A x = T(-2) * u;
    const A softplus = x.max(T(0)) + (-x.abs()).exp().log1p();
    return A(T(2) * (std::numbers::ln2_v<T> - u - softplus));
}

std::vector<int> with_io(int in, const std::vector<int>& hidden, int out) {
    std::vector<int> dims{in};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(out);
    return dims;
}

}  // namespace

template <typename T>
PolicySample<T> evaluate_policy(const BasicMlp<T>& policy, const typename BasicMlp<T>::Matrix& states,
                                const typename BasicMlp<T>::Matrix& noise) {
    using Matrix = typename BasicMlp<T>::Matrix;
    PolicySample<T> s;
    const Matrix out = policy.forward(states, &s.cache);
    const Eigen::Index a = out.rows() / 2;
    s.mean = out.topRows(a);
    const Matrix raw_log_std = out.bottomRows(a);
    s.log_std_clamped = (raw_log_std.array() < T(kLogStdMin)) || (raw_log_std.array() > T(kLogStdMax));
    s.log_std = raw_log_std.cwiseMax(T(kLogStdMin)).cwiseMin(T(kLogStdMax));
    s.std = s.log_std.array().exp().matrix();
    s.noise = noise;
    s.pre_tanh = s.mean + s.std.cwiseProduct(noise);
    s.action = s.pre_tanh.array().tanh().matrix();

    const T half_log_2pi = T(0.5) * std::log(T(2) * std::numbers::pi_v<T>);
    const auto gauss = (T(-0.5) * noise.array().square() - s.log_std.array() - half_log_2pi).eval();
    s.log_prob = (gauss - log_one_minus_tanh_sq(s.pre_tanh.array())).colwise().sum().matrix();
    return s;
}

template PolicySample<float> evaluate_policy(const BasicMlp<float>&, const BasicMlp<float>::Matrix&,
                                             const BasicMlp<float>::Matrix&);
template PolicySample<double> evaluate_policy(const BasicMlp<double>&, const BasicMlp<double>::Matrix&,
                                              const BasicMlp<double>::Matrix&);

std::vector<double> TrainedPolicy::act(const EnvState& state) const {
    const auto x = normalize_state(state, caps);
    const Eigen::MatrixXd in = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::MatrixXd out = net.forward(in);
    const Eigen::Index a = out.rows() / 2;
    std::vector<double> action(a);
    for (Eigen::Index i = 0; i < a; ++i) action[i] = std::tanh(out(i, 0));
    return action;
}

std::vector<double> SacPolicyAgent::act(const EnvState& state, std::mt19937_64& /*rng*/) { return policy_.act(state); }

template <typename T>
BasicSacAgent<T>::BasicSacAgent(int workers, NormalizationCaps caps, SacConfig cfg, std::uint64_t seed)
    : workers_(workers),
      caps_(caps),
      cfg_(std::move(cfg)),
      rng_(seed),
      buffer_(cfg_.buffer_capacity, 6 * workers + 1, 2 * workers) {
    if (workers < 1) throw std::invalid_argument("SacAgent: need at least one worker");
    if (cfg_.batch_size < 1 || cfg_.train_every < 1 || cfg_.gradient_steps < 0)
        throw std::invalid_argument("SacAgent: invalid training schedule");
    if (!(cfg_.init_alpha > 0.0)) throw std::invalid_argument("SacAgent: initial alpha must be positive");
    const int s = state_dim();
    const int a = action_dim();
    policy_ = BasicMlp<T>(with_io(s, cfg_.hidden, 2 * a), rng_);
    q1_ = BasicMlp<T>(with_io(s + a, cfg_.hidden, 1), rng_);
    q2_ = BasicMlp<T>(with_io(s + a, cfg_.hidden, 1), rng_);
    q1_target_ = q1_;
    q2_target_ = q2_;
    policy_opt_ = BasicAdam<T>(policy_.num_params(), cfg_.lr);
    q1_opt_ = BasicAdam<T>(q1_.num_params(), cfg_.lr);
    q2_opt_ = BasicAdam<T>(q2_.num_params(), cfg_.lr);
    alpha_opt_ = BasicAdam<T>(1, cfg_.lr);
    log_alpha_ = Vector::Constant(1, static_cast<T>(std::log(cfg_.init_alpha)));
    target_entropy_ = cfg_.target_entropy.value_or(-static_cast<double>(a));
}

template <typename T>
double BasicSacAgent<T>::alpha() const {
    return std::exp(static_cast<double>(log_alpha_(0)));
}

template <typename T>
typename BasicSacAgent<T>::Matrix BasicSacAgent<T>::gaussian(Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(n(rng_));
    return m;
}

template <typename T>
typename BasicSacAgent<T>::TypedBatch BasicSacAgent<T>::typed(const Batch& b) {
    return {b.states.cast<T>(), b.actions.cast<T>(), b.next_states.cast<T>(), b.rewards.cast<T>(),
            b.dones.cast<T>()};
}

template <typename T>
typename BasicSacAgent<T>::Matrix BasicSacAgent<T>::critic_input(const Matrix& states, const Matrix& actions) const {
    Matrix x(states.rows() + actions.rows(), states.cols());
    x.topRows(states.rows()) = states;
    x.bottomRows(actions.rows()) = actions;
    return x;
}

template <typename T>
std::vector<double> BasicSacAgent<T>::select_action(std::span<const double> normalized_state, bool stochastic) {
    if (normalized_state.size() != static_cast<std::size_t>(state_dim()))
        throw std::invalid_argument("SacAgent::select_action: wrong state size");
    const Matrix s = Eigen::Map<const Eigen::VectorXd>(normalized_state.data(),
                                                       static_cast<Eigen::Index>(normalized_state.size()))
                         .cast<T>();
    const Matrix noise = stochastic ? gaussian(action_dim(), 1) : Matrix::Zero(action_dim(), 1);
    const PolicySample<T> ps = evaluate_policy(policy_, s, noise);
    std::vector<double> out(ps.action.size());
    for (Eigen::Index i = 0; i < ps.action.size(); ++i)
        out[i] = std::clamp(static_cast<double>(ps.action(i)), -1.0, 1.0);
    return out;
}

template <typename T>
double BasicSacAgent<T>::critic_loss(const Batch& batch, const Matrix& next_noise, double alpha, Vector* grad_q1,
                                     Vector* grad_q2) const {
    return critic_loss(typed(batch), next_noise, alpha, grad_q1, grad_q2);
}

template <typename T>
double BasicSacAgent<T>::critic_loss(const TypedBatch& batch, const Matrix& next_noise, double alpha,
                                     Vector* grad_q1, Vector* grad_q2) const {
    const Eigen::Index n = batch.states.cols();
    const T b = static_cast<T>(n);
    const PolicySample<T> next = evaluate_policy(policy_, batch.next_states, next_noise);
    const Matrix x_next = critic_input(batch.next_states, next.action);
    const Matrix qt = q1_target_.forward(x_next).cwiseMin(q2_target_.forward(x_next));
    const Matrix soft = qt - static_cast<T>(alpha) * next.log_prob;
    const Matrix y = batch.rewards + static_cast<T>(cfg_.gamma) *
                                         (Matrix::Ones(1, n) - batch.dones).cwiseProduct(soft);

    const Matrix x = critic_input(batch.states, batch.actions);
    typename BasicMlp<T>::Cache c1, c2;
    const Matrix r1 = q1_.forward(x, &c1) - y;
    const Matrix r2 = q2_.forward(x, &c2) - y;
    const double loss = 0.5 * static_cast<double>(r1.squaredNorm() + r2.squaredNorm()) / static_cast<double>(n);

    if (grad_q1) {
        grad_q1->setZero(q1_.num_params());
        q1_.backward(c1, r1 / b, grad_q1, nullptr);
    }
    if (grad_q2) {
        grad_q2->setZero(q2_.num_params());
        q2_.backward(c2, r2 / b, grad_q2, nullptr);
    }
    return loss;
}

template <typename T>
double BasicSacAgent<T>::policy_loss(const Batch& batch, const Matrix& noise, double alpha,
                                     Vector* grad_policy) const {
    const TypedBatch tb = typed(batch);
    return policy_loss(tb, evaluate_policy(policy_, tb.states, noise), alpha, grad_policy);
}

template <typename T>
double BasicSacAgent<T>::policy_loss(const TypedBatch& batch, const PolicySample<T>& ps, double alpha,
                                     Vector* grad_policy) const {
    using Array = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index n = batch.states.cols();
    const T b = static_cast<T>(n);
    const T al = static_cast<T>(alpha);
    const Eigen::Index a = action_dim();
    const Matrix x = critic_input(batch.states, ps.action);
    typename BasicMlp<T>::Cache c1, c2;
    const Matrix q1 = q1_.forward(x, &c1);
    const Matrix q2 = q2_.forward(x, &c2);
    const Matrix qmin = q1.cwiseMin(q2);
    const double loss = static_cast<double>((al * ps.log_prob - qmin).sum()) / static_cast<double>(n);
    if (!grad_policy) return loss;

    // d(-min Q)/dQ routed to whichever critic is smaller per sample.
    Matrix d1 = Matrix::Zero(1, n), d2 = Matrix::Zero(1, n);
    for (Eigen::Index j = 0; j < n; ++j) (q1(j) <= q2(j) ? d1 : d2)(0, j) = T(-1) / b;
    Matrix dx1, dx2;
    q1_.backward(c1, d1, nullptr, &dx1);
    q2_.backward(c2, d2, nullptr, &dx2);
    const Array d_action = (dx1.bottomRows(a) + dx2.bottomRows(a)).array();

    const Array act = ps.action.array();
    const Array sigma_noise = ps.std.array() * ps.noise.array();
    const Array d_pre = d_action * (T(1) - act.square());
    const T w = al / b;

    Matrix d_out(2 * a, n);
    d_out.topRows(a) = (d_pre + w * T(2) * act).matrix();
    const Array d_log_std = d_pre * sigma_noise + w * (T(2) * act * sigma_noise - T(1));
    d_out.bottomRows(a) = ps.log_std_clamped.select(Array::Zero(a, n), d_log_std).matrix();

    grad_policy->setZero(policy_.num_params());
    policy_.backward(ps.cache, d_out, grad_policy, nullptr);
    return loss;
}

template <typename T>
LossReport BasicSacAgent<T>::update(const Batch& raw_batch) {
    LossReport report;
    const TypedBatch batch = typed(raw_batch);
    const Eigen::Index n = batch.states.cols();
    const Matrix noise = gaussian(action_dim(), n);
    const Matrix next_noise = gaussian(action_dim(), n);
    const double alpha = this->alpha();
    report.alpha = alpha;

    // One policy forward pass serves both the temperature step and, after
    // the critic step, the policy loss: neither step touches the policy.
    const PolicySample<T> ps = evaluate_policy(policy_, batch.states, noise);
    const double mean_logp = static_cast<double>(ps.log_prob.mean());
    report.entropy = -mean_logp;
    report.alpha_loss = -static_cast<double>(log_alpha_(0)) * (mean_logp + target_entropy_);
    if (!std::isfinite(report.alpha_loss)) {
        report.aborted = true;
        return report;
    }
    alpha_opt_.step(log_alpha_, Vector::Constant(1, static_cast<T>(-(mean_logp + target_entropy_))));

    Vector g1, g2;
    report.critic_loss = critic_loss(batch, next_noise, alpha, &g1, &g2);
    if (!std::isfinite(report.critic_loss) || !g1.allFinite() || !g2.allFinite()) {
        report.aborted = true;
        return report;
    }
    q1_opt_.step(q1_.params(), g1);
    q2_opt_.step(q2_.params(), g2);

    Vector gp;
    report.policy_loss = policy_loss(batch, ps, alpha, &gp);
    if (!std::isfinite(report.policy_loss) || !gp.allFinite()) {
        report.aborted = true;
        return report;
    }
    policy_opt_.step(policy_.params(), gp);

    polyak_update(q1_target_, q1_, cfg_.tau);
    polyak_update(q2_target_, q2_, cfg_.tau);
    return report;
}

template <typename T>
void BasicSacAgent<T>::decay_learning_rates() {
    for (BasicAdam<T>* opt : {&policy_opt_, &q1_opt_, &q2_opt_, &alpha_opt_}) opt->set_lr(opt->lr() * cfg_.lr_decay);
}

template <typename T>
typename BasicSacAgent<T>::TrainStats BasicSacAgent<T>::train(
    Environment& env, long episodes, std::uint64_t seed, const std::function<void(const EpisodeMetrics&)>& sink) {
    if (env.config().workers != workers_) throw std::invalid_argument("SacAgent::train: worker count mismatch");
    TrainStats stats;
    for (long ep = 0; ep < episodes; ++ep) {
        EnvState state = env.reset(derive_seed(seed, static_cast<std::uint64_t>(ep), kEnvStream));
        std::vector<double> s = normalize_state(state, caps_);
        EpisodeAccumulator acc(ep);
        while (!env.done()) {
            const std::vector<double> action =
                stats.env_steps < cfg_.warmup_steps ? uniform_action(workers_, rng_) : select_action(s, true);
            const StepOutcome out = env.step(action);
            std::vector<double> s_next = normalize_state(out.next_state, caps_);
            buffer_.add(s, action, out.reward, s_next, out.done);
            acc.add(out);
            ++stats.env_steps;

            if (stats.env_steps % cfg_.train_every == 0 && stats.env_steps >= cfg_.warmup_steps &&
                buffer_.size() >= cfg_.batch_size) {
                if (stats.first_gradient_at_step < 0) stats.first_gradient_at_step = stats.env_steps;
                for (long g = 0; g < cfg_.gradient_steps; ++g) {
                    const LossReport r = update(buffer_.sample(cfg_.batch_size, rng_));
                    ++stats.gradient_steps;
                    if (r.aborted) {
                        ++stats.aborted_updates;
                        std::cerr << "fedsac: aborted SAC update (critic " << r.critic_loss << ", policy "
                                  << r.policy_loss << ", alpha " << r.alpha << ")\n";
                    }
                }
            }
            s = std::move(s_next);
        }
        if (sink) sink(acc.finish());
        if (cfg_.lr_decay_every_episodes > 0 && (ep + 1) % cfg_.lr_decay_every_episodes == 0) decay_learning_rates();
    }
    return stats;
}

template <typename T>
TrainedPolicy BasicSacAgent<T>::export_policy() const {
    return TrainedPolicy{workers_, policy_.template cast<double>(), caps_};
}

template class BasicSacAgent<float>;
template class BasicSacAgent<double>;

}  // namespace fedsac

#include "rramcmc/tasks_reinforcement.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "rramcmc/chain_driver.hpp"
#include "rramcmc/errors.hpp"

namespace rramcmc {

namespace {

// Seed-derivation domains keeping chain, episode, and evaluation streams apart.
constexpr std::uint64_t kEpisodeDomain = 0x45504953ull;
constexpr std::uint64_t kEvalDomain = 0x4556414Cull;

std::array<double, 4> observe(const CartpoleState& state) {
    return {state.x, state.v, state.theta, state.omega};
}

/// Counter-weighted mean differential row, rows >= burn_in.
std::vector<double> posterior_mean_row(const CrossbarArray& array, int burn_in) {
    if (burn_in < 0 || burn_in >= array.rows()) {
        throw ConfigError("posterior: burn_in leaves no rows");
    }
    std::uint64_t total = 0;
    std::vector<double> mean(static_cast<std::size_t>(array.cols()), 0.0);
    for (int n = burn_in; n < array.rows(); ++n) {
        const std::uint64_t weight = array.counter(n);
        if (weight == 0) continue;
        total += weight;
        const std::vector<double> g = array.read_row(n);
        for (std::size_t m = 0; m < mean.size(); ++m) {
            mean[m] += static_cast<double>(weight) * g[m];
        }
    }
    if (total == 0) throw DataError("posterior: untrained (post-burn-in counters all zero)");
    for (double& gm : mean) gm /= static_cast<double>(total);
    return mean;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

} // namespace

void validate(const RlConfig& cfg) {
    validate(cfg.mcmc);
    if (!(cfg.kappa > 0)) throw ConfigError("rl: kappa must be > 0");
    if (cfg.test_episodes < 1) throw ConfigError("rl: test_episodes must be >= 1");
    if (cfg.env.max_steps < 1) throw ConfigError("rl: max_steps must be >= 1");
    if (!(cfg.env.tau > 0) || !(cfg.env.angle_limit > 0) || !(cfg.env.x_limit > 0)) {
        throw ConfigError("rl: tau, angle_limit, x_limit must be > 0");
    }
}

PolicyPair make_policy_pair(int rows, int cols, const DeviceLaw& law,
                            const std::optional<ProgrammingLut>& lut, bool d2d_enabled,
                            RandomStream& rng) {
    CrossbarArray left(rows, cols, law, lut, d2d_enabled, rng);
    CrossbarArray right(rows, cols, law, lut, d2d_enabled, rng);
    return {std::move(left), std::move(right)};
}

CartAction wta_action_row(const PolicyPair& pair, int row, std::span<const double> obs,
                          double scale_s) {
    const double response_left = scale_s * pair.left.dot_product(row, obs);
    const double response_right = scale_s * pair.right.dot_product(row, obs);
    return response_right > response_left ? CartAction::right : CartAction::left;
}

CartAction wta_action_posterior(const PolicyPair& pair, std::span<const double> obs,
                                int burn_in) {
    const std::vector<double> mean_left = posterior_mean_row(pair.left, burn_in);
    const std::vector<double> mean_right = posterior_mean_row(pair.right, burn_in);
    return dot(mean_right, obs) > dot(mean_left, obs) ? CartAction::right : CartAction::left;
}

double rl_log_acceptance(double reward_p, double reward_c,
                         double log_prior_p, double log_prior_c, double kappa) {
    if (!(reward_p > 0) || !(reward_c > 0)) {
        throw std::domain_error("rl_log_acceptance: rewards must be > 0");
    }
    if (!(kappa > 0)) throw std::domain_error("rl_log_acceptance: kappa must be > 0");
    return (log_prior_p - log_prior_c) + std::log(reward_p) - std::log(reward_c) -
           std::log(kappa);
}

int episode_reward(const PolicyPair& pair, int row, std::uint64_t env_seed,
                   const RlConfig& cfg) {
    RandomStream env_rng(env_seed);
    CartpoleState state = initial_state(cfg.env, env_rng);
    int total = 0;
    while (!state.done) {
        const std::array<double, 4> obs = observe(state);
        const CartAction action = wta_action_row(pair, row, obs, cfg.mcmc.scale_s);
        total += cartpole_step(state, action, cfg.env).reward;
    }
    return total;
}

namespace {

// Joint driver over the action pair: one shared chain, counters in lockstep.
class PairDriver {
public:
    PairDriver(PolicyPair& pair, const RlConfig& cfg)
        : pair_(pair), cfg_(cfg),
          episode_base_(RandomStream::derive_seed(cfg.mcmc.seed, kEpisodeDomain)) {}

    int rows() const { return pair_.left.rows(); }
    int cols() const { return pair_.left.cols() + pair_.right.cols(); }

    void init_row0(RandomStream& rng) {
        pair_.left.reset_all();
        pair_.right.reset_all();
        pair_.left.initialize_row(0, rng);
        pair_.right.initialize_row(0, rng);
    }

    void propose(int src, int dst, RandomStream& rng) {
        pair_.left.propose_row(src, dst, rng);
        pair_.right.propose_row(src, dst, rng);
    }

    ChainScore score(int row) {
        const std::uint64_t env_seed = RandomStream::derive_seed(episode_base_, episode_index_++);
        const int reward = episode_reward(pair_, row, env_seed, cfg_);
        return {log_prior(model(row), cfg_.mcmc) + std::log(static_cast<double>(reward)),
                static_cast<double>(reward)};
    }

    void erase(int row) {
        pair_.left.erase_row(row);
        pair_.right.erase_row(row);
    }

    void bump_counter(int row) {
        pair_.left.increment_counter(row);
        pair_.right.increment_counter(row);
    }

    std::uint64_t counter(int row) const { return pair_.left.counter(row); }

    std::vector<double> model(int row) const {
        std::vector<double> g = pair_.left.read_row(row);
        const std::vector<double> right = pair_.right.read_row(row);
        g.insert(g.end(), right.begin(), right.end());
        return g;
    }

    double log_kappa() const { return std::log(cfg_.kappa); }

private:
    PolicyPair& pair_;
    const RlConfig& cfg_;
    std::uint64_t episode_base_;
    std::uint64_t episode_index_ = 0;
};

} // namespace

RunRecord train_rl(PolicyPair& pair, const RlConfig& cfg, RandomStream& rng) {
    validate(cfg);
    if (pair.left.rows() != pair.right.rows() || pair.left.cols() != pair.right.cols()) {
        throw ConfigError("train_rl: pair arrays must share one shape");
    }
    PairDriver driver(pair, cfg);
    RunRecord rec = run_chain(driver, cfg.mcmc, rng);
    rec.snapshot = nlohmann::json{{"left", pair.left.snapshot()},
                                  {"right", pair.right.snapshot()}};
    return rec;
}

RlEvaluation evaluate_rl(const PolicyPair& pair, const RlConfig& cfg, std::uint64_t eval_seed) {
    validate(cfg);
    const std::vector<double> mean_left = posterior_mean_row(pair.left, cfg.mcmc.burn_in);
    const std::vector<double> mean_right = posterior_mean_row(pair.right, cfg.mcmc.burn_in);
    const std::uint64_t base = RandomStream::derive_seed(eval_seed, kEvalDomain);
    RlEvaluation eval;
    eval.episode_rewards.reserve(static_cast<std::size_t>(cfg.test_episodes));
    for (int ep = 0; ep < cfg.test_episodes; ++ep) {
        RandomStream env_rng(RandomStream::derive_seed(base, static_cast<std::uint64_t>(ep)));
        CartpoleState state = initial_state(cfg.env, env_rng);
        int total = 0;
        while (!state.done) {
            const std::array<double, 4> obs = observe(state);
            const CartAction action =
                dot(mean_right, obs) > dot(mean_left, obs) ? CartAction::right : CartAction::left;
            total += cartpole_step(state, action, cfg.env).reward;
        }
        eval.episode_rewards.push_back(total);
        eval.mean_reward += total;
    }
    eval.mean_reward /= cfg.test_episodes;
    return eval;
}

} // namespace rramcmc

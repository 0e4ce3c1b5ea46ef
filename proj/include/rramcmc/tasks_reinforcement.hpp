#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rramcmc/cartpole.hpp"
#include "rramcmc/crossbar.hpp"
#include "rramcmc/mcmc_engine.hpp"
#include "rramcmc/random_stream.hpp"

namespace rramcmc {

struct RlConfig {
    McmcConfig mcmc;     // burn_in default for the 512-row geometry is 64
    CartpoleConfig env;
    double kappa = 1.0;  // reward-ratio normalization; log(kappa) subtracted per decision
    int test_episodes = 100;
};

void validate(const RlConfig& cfg);

/// Two same-shaped arrays, one per action. Rows of equal index form one
/// policy and share their visit count: both arrays' counters are kept in
/// lockstep by every training operation.
struct PolicyPair {
    CrossbarArray left;
    CrossbarArray right;
};

PolicyPair make_policy_pair(int rows, int cols, const DeviceLaw& law,
                            const std::optional<ProgrammingLut>& lut, bool d2d_enabled,
                            RandomStream& rng);

/// Winner-take-all over per-action responses S * (obs . g_row); exact tie
/// resolves to left.
CartAction wta_action_row(const PolicyPair& pair, int row, std::span<const double> obs,
                          double scale_s);

/// Test-time winner-take-all over the counter-weighted posterior responses
///   (1 / Tot) * sum_{n >= burn_in} counter[n] * (obs . g_n)
/// per array. Throws DataError on an untrained posterior.
CartAction wta_action_posterior(const PolicyPair& pair, std::span<const double> obs,
                                int burn_in);

/// (log_prior_p - log_prior_c) + log(reward_p) - log(reward_c) - log(kappa).
/// Throws std::domain_error on non-positive rewards or kappa.
double rl_log_acceptance(double reward_p, double reward_c,
                         double log_prior_p, double log_prior_c, double kappa);

/// One training episode from a seeded initial state, actions taken by row
/// `row` of the pair. Returns the cumulative reward, in [1, max_steps].
int episode_reward(const PolicyPair& pair, int row, std::uint64_t env_seed,
                   const RlConfig& cfg);

/// Joint Metropolis-Hastings sweep over the pair: rows of both arrays are
/// proposed, scored by one fresh training episode (episode seeds advance per
/// proposal; the current row's reward stays frozen at its acceptance value),
/// and accepted or erased together. The Gaussian prior spans the
/// concatenated left+right parameter vector.
RunRecord train_rl(PolicyPair& pair, const RlConfig& cfg, RandomStream& rng);

struct RlEvaluation {
    double mean_reward = 0.0;
    std::vector<int> episode_rewards;
};

/// test_episodes greedy posterior episodes from seeds derived off eval_seed.
RlEvaluation evaluate_rl(const PolicyPair& pair, const RlConfig& cfg, std::uint64_t eval_seed);

} // namespace rramcmc

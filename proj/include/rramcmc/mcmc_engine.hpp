#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rramcmc/crossbar.hpp"
#include "rramcmc/random_stream.hpp"

namespace rramcmc {

enum class VariabilityMode { cycle_and_d2d, cycle_only };

/// Sampler parameters. sigma_prior and scale_s have no values in the source
/// experiments' write-up; reference presets carry values found by grid search.
struct McmcConfig {
    double sigma_prior = 1.0;
    double mu_prior = 0.0;
    double scale_s = 1.0;      // row-function scale S
    int burn_in = 32;          // beta: first row index included in inference
    int reject_cap = 1000;     // max consecutive rejections at one row
    std::uint64_t seed = 0;
    VariabilityMode variability_mode = VariabilityMode::cycle_and_d2d;
};

/// Throws ConfigError on sigma_prior <= 0, burn_in < 0, or reject_cap < 1.
void validate(const McmcConfig& cfg);

/// Pluggable likelihood. Implementations bind their data at construction.
class LikelihoodModel {
public:
    virtual ~LikelihoodModel() = default;
    /// log p(data | g) for one row's parameter vector.
    virtual double log_likelihood(std::span<const double> g) const = 0;
    /// Maps a row dot-product v.g to the model output (e.g. logistic(S * x)).
    virtual double row_function(double x) const = 0;
};

/// Independent Gaussian log prior:
///   sum_m [ -log(sigma * sqrt(2 pi)) - (g[m] - mu)^2 / (2 sigma^2) ]
double log_prior(std::span<const double> g, const McmcConfig& cfg);

/// (log_prior_p + log_lik_p) - (log_prior_c + log_lik_c); all inputs finite.
double log_acceptance_ratio(double log_prior_p, double log_lik_p,
                            double log_prior_c, double log_lik_c);

/// Draws exactly one uniform u on (0,1]; accepts iff log_a >= log(u).
bool accept_decision(double log_a, RandomStream& rng);

struct RowTrace {
    int row = 0;
    double metric = 0.0;          // model metric of the accepted row
    std::uint64_t counter = 0;
    std::uint64_t rejects = 0;    // rejections charged while this row was current
    std::vector<double> model;    // differential parameter vector
};

struct RunRecord {
    std::uint64_t seed = 0;
    int rows = 0;
    int cols = 0;
    std::vector<RowTrace> row_trace;
    std::string acceptance_trace;      // one 'A'/'R' per proposal, in order
    std::uint64_t accepts = 0;         // accepted proposals + 1 for row-0 initialization
    std::uint64_t rejects = 0;
    std::uint64_t uniform_draws = 0;   // chain-stream draws consumed by the run
    std::uint64_t normal_draws = 0;
    double wall_ms = 0.0;              // the one field exempt from byte-identical reruns
    nlohmann::json snapshot;           // final posterior state
};

/// Metropolis-Hastings training sweep over the array's rows. RESETs the
/// array, initializes row 0 (counter 1, accepted by initialization), then
/// proposes row n+1 from row n until row N-1 is accepted. Rejection erases
/// the proposed row and increments the current row's counter. Throws
/// StuckChainError after reject_cap consecutive rejections at one row.
RunRecord train(CrossbarArray& array, const LikelihoodModel& model,
                const McmcConfig& cfg, RandomStream& rng);

/// Counter-weighted posterior mean output for input v:
///   (1 / Tot) * sum_{n = burn_in}^{N-1} counter[n] * f(v . g_n)
/// with Tot the post-burn-in counter total. Throws DataError when Tot == 0
/// (untrained posterior) and ConfigError when burn_in leaves no rows.
double infer(const CrossbarArray& array, const LikelihoodModel& model,
             std::span<const double> v, const McmcConfig& cfg);

} // namespace rramcmc

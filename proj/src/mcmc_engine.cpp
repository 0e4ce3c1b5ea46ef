#include "rramcmc/mcmc_engine.hpp"

#include <cmath>
#include <numbers>

#include "rramcmc/chain_driver.hpp"
#include "rramcmc/errors.hpp"

namespace rramcmc {

void validate(const McmcConfig& cfg) {
    if (!(cfg.sigma_prior > 0) || !std::isfinite(cfg.sigma_prior)) {
        throw ConfigError("mcmc: sigma_prior must be finite and > 0");
    }
    if (!std::isfinite(cfg.mu_prior)) throw ConfigError("mcmc: mu_prior must be finite");
    if (!std::isfinite(cfg.scale_s)) throw ConfigError("mcmc: scale_s must be finite");
    if (cfg.burn_in < 0) throw ConfigError("mcmc: burn_in must be >= 0");
    if (cfg.reject_cap < 1) throw ConfigError("mcmc: reject_cap must be >= 1");
}

double log_prior(std::span<const double> g, const McmcConfig& cfg) {
    const double sigma = cfg.sigma_prior;
    const double norm = -std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
    double acc = 0.0;
    for (double gm : g) {
        const double dev = gm - cfg.mu_prior;
        acc += norm - dev * dev / (2.0 * sigma * sigma);
    }
    return acc;
}

double log_acceptance_ratio(double log_prior_p, double log_lik_p,
                            double log_prior_c, double log_lik_c) {
    return (log_prior_p + log_lik_p) - (log_prior_c + log_lik_c);
}

bool accept_decision(double log_a, RandomStream& rng) {
    const double u = rng.uniform01();
    return log_a >= std::log(u);
}

namespace {

// Single-array driver: log score = Gaussian prior + pluggable likelihood.
class SupervisedDriver {
public:
    SupervisedDriver(CrossbarArray& array, const LikelihoodModel& model, const McmcConfig& cfg)
        : array_(array), model_(model), cfg_(cfg) {}

    int rows() const { return array_.rows(); }
    int cols() const { return array_.cols(); }

    void init_row0(RandomStream& rng) {
        array_.reset_all();
        array_.initialize_row(0, rng);
    }
    void propose(int src, int dst, RandomStream& rng) { array_.propose_row(src, dst, rng); }

    ChainScore score(int row) const {
        const std::vector<double> g = array_.read_row(row);
        const double lik = model_.log_likelihood(g);
        return {log_prior(g, cfg_) + lik, lik};
    }

    void erase(int row) { array_.erase_row(row); }
    void bump_counter(int row) { array_.increment_counter(row); }
    std::uint64_t counter(int row) const { return array_.counter(row); }
    std::vector<double> model(int row) const { return array_.read_row(row); }
    double log_kappa() const { return 0.0; }

private:
    CrossbarArray& array_;
    const LikelihoodModel& model_;
    const McmcConfig& cfg_;
};

} // namespace

RunRecord train(CrossbarArray& array, const LikelihoodModel& model,
                const McmcConfig& cfg, RandomStream& rng) {
    SupervisedDriver driver(array, model, cfg);
    RunRecord rec = run_chain(driver, cfg, rng);
    rec.snapshot = array.snapshot();
    return rec;
}

double infer(const CrossbarArray& array, const LikelihoodModel& model,
             std::span<const double> v, const McmcConfig& cfg) {
    validate(cfg);
    if (cfg.burn_in >= array.rows()) {
        throw ConfigError("infer: burn_in leaves no rows");
    }
    std::uint64_t total = 0;
    for (int n = cfg.burn_in; n < array.rows(); ++n) total += array.counter(n);
    if (total == 0) throw DataError("infer: untrained posterior (post-burn-in counters all zero)");
    double acc = 0.0;
    for (int n = cfg.burn_in; n < array.rows(); ++n) {
        const std::uint64_t weight = array.counter(n);
        if (weight == 0) continue;
        acc += static_cast<double>(weight) * model.row_function(array.dot_product(n, v));
    }
    return acc / static_cast<double>(total);
}

} // namespace rramcmc

#pragma once

#include <chrono>
#include <string>

#include "rramcmc/errors.hpp"
#include "rramcmc/mcmc_engine.hpp"
#include "rramcmc/random_stream.hpp"

namespace rramcmc {

struct ChainScore {
    double log_score = 0.0; // log prior + log data term; kappa handled by the driver
    double metric = 0.0;    // value recorded in the row trace
};

/// Row-chain accept/reject loop shared by the supervised and RL trainers.
///
/// Driver requirements:
///   int rows() const;
///   int cols() const;
///   void init_row0(RandomStream&);            // RESET everything, program row 0
///   void propose(int src, int dst, RandomStream&);
///   ChainScore score(int row);                // may run an episode; called once per proposal
///   void erase(int row);
///   void bump_counter(int row);               // all arrays sharing the counter
///   std::uint64_t counter(int row) const;
///   std::vector<double> model(int row) const; // parameter vector for the trace
///   double log_kappa() const;                 // 0 for symmetric-cost training
template <class Driver>
RunRecord run_chain(Driver& driver, const McmcConfig& cfg, RandomStream& rng) {
    validate(cfg);
    const int n_rows = driver.rows();
    if (n_rows < cfg.burn_in + 2) {
        throw ConfigError("train: need rows >= burn_in + 2, got " + std::to_string(n_rows) +
                          " rows with burn_in " + std::to_string(cfg.burn_in));
    }
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t uniforms0 = rng.uniform_draws();
    const std::uint64_t normals0 = rng.normal_draws();

    RunRecord rec;
    rec.seed = cfg.seed;
    rec.rows = n_rows;
    rec.cols = driver.cols();
    rec.row_trace.reserve(static_cast<std::size_t>(n_rows));

    driver.init_row0(rng);
    driver.bump_counter(0);
    ChainScore current = driver.score(0);
    rec.row_trace.push_back({0, current.metric, 0, 0, driver.model(0)});

    int n = 0;
    std::uint64_t consecutive = 0;
    while (n < n_rows - 1) {
        driver.propose(n, n + 1, rng);
        const ChainScore proposed = driver.score(n + 1);
        const double log_a = proposed.log_score - current.log_score - driver.log_kappa();
        if (accept_decision(log_a, rng)) {
            rec.acceptance_trace += 'A';
            driver.bump_counter(n + 1);
            current = proposed;
            ++n;
            consecutive = 0;
            rec.row_trace.push_back({n, current.metric, 0, 0, driver.model(n)});
        } else {
            rec.acceptance_trace += 'R';
            driver.erase(n + 1);
            driver.bump_counter(n);
            ++rec.rejects;
            ++rec.row_trace.back().rejects;
            if (++consecutive >= static_cast<std::uint64_t>(cfg.reject_cap)) {
                throw StuckChainError(n, "chain stuck at row " + std::to_string(n) + " after " +
                                             std::to_string(consecutive) +
                                             " consecutive rejections");
            }
        }
    }

    rec.accepts = static_cast<std::uint64_t>(n_rows); // every row accepted once, row 0 by init
    for (RowTrace& row : rec.row_trace) {
        row.counter = driver.counter(row.row);
    }
    rec.uniform_draws = rng.uniform_draws() - uniforms0;
    rec.normal_draws = rng.normal_draws() - normals0;
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0).count();
    return rec;
}

} // namespace rramcmc

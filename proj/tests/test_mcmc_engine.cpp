#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rramcmc/crossbar.hpp"
#include "rramcmc/errors.hpp"
#include "rramcmc/mcmc_engine.hpp"

using namespace rramcmc;

namespace {

// Deterministic device: median(i) = i, no cycle noise, no spread.
DeviceLaw noiseless_law() {
    DeviceLaw law;
    law.a = 0.0;
    law.b = 0.0;
    law.c = 1.0;
    law.d = 1.0;
    law.e = 0.0;
    law.i_min = 1.0;
    law.i_max = 100.0;
    return law;
}

CrossbarArray make_array(int rows, int cols, const DeviceLaw& law, std::uint64_t seed) {
    RandomStream rng(seed);
    return CrossbarArray(rows, cols, law, std::nullopt, false, rng);
}

// Likelihood that is indifferent to the parameters: every proposal ties.
struct FlatModel final : LikelihoodModel {
    double log_likelihood(std::span<const double>) const override { return 0.0; }
    double row_function(double x) const override { return x; }
};

// Identity row function with a quadratic well at g = target per component.
struct QuadraticModel final : LikelihoodModel {
    double target = 0.0;
    double weight = 1.0;
    double log_likelihood(std::span<const double> g) const override {
        double s = 0.0;
        for (double x : g) s -= weight * (x - target) * (x - target);
        return s;
    }
    double row_function(double x) const override { return x; }
};

// Scores the first call (row 0) at zero, then every proposal far below it.
struct TrapModel final : LikelihoodModel {
    mutable bool first = true;
    double log_likelihood(std::span<const double>) const override {
        if (first) {
            first = false;
            return 0.0;
        }
        return -1.0e6;
    }
    double row_function(double x) const override { return x; }
};

} // namespace

TEST_SUITE("mcmc_engine") {

TEST_CASE("validate rejects bad sampler parameters") {
    McmcConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    McmcConfig bad = cfg;
    bad.sigma_prior = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.sigma_prior = -1.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.burn_in = -1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.reject_cap = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("log prior matches the closed form") {
    McmcConfig cfg;
    cfg.sigma_prior = 1.5;
    cfg.mu_prior = 0.25;
    const std::vector<double> g{0.5, -1.2, 2.0};
    CHECK(log_prior(g, cfg) == doctest::Approx(-5.1348775906051785).epsilon(1e-12));

    // Prior ratios depend only on the quadratic term; normalizations cancel.
    const std::vector<double> g2{0.1, 0.9, -0.4};
    double sum_sq = 0.0;
    for (std::size_t m = 0; m < g.size(); ++m) {
        const double dp = g[m] - cfg.mu_prior;
        const double dc = g2[m] - cfg.mu_prior;
        sum_sq += dp * dp - dc * dc;
    }
    const double expect = -sum_sq / (2.0 * cfg.sigma_prior * cfg.sigma_prior);
    CHECK(log_prior(g, cfg) - log_prior(g2, cfg) == doctest::Approx(expect).epsilon(1e-12));

    // Doubling sigma at the mode costs exactly M*ln(2) of normalization.
    McmcConfig narrow, wide;
    narrow.sigma_prior = 1.0;
    wide.sigma_prior = 2.0;
    const std::vector<double> mode{0.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(log_prior(mode, narrow) - log_prior(mode, wide) ==
          doctest::Approx(5.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("log acceptance ratio equals the linear-domain ratio") {
    const double lp_p = -1.3, ll_p = -7.9, lp_c = -2.1, ll_c = -6.4;
    const double la = log_acceptance_ratio(lp_p, ll_p, lp_c, ll_c);
    CHECK(la == doctest::Approx((lp_p + ll_p) - (lp_c + ll_c)).epsilon(1e-12));
    const double linear =
        (std::exp(lp_p) * std::exp(ll_p)) / (std::exp(lp_c) * std::exp(ll_c));
    CHECK(std::exp(la) == doctest::Approx(linear).epsilon(1e-12));
}

TEST_CASE("accept decision draws one uniform and meets its probability") {
    RandomStream rng(99);

    // log_a = 0 accepts every u in (0,1].
    for (int t = 0; t < 100; ++t) CHECK(accept_decision(0.0, rng));

    // Deeply negative log_a never accepts (u >= 2^-53 so log u > -37).
    for (int t = 0; t < 100; ++t) CHECK_FALSE(accept_decision(-700.0, rng));

    // Exactly one uniform and no normals per decision.
    const std::uint64_t u0 = rng.uniform_draws();
    const std::uint64_t n0 = rng.normal_draws();
    accept_decision(-0.5, rng);
    CHECK(rng.uniform_draws() == u0 + 1);
    CHECK(rng.normal_draws() == n0);

    // P(accept | log_a = ln 0.5) = 0.5.
    int hits = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        if (accept_decision(std::log(0.5), rng)) ++hits;
    }
    CHECK(static_cast<double>(hits) / trials == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("flat likelihood on a noiseless device accepts every proposal") {
    CrossbarArray array = make_array(8, 2, noiseless_law(), 3);
    FlatModel model;
    McmcConfig cfg;
    cfg.burn_in = 2;
    RandomStream rng(11);
    const RunRecord rec = train(array, model, cfg, rng);
    CHECK(rec.rows == 8);
    CHECK(rec.accepts == 8); // 7 proposals + row-0 initialization
    CHECK(rec.rejects == 0);
    CHECK(rec.acceptance_trace == "AAAAAAA");
    REQUIRE(rec.row_trace.size() == 8);
    for (const RowTrace& rt : rec.row_trace) {
        CHECK(rt.counter == 1);
        CHECK(rt.rejects == 0);
    }
}

TEST_CASE("counters absorb every decision on a noisy chain") {
    DeviceLaw law; // default raw law has real cycle noise
    CrossbarArray array = make_array(32, 2, law, 7);
    QuadraticModel model;
    model.target = 1.0;
    model.weight = 10.0;
    McmcConfig cfg;
    cfg.sigma_prior = 5.0;
    cfg.burn_in = 2;
    cfg.reject_cap = 100000;
    RandomStream rng(21);
    const std::uint64_t u0 = rng.uniform_draws();
    const std::uint64_t n0 = rng.normal_draws();
    const RunRecord rec = train(array, model, cfg, rng);

    CHECK(rec.accepts == 32);
    std::uint64_t counter_total = 0;
    for (const RowTrace& rt : rec.row_trace) counter_total += rt.counter;
    CHECK(counter_total == rec.accepts + rec.rejects);

    // One trace character per proposal, 'A' count = rows - 1.
    CHECK(rec.acceptance_trace.size() == (rec.accepts - 1) + rec.rejects);
    std::uint64_t a_count = 0;
    for (char ch : rec.acceptance_trace) {
        if (ch == 'A') ++a_count;
    }
    CHECK(a_count == rec.accepts - 1);
    CHECK(rec.row_trace.back().row == 31);

    // The record owns the exact draw budget of the run.
    CHECK(rec.uniform_draws == rng.uniform_draws() - u0);
    CHECK(rec.normal_draws == rng.normal_draws() - n0);

    // Array counters agree with the trace.
    for (const RowTrace& rt : rec.row_trace) {
        CHECK(array.counter(rt.row) == rt.counter);
    }
}

TEST_CASE("train replays draw for draw under a fixed seed") {
    DeviceLaw law;
    QuadraticModel model;
    model.target = 0.5;
    model.weight = 4.0;
    McmcConfig cfg;
    cfg.sigma_prior = 5.0;
    cfg.burn_in = 2;
    cfg.reject_cap = 100000;

    auto run_once = [&](RunRecord& rec, std::vector<double>& final_rows) {
        CrossbarArray array = make_array(16, 2, law, 7);
        RandomStream rng(42);
        rec = train(array, model, cfg, rng);
        for (int n = 0; n < array.rows(); ++n) {
            for (double g : array.read_row(n)) final_rows.push_back(g);
        }
    };
    RunRecord rec_a, rec_b;
    std::vector<double> rows_a, rows_b;
    run_once(rec_a, rows_a);
    run_once(rec_b, rows_b);

    CHECK(rec_a.acceptance_trace == rec_b.acceptance_trace);
    CHECK(rec_a.uniform_draws == rec_b.uniform_draws);
    CHECK(rec_a.normal_draws == rec_b.normal_draws);
    REQUIRE(rec_a.row_trace.size() == rec_b.row_trace.size());
    for (std::size_t n = 0; n < rec_a.row_trace.size(); ++n) {
        CHECK(rec_a.row_trace[n].metric == rec_b.row_trace[n].metric);
        CHECK(rec_a.row_trace[n].counter == rec_b.row_trace[n].counter);
    }
    REQUIRE(rows_a.size() == rows_b.size());
    for (std::size_t k = 0; k < rows_a.size(); ++k) CHECK(rows_a[k] == rows_b[k]);
}

TEST_CASE("infer weights rows by visit counters beyond burn-in") {
    // Craft a trained state through the snapshot path: differentials 1, 2, 0
    // with visit counters 5, 3, 2.
    nlohmann::json snap = make_array(3, 1, noiseless_law(), 1).snapshot();
    snap["g_plus"]["conductance"] = {2.0, 3.0, 1.0};
    snap["g_minus"]["conductance"] = {1.0, 1.0, 1.0};
    snap["g_plus"]["state"] = {1, 1, 1};
    snap["g_minus"]["state"] = {1, 1, 1};
    snap["counters"] = {5, 3, 2};
    const CrossbarArray array = CrossbarArray::restore(snap);

    FlatModel model; // row_function is the identity
    McmcConfig cfg;
    const std::vector<double> v{1.0};

    cfg.burn_in = 0;
    CHECK(infer(array, model, v, cfg) ==
          doctest::Approx((5.0 * 1.0 + 3.0 * 2.0 + 2.0 * 0.0) / 10.0).epsilon(1e-12));
    cfg.burn_in = 1;
    CHECK(infer(array, model, v, cfg) ==
          doctest::Approx((3.0 * 2.0 + 2.0 * 0.0) / 5.0).epsilon(1e-12));
    cfg.burn_in = 2;
    CHECK(infer(array, model, v, cfg) == doctest::Approx(0.0));

    // Scaling the input scales the identity-model output.
    cfg.burn_in = 0;
    const std::vector<double> v2{2.0};
    CHECK(infer(array, model, v2, cfg) == doctest::Approx(2.2).epsilon(1e-12));

    // All post-burn-in counters zero: the posterior holds no samples.
    snap["counters"] = {4, 0, 0};
    const CrossbarArray untrained = CrossbarArray::restore(snap);
    cfg.burn_in = 1;
    CHECK_THROWS_AS(infer(untrained, model, v, cfg), DataError);

    // Burn-in must leave at least one row.
    cfg.burn_in = 3;
    CHECK_THROWS_AS(infer(untrained, model, v, cfg), ConfigError);
}

TEST_CASE("stuck chains raise after the rejection cap") {
    DeviceLaw law;
    CrossbarArray array = make_array(8, 2, law, 13);
    TrapModel model;
    McmcConfig cfg;
    cfg.burn_in = 2;
    cfg.reject_cap = 50;
    RandomStream rng(5);
    try {
        train(array, model, cfg, rng);
        FAIL("expected StuckChainError");
    } catch (const StuckChainError& err) {
        const std::string what = err.what();
        CHECK(what.find("row 0") != std::string::npos);
        CHECK(what.find("50") != std::string::npos);
    }
}

TEST_CASE("training requires enough rows past burn-in") {
    FlatModel model;
    McmcConfig cfg;
    cfg.burn_in = 7;
    {
        CrossbarArray array = make_array(8, 2, noiseless_law(), 3);
        RandomStream rng(11);
        CHECK_THROWS_AS(train(array, model, cfg, rng), ConfigError);
    }
    cfg.burn_in = 6;
    {
        CrossbarArray array = make_array(8, 2, noiseless_law(), 3);
        RandomStream rng(11);
        CHECK_NOTHROW(train(array, model, cfg, rng));
    }
}

} // TEST_SUITE

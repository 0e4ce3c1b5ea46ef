#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rramcmc/cartpole.hpp"
#include "rramcmc/random_stream.hpp"

using namespace rramcmc;

TEST_SUITE("cartpole") {

TEST_CASE("one Euler step matches the closed-form update") {
    CartpoleConfig cfg;
    CartpoleState state;
    state.x = 0.1;
    state.v = -0.2;
    state.theta = 0.05;
    state.omega = 0.3;
    dynamics_step(state, 10.0, cfg);
    CHECK(state.x == doctest::Approx(0.096).epsilon(1e-14));
    CHECK(state.v == doctest::Approx(-0.005625065781779709).epsilon(1e-14));
    CHECK(state.theta == doctest::Approx(0.056).epsilon(1e-14));
    CHECK(state.omega == doctest::Approx(0.02349585151852651).epsilon(1e-14));
}

TEST_CASE("dynamics are mirror-symmetric under state and force negation") {
    CartpoleConfig cfg;
    CartpoleState a;
    a.x = 0.7;
    a.v = -0.4;
    a.theta = 0.12;
    a.omega = -0.9;
    CartpoleState b;
    b.x = -a.x;
    b.v = -a.v;
    b.theta = -a.theta;
    b.omega = -a.omega;
    for (int t = 0; t < 50; ++t) {
        dynamics_step(a, 10.0, cfg);
        dynamics_step(b, -10.0, cfg);
        CHECK(a.x == doctest::Approx(-b.x).epsilon(1e-12));
        CHECK(a.v == doctest::Approx(-b.v).epsilon(1e-12));
        CHECK(a.theta == doctest::Approx(-b.theta).epsilon(1e-12));
        CHECK(a.omega == doctest::Approx(-b.omega).epsilon(1e-12));
    }
}

TEST_CASE("episode ends at the angle limit") {
    CartpoleConfig cfg;
    CartpoleState state;
    state.theta = 0.25; // next step crosses 15 deg = 0.261799
    state.omega = 1.0;
    const StepResult r = cartpole_step(state, CartAction::right, cfg);
    CHECK(r.reward == 1);
    CHECK(r.done);
    CHECK(state.done);
    CHECK(std::abs(state.theta) >= cfg.angle_limit);
    CHECK_THROWS_AS(cartpole_step(state, CartAction::left, cfg), std::logic_error);
}

TEST_CASE("episode ends at the track limit") {
    CartpoleConfig cfg;
    CartpoleState state;
    state.x = 2.35;
    state.v = 5.0;
    const StepResult r = cartpole_step(state, CartAction::left, cfg);
    CHECK(r.done);
    CHECK(std::abs(state.x) >= cfg.x_limit);
}

TEST_CASE("episode ends at the step cap with one reward per step") {
    CartpoleConfig cfg;
    cfg.max_steps = 3;
    CartpoleState state; // perfectly balanced start stays alive for 3 steps
    int total = 0;
    StepResult r{};
    int steps = 0;
    while (!state.done) {
        r = cartpole_step(state, steps % 2 == 0 ? CartAction::right : CartAction::left, cfg);
        total += r.reward;
        ++steps;
        REQUIRE(steps <= 3);
    }
    CHECK(steps == 3);
    CHECK(total == 3);
    CHECK(state.step_count == 3);
}

TEST_CASE("linearized pendulum period matches the pole constants") {
    // With gravity flipped the upright unstable point becomes a stable
    // oscillator with omega^2 = g / (l * (4/3 - m_p / m_total)) = 15.7756,
    // so the period is 1.5819 s. Zero crossings of a force-free rollout
    // must reproduce it within Euler and sampling error.
    CartpoleConfig cfg;
    cfg.gravity = -9.8;
    CartpoleState state;
    state.theta = 0.01;
    double t_first = -1.0, t_second = -1.0;
    double prev = state.theta;
    for (int k = 1; k < 200; ++k) {
        dynamics_step(state, 0.0, cfg);
        if (prev > 0.0 && state.theta <= 0.0 && t_first < 0.0) {
            t_first = k * cfg.tau;
        } else if (prev < 0.0 && state.theta >= 0.0 && t_first > 0.0 && t_second < 0.0) {
            t_second = k * cfg.tau;
        }
        prev = state.theta;
    }
    REQUIRE(t_first > 0.0);
    REQUIRE(t_second > t_first);
    const double period = 2.0 * (t_second - t_first);
    CHECK(period == doctest::Approx(1.5819282841307116).epsilon(0.05));
}

TEST_CASE("initial state is uniform in the init box in draw order x v theta omega") {
    CartpoleConfig cfg;
    RandomStream rng(123);
    for (int t = 0; t < 1000; ++t) {
        const CartpoleState s = initial_state(cfg, rng);
        CHECK(std::abs(s.x) <= cfg.init_range);
        CHECK(std::abs(s.v) <= cfg.init_range);
        CHECK(std::abs(s.theta) <= cfg.init_range);
        CHECK(std::abs(s.omega) <= cfg.init_range);
        CHECK(s.step_count == 0);
        CHECK_FALSE(s.done);
    }
    // Exactly four uniforms per initialization, mapped in declaration order.
    RandomStream a(7), b(7);
    const CartpoleState s = initial_state(cfg, a);
    CHECK(a.uniform_draws() == 4);
    auto draw = [&] { return -cfg.init_range + 2.0 * cfg.init_range * b.uniform01(); };
    CHECK(s.x == draw());
    CHECK(s.v == draw());
    CHECK(s.theta == draw());
    CHECK(s.omega == draw());
}

} // TEST_SUITE

#pragma once

#include <numbers>

#include "rramcmc/random_stream.hpp"

namespace rramcmc {

enum class CartAction { left, right };

struct CartpoleConfig {
    double gravity = 9.8;
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double half_length = 0.5;  // pole half-length
    double force = 10.0;
    double tau = 0.02;         // explicit Euler step
    double angle_limit = 15.0 * std::numbers::pi / 180.0;
    double x_limit = 2.4;
    int max_steps = 500;
    double init_range = 0.05;  // initial state uniform in +/- this, per variable
};

struct CartpoleState {
    double x = 0.0;
    double v = 0.0;
    double theta = 0.0;
    double omega = 0.0;
    int step_count = 0;
    bool done = false;
};

/// All four state variables uniform in [-init_range, init_range].
/// Draw order: x, v, theta, omega.
CartpoleState initial_state(const CartpoleConfig& cfg, RandomStream& rng);

/// One explicit-Euler update of the cart-pole dynamics under a signed force.
/// No termination logic; exposed for raw-dynamics checks.
void dynamics_step(CartpoleState& state, double force, const CartpoleConfig& cfg);

struct StepResult {
    int reward = 1; // +1 per step, terminal step included
    bool done = false;
};

/// Applies the action force, integrates one step, grants +1 reward, and
/// terminates when |theta| >= angle_limit, |x| >= x_limit, or step_count
/// reaches max_steps. Throws std::logic_error if called on a done state.
StepResult cartpole_step(CartpoleState& state, CartAction action, const CartpoleConfig& cfg);

} // namespace rramcmc

#include "rramcmc/cartpole.hpp"

#include <cmath>
#include <stdexcept>

namespace rramcmc {

CartpoleState initial_state(const CartpoleConfig& cfg, RandomStream& rng) {
    auto draw = [&] { return -cfg.init_range + 2.0 * cfg.init_range * rng.uniform01(); };
    CartpoleState state;
    state.x = draw();
    state.v = draw();
    state.theta = draw();
    state.omega = draw();
    return state;
}

void dynamics_step(CartpoleState& state, double force, const CartpoleConfig& cfg) {
    const double total_mass = cfg.cart_mass + cfg.pole_mass;
    const double pole_moment = cfg.pole_mass * cfg.half_length;
    const double sin_t = std::sin(state.theta);
    const double cos_t = std::cos(state.theta);
    const double temp = (force + pole_moment * state.omega * state.omega * sin_t) / total_mass;
    const double theta_acc = (cfg.gravity * sin_t - cos_t * temp) /
                             (cfg.half_length * (4.0 / 3.0 - cfg.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pole_moment * theta_acc * cos_t / total_mass;
    state.x += cfg.tau * state.v;
    state.v += cfg.tau * x_acc;
    state.theta += cfg.tau * state.omega;
    state.omega += cfg.tau * theta_acc;
}

StepResult cartpole_step(CartpoleState& state, CartAction action, const CartpoleConfig& cfg) {
    if (state.done) throw std::logic_error("cartpole_step: episode already done");
    const double force = action == CartAction::right ? cfg.force : -cfg.force;
    dynamics_step(state, force, cfg);
    ++state.step_count;
    const bool alive = std::abs(state.theta) < cfg.angle_limit &&
                       std::abs(state.x) < cfg.x_limit &&
                       state.step_count < cfg.max_steps;
    state.done = !alive;
    return {1, state.done};
}

} // namespace rramcmc

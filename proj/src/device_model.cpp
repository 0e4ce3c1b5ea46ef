#include "rramcmc/device_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rramcmc/errors.hpp"

namespace rramcmc {

namespace {

void check_range(const DeviceLaw& law, double i_set) {
    if (!(i_set >= law.i_min && i_set <= law.i_max)) {
        throw std::out_of_range("i_set " + std::to_string(i_set) + " outside [" +
                                std::to_string(law.i_min) + ", " + std::to_string(law.i_max) + "]");
    }
}

} // namespace

void validate(const DeviceLaw& law) {
    const double fields[] = {law.a, law.b, law.c, law.d, law.e,
                             law.i_min, law.i_max, law.g_floor};
    for (double f : fields) {
        if (!std::isfinite(f)) throw ConfigError("device law constants must be finite");
    }
    if (law.a < 0) throw ConfigError("device law: a must be >= 0");
    if (law.c <= 0) throw ConfigError("device law: c must be > 0");
    if (law.d <= 0) throw ConfigError("device law: d must be > 0");
    if (law.e < 0) throw ConfigError("device law: e must be >= 0");
    if (law.g_floor <= 0) throw ConfigError("device law: g_floor must be > 0");
    if (!(0 < law.i_min && law.i_min < law.i_max)) {
        throw ConfigError("device law: require 0 < i_min < i_max");
    }
}

double median_conductance(const DeviceLaw& law, double d_i, double i_set) {
    check_range(law, i_set);
    if (!(d_i > 0)) throw std::domain_error("median_conductance: d_i must be > 0");
    return d_i * std::pow(i_set, law.c);
}

double sd_conductance(const DeviceLaw& law, double i_set) {
    check_range(law, i_set);
    return law.a * std::pow(i_set, law.b);
}

double i_set_for_target(const DeviceLaw& law, double g_target) {
    if (!(g_target > 0)) throw std::domain_error("i_set_for_target: g_target must be > 0");
    const double i = std::pow(g_target / law.d, 1.0 / law.c);
    return std::clamp(i, law.i_min, law.i_max);
}

ProgrammingLut make_uniform_lut(const DeviceLaw& law, int n_entries) {
    if (n_entries < 2) throw ConfigError("LUT needs at least 2 entries");
    ProgrammingLut lut;
    lut.entries.reserve(static_cast<std::size_t>(n_entries));
    const double step = (law.i_max - law.i_min) / (n_entries - 1);
    for (int k = 0; k < n_entries; ++k) {
        const double i = (k == n_entries - 1) ? law.i_max : law.i_min + k * step;
        lut.entries.push_back({i, median_conductance(law, law.d, i)});
    }
    return lut;
}

double quantize_to_lut(const DeviceLaw& law, const ProgrammingLut& lut, double i_set) {
    if (lut.entries.empty()) throw ConfigError("quantize_to_lut: empty LUT");
    const double target = median_conductance(law, law.d, i_set);
    const LutEntry* best = &lut.entries.front();
    double best_dist = std::abs(best->median_conductance - target);
    for (const LutEntry& entry : lut.entries) {
        const double dist = std::abs(entry.median_conductance - target);
        if (dist < best_dist) { // strict: ties stay with the lower entry
            best = &entry;
            best_dist = dist;
        }
    }
    return best->set_current;
}

void set_pulse(DeviceCell& cell, const DeviceLaw& law, double i_set, RandomStream& rng) {
    const double median = median_conductance(law, cell.d_i, i_set);
    const double sd = sd_conductance(law, i_set);
    double g = rng.normal(median, sd);
    int redraws = 0;
    while (g < law.g_floor) {
        if (++redraws > 100000) {
            throw ConfigError("set_pulse: g_floor unreachable at i_set " + std::to_string(i_set));
        }
        g = rng.normal(median, sd);
    }
    cell.state = CellState::hcs;
    cell.conductance = g;
}

void reset_pulse(DeviceCell& cell) {
    cell.state = CellState::lcs;
    cell.conductance = 0.0;
}

double sample_prefactor(const DeviceLaw& law, RandomStream& rng) {
    if (law.e == 0) return law.d;
    double d_i = rng.normal(law.d, law.e);
    while (d_i <= 0) d_i = rng.normal(law.d, law.e);
    return d_i;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("fit_power_law: need at least 2 points");
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(x[k] > 0) || !(y[k] > 0)) {
            throw std::invalid_argument("fit_power_law: coordinates must be positive");
        }
        sx += std::log(x[k]);
        sy += std::log(y[k]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = std::log(x[k]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[k]) - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit_power_law: all x identical");
    const double exponent = sxy / sxx;
    return {std::exp(my - exponent * mx), exponent};
}

} // namespace rramcmc

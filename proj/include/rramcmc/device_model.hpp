#pragma once

#include <span>
#include <vector>

#include "rramcmc/random_stream.hpp"

namespace rramcmc {

/// Units the law constants and all currents/conductances are expressed in.
/// Laws are evaluated at face value in the declared convention; there is no
/// hidden conversion inside any operation.
enum class UnitConvention { si, micro };

enum class CellState { lcs, hcs };

/// SET-operation power laws of a filamentary oxide cell:
///   median(i) = d_i * i^c      (cycle-to-cycle median at SET current i)
///   sd(i)     = a * i^b        (cycle-to-cycle standard deviation)
/// d is the population prefactor; each physical device carries its own d_i
/// drawn once as Normal(d, e), truncated to stay positive.
struct DeviceLaw {
    double a = 0.093;
    double b = 0.48;
    double c = 0.78;
    double d = 0.19;
    double e = 0.096;
    double i_min = 20.0;
    double i_max = 100.0;
    double g_floor = 1e-3; // SET draws strictly below this are redrawn
    UnitConvention unit_convention = UnitConvention::micro;
};

/// One programmable cell. conductance is meaningful only in HCS; LCS cells
/// contribute exactly 0 to any readout.
struct DeviceCell {
    CellState state = CellState::lcs;
    double conductance = 0.0;
    double d_i = 0.0; // per-device median prefactor, fixed at array construction
};

struct LutEntry {
    double set_current;
    double median_conductance;
};

/// Discrete programming table: the programmer can only request the SET
/// currents listed here. Entries are sorted by ascending set_current.
struct ProgrammingLut {
    std::vector<LutEntry> entries;
};

/// Throws ConfigError on any violated constraint (non-finite constants,
/// a < 0, c <= 0, d <= 0, e < 0, g_floor <= 0, or i_min/i_max not ordered).
void validate(const DeviceLaw& law);

/// d_i * i_set^c. Throws std::out_of_range if i_set is outside
/// [i_min, i_max] and std::domain_error if d_i <= 0.
double median_conductance(const DeviceLaw& law, double d_i, double i_set);

/// a * i_set^b. Same range check as median_conductance.
double sd_conductance(const DeviceLaw& law, double i_set);

/// Inverse of the population median law: (g_target / d)^(1/c), clamped into
/// [i_min, i_max]. Uses the population prefactor d, never a per-device d_i:
/// the programmer cannot observe per-device offsets. Throws std::domain_error
/// for g_target <= 0.
double i_set_for_target(const DeviceLaw& law, double g_target);

/// n_entries SET currents uniformly spaced over [i_min, i_max] (one per gate
/// voltage step), each annotated with its population median conductance.
ProgrammingLut make_uniform_lut(const DeviceLaw& law, int n_entries = 21);

/// Snaps i_set to the LUT entry whose median conductance is closest to the
/// population median at i_set; ties resolve toward the lower entry.
double quantize_to_lut(const DeviceLaw& law, const ProgrammingLut& lut, double i_set);

/// SET pulse: draws conductance ~ Normal(median(law, cell.d_i, i_set),
/// sd(law, i_set)), redrawing while the draw falls below law.g_floor, and
/// leaves the cell in HCS. Each redraw consumes one more normal draw.
void set_pulse(DeviceCell& cell, const DeviceLaw& law, double i_set, RandomStream& rng);

/// RESET pulse: cell to LCS. Idempotent.
void reset_pulse(DeviceCell& cell);

/// One per-device prefactor draw: Normal(d, e), redrawn while <= 0.
/// Returns d exactly when e == 0.
double sample_prefactor(const DeviceLaw& law, RandomStream& rng);

struct PowerLawFit {
    double prefactor;
    double exponent;
};

/// Least-squares fit of log(y) = log(prefactor) + exponent * log(x).
/// Throws std::invalid_argument on fewer than two points, non-positive
/// coordinates, or all-identical x.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

} // namespace rramcmc

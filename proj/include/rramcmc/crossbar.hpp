#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "rramcmc/device_model.hpp"
#include "rramcmc/random_stream.hpp"

namespace rramcmc {

/// N x M differential crossbar. Each of the M columns of a row holds a
/// (g_plus, g_minus) cell pair; the row's m-th parameter reads as
/// g_plus - g_minus, with LCS cells contributing exactly 0. Row n also
/// carries an integer visit counter used as the posterior sample weight.
///
/// RNG draw order: every per-row operation visits columns in ascending order,
/// plus cell before minus cell. Construction samples d_i in the same order,
/// row by row.
class CrossbarArray {
public:
    /// Samples every cell's d_i ~ Normal(law.d, law.e) (redrawn while <= 0)
    /// when d2d_enabled, else d_i = law.d exactly. All cells start in LCS.
    CrossbarArray(int rows, int cols, const DeviceLaw& law,
                  std::optional<ProgrammingLut> lut, bool d2d_enabled,
                  RandomStream& rng);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const DeviceLaw& law() const { return law_; }
    const std::optional<ProgrammingLut>& lut() const { return lut_; }

    DeviceCell& plus_cell(int n, int m) { return plus_[idx(n, m)]; }
    DeviceCell& minus_cell(int n, int m) { return minus_[idx(n, m)]; }
    const DeviceCell& plus_cell(int n, int m) const { return plus_[idx(n, m)]; }
    const DeviceCell& minus_cell(int n, int m) const { return minus_[idx(n, m)]; }

    /// Differential conductances of row n (M values, LCS contributes 0).
    std::vector<double> read_row(int n) const;

    /// sum_m v[m] * (g_plus[n][m] - g_minus[n][m]), computed digitally
    /// (read is noise-free; all stochasticity lives in programming).
    double dot_product(int n, std::span<const double> v) const;

    /// SET every device of row n at i_min (the weakest, highest-variance
    /// programming point). Row must be all-LCS.
    void initialize_row(int n, RandomStream& rng);

    /// Reads row src (must be fully HCS), inverts each conductance through
    /// the population median law, optionally quantizes to the LUT, and SETs
    /// the result into row dst (must be all-LCS). Touches no other row.
    void propose_row(int src, int dst, RandomStream& rng);

    /// RESET every device of row n. Counters are untouched.
    void erase_row(int n);

    /// RESET every device and zero every counter.
    void reset_all();

    std::uint64_t counter(int n) const { return counters_[check_row(n)]; }
    void increment_counter(int n) { ++counters_[check_row(n)]; }
    const std::vector<std::uint64_t>& counters() const { return counters_; }

    /// Versioned, lossless snapshot. Serializing the returned document with
    /// dump() yields deterministic bytes for a fixed array state.
    nlohmann::json snapshot() const;

    /// Inverse of snapshot(). Throws DataError on unknown version, missing or
    /// malformed fields, dimension mismatches, or invariant violations.
    static CrossbarArray restore(const nlohmann::json& snap);

private:
    CrossbarArray() = default;

    std::size_t idx(int n, int m) const;
    int check_row(int n) const;

    int rows_ = 0;
    int cols_ = 0;
    DeviceLaw law_;
    std::optional<ProgrammingLut> lut_;
    std::vector<DeviceCell> plus_;   // row-major
    std::vector<DeviceCell> minus_;  // row-major
    std::vector<std::uint64_t> counters_;
};

} // namespace rramcmc

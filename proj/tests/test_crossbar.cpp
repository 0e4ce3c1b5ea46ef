#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rramcmc/crossbar.hpp"
#include "rramcmc/errors.hpp"

using namespace rramcmc;

namespace {

DeviceLaw default_law() { return DeviceLaw{}; }

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

CrossbarArray make_array(int rows, int cols, const DeviceLaw& law, std::uint64_t seed,
                         bool d2d = false) {
    RandomStream rng(seed);
    return CrossbarArray(rows, cols, law, std::nullopt, d2d, rng);
}

} // namespace

TEST_SUITE("crossbar") {

TEST_CASE("fresh array reads all-zero and rejects bad shapes") {
    CrossbarArray array = make_array(4, 3, default_law(), 1);
    CHECK(array.rows() == 4);
    CHECK(array.cols() == 3);
    for (int n = 0; n < 4; ++n) {
        for (double g : array.read_row(n)) CHECK(g == 0.0);
        CHECK(array.counter(n) == 0);
    }
    RandomStream rng(1);
    CHECK_THROWS_AS(CrossbarArray(0, 3, default_law(), std::nullopt, false, rng), ConfigError);
    CHECK_THROWS_AS(CrossbarArray(3, 0, default_law(), std::nullopt, false, rng), ConfigError);
}

TEST_CASE("dot product is the differential bilinear form") {
    CrossbarArray array = make_array(2, 3, default_law(), 5);
    RandomStream rng(17);
    array.initialize_row(0, rng);
    const std::vector<double> g = array.read_row(0);
    const std::vector<double> v{0.3, -1.2, 2.0};
    double expect = 0.0;
    for (int m = 0; m < 3; ++m) {
        expect += v[m] * g[m];
        CHECK(g[m] == doctest::Approx(array.plus_cell(0, m).conductance -
                                      array.minus_cell(0, m).conductance).epsilon(1e-15));
    }
    CHECK(array.dot_product(0, v) == doctest::Approx(expect).epsilon(1e-12));

    // linearity: dot(v1 + alpha*v2) == dot(v1) + alpha*dot(v2) within 1e-10
    const std::vector<double> v2{1.0, 0.5, -0.25};
    const double alpha = 3.7;
    std::vector<double> combo(3);
    for (int m = 0; m < 3; ++m) combo[m] = v[m] + alpha * v2[m];
    CHECK(array.dot_product(0, combo) ==
          doctest::Approx(array.dot_product(0, v) + alpha * array.dot_product(0, v2))
              .epsilon(1e-10));

    CHECK_THROWS_AS(array.dot_product(0, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(array.dot_product(7, v), std::out_of_range);
}

TEST_CASE("initialize_row programs every device at the weakest point") {
    const DeviceLaw law = default_law();
    CrossbarArray array = make_array(3, 4, law, 9);
    RandomStream rng(21);
    const std::uint64_t before = rng.normal_draws();
    array.initialize_row(1, rng);
    // plus and minus of each column SET once, columns ascending: 2*cols draws
    CHECK(rng.normal_draws() - before == 8);
    const double med = median_conductance(law, law.d, law.i_min);
    const double sd = sd_conductance(law, law.i_min);
    for (int m = 0; m < 4; ++m) {
        const DeviceCell& plus = array.plus_cell(1, m);
        const DeviceCell& minus = array.minus_cell(1, m);
        CHECK(plus.state == CellState::hcs);
        CHECK(minus.state == CellState::hcs);
        // all draws within 6 sigma of the i_min median
        CHECK(std::abs(plus.conductance - med) < 6.0 * sd);
        CHECK(std::abs(minus.conductance - med) < 6.0 * sd);
    }
    // untouched rows stay LCS
    for (double g : array.read_row(0)) CHECK(g == 0.0);
    for (double g : array.read_row(2)) CHECK(g == 0.0);
    // double initialization violates the all-LCS precondition
    CHECK_THROWS_AS(array.initialize_row(1, rng), std::logic_error);
}

TEST_CASE("propose_row with a noiseless identity device is a fixed point") {
    // no LUT, no d2d, sd = 0: dst must replay src exactly (inverse law is exact)
    const DeviceLaw law = noiseless_law();
    CrossbarArray array = make_array(2, 3, law, 2);
    RandomStream rng(30);
    array.initialize_row(0, rng);
    array.propose_row(0, 1, rng);
    const std::vector<double> src = array.read_row(0);
    const std::vector<double> dst = array.read_row(1);
    for (int m = 0; m < 3; ++m) CHECK(dst[m] == doctest::Approx(src[m]).epsilon(1e-9));
}

TEST_CASE("propose_row touches only the destination row") {
    const DeviceLaw law = default_law();
    CrossbarArray array = make_array(4, 3, law, 3);
    RandomStream rng(8);
    array.initialize_row(0, rng);
    array.propose_row(0, 1, rng);
    const std::vector<double> row0 = array.read_row(0);
    const std::vector<double> row1 = array.read_row(1);
    array.propose_row(1, 2, rng);
    CHECK(array.read_row(0) == row0);
    CHECK(array.read_row(1) == row1);
    for (double g : array.read_row(3)) CHECK(g == 0.0);

    SUBCASE("precondition violations throw") {
        CHECK_THROWS_AS(array.propose_row(2, 2, rng), std::logic_error); // src == dst
        CHECK_THROWS_AS(array.propose_row(3, 0, rng), std::logic_error); // src not HCS
        CHECK_THROWS_AS(array.propose_row(0, 1, rng), std::logic_error); // dst not LCS
    }
}

TEST_CASE("proposal medians follow the source conductances") {
    // With cycle noise active but no LUT/d2d, each dst cell ~ Normal(src_g, sd).
    // Monte Carlo over repeated proposals from one frozen source row.
    const DeviceLaw law = default_law();
    CrossbarArray array = make_array(2, 1, law, 4);
    RandomStream rng(55);
    array.initialize_row(0, rng);
    const double src_plus = array.plus_cell(0, 0).conductance;
    const int n = 4000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        array.propose_row(0, 1, rng);
        sum += array.plus_cell(1, 0).conductance;
        array.erase_row(1);
    }
    const double i_src = i_set_for_target(law, src_plus);
    CHECK(sum / n == doctest::Approx(median_conductance(law, law.d, i_src))
                         .epsilon(3.0 * sd_conductance(law, i_src) / std::sqrt(double(n)) /
                                  median_conductance(law, law.d, i_src)));
}

TEST_CASE("LUT-equipped proposals land on lattice medians") {
    DeviceLaw law = noiseless_law();
    RandomStream rng(6);
    const ProgrammingLut lut = make_uniform_lut(law, 11); // currents 1, 10.9, ..., 100
    CrossbarArray array(2, 2, law, lut, false, rng);
    array.initialize_row(0, rng); // all cells at exactly 1.0 (noiseless)
    array.propose_row(0, 1, rng);
    for (int m = 0; m < 2; ++m) {
        // src g = 1.0 -> i = 1.0 -> nearest LUT entry is the first (current 1.0)
        CHECK(array.plus_cell(1, m).conductance == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(array.minus_cell(1, m).conductance == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("d2d sampling fixes per-device prefactors once") {
    const DeviceLaw law = default_law();
    SUBCASE("disabled: every d_i equals the population prefactor") {
        CrossbarArray array = make_array(3, 2, law, 10, false);
        for (int n = 0; n < 3; ++n)
            for (int m = 0; m < 2; ++m) {
                CHECK(array.plus_cell(n, m).d_i == law.d);
                CHECK(array.minus_cell(n, m).d_i == law.d);
            }
    }
    SUBCASE("enabled: prefactors spread around d and persist") {
        CrossbarArray array = make_array(3, 2, law, 10, true);
        bool any_different = false;
        for (int n = 0; n < 3; ++n)
            for (int m = 0; m < 2; ++m) {
                CHECK(array.plus_cell(n, m).d_i > 0.0);
                if (array.plus_cell(n, m).d_i != law.d) any_different = true;
            }
        CHECK(any_different);
        const double before = array.plus_cell(1, 0).d_i;
        RandomStream rng(77);
        array.initialize_row(1, rng);
        array.erase_row(1);
        CHECK(array.plus_cell(1, 0).d_i == before); // programming never resamples d_i
    }
}

TEST_CASE("erase and reset clear states but only reset_all clears counters") {
    CrossbarArray array = make_array(2, 2, default_law(), 12);
    RandomStream rng(13);
    array.initialize_row(0, rng);
    array.increment_counter(0);
    array.increment_counter(0);
    array.erase_row(0);
    for (double g : array.read_row(0)) CHECK(g == 0.0);
    CHECK(array.counter(0) == 2); // erase_row leaves counters alone
    array.reset_all();
    CHECK(array.counter(0) == 0);
    CHECK(array.counter(1) == 0);
}

TEST_CASE("snapshot round-trips losslessly with deterministic bytes") {
    const DeviceLaw law = default_law();
    RandomStream rng(99);
    const ProgrammingLut lut = make_uniform_lut(law, 5);
    CrossbarArray array(3, 2, law, lut, true, rng);
    array.initialize_row(0, rng);
    array.propose_row(0, 1, rng);
    array.increment_counter(0);
    array.increment_counter(1);

    const nlohmann::json snap = array.snapshot();
    CHECK(snap.dump() == array.snapshot().dump()); // byte-stable serialization

    const CrossbarArray back = CrossbarArray::restore(snap);
    CHECK(back.rows() == array.rows());
    CHECK(back.cols() == array.cols());
    for (int n = 0; n < 3; ++n) {
        CHECK(back.read_row(n) == array.read_row(n));
        CHECK(back.counter(n) == array.counter(n));
    }
    CHECK(back.lut().has_value());
    CHECK(back.lut()->entries.size() == 5);
    // restored arrays keep behaving: the differential readout still works
    const std::vector<double> v{1.0, -1.0};
    CHECK(back.dot_product(1, v) == doctest::Approx(array.dot_product(1, v)).epsilon(1e-15));
}

TEST_CASE("restore rejects corrupted snapshots") {
    CrossbarArray array = make_array(2, 2, default_law(), 44);
    RandomStream rng(45);
    array.initialize_row(0, rng);
    const nlohmann::json good = array.snapshot();

    nlohmann::json bad = good;
    bad["version"] = 9999;
    CHECK_THROWS_AS(CrossbarArray::restore(bad), DataError);

    bad = good;
    bad.erase("g_plus");
    CHECK_THROWS_AS(CrossbarArray::restore(bad), DataError);

    bad = good;
    bad["counters"] = nlohmann::json::array({1});
    CHECK_THROWS_AS(CrossbarArray::restore(bad), DataError);

    bad = good;
    bad["g_plus"]["d_i"][0] = -1.0;
    CHECK_THROWS_AS(CrossbarArray::restore(bad), DataError);

    CHECK_THROWS_AS(CrossbarArray::restore(nlohmann::json::object()), DataError);
}

TEST_CASE("construction consumes a deterministic rng sequence") {
    const DeviceLaw law = default_law();
    RandomStream rng_a(123), rng_b(123);
    CrossbarArray a(3, 2, law, std::nullopt, true, rng_a);
    CrossbarArray b(3, 2, law, std::nullopt, true, rng_b);
    for (int n = 0; n < 3; ++n)
        for (int m = 0; m < 2; ++m) {
            CHECK(a.plus_cell(n, m).d_i == b.plus_cell(n, m).d_i);
            CHECK(a.minus_cell(n, m).d_i == b.minus_cell(n, m).d_i);
        }
}

} // TEST_SUITE

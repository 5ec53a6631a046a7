#include <algorithm>
#include <filesystem>
#include <numeric>

#include "aeimpute/dataset.hpp"
#include "aeimpute/errors.hpp"
#include "aeimpute/missingness.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aeimpute;
using namespace aeimpute::missingness;

namespace {

Matrix uniform_data(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform();
    return m;
}

std::vector<std::size_t> all_features(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

Mask table1_mask() {
    const data::Dataset t = data::load_csv(std::filesystem::path(AEIMPUTE_DATA_DIR) / "table1.csv");
    return mask_of(t.values);
}

Mask rows_of(const Mask& m, std::size_t first, std::size_t last) {
    Mask out(last - first + 1, m.cols());
    for (std::size_t r = first; r <= last; ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out.set(r - first, c, m(r, c));
    return out;
}

}  // namespace

TEST_SUITE("missingness") {

TEST_CASE("MCAR with a vanishing rate leaves the data intact") {
    const Matrix data = uniform_data(9, 7, 1);
    MechanismSpec mech;
    mech.target_features = all_features(7);
    mech.rate = 1e-12;
    const Injection inj = inject(data, mech, {}, 3);
    CHECK(inj.mask.count() == 0);
    CHECK(inj.masked == data);

    Rng rng(4);
    const auto targets = all_features(7);
    CHECK(detail::sample_mcar(9, 7, targets, 0.0, rng).count() == 0);
    CHECK(detail::sample_mcar(9, 7, targets, 1.0, rng).count() == 63);

    mech.rate = 0.0;
    CHECK_THROWS_AS(inject(data, mech, {}, 3), ConfigError);
    mech.rate = 1.0;
    CHECK_THROWS_AS(inject(data, mech, {}, 3), ConfigError);
}

TEST_CASE("MCAR rate over 10,000 x 7 cells") {
    // Binomial(70000, 0.3): standard deviation 0.0017, so +-0.02 is about 11 sigma.
    const Matrix data = uniform_data(10000, 7, 2);
    MechanismSpec mech;
    mech.target_features = all_features(7);
    mech.rate = 0.3;
    const Injection inj = inject(data, mech, {}, 5);
    CHECK(missing_rate(inj.mask) >= 0.28);
    CHECK(missing_rate(inj.mask) <= 0.32);
    // Masked cells are NaN, the rest copied; the source is untouched.
    for (std::size_t r = 0; r < 100; ++r)
        for (std::size_t c = 0; c < 7; ++c)
            CHECK((inj.mask(r, c) ? std::isnan(inj.masked(r, c)) : inj.masked(r, c) == data(r, c)));
}

TEST_CASE("MCAR missingness is uncorrelated with other features") {
    const Matrix data = uniform_data(10000, 7, 3);
    MechanismSpec mech;
    mech.target_features = all_features(7);
    mech.rate = 0.3;
    const Injection inj = inject(data, mech, {}, 6);
    for (std::size_t target = 0; target < 7; ++target)
        for (std::size_t other = 0; other < 7; ++other) {
            if (other == target) continue;
            std::vector<double> ind, val;
            for (std::size_t r = 0; r < 10000; ++r) {
                ind.push_back(inj.mask(r, target) ? 1.0 : 0.0);
                val.push_back(data(r, other));
            }
            CHECK(std::abs(oracle::point_biserial(ind, val)) < 0.05);
        }
}

TEST_CASE("MAR missingness follows the driver") {
    const Matrix data = uniform_data(5000, 7, 4);
    MechanismSpec mech;
    mech.kind = Mechanism::MAR;
    mech.target_features = {1};
    mech.driver_features = {0};
    mech.slopes = {5.0};
    mech.intercept = -2.5;
    const Injection inj = inject(data, mech, {}, 7);
    std::vector<double> ind, driver;
    for (std::size_t r = 0; r < 5000; ++r) {
        ind.push_back(inj.mask(r, 1) ? 1.0 : 0.0);
        driver.push_back(data(r, 0));
    }
    CHECK(oracle::point_biserial(ind, driver) > 0.2);
    for (std::size_t r = 0; r < 5000; ++r)
        for (std::size_t c : {0, 2, 3, 4, 5, 6}) CHECK_FALSE(inj.mask(r, c));
}

TEST_CASE("MNAR missingness follows the target's own value") {
    const Matrix data = uniform_data(5000, 7, 5);
    MechanismSpec mech;
    mech.kind = Mechanism::MNAR;
    mech.target_features = {1};
    mech.slopes = {8.0};
    mech.intercept = -4.0;
    const Injection inj = inject(data, mech, {}, 8);

    std::vector<double> sorted(5000);
    for (std::size_t r = 0; r < 5000; ++r) sorted[r] = data(r, 1);
    std::sort(sorted.begin(), sorted.end());
    const double q1 = sorted[1250], q3 = sorted[3750];
    double top = 0, top_n = 0, bottom = 0, bottom_n = 0;
    for (std::size_t r = 0; r < 5000; ++r) {
        if (data(r, 1) >= q3) {
            top += inj.mask(r, 1);
            ++top_n;
        } else if (data(r, 1) < q1) {
            bottom += inj.mask(r, 1);
            ++bottom_n;
        }
    }
    CHECK(top / top_n > bottom / bottom_n);
}

TEST_CASE("mechanism validation") {
    MechanismSpec mar;
    mar.kind = Mechanism::MAR;
    mar.target_features = {1};
    mar.slopes = {};
    CHECK_THROWS_AS(mar.validate(7), ConfigError);  // no drivers
    mar.driver_features = {1};
    mar.slopes = {1.0};
    CHECK_THROWS_AS(mar.validate(7), ConfigError);  // driver is a target
    mar.driver_features = {9};
    CHECK_THROWS_AS(mar.validate(7), ConfigError);  // out of range
    mar.driver_features = {0};
    CHECK_NOTHROW(mar.validate(7));

    MechanismSpec mnar;
    mnar.kind = Mechanism::MNAR;
    mnar.target_features = {1, 2};
    mnar.slopes = {1.0};
    CHECK_NOTHROW(mnar.validate(7));
    mnar.driver_features = {0};
    CHECK_THROWS_AS(mnar.validate(7), ConfigError);

    PatternSpec bad{Pattern::Monotone, {0, 1, 1, 3}};
    CHECK_THROWS_AS(bad.validate(4), ConfigError);
    MechanismSpec mcar;
    mcar.target_features = {0};
    CHECK_THROWS_AS(inject(uniform_data(3, 4, 1), mcar, bad, 1), ConfigError);
}

TEST_CASE("Table 1 patterns") {
    const Mask t = table1_mask();
    REQUIRE(t.rows() == 9);
    REQUIRE(t.cols() == 7);
    const auto natural = all_features(7);
    CHECK(validate_monotone(rows_of(t, 5, 8), natural));
    CHECK_FALSE(validate_monotone(rows_of(t, 0, 4), natural));
    CHECK_FALSE(validate_monotone(t, natural));
    CHECK(missing_rate(t) == doctest::Approx(18.0 / 63.0));
}

TEST_CASE("missing_rate edge cases") {
    CHECK(missing_rate(Mask(3, 3, false)) == 0.0);
    CHECK(missing_rate(Mask(3, 3, true)) == 1.0);
}

TEST_CASE("an all-observed mask is monotone under every order") {
    const Mask m(4, 5, false);
    std::vector<std::size_t> order = all_features(5);
    do {
        CHECK(validate_monotone(m, order));
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("monotone closure always validates and matches the definition") {
    Rng rng(12);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t cols = 2 + rng.below(6);
        const std::size_t rows = 1 + rng.below(8);
        Mask m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rng.bernoulli(0.3));
        std::vector<std::size_t> order = all_features(cols);
        for (std::size_t i = cols; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

        CHECK(validate_monotone(m, order) == oracle::monotone_by_definition(m, order));
        Mask closed = m;
        close_monotone(closed, order);
        CHECK(validate_monotone(closed, order));
        CHECK(oracle::monotone_by_definition(closed, order));
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (m(r, c)) CHECK(closed(r, c));
    }
}

TEST_CASE("monotone injection produces a staircase") {
    const Matrix data = uniform_data(2000, 7, 13);
    MechanismSpec mech;
    mech.target_features = all_features(7);
    mech.rate = 0.1;
    const PatternSpec pattern{Pattern::Monotone, {6, 5, 4, 3, 2, 1, 0}};
    const Injection inj = inject(data, mech, pattern, 14);
    CHECK(validate_monotone(inj.mask, pattern.order));
    CHECK(inj.mask.count() > 0);
}

TEST_CASE("injection is deterministic per seed") {
    const Matrix data = uniform_data(300, 5, 15);
    MechanismSpec mech;
    mech.kind = Mechanism::MNAR;
    mech.target_features = {0, 3};
    mech.slopes = {2.0, -1.0};
    CHECK(inject(data, mech, {}, 99).mask == inject(data, mech, {}, 99).mask);
    CHECK_FALSE(inject(data, mech, {}, 99).mask == inject(data, mech, {}, 100).mask);
}

}  // TEST_SUITE

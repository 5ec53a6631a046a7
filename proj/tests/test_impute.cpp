#include <cmath>

#include "aeimpute/errors.hpp"
#include "aeimpute/impute.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace aeimpute;
using namespace aeimpute::impute;

namespace {

net::Network zero_model(std::size_t d) {
    const std::size_t hidden[] = {3};
    return net::init_network(d, hidden, false, 0.0, 1);
}

// 2 -> 1 -> 2 linear net: h = (x1 + x2) / 2, z1 = z2 = h. Reconstruction is exact only when x1 == x2.
net::Network duplicate_feature_model() {
    net::Network n;
    n.input_dim = 2;
    net::Layer enc{Matrix(1, 2, 0.5), {0.0}, net::Activation::Identity};
    net::Layer dec{Matrix(2, 1, 1.0), {0.0, 0.0}, net::Activation::Identity};
    n.layers = {enc, dec};
    return n;
}

ImputeConfig config_for(OptimizerKind kind, std::uint64_t seed) {
    ImputeConfig cfg;
    cfg.optimizer = kind;
    cfg.master_seed = seed;
    cfg.restarts = 1;
    return cfg;
}

constexpr OptimizerKind kAll[] = {OptimizerKind::GA, OptimizerKind::PSO, OptimizerKind::MLE};

}  // namespace

TEST_SUITE("impute") {

TEST_CASE("record_from_row splits NaN cells off") {
    const double row[] = {0.1, std::nan(""), 0.3, std::nan("")};
    const RecordView rec = record_from_row(row);
    CHECK(rec.missing == std::vector<std::size_t>{1, 3});
    CHECK(rec.values[0] == 0.1);
    CHECK(rec.values[2] == 0.3);
    CHECK(rec.values[1] == kPlaceholder);
}

TEST_CASE("objective equals an independent forward pass over the substituted record") {
    Rng rng(5);
    const net::Network& model = fixture::trained_model();
    for (int trial = 0; trial < 20; ++trial) {
        RecordView rec{oracle::random_vector(rng, 7), {}};
        for (std::size_t j = 0; j < 7; ++j)
            if (rng.bernoulli(0.4)) rec.missing.push_back(j);
        if (rec.missing.empty()) rec.missing.push_back(3);
        const optimize::Objective obj = objective_for_record(model, rec);
        CHECK(obj.arity == rec.missing.size());
        for (const auto& b : obj.bounds) {
            CHECK(b.lo == 0.0);
            CHECK(b.hi == 1.0);
        }
        const std::vector<double> u = oracle::random_vector(rng, rec.missing.size());
        std::vector<double> x = rec.values;
        for (std::size_t k = 0; k < u.size(); ++k) x[rec.missing[k]] = u[k];
        const double expected = oracle::squared_error(x, oracle::forward_output(model, x));
        CHECK(obj.eval(u) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("zero-weight model objective is the distance to 0.5") {
    const net::Network model = zero_model(3);
    const RecordView rec{{0.2, 0.5, 0.9}, {1}};
    const optimize::Objective obj = objective_for_record(model, rec);
    for (double v : {0.0, 0.25, 0.5, 1.0}) {
        const double u[] = {v};
        const double expected = 0.09 + (v - 0.5) * (v - 0.5) + 0.16;
        CHECK(obj.eval(u) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("zero-weight model fills 0.5 with every optimizer") {
    const net::Network model = zero_model(4);
    const RecordView rec{{0.1, 0.5, 0.8, 0.3}, {2}};
    for (OptimizerKind kind : kAll) {
        const ImputationResult r = impute_record(model, rec, config_for(kind, 11));
        CHECK(std::abs(r.filled[2] - 0.5) < 1e-3);
    }
}

TEST_CASE("a record with every slot missing is still imputed") {
    const net::Network& model = fixture::trained_model();
    const RecordView rec{std::vector<double>(7, kPlaceholder), {0, 1, 2, 3, 4, 5, 6}};
    for (OptimizerKind kind : kAll) {
        const ImputationResult r = impute_record(model, rec, config_for(kind, 4));
        CHECK(r.filled.size() == 7);
        for (double v : r.filled) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(r.objective == net::reconstruction_error(model, r.filled));
    }
}

TEST_CASE("a duplicated feature is recovered from its twin") {
    const net::Network model = duplicate_feature_model();
    const RecordView rec{{0.7, kPlaceholder}, {1}};
    for (OptimizerKind kind : kAll) {
        const ImputationResult r = impute_record(model, rec, config_for(kind, 6));
        CHECK(std::abs(r.filled[1] - 0.7) < 0.05);
        CHECK(r.filled[0] == 0.7);
    }
}

TEST_CASE("every optimizer reaches the grid minimum on single-slot records") {
    const net::Network& model = fixture::trained_model();
    const Matrix data = fixture::correlated(20, 55);
    Rng rng(8);
    for (std::size_t r = 0; r < data.rows(); ++r) {
        RecordView rec{std::vector<double>(data.row(r).begin(), data.row(r).end()), {rng.below(7)}};
        const std::size_t j = rec.missing[0];
        const double grid = oracle::grid_minimum([&](double v) {
            std::vector<double> x = rec.values;
            x[j] = v;
            return oracle::squared_error(x, oracle::forward_output(model, x));
        });
        for (OptimizerKind kind : kAll) {
            const ImputationResult res = impute_record(model, rec, config_for(kind, r));
            CHECK(res.objective <= grid + 1e-3);
        }
    }
}

TEST_CASE("known coordinates are never altered") {
    const net::Network& model = fixture::trained_model();
    const Matrix data = fixture::correlated(10, 77);
    Rng rng(9);
    for (std::size_t r = 0; r < data.rows(); ++r) {
        RecordView rec{std::vector<double>(data.row(r).begin(), data.row(r).end()), {}};
        for (std::size_t j = 0; j < 7; ++j)
            if (rng.bernoulli(0.3)) rec.missing.push_back(j);
        if (rec.missing.empty()) continue;
        for (OptimizerKind kind : kAll) {
            const ImputationResult res = impute_record(model, rec, config_for(kind, r));
            for (std::size_t j = 0; j < 7; ++j)
                if (std::find(rec.missing.begin(), rec.missing.end(), j) == rec.missing.end())
                    CHECK(res.filled[j] == rec.values[j]);
        }
    }
}

TEST_CASE("accept-or-retry stops at the first accepted attempt") {
    const net::Network& model = fixture::trained_model();
    const Matrix data = fixture::correlated(1, 3);
    const RecordView rec{std::vector<double>(data.row(0).begin(), data.row(0).end()), {0, 4}};

    ImputeConfig loose = config_for(OptimizerKind::GA, 1);
    loose.restarts = 5;
    loose.accept_threshold = 1e9;
    const ImputationResult a = impute_record(model, rec, loose);
    CHECK(a.accepted);
    CHECK(a.attempts == 1);

    ImputeConfig strict = loose;
    strict.accept_threshold = 1e-300;
    const ImputationResult b = impute_record(model, rec, strict);
    CHECK_FALSE(b.accepted);
    CHECK(b.attempts == 5);
    CHECK(b.objective <= a.objective);
}

TEST_CASE("dataset imputation fills only masked cells") {
    const net::Network& model = fixture::trained_model();
    const Matrix data = fixture::correlated(30, 12);
    missingness::Mask mask(30, 7);
    mask.set(3, 1, true);
    mask.set(3, 5, true);
    mask.set(17, 0, true);
    ImputeConfig cfg = config_for(OptimizerKind::PSO, 2);
    const DatasetImputation out = impute_dataset(model, missingness::apply_mask(data, mask), mask, cfg);
    REQUIRE(out.results.size() == 2);
    CHECK(out.results[0].record == 3);
    CHECK(out.results[1].record == 17);
    for (std::size_t r = 0; r < 30; ++r)
        for (std::size_t c = 0; c < 7; ++c) {
            if (mask(r, c)) {
                CHECK(std::isfinite(out.completed(r, c)));
            } else {
                CHECK(out.completed(r, c) == data(r, c));
            }
        }
}

TEST_CASE("an all-observed mask passes the data through") {
    const net::Network& model = fixture::trained_model();
    const Matrix data = fixture::correlated(8, 13);
    const DatasetImputation out = impute_dataset(model, data, missingness::Mask(8, 7), config_for(OptimizerKind::GA, 1));
    CHECK(out.completed == data);
    CHECK(out.results.empty());
}

TEST_CASE("a record's fill does not depend on the other records") {
    const net::Network& model = fixture::trained_model();
    const Matrix data = fixture::correlated(12, 14);
    missingness::Mask one(12, 7);
    one.set(6, 2, true);
    missingness::Mask many = one;
    for (std::size_t r = 0; r < 12; ++r)
        if (r != 6) many.set(r, r % 7, true);
    const ImputeConfig cfg = config_for(OptimizerKind::GA, 21);
    const auto a = impute_dataset(model, missingness::apply_mask(data, one), one, cfg);
    const auto b = impute_dataset(model, missingness::apply_mask(data, many), many, cfg);
    CHECK(a.completed(6, 2) == b.completed(6, 2));
}

TEST_CASE("worker count does not change the output") {
    const net::Network& model = fixture::trained_model();
    for (std::uint64_t scenario = 0; scenario < 3; ++scenario) {
        const Matrix data = fixture::correlated(40, 200 + scenario);
        Rng rng(scenario);
        missingness::Mask mask(40, 7);
        for (std::size_t r = 0; r < 40; ++r)
            for (std::size_t c = 0; c < 7; ++c) mask.set(r, c, rng.bernoulli(0.2));
        for (OptimizerKind kind : kAll) {
            ImputeConfig cfg = config_for(kind, scenario);
            cfg.restarts = 2;
            const Matrix masked = missingness::apply_mask(data, mask);
            const auto serial = impute_dataset(model, masked, mask, cfg, 1);
            const auto parallel = impute_dataset(model, masked, mask, cfg, 8);
            CHECK(serial.completed == parallel.completed);
            REQUIRE(serial.results.size() == parallel.results.size());
            for (std::size_t i = 0; i < serial.results.size(); ++i) {
                CHECK(serial.results[i].objective == parallel.results[i].objective);
                CHECK(serial.results[i].attempts == parallel.results[i].attempts);
            }
        }
    }
}

TEST_CASE("impute errors") {
    const net::Network& model = fixture::trained_model();
    CHECK_THROWS_AS(objective_for_record(model, {std::vector<double>(7, 0.5), {}}), NothingToImpute);
    CHECK_THROWS_AS(objective_for_record(model, {std::vector<double>(6, 0.5), {0}}), ShapeError);
    CHECK_THROWS_AS(objective_for_record(model, {std::vector<double>(7, 0.5), {7}}), ShapeError);
    std::vector<double> wide(7, 0.5);
    wide[2] = 1.5;
    CHECK_THROWS_AS(objective_for_record(model, {wide, {0}}), NormalizationError);

    ImputeConfig cfg;
    cfg.restarts = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.accept_threshold = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.ga.population = 0;
    CHECK_THROWS_AS(impute_record(model, {std::vector<double>(7, 0.5), {0}}, cfg), ConfigError);

    CHECK_THROWS_AS(impute_dataset(model, Matrix(3, 7), missingness::Mask(3, 6), cfg), ShapeError);
    CHECK_THROWS_AS(impute_dataset(model, Matrix(3, 6), missingness::Mask(3, 6), ImputeConfig{}), ShapeError);
}

}  // TEST_SUITE

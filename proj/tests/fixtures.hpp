#pragma once

#include "aeimpute/dataset.hpp"
#include "aeimpute/net.hpp"

namespace fixture {

/// Normalized synthetic_correlated(records, seed) values.
inline aeimpute::Matrix correlated(std::size_t records, std::uint64_t seed) {
    const auto raw = aeimpute::data::synthetic_correlated(records, seed);
    return aeimpute::data::normalize(raw.values, aeimpute::data::compute_stats(raw.values));
}

/// Default-configured autoencoder trained once on 500 correlated records.
inline const aeimpute::net::Network& trained_model() {
    static const aeimpute::net::Network model = [] {
        aeimpute::net::TrainConfig cfg;
        cfg.seed = 2;
        return aeimpute::net::train(correlated(500, 100), cfg, false).network;
    }();
    return model;
}

}  // namespace fixture

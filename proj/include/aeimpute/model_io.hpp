#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "aeimpute/dataset.hpp"
#include "aeimpute/net.hpp"

namespace aeimpute::model_io {

inline constexpr int kFormatVersion = 1;

/// A trained network plus everything imputation needs to reuse training-time scaling.
struct Model {
    net::Network network;
    std::vector<std::string> feature_names;
    std::vector<data::NormStats> norm_stats;
    bool denoising = false;
    std::size_t training_records = 0;
    double final_train_loss = 0.0;  // last epoch-mean loss; 0 when untrained

    friend bool operator==(const Model&, const Model&) = default;
};

/// JSON text. Doubles are written in shortest round-trip form, so load(save(m)) == m bit for bit.
std::string to_json(const Model& model);
Model from_json(const std::string& text, const std::string& source = "<memory>");

void save(const std::filesystem::path& path, const Model& model);
Model load(const std::filesystem::path& path);

}  // namespace aeimpute::model_io

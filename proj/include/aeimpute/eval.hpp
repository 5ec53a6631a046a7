#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aeimpute/matrix.hpp"
#include "aeimpute/missingness.hpp"

namespace aeimpute::eval {

inline constexpr double kDefaultTolerance = 0.1;

struct Scores {
    std::size_t n = 0;
    double mse = 0.0;
    double rmse = 0.0;
    double sse = 0.0;                    // summed squared error
    std::optional<double> pearson_r;     // empty when either side is constant
    double relative_accuracy = 0.0;      // fraction with |imputed - truth| <= tolerance
};

struct MetricReport {
    Scores overall;
    double tolerance = kDefaultTolerance;
    std::vector<std::string> feature_names;
    std::vector<Scores> per_feature;  // n == 0 for features with nothing imputed
};

/// Sample Pearson correlation; empty when either vector has zero variance.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

Scores score(std::span<const double> truth, std::span<const double> imputed, double tolerance = kDefaultTolerance);

/// Scores the cells flagged in `mask`, overall and per feature.
MetricReport score_masked(const Matrix& truth, const Matrix& imputed, const missingness::Mask& mask,
                          std::vector<std::string> feature_names, double tolerance = kDefaultTolerance);

/// `key=value` lines, one metric per line; per-feature entries are prefixed with the feature name.
std::string to_key_value(const MetricReport& report);

/// JSON document with the same content as to_key_value.
std::string to_json(const MetricReport& report);

/// Fills each missing cell with its column's observed mean.
Matrix mean_impute(const Matrix& data, const missingness::Mask& mask);

/// Fills each missing cell with the mean of that feature over the k nearest records observing
/// it. Distance is the root mean squared difference over coordinates both records observe;
/// ties go to the lower record index.
Matrix knn_impute(const Matrix& data, const missingness::Mask& mask, std::size_t k);

}  // namespace aeimpute::eval

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aeimpute/matrix.hpp"
#include "aeimpute/missingness.hpp"

namespace aeimpute::data {

/// Min-max range of one feature.
struct NormStats {
    double min = 0.0;
    double max = 1.0;

    bool constant() const noexcept { return !(max > min); }
    /// (v - min) / (max - min); constant features map to 0.5.
    double normalize(double v) const noexcept { return constant() ? 0.5 : (v - min) / (max - min); }
    double denormalize(double u) const noexcept { return constant() ? min : min + u * (max - min); }

    friend bool operator==(const NormStats&, const NormStats&) = default;
};

/// A table of named features; missing cells hold NaN.
struct Dataset {
    std::vector<std::string> feature_names;
    Matrix values;

    std::size_t records() const noexcept { return values.rows(); }
    std::size_t features() const noexcept { return feature_names.size(); }
};

/// Column ranges over observed cells. Fully missing columns get {0, 0}.
std::vector<NormStats> compute_stats(const Matrix& values);

/// Applies `stats` column-wise; NaN stays NaN. With `clamp`, results are clipped to [0, 1].
Matrix normalize(const Matrix& values, const std::vector<NormStats>& stats, bool clamp = false);
Matrix denormalize(const Matrix& values, const std::vector<NormStats>& stats);

/// Indices of records without missing cells.
std::vector<std::size_t> complete_records(const Matrix& values);
Matrix select_rows(const Matrix& values, const std::vector<std::size_t>& rows);

/// CSV with a header row. `?` and empty cells are missing; everything else must be a decimal number.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(const std::string& text, const std::string& source = "<memory>");

/// Writes shortest round-trip decimals and `?` for missing cells.
void save_csv(const std::filesystem::path& path, const Dataset& data);
std::string format_csv(const Dataset& data);

/// 0/1 sidecar with the same header as the data file.
void save_mask_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const missingness::Mask& mask);
missingness::Mask load_mask_csv(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_number(double v);

/// Synthetic correlated table: X1..X3 uniform on [0, 1]; X4..X7 fixed affine
/// combinations of X1..X3 plus Gaussian noise with standard deviation `noise`.
Dataset synthetic_correlated(std::size_t records, std::uint64_t seed, double noise = 0.01);

}  // namespace aeimpute::data

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aeimpute/matrix.hpp"
#include "aeimpute/random.hpp"

namespace aeimpute::missingness {

/// Per-cell missing indicator; true marks a missing cell.
class Mask {
public:
    Mask() = default;
    Mask(std::size_t rows, std::size_t cols, bool fill = false) : rows_(rows), cols_(cols), cells_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    bool operator()(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c] != 0; }
    void set(std::size_t r, std::size_t c, bool missing) { cells_[r * cols_ + c] = missing ? 1 : 0; }

    bool row_has_missing(std::size_t r) const;
    std::vector<std::size_t> missing_in_row(std::size_t r) const;
    std::size_t count() const;

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<unsigned char> cells_;
};

/// Mask of the NaN cells of `data`.
Mask mask_of(const Matrix& data);

enum class Mechanism { MCAR, MAR, MNAR };

/// MCAR uses `rate`. MAR uses sigmoid(intercept + slopes . drivers) per record.
/// MNAR uses sigmoid(intercept + slope * own value) per cell; `slopes` holds one shared
/// slope or one per target feature. Logistic inputs are the dataset's (normalized) values.
struct MechanismSpec {
    Mechanism kind = Mechanism::MCAR;
    std::vector<std::size_t> target_features;
    double rate = 0.1;
    double intercept = 0.0;
    std::vector<double> slopes;
    std::vector<std::size_t> driver_features;

    void validate(std::size_t n_features) const;
};

enum class Pattern { Arbitrary, Monotone };

struct PatternSpec {
    Pattern kind = Pattern::Arbitrary;
    std::vector<std::size_t> order;  // permutation of feature indices, monotone only

    void validate(std::size_t n_features) const;
};

struct Injection {
    Matrix masked;  // missing cells hold NaN
    Mask mask;
};

/// Samples missingness under `mech`, then applies the pattern constraint. The input is
/// never modified. Deterministic for a fixed seed.
Injection inject(const Matrix& dataset, const MechanismSpec& mech, const PatternSpec& pattern, std::uint64_t seed);

/// Closes each record's missing set upward along `order`: once a feature is missing,
/// every later feature in `order` is missing too.
void close_monotone(Mask& mask, std::span<const std::size_t> order);

/// True iff in every record an observed feature implies all earlier features in `order` are observed.
bool validate_monotone(const Mask& mask, std::span<const std::size_t> order);

double missing_rate(const Mask& mask);

/// Replaces masked cells with NaN.
Matrix apply_mask(const Matrix& data, const Mask& mask);

namespace detail {

/// Bernoulli(rate) per targeted cell with no range check on `rate`, so degenerate
/// rates (0 or 1) are reachable from tests.
Mask sample_mcar(std::size_t rows, std::size_t cols, std::span<const std::size_t> targets, double rate, Rng& rng);

}  // namespace detail

}  // namespace aeimpute::missingness

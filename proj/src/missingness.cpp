#include "aeimpute/missingness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aeimpute/errors.hpp"

namespace aeimpute::missingness {

bool Mask::row_has_missing(std::size_t r) const {
    const auto begin = cells_.begin() + static_cast<std::ptrdiff_t>(r * cols_);
    return std::find(begin, begin + static_cast<std::ptrdiff_t>(cols_), 1) != begin + static_cast<std::ptrdiff_t>(cols_);
}

std::vector<std::size_t> Mask::missing_in_row(std::size_t r) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < cols_; ++c)
        if ((*this)(r, c)) out.push_back(c);
    return out;
}

std::size_t Mask::count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

Mask mask_of(const Matrix& data) {
    Mask mask(data.rows(), data.cols());
    for (std::size_t r = 0; r < data.rows(); ++r)
        for (std::size_t c = 0; c < data.cols(); ++c) mask.set(r, c, std::isnan(data(r, c)));
    return mask;
}

namespace {

void check_indices(std::span<const std::size_t> indices, std::size_t n_features, const char* what) {
    for (std::size_t i : indices)
        if (i >= n_features)
            throw ConfigError(std::string(what) + " index " + std::to_string(i) + " outside " +
                              std::to_string(n_features) + " features");
}

bool is_permutation_of_features(std::span<const std::size_t> order, std::size_t n_features) {
    if (order.size() != n_features) return false;
    std::vector<bool> seen(n_features, false);
    for (std::size_t i : order) {
        if (i >= n_features || seen[i]) return false;
        seen[i] = true;
    }
    return true;
}

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

void MechanismSpec::validate(std::size_t n_features) const {
    if (target_features.empty()) throw ConfigError("mechanism needs at least one target feature");
    check_indices(target_features, n_features, "target feature");
    switch (kind) {
    case Mechanism::MCAR:
        if (!(rate > 0.0 && rate < 1.0)) throw ConfigError("MCAR rate must lie in (0, 1)");
        break;
    case Mechanism::MAR:
        if (driver_features.empty()) throw ConfigError("MAR needs at least one driver feature");
        check_indices(driver_features, n_features, "driver feature");
        for (std::size_t d : driver_features)
            if (std::find(target_features.begin(), target_features.end(), d) != target_features.end())
                throw ConfigError("MAR driver feature " + std::to_string(d) + " is also a target");
        if (slopes.size() != driver_features.size())
            throw ConfigError("MAR needs one slope per driver feature");
        break;
    case Mechanism::MNAR:
        if (!driver_features.empty()) throw ConfigError("MNAR takes no driver features");
        if (slopes.size() != 1 && slopes.size() != target_features.size())
            throw ConfigError("MNAR needs one shared slope or one slope per target feature");
        break;
    }
    if (!std::isfinite(intercept)) throw ConfigError("mechanism intercept must be finite");
    for (double s : slopes)
        if (!std::isfinite(s)) throw ConfigError("mechanism slopes must be finite");
}

void PatternSpec::validate(std::size_t n_features) const {
    if (kind == Pattern::Monotone && !is_permutation_of_features(order, n_features))
        throw ConfigError("monotone order must be a permutation of all " + std::to_string(n_features) +
                          " feature indices");
}

namespace detail {

Mask sample_mcar(std::size_t rows, std::size_t cols, std::span<const std::size_t> targets, double rate, Rng& rng) {
    Mask mask(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t t : targets)
            if (rng.bernoulli(rate)) mask.set(r, t, true);
    return mask;
}

}  // namespace detail

Injection inject(const Matrix& dataset, const MechanismSpec& mech, const PatternSpec& pattern, std::uint64_t seed) {
    const std::size_t rows = dataset.rows(), cols = dataset.cols();
    mech.validate(cols);
    pattern.validate(cols);
    for (double v : dataset.data())
        if (!std::isfinite(v)) throw InvalidArgument("injection requires a complete, finite dataset");

    Rng rng(seed);
    Mask mask(rows, cols);
    switch (mech.kind) {
    case Mechanism::MCAR:
        mask = detail::sample_mcar(rows, cols, mech.target_features, mech.rate, rng);
        break;
    case Mechanism::MAR:
        for (std::size_t r = 0; r < rows; ++r) {
            double t = mech.intercept;
            for (std::size_t k = 0; k < mech.driver_features.size(); ++k)
                t += mech.slopes[k] * dataset(r, mech.driver_features[k]);
            const double p = logistic(t);
            for (std::size_t target : mech.target_features)
                if (rng.bernoulli(p)) mask.set(r, target, true);
        }
        break;
    case Mechanism::MNAR:
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = 0; k < mech.target_features.size(); ++k) {
                const std::size_t target = mech.target_features[k];
                const double slope = mech.slopes.size() == 1 ? mech.slopes[0] : mech.slopes[k];
                if (rng.bernoulli(logistic(mech.intercept + slope * dataset(r, target)))) mask.set(r, target, true);
            }
        break;
    }
    if (pattern.kind == Pattern::Monotone) close_monotone(mask, pattern.order);
    return {apply_mask(dataset, mask), std::move(mask)};
}

void close_monotone(Mask& mask, std::span<const std::size_t> order) {
    if (!is_permutation_of_features(order, mask.cols()))
        throw ConfigError("monotone order must be a permutation of the feature indices");
    for (std::size_t r = 0; r < mask.rows(); ++r) {
        bool missing = false;
        for (std::size_t c : order) {
            missing = missing || mask(r, c);
            if (missing) mask.set(r, c, true);
        }
    }
}

bool validate_monotone(const Mask& mask, std::span<const std::size_t> order) {
    if (!is_permutation_of_features(order, mask.cols()))
        throw ConfigError("monotone order must be a permutation of the feature indices");
    for (std::size_t r = 0; r < mask.rows(); ++r) {
        bool seen_missing = false;
        for (std::size_t c : order) {
            if (mask(r, c))
                seen_missing = true;
            else if (seen_missing)
                return false;
        }
    }
    return true;
}

double missing_rate(const Mask& mask) {
    const std::size_t total = mask.rows() * mask.cols();
    return total == 0 ? 0.0 : static_cast<double>(mask.count()) / static_cast<double>(total);
}

Matrix apply_mask(const Matrix& data, const Mask& mask) {
    if (data.rows() != mask.rows() || data.cols() != mask.cols()) throw ShapeError("mask shape differs from data shape");
    Matrix out = data;
    for (std::size_t r = 0; r < data.rows(); ++r)
        for (std::size_t c = 0; c < data.cols(); ++c)
            if (mask(r, c)) out(r, c) = std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace aeimpute::missingness

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace aeimpute::optimize {

struct Bounds {
    double lo = 0.0;
    double hi = 1.0;
};

/// A box-constrained objective. `eval` must be total and finite on the box.
struct Objective {
    std::size_t arity = 0;
    std::function<double(std::span<const double>)> eval;
    std::function<std::vector<double>(std::span<const double>)> gradient;  // optional
    std::vector<Bounds> bounds;

    bool has_gradient() const noexcept { return static_cast<bool>(gradient); }
};

/// Throws ConfigError for a malformed objective or a box with non-finite or inverted limits.
void validate(const Objective& obj);

struct GAConfig {
    std::size_t population = 50;
    std::size_t generations = 100;
    std::size_t tournament_size = 3;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;
    double blend_alpha = 0.5;
    double mutation_sigma = 0.1;  // fraction of each coordinate's box width
    std::size_t elitism = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PSOConfig {
    std::size_t swarm = 30;
    std::size_t iterations = 200;
    double inertia = 0.729;
    double cognitive = 1.49445;
    double social = 1.49445;
    double velocity_clamp = 0.5;          // fraction of box width
    double initial_velocity = 0.1;        // initial |v| bound, fraction of box width; 0 starts at rest
    std::uint64_t seed = 0;

    void validate() const;
};

struct GDConfig {
    double step_size = 0.1;
    std::size_t max_iters = 500;
    double gradient_tolerance = 1e-6;
    std::uint64_t seed = 0;
    std::optional<std::vector<double>> start;  // seeded uniform start when absent

    void validate() const;
};

struct OptResult {
    std::vector<double> x_star;
    double f_star = 0.0;
    std::size_t evaluations = 0;
    std::size_t gradient_evaluations = 0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Best-so-far objective after initialization and after each generation/iteration.
    /// Gradient descent records only the final value.
    std::vector<double> best_history;
};

/// Real-coded GA: tournament selection, BLX-alpha crossover, clipped Gaussian mutation, elitism.
/// `converged` reports that the best value stopped improving over the last tenth of the run.
OptResult ga_minimize(const Objective& obj, const GAConfig& cfg);

/// Global-best PSO with synchronous best updates, clipped positions, and clamped velocities.
OptResult pso_minimize(const Objective& obj, const PSOConfig& cfg);

/// Projected gradient descent; stops when the projected-gradient norm drops to the tolerance.
OptResult mle_minimize(const Objective& obj, const GDConfig& cfg);

}  // namespace aeimpute::optimize

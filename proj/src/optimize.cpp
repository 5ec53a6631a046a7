#include "aeimpute/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aeimpute/errors.hpp"
#include "aeimpute/random.hpp"

namespace aeimpute::optimize {

void validate(const Objective& obj) {
    if (obj.arity == 0) throw ConfigError("objective arity must be positive");
    if (!obj.eval) throw ConfigError("objective has no eval function");
    if (obj.bounds.size() != obj.arity)
        throw ShapeError("objective has " + std::to_string(obj.bounds.size()) + " bounds for arity " +
                         std::to_string(obj.arity));
    for (std::size_t i = 0; i < obj.bounds.size(); ++i) {
        const Bounds& b = obj.bounds[i];
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi))
            throw ConfigError("bounds of coordinate " + std::to_string(i) + " are not finite");
        if (b.lo > b.hi) throw ConfigError("bounds of coordinate " + std::to_string(i) + " are inverted");
    }
}

void GAConfig::validate() const {
    if (population == 0) throw ConfigError("ga population must be positive");
    if (generations == 0) throw ConfigError("ga generations must be positive");
    if (tournament_size < 2) throw ConfigError("ga tournament_size must be at least 2");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw ConfigError("ga crossover_rate must lie in [0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ConfigError("ga mutation_rate must lie in [0, 1]");
    if (!(blend_alpha > 0.0 && std::isfinite(blend_alpha))) throw ConfigError("ga blend_alpha must be positive");
    if (!(mutation_sigma > 0.0 && std::isfinite(mutation_sigma))) throw ConfigError("ga mutation_sigma must be positive");
    if (elitism < 1) throw ConfigError("ga elitism must be at least 1");
    if (elitism >= population) throw ConfigError("ga elitism must be smaller than the population");
}

void PSOConfig::validate() const {
    if (swarm == 0) throw ConfigError("pso swarm must be positive");
    if (iterations == 0) throw ConfigError("pso iterations must be positive");
    if (!(inertia > 0.0 && inertia < 1.0)) throw ConfigError("pso inertia must lie in (0, 1)");
    if (!(cognitive > 0.0 && std::isfinite(cognitive))) throw ConfigError("pso cognitive must be positive");
    if (!(social > 0.0 && std::isfinite(social))) throw ConfigError("pso social must be positive");
    if (!(velocity_clamp > 0.0 && velocity_clamp <= 1.0)) throw ConfigError("pso velocity_clamp must lie in (0, 1]");
    if (!(initial_velocity >= 0.0 && initial_velocity <= 1.0))
        throw ConfigError("pso initial_velocity must lie in [0, 1]");
}

void GDConfig::validate() const {
    if (!(step_size > 0.0 && std::isfinite(step_size))) throw ConfigError("gd step_size must be positive");
    if (max_iters == 0) throw ConfigError("gd max_iters must be positive");
    if (!(gradient_tolerance > 0.0)) throw ConfigError("gd gradient_tolerance must be positive");
}

namespace {

double clip(double v, const Bounds& b) { return std::clamp(v, b.lo, b.hi); }

std::vector<double> uniform_point(const Objective& obj, Rng& rng) {
    std::vector<double> x(obj.arity);
    for (std::size_t i = 0; i < obj.arity; ++i) x[i] = rng.uniform(obj.bounds[i].lo, obj.bounds[i].hi);
    return x;
}

/// Counts every call so OptResult::evaluations is exact.
class CountingEval {
public:
    explicit CountingEval(const Objective& obj) : obj_(obj) {}
    double operator()(std::span<const double> x) {
        ++count_;
        return obj_.eval(x);
    }
    std::size_t count() const noexcept { return count_; }

private:
    const Objective& obj_;
    std::size_t count_ = 0;
};

bool stalled(const std::vector<double>& history) {
    const std::size_t steps = history.size() - 1;
    const std::size_t window = std::max<std::size_t>(1, steps / 10);
    return history.back() >= history[history.size() - 1 - window];
}

std::size_t tournament(const std::vector<double>& fitness, std::size_t size, Rng& rng) {
    std::size_t winner = rng.below(fitness.size());
    for (std::size_t k = 1; k < size; ++k) {
        const std::size_t challenger = rng.below(fitness.size());
        if (fitness[challenger] < fitness[winner] ||
            (fitness[challenger] == fitness[winner] && challenger < winner))
            winner = challenger;
    }
    return winner;
}

}  // namespace

OptResult ga_minimize(const Objective& obj, const GAConfig& cfg) {
    validate(obj);
    cfg.validate();
    Rng rng(cfg.seed);
    CountingEval eval(obj);
    const std::size_t m = obj.arity;

    std::vector<std::vector<double>> population(cfg.population);
    std::vector<double> fitness(cfg.population);
    for (std::size_t i = 0; i < cfg.population; ++i) {
        population[i] = uniform_point(obj, rng);
        fitness[i] = eval(population[i]);
    }

    OptResult result;
    const auto first_best = std::min_element(fitness.begin(), fitness.end());
    result.x_star = population[static_cast<std::size_t>(first_best - fitness.begin())];
    result.f_star = *first_best;
    result.best_history.push_back(result.f_star);

    std::vector<std::size_t> ranking(cfg.population);
    std::vector<std::vector<double>> next_population;
    std::vector<double> next_fitness;
    for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
        std::iota(ranking.begin(), ranking.end(), std::size_t{0});
        std::stable_sort(ranking.begin(), ranking.end(),
                         [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });

        next_population.clear();
        next_fitness.clear();
        for (std::size_t e = 0; e < cfg.elitism; ++e) {
            next_population.push_back(population[ranking[e]]);
            next_fitness.push_back(fitness[ranking[e]]);
        }
        while (next_population.size() < cfg.population) {
            const auto& mother = population[tournament(fitness, cfg.tournament_size, rng)];
            const auto& father = population[tournament(fitness, cfg.tournament_size, rng)];
            std::vector<double> child = mother;
            if (rng.bernoulli(cfg.crossover_rate)) {
                for (std::size_t d = 0; d < m; ++d) {
                    const double lo = std::min(mother[d], father[d]);
                    const double hi = std::max(mother[d], father[d]);
                    const double spread = cfg.blend_alpha * (hi - lo);
                    child[d] = clip(rng.uniform(lo - spread, hi + spread), obj.bounds[d]);
                }
            }
            for (std::size_t d = 0; d < m; ++d) {
                if (rng.bernoulli(cfg.mutation_rate)) {
                    const double width = obj.bounds[d].hi - obj.bounds[d].lo;
                    child[d] = clip(child[d] + rng.normal(0.0, cfg.mutation_sigma * width), obj.bounds[d]);
                }
            }
            const double f = eval(child);
            if (f < result.f_star) {
                result.f_star = f;
                result.x_star = child;
            }
            next_population.push_back(std::move(child));
            next_fitness.push_back(f);
        }
        population.swap(next_population);
        fitness.swap(next_fitness);
        result.best_history.push_back(result.f_star);
    }

    result.iterations = cfg.generations;
    result.evaluations = eval.count();
    result.converged = stalled(result.best_history);
    return result;
}

OptResult pso_minimize(const Objective& obj, const PSOConfig& cfg) {
    validate(obj);
    cfg.validate();
    Rng rng(cfg.seed);
    CountingEval eval(obj);
    const std::size_t m = obj.arity;

    std::vector<double> width(m), vmax(m);
    for (std::size_t d = 0; d < m; ++d) {
        width[d] = obj.bounds[d].hi - obj.bounds[d].lo;
        vmax[d] = cfg.velocity_clamp * width[d];
    }

    std::vector<std::vector<double>> position(cfg.swarm), velocity(cfg.swarm, std::vector<double>(m, 0.0));
    std::vector<std::vector<double>> personal(cfg.swarm);
    std::vector<double> personal_f(cfg.swarm);
    for (std::size_t i = 0; i < cfg.swarm; ++i) {
        position[i] = uniform_point(obj, rng);
        if (cfg.initial_velocity > 0.0)
            for (std::size_t d = 0; d < m; ++d) {
                const double v0 = cfg.initial_velocity * width[d];
                velocity[i][d] = rng.uniform(-v0, v0);
            }
        personal[i] = position[i];
        personal_f[i] = eval(position[i]);
    }

    std::size_t leader = static_cast<std::size_t>(std::min_element(personal_f.begin(), personal_f.end()) -
                                                  personal_f.begin());
    std::vector<double> global = personal[leader];
    double global_f = personal_f[leader];

    OptResult result;
    result.best_history.push_back(global_f);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        for (std::size_t i = 0; i < cfg.swarm; ++i) {
            auto& x = position[i];
            auto& v = velocity[i];
            for (std::size_t d = 0; d < m; ++d) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                v[d] = cfg.inertia * v[d] + cfg.cognitive * r1 * (personal[i][d] - x[d]) +
                       cfg.social * r2 * (global[d] - x[d]);
                v[d] = std::clamp(v[d], -vmax[d], vmax[d]);
                x[d] = clip(x[d] + v[d], obj.bounds[d]);
            }
            const double f = eval(x);
            if (f < personal_f[i]) {
                personal_f[i] = f;
                personal[i] = x;
            }
        }
        leader = static_cast<std::size_t>(std::min_element(personal_f.begin(), personal_f.end()) -
                                          personal_f.begin());
        if (personal_f[leader] < global_f) {
            global_f = personal_f[leader];
            global = personal[leader];
        }
        result.best_history.push_back(global_f);
    }

    result.x_star = std::move(global);
    result.f_star = global_f;
    result.iterations = cfg.iterations;
    result.evaluations = eval.count();
    result.converged = stalled(result.best_history);
    return result;
}

OptResult mle_minimize(const Objective& obj, const GDConfig& cfg) {
    validate(obj);
    cfg.validate();
    if (!obj.has_gradient()) throw UnsupportedObjective("gradient descent requires an objective gradient");
    const std::size_t m = obj.arity;

    std::vector<double> x;
    if (cfg.start) {
        if (cfg.start->size() != m) throw ShapeError("gd start point length does not match objective arity");
        x = *cfg.start;
        for (std::size_t d = 0; d < m; ++d) x[d] = clip(x[d], obj.bounds[d]);
    } else {
        Rng rng(cfg.seed);
        x = uniform_point(obj, rng);
    }

    OptResult result;
    std::vector<double> next(m);
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        const std::vector<double> g = obj.gradient(x);
        ++result.gradient_evaluations;
        if (g.size() != m) throw ShapeError("objective gradient length does not match arity");
        double norm2 = 0.0;
        for (std::size_t d = 0; d < m; ++d) {
            next[d] = clip(x[d] - cfg.step_size * g[d], obj.bounds[d]);
            const double projected = (x[d] - next[d]) / cfg.step_size;
            norm2 += projected * projected;
        }
        if (std::sqrt(norm2) <= cfg.gradient_tolerance) {
            result.converged = true;
            break;
        }
        x.swap(next);
        ++result.iterations;
    }

    CountingEval eval(obj);
    result.f_star = eval(x);
    result.x_star = std::move(x);
    result.evaluations = eval.count();
    result.best_history.push_back(result.f_star);
    return result;
}

}  // namespace aeimpute::optimize

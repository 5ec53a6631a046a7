#include "aeimpute/impute.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "aeimpute/errors.hpp"
#include "aeimpute/random.hpp"

namespace aeimpute::impute {

RecordView record_from_row(std::span<const double> row) {
    RecordView rec;
    rec.values.assign(row.begin(), row.end());
    for (std::size_t i = 0; i < row.size(); ++i)
        if (std::isnan(row[i])) {
            rec.missing.push_back(i);
            rec.values[i] = kPlaceholder;
        }
    return rec;
}

void ImputeConfig::validate() const {
    if (restarts == 0) throw ConfigError("impute restarts must be at least 1");
    if (!(accept_threshold > 0.0)) throw ConfigError("impute accept_threshold must be positive");
    switch (optimizer) {
    case OptimizerKind::GA:
        ga.validate();
        break;
    case OptimizerKind::PSO:
        pso.validate();
        break;
    case OptimizerKind::MLE:
        gd.validate();
        break;
    }
}

namespace {

void check_record(const net::Network& model, const RecordView& rec) {
    if (rec.values.size() != model.input_dim)
        throw ShapeError("record has " + std::to_string(rec.values.size()) + " values, model expects " +
                         std::to_string(model.input_dim));
    if (rec.missing.empty()) throw NothingToImpute("record has no missing values");
    std::vector<bool> is_missing(rec.values.size(), false);
    for (std::size_t j : rec.missing) {
        if (j >= rec.values.size()) throw ShapeError("missing index " + std::to_string(j) + " outside record");
        is_missing[j] = true;
    }
    for (std::size_t i = 0; i < rec.values.size(); ++i)
        if (!is_missing[i] && !(rec.values[i] >= 0.0 && rec.values[i] <= 1.0))
            throw NormalizationError("known value at index " + std::to_string(i) + " lies outside [0, 1]");
}

std::vector<double> substitute(const RecordView& rec, std::span<const double> u) {
    if (u.size() != rec.missing.size()) throw ShapeError("candidate length does not match missing count");
    std::vector<double> x = rec.values;
    for (std::size_t k = 0; k < u.size(); ++k) x[rec.missing[k]] = u[k];
    return x;
}

optimize::OptResult run_optimizer(const optimize::Objective& obj, const ImputeConfig& cfg, std::uint64_t seed) {
    switch (cfg.optimizer) {
    case OptimizerKind::GA: {
        optimize::GAConfig ga = cfg.ga;
        ga.seed = seed;
        return optimize::ga_minimize(obj, ga);
    }
    case OptimizerKind::PSO: {
        optimize::PSOConfig pso = cfg.pso;
        pso.seed = seed;
        return optimize::pso_minimize(obj, pso);
    }
    case OptimizerKind::MLE: {
        optimize::GDConfig gd = cfg.gd;
        gd.seed = seed;
        return optimize::mle_minimize(obj, gd);
    }
    }
    throw ConfigError("unknown optimizer");
}

}  // namespace

optimize::Objective objective_for_record(const net::Network& model, const RecordView& rec) {
    check_record(model, rec);
    optimize::Objective obj;
    obj.arity = rec.missing.size();
    obj.bounds.assign(obj.arity, optimize::Bounds{0.0, 1.0});
    const net::Network* net = &model;
    obj.eval = [net, rec](std::span<const double> u) {
        const std::vector<double> x = substitute(rec, u);
        return net::reconstruction_error(*net, x);
    };
    obj.gradient = [net, rec](std::span<const double> u) {
        const std::vector<double> x = substitute(rec, u);
        return net::grad_input(*net, x, rec.missing);
    };
    return obj;
}

ImputationResult impute_record(const net::Network& model, const RecordView& rec, const ImputeConfig& cfg,
                               std::size_t record_index) {
    cfg.validate();
    const optimize::Objective obj = objective_for_record(model, rec);

    ImputationResult best;
    best.record = record_index;
    bool have_best = false;
    for (std::size_t attempt = 0; attempt < cfg.restarts; ++attempt) {
        const optimize::OptResult r = run_optimizer(obj, cfg, derive_seed(cfg.master_seed, record_index, attempt));
        ++best.attempts;
        if (!have_best || r.f_star < best.objective) {
            best.filled = substitute(rec, r.x_star);
            best.objective = net::reconstruction_error(model, best.filled);
            have_best = true;
        }
        if (best.objective <= cfg.accept_threshold) {
            best.accepted = true;
            break;
        }
    }
    return best;
}

DatasetImputation impute_dataset(const net::Network& model, const Matrix& data, const missingness::Mask& mask,
                                 const ImputeConfig& cfg, std::size_t workers) {
    if (data.rows() != mask.rows() || data.cols() != mask.cols())
        throw ShapeError("mask shape differs from data shape");
    if (data.cols() != model.input_dim)
        throw ShapeError("data has " + std::to_string(data.cols()) + " features, model expects " +
                         std::to_string(model.input_dim));
    cfg.validate();

    DatasetImputation out{data, {}};
    std::vector<std::size_t> todo;
    for (std::size_t r = 0; r < data.rows(); ++r)
        if (mask.row_has_missing(r)) todo.push_back(r);
    out.results.resize(todo.size());

    auto work = [&](std::size_t slot) {
        const std::size_t r = todo[slot];
        RecordView rec;
        rec.values.assign(data.row(r).begin(), data.row(r).end());
        rec.missing = mask.missing_in_row(r);
        for (std::size_t j : rec.missing) rec.values[j] = kPlaceholder;
        out.results[slot] = impute_record(model, rec, cfg, r);
        for (std::size_t j : rec.missing) out.completed(r, j) = out.results[slot].filled[j];
    };

    workers = std::max<std::size_t>(1, std::min(workers, todo.size()));
    if (workers == 1) {
        for (std::size_t slot = 0; slot < todo.size(); ++slot) work(slot);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t slot = next++; slot < todo.size(); slot = next++) {
                try {
                    work(slot);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = todo.size();
                }
            }
        });
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace aeimpute::impute

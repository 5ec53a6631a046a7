#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aeimpute/matrix.hpp"
#include "aeimpute/missingness.hpp"
#include "aeimpute/net.hpp"
#include "aeimpute/optimize.hpp"

namespace aeimpute::impute {

/// Value written into missing slots before optimization starts.
inline constexpr double kPlaceholder = 0.5;

/// One normalized record: known values plus the indices of the unknown ones.
struct RecordView {
    std::vector<double> values;
    std::vector<std::size_t> missing;
};

/// Builds a RecordView from a row that stores missing cells as NaN.
RecordView record_from_row(std::span<const double> row);

enum class OptimizerKind { GA, PSO, MLE };

struct ImputeConfig {
    OptimizerKind optimizer = OptimizerKind::GA;
    optimize::GAConfig ga;
    optimize::PSOConfig pso;
    optimize::GDConfig gd;
    std::size_t restarts = 3;
    double accept_threshold = 1e-2;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct ImputationResult {
    std::size_t record = 0;
    std::vector<double> filled;
    double objective = 0.0;
    std::size_t attempts = 0;
    bool accepted = false;
};

/// Reconstruction error of the record with the missing slots replaced by the argument.
/// The model must outlive the returned objective. `eval` and `gradient` are reentrant.
optimize::Objective objective_for_record(const net::Network& model, const RecordView& rec);

/// Optimizes the missing slots; retries with a fresh seed while the objective exceeds the
/// acceptance threshold, up to `cfg.restarts` attempts, and keeps the best attempt.
ImputationResult impute_record(const net::Network& model, const RecordView& rec, const ImputeConfig& cfg,
                               std::size_t record_index = 0);

struct DatasetImputation {
    Matrix completed;
    std::vector<ImputationResult> results;  // one per incomplete record, ascending record index
};

/// Imputes every record with a missing cell. Records are independent and their seeds
/// derive from (master seed, record index), so the output does not depend on `workers`.
DatasetImputation impute_dataset(const net::Network& model, const Matrix& data, const missingness::Mask& mask,
                                 const ImputeConfig& cfg, std::size_t workers = 1);

}  // namespace aeimpute::impute

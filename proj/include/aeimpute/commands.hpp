#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aeimpute/config.hpp"
#include "aeimpute/errors.hpp"
#include "aeimpute/eval.hpp"
#include "aeimpute/impute.hpp"
#include "aeimpute/model_io.hpp"

namespace aeimpute::commands {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitUsage = 2,
    kExitParse = 3,
    kExitConfig = 4,
    kExitData = 5,
    kExitIo = 6,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Fits the autoencoder on the complete records of paths.train_data and writes paths.model
/// plus a training log (paths.train_log, default `<model>.log.json`).
void train(const config::RunConfig& cfg, std::ostream& log);

/// Writes paths.masked and the paths.mask sidecar from the complete CSV at paths.truth.
void inject(const config::RunConfig& cfg, std::ostream& log);

/// Writes the completed CSV (paths.completed) and a per-record result log (paths.results).
void impute(const config::RunConfig& cfg, std::ostream& log);

/// Scores paths.completed against paths.truth on the cells flagged by paths.mask and writes
/// paths.report (key=value) and `<report>.json`.
void evaluate(const config::RunConfig& cfg, std::ostream& log);

/// Runs model+GA, model+PSO, model+MLE, mean and kNN on the same masked data and writes
/// paths.table (CSV) and `<table>.json`.
void bench(const config::RunConfig& cfg, std::ostream& log);

/// Writes a synthetic correlated dataset (paths.truth) with `records` rows.
void synth(const config::RunConfig& cfg, std::size_t records, double noise, std::ostream& log);

struct ModelImputation {
    Matrix completed;  // raw units; known cells copied from the input
    std::vector<impute::ImputationResult> results;
};

/// Normalizes with the model's stats, imputes every missing cell, and denormalizes the fills.
ModelImputation impute_with_model(const model_io::Model& model, const Matrix& values, const config::RunConfig& cfg);

/// Metrics on the masked cells, in units normalized by the ground truth's column ranges.
eval::MetricReport score_against_truth(const data::Dataset& truth, const Matrix& completed,
                                       const missingness::Mask& mask, double tolerance);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aeimpute::commands

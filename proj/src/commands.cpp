#include "aeimpute/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "aeimpute/dataset.hpp"
#include "aeimpute/missingness.hpp"
#include "json.hpp"

namespace aeimpute::commands {

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Parse:
        return kExitParse;
    case ErrorKind::InvalidConfiguration:
    case ErrorKind::Unsupported:
        return kExitConfig;
    case ErrorKind::Shape:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Data:
        return kExitData;
    case ErrorKind::Io:
        return kExitIo;
    }
    return kExitInternal;
}

namespace {

using config::Path;

const Path& require(const std::optional<Path>& p, const char* key, const char* flag) {
    if (!p) throw ConfigError(std::string("missing ") + key + " (" + flag + ")");
    return *p;
}

void write_text(const Path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

Path with_suffix(const Path& p, const std::string& suffix) { return Path(p.string() + suffix); }

void require_complete(const data::Dataset& ds, const Path& source) {
    for (std::size_t r = 0; r < ds.values.rows(); ++r)
        for (std::size_t c = 0; c < ds.values.cols(); ++c)
            if (std::isnan(ds.values(r, c)))
                throw DataError(source.string() + ": ground truth has a missing cell at record " + std::to_string(r + 1) +
                                ", column " + ds.feature_names[c]);
}

void require_same_shape(const data::Dataset& a, const Path& pa, const data::Dataset& b, const Path& pb) {
    if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
        throw ShapeError(pa.string() + " is " + std::to_string(a.values.rows()) + "x" + std::to_string(a.values.cols()) +
                         " but " + pb.string() + " is " + std::to_string(b.values.rows()) + "x" +
                         std::to_string(b.values.cols()));
}

missingness::Mask load_mask_matching(const Path& path, const Matrix& like) {
    missingness::Mask mask = data::load_mask_csv(path);
    if (mask.rows() != like.rows() || mask.cols() != like.cols())
        throw ShapeError(path.string() + " does not match the data shape");
    return mask;
}

/// The sidecar, when given, must flag exactly the `?` cells of the masked file.
missingness::Mask mask_for_masked(const config::RunConfig& cfg, const data::Dataset& masked) {
    missingness::Mask from_cells = missingness::mask_of(masked.values);
    if (cfg.paths.mask) {
        const missingness::Mask sidecar = load_mask_matching(*cfg.paths.mask, masked.values);
        if (!(sidecar == from_cells))
            throw DataError(cfg.paths.mask->string() + " disagrees with the missing cells of " +
                            cfg.paths.masked->string());
    }
    return from_cells;
}

const model_io::Model& check_model_width(const model_io::Model& model, const data::Dataset& ds, const Path& source) {
    if (model.network.input_dim != ds.features())
        throw ShapeError(source.string() + " has " + std::to_string(ds.features()) + " features, model expects " +
                         std::to_string(model.network.input_dim));
    return model;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? data::format_number(*v) : std::string("undefined");
}

}  // namespace

void train(const config::RunConfig& cfg, std::ostream& log) {
    const Path& source = require(cfg.paths.train_data, "paths.train_data", "--data");
    const Path& model_path = require(cfg.paths.model, "paths.model", "--model");
    const data::Dataset ds = data::load_csv(source);

    const std::vector<std::size_t> used = data::complete_records(ds.values);
    if (used.empty())
        throw IncompleteTrainingData(source.string() + ": no complete records to train on (" +
                                     std::to_string(ds.records()) + " records, all with missing cells)");
    std::vector<std::size_t> excluded;
    for (std::size_t r = 0, k = 0; r < ds.records(); ++r) {
        if (k < used.size() && used[k] == r)
            ++k;
        else
            excluded.push_back(r);
    }

    const Matrix complete = data::select_rows(ds.values, used);
    const std::vector<data::NormStats> stats = data::compute_stats(complete);
    net::TrainConfig tc = cfg.train;
    tc.seed = config::stage_seed(cfg.master_seed(), config::Stage::Train);

    const auto started = std::chrono::steady_clock::now();
    net::TrainResult trained = net::train(data::normalize(complete, stats), tc, cfg.denoising);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    model_io::Model model;
    model.network = std::move(trained.network);
    model.feature_names = ds.feature_names;
    model.norm_stats = stats;
    model.denoising = cfg.denoising;
    model.training_records = used.size();
    model.final_train_loss = trained.loss_history.empty() ? 0.0 : trained.loss_history.back();
    model_io::save(model_path, model);

    nlohmann::json record_log;
    record_log["training_records"] = used;
    record_log["excluded_records"] = excluded;
    record_log["loss_history"] = trained.loss_history;
    write_text(cfg.paths.train_log.value_or(with_suffix(model_path, ".log.json")), record_log.dump(1) + "\n");

    log << "trained " << (cfg.denoising ? "SDAE" : "SAE") << " on " << used.size() << " complete records ("
        << excluded.size() << " excluded), final loss " << model.final_train_loss << ", " << seconds << " s\n";
}

void inject(const config::RunConfig& cfg, std::ostream& log) {
    const Path& source = require(cfg.paths.truth, "paths.truth", "--data");
    const Path& out_path = require(cfg.paths.masked, "paths.masked", "--out");
    const Path& mask_path = require(cfg.paths.mask, "paths.mask", "--mask");
    const data::Dataset truth = data::load_csv(source);
    require_complete(truth, source);

    const missingness::MechanismSpec mech = config::resolve(cfg.mechanism, truth.feature_names);
    const missingness::PatternSpec pattern = config::resolve(cfg.pattern, truth.feature_names);
    const Matrix normalized = data::normalize(truth.values, data::compute_stats(truth.values));
    const missingness::Injection injected =
        missingness::inject(normalized, mech, pattern, config::stage_seed(cfg.master_seed(), config::Stage::Inject));

    data::save_csv(out_path, {truth.feature_names, missingness::apply_mask(truth.values, injected.mask)});
    data::save_mask_csv(mask_path, truth.feature_names, injected.mask);
    log << "injected " << injected.mask.count() << " missing cells (rate " << missingness::missing_rate(injected.mask)
        << ")\n";
}

ModelImputation impute_with_model(const model_io::Model& model, const Matrix& values, const config::RunConfig& cfg) {
    if (values.cols() != model.network.input_dim)
        throw ShapeError("data has " + std::to_string(values.cols()) + " features, model expects " +
                         std::to_string(model.network.input_dim));
    const missingness::Mask mask = missingness::mask_of(values);
    const Matrix normalized = data::normalize(values, model.norm_stats, /*clamp=*/true);

    impute::ImputeConfig icfg = cfg.impute;
    icfg.master_seed = config::stage_seed(cfg.master_seed(), config::Stage::Impute);
    if (cfg.accept_threshold) {
        icfg.accept_threshold = *cfg.accept_threshold;
    } else {
        if (!(model.final_train_loss > 0.0))
            throw ConfigError("model records no training loss; set impute.accept_threshold explicitly");
        icfg.accept_threshold = 2.0 * model.final_train_loss;
    }

    impute::DatasetImputation imputed = impute::impute_dataset(model.network, normalized, mask, icfg, cfg.workers);
    ModelImputation out{values, std::move(imputed.results)};
    for (std::size_t r = 0; r < values.rows(); ++r)
        for (std::size_t c = 0; c < values.cols(); ++c)
            if (mask(r, c)) out.completed(r, c) = model.norm_stats[c].denormalize(imputed.completed(r, c));
    return out;
}

void impute(const config::RunConfig& cfg, std::ostream& log) {
    const Path& source = require(cfg.paths.masked, "paths.masked", "--data");
    const Path& model_path = require(cfg.paths.model, "paths.model", "--model");
    const Path& out_path = require(cfg.paths.completed, "paths.completed", "--out");
    const data::Dataset masked = data::load_csv(source);
    const model_io::Model model = model_io::load(model_path);
    check_model_width(model, masked, source);
    mask_for_masked(cfg, masked);  // validates the sidecar when one is given

    const auto started = std::chrono::steady_clock::now();
    const ModelImputation result = impute_with_model(model, masked.values, cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    data::save_csv(out_path, {masked.feature_names, result.completed});
    std::string results_csv = "record,missing,attempts,accepted,objective\n";
    std::size_t accepted = 0;
    const missingness::Mask mask = missingness::mask_of(masked.values);
    for (const impute::ImputationResult& r : result.results) {
        const std::size_t missing = mask.missing_in_row(r.record).size();
        results_csv += std::to_string(r.record) + "," + std::to_string(missing) + "," + std::to_string(r.attempts) + "," +
                       (r.accepted ? "1" : "0") + "," + data::format_number(r.objective) + "\n";
        accepted += r.accepted ? 1 : 0;
    }
    write_text(cfg.paths.results.value_or(with_suffix(out_path, ".results.csv")), results_csv);
    log << "imputed " << result.results.size() << " records (" << accepted << " accepted) in " << seconds << " s\n";
}

eval::MetricReport score_against_truth(const data::Dataset& truth, const Matrix& completed,
                                       const missingness::Mask& mask, double tolerance) {
    const std::vector<data::NormStats> stats = data::compute_stats(truth.values);
    const Matrix t = data::normalize(truth.values, stats);
    const Matrix c = data::normalize(completed, stats);
    for (std::size_t r = 0; r < mask.rows(); ++r)
        for (std::size_t j = 0; j < mask.cols(); ++j)
            if (mask(r, j) && std::isnan(c(r, j)))
                throw DataError("completed data still has a missing cell at record " + std::to_string(r + 1) +
                                ", column " + truth.feature_names[j]);
    return eval::score_masked(t, c, mask, truth.feature_names, tolerance);
}

void evaluate(const config::RunConfig& cfg, std::ostream& log) {
    const Path& truth_path = require(cfg.paths.truth, "paths.truth", "--truth");
    const Path& completed_path = require(cfg.paths.completed, "paths.completed", "--completed");
    const Path& mask_path = require(cfg.paths.mask, "paths.mask", "--mask");
    const Path& report_path = require(cfg.paths.report, "paths.report", "--out");
    const data::Dataset truth = data::load_csv(truth_path);
    const data::Dataset completed = data::load_csv(completed_path);
    require_complete(truth, truth_path);
    require_same_shape(truth, truth_path, completed, completed_path);
    const missingness::Mask mask = load_mask_matching(mask_path, truth.values);

    const eval::MetricReport report = score_against_truth(truth, completed.values, mask, cfg.tolerance);
    write_text(report_path, eval::to_key_value(report));
    write_text(with_suffix(report_path, ".json"), eval::to_json(report));
    log << "rmse=" << report.overall.rmse << " mse=" << report.overall.mse
        << " pearson_r=" << format_optional(report.overall.pearson_r)
        << " relative_accuracy=" << report.overall.relative_accuracy << " n_imputed=" << report.overall.n << "\n";
}

void bench(const config::RunConfig& cfg, std::ostream& log) {
    const Path& truth_path = require(cfg.paths.truth, "paths.truth", "--truth");
    const Path& masked_path = require(cfg.paths.masked, "paths.masked", "--data");
    const Path& model_path = require(cfg.paths.model, "paths.model", "--model");
    const Path& table_path = require(cfg.paths.table, "paths.table", "--out");
    const data::Dataset truth = data::load_csv(truth_path);
    const data::Dataset masked = data::load_csv(masked_path);
    const model_io::Model model = model_io::load(model_path);
    require_complete(truth, truth_path);
    require_same_shape(truth, truth_path, masked, masked_path);
    check_model_width(model, masked, masked_path);
    const missingness::Mask mask = mask_for_masked(cfg, masked);
    if (mask.count() == 0) throw DataError(masked_path.string() + " has no missing cells to impute");

    struct Row {
        std::string method;
        eval::MetricReport report;
    };
    std::vector<Row> rows;

    const std::pair<const char*, impute::OptimizerKind> optimizers[] = {
        {"model+GA", impute::OptimizerKind::GA},
        {"model+PSO", impute::OptimizerKind::PSO},
        {"model+MLE", impute::OptimizerKind::MLE},
    };
    for (const auto& [name, kind] : optimizers) {
        config::RunConfig run = cfg;
        run.impute.optimizer = kind;
        const auto started = std::chrono::steady_clock::now();
        const ModelImputation result = impute_with_model(model, masked.values, run);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        log << name << ": " << seconds << " s\n";
        rows.push_back({name, score_against_truth(truth, result.completed, mask, cfg.tolerance)});
    }

    const Matrix normalized = data::normalize(masked.values, model.norm_stats);
    const Matrix mean_filled = data::denormalize(eval::mean_impute(normalized, mask), model.norm_stats);
    rows.push_back({"mean", score_against_truth(truth, mean_filled, mask, cfg.tolerance)});
    const Matrix knn_filled = data::denormalize(eval::knn_impute(normalized, mask, cfg.knn_k), model.norm_stats);
    rows.push_back({"knn", score_against_truth(truth, knn_filled, mask, cfg.tolerance)});

    std::string table = "method,n_imputed,rmse,mse,sse,pearson_r,relative_accuracy\n";
    nlohmann::json doc;
    doc["training_records"] = model.training_records;
    doc["tolerance"] = cfg.tolerance;
    doc["knn_k"] = cfg.knn_k;
    doc["methods"] = nlohmann::json::object();
    for (const Row& row : rows) {
        const eval::Scores& s = row.report.overall;
        table += row.method + "," + std::to_string(s.n) + "," + data::format_number(s.rmse) + "," +
                 data::format_number(s.mse) + "," + data::format_number(s.sse) + "," + format_optional(s.pearson_r) +
                 "," + data::format_number(s.relative_accuracy) + "\n";
        doc["methods"][row.method] = nlohmann::json::parse(eval::to_json(row.report));
    }
    write_text(table_path, table);
    write_text(with_suffix(table_path, ".json"), doc.dump(2) + "\n");
    log << "training records used by the model: " << model.training_records << "\n" << table;
}

void synth(const config::RunConfig& cfg, std::size_t records, double noise, std::ostream& log) {
    const Path& out_path = require(cfg.paths.truth, "paths.truth", "--out");
    if (!(noise >= 0.0 && std::isfinite(noise))) throw ConfigError("noise must be finite and non-negative");
    data::save_csv(out_path, data::synthetic_correlated(records, cfg.master_seed(), noise));
    log << "wrote " << records << " synthetic records to " << out_path.string() << "\n";
}

}  // namespace aeimpute::commands

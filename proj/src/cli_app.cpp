#include <ostream>

#include "CLI11.hpp"
#include "aeimpute/commands.hpp"

namespace aeimpute::commands {

namespace {

struct PathFlag {
    const char* flag;
    const char* key;
    const char* help;
};

/// Adds path options that map onto `paths.*` config keys.
void add_paths(CLI::App* cmd, config::Entries& flags, std::initializer_list<PathFlag> list) {
    for (const PathFlag& p : list) {
        cmd->add_option_function<std::string>(
            p.flag, [&flags, key = std::string(p.key)](const std::string& v) { flags.emplace_back(key, v); }, p.help);
    }
}

void add_value(CLI::App* cmd, config::Entries& flags, const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        flag, [&flags, key = std::string(key)](const std::string& v) { flags.emplace_back(key, v); }, help);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Autoencoder-based missing-data imputation: train, inject, impute, eval, bench"};
    app.require_subcommand(1);

    std::string config_path;
    config::Entries flags;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "Sectioned key=value run configuration file");
    add_value(&app, flags, "--seed", "run.seed", "Master seed (u64)");
    add_value(&app, flags, "--workers", "run.workers", "Worker threads for imputation");
    add_value(&app, flags, "--optimizer", "impute.optimizer", "ga | pso | mle");
    app.add_option("--set", overrides, "Override any config key: section.key=value (repeatable)");
    bool list_keys = false;
    app.add_flag("--list-keys", list_keys, "Print every config key with its default and exit");

    CLI::App* train_cmd = app.add_subcommand("train", "Fit an SAE/SDAE on the complete records of a CSV");
    add_paths(train_cmd, flags,
              {{"--data", "paths.train_data", "Training CSV"},
               {"--model", "paths.model", "Model file to write"},
               {"--log", "paths.train_log", "Training log (default <model>.log.json)"}});
    add_value(train_cmd, flags, "--epochs", "train.epochs", "SGD epochs");
    add_value(train_cmd, flags, "--hidden", "train.hidden_sizes", "Encoder widths, e.g. 5,3");
    add_value(train_cmd, flags, "--denoising", "train.denoising", "Train a denoising autoencoder (true/false)");

    CLI::App* inject_cmd = app.add_subcommand("inject", "Inject missing values into a complete CSV");
    add_paths(inject_cmd, flags,
              {{"--data", "paths.truth", "Complete CSV"},
               {"--out", "paths.masked", "Masked CSV to write"},
               {"--mask", "paths.mask", "Mask sidecar to write"}});
    add_value(inject_cmd, flags, "--mechanism", "mechanism.kind", "mcar | mar | mnar");
    add_value(inject_cmd, flags, "--rate", "mechanism.rate", "MCAR missing probability");
    add_value(inject_cmd, flags, "--pattern", "pattern.kind", "arbitrary | monotone");

    CLI::App* impute_cmd = app.add_subcommand("impute", "Fill the missing cells of a CSV with a trained model");
    add_paths(impute_cmd, flags,
              {{"--data", "paths.masked", "CSV with missing cells"},
               {"--model", "paths.model", "Trained model"},
               {"--mask", "paths.mask", "Optional mask sidecar to cross-check"},
               {"--out", "paths.completed", "Completed CSV to write"},
               {"--results", "paths.results", "Per-record log (default <out>.results.csv)"}});

    CLI::App* eval_cmd = app.add_subcommand("eval", "Score a completed CSV against ground truth");
    add_paths(eval_cmd, flags,
              {{"--truth", "paths.truth", "Ground-truth CSV"},
               {"--completed", "paths.completed", "Completed CSV"},
               {"--mask", "paths.mask", "Mask sidecar"},
               {"--out", "paths.report", "Report file (key=value); JSON goes to <out>.json"}});
    add_value(eval_cmd, flags, "--tolerance", "eval.tolerance", "Relative accuracy tolerance");

    CLI::App* bench_cmd = app.add_subcommand("bench", "Compare model+GA/PSO/MLE with mean and kNN baselines");
    add_paths(bench_cmd, flags,
              {{"--truth", "paths.truth", "Ground-truth CSV"},
               {"--data", "paths.masked", "Masked CSV"},
               {"--mask", "paths.mask", "Optional mask sidecar to cross-check"},
               {"--model", "paths.model", "Trained model"},
               {"--out", "paths.table", "Comparison table CSV; JSON goes to <out>.json"}});
    add_value(bench_cmd, flags, "--knn-k", "eval.knn_k", "Neighbours for the kNN baseline");

    CLI::App* synth_cmd = app.add_subcommand("synth", "Write a synthetic correlated 7-feature dataset");
    std::size_t records = 500;
    double noise = 0.01;
    add_paths(synth_cmd, flags, {{"--out", "paths.truth", "CSV to write"}});
    synth_cmd->add_option("--records", records, "Number of records")->capture_default_str();
    synth_cmd->add_option("--noise", noise, "Noise standard deviation")->capture_default_str();

    try {
        // --list-keys needs no subcommand.
        for (int i = 1; i < argc; ++i)
            if (std::string(argv[i]) == "--list-keys") {
                for (const auto& [key, value] : config::documented_keys()) out << key << " = " << value << "\n";
                return kExitOk;
            }
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        config::Entries entries;
        if (!config_path.empty()) entries = config::read_ini(config_path);
        entries.insert(entries.end(), flags.begin(), flags.end());
        for (const std::string& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + o + "'");
            entries.emplace_back(o.substr(0, eq), o.substr(eq + 1));
        }
        const config::RunConfig cfg = config::build(entries);

        if (*train_cmd)
            train(cfg, err);
        else if (*inject_cmd)
            inject(cfg, err);
        else if (*impute_cmd)
            impute(cfg, err);
        else if (*eval_cmd)
            evaluate(cfg, out);
        else if (*bench_cmd)
            bench(cfg, out);
        else if (*synth_cmd)
            synth(cfg, records, noise, err);
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace aeimpute::commands

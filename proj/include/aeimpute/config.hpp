#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aeimpute/impute.hpp"
#include "aeimpute/missingness.hpp"
#include "aeimpute/net.hpp"

namespace aeimpute::config {

using Path = std::filesystem::path;

struct Paths {
    std::optional<Path> train_data;  // CSV used by `train`
    std::optional<Path> truth;       // complete ground-truth CSV
    std::optional<Path> masked;      // CSV with `?` cells
    std::optional<Path> mask;        // 0/1 sidecar
    std::optional<Path> model;       // model JSON
    std::optional<Path> train_log;
    std::optional<Path> completed;
    std::optional<Path> results;
    std::optional<Path> report;
    std::optional<Path> table;
};

/// Mechanism settings before feature selectors are resolved against a header.
/// Selectors are feature names or 0-based column indices; "all" selects every column.
struct MechanismSettings {
    missingness::Mechanism kind = missingness::Mechanism::MCAR;
    std::vector<std::string> targets{"all"};
    double rate = 0.2;
    double intercept = 0.0;
    std::vector<double> slopes;
    std::vector<std::string> drivers;
};

struct PatternSettings {
    missingness::Pattern kind = missingness::Pattern::Arbitrary;
    std::vector<std::string> order;  // empty means natural column order
};

struct RunConfig {
    Paths paths;
    net::TrainConfig train;
    bool denoising = false;
    MechanismSettings mechanism;
    PatternSettings pattern;
    impute::ImputeConfig impute;
    std::optional<double> accept_threshold;  // default: 2x the model's final training loss
    double tolerance = 0.1;
    std::size_t knn_k = 5;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;

    /// The master seed; throws ConfigError when none was given.
    std::uint64_t master_seed() const;
};

/// Stage identifiers mixed into the master seed for each stochastic stage.
enum class Stage : std::uint64_t { Train = 1, Inject = 2, Impute = 3 };
std::uint64_t stage_seed(std::uint64_t master, Stage stage);

/// Ordered `section.key` -> value entries.
using Entries = std::vector<std::pair<std::string, std::string>>;

/// Reads an INI file (`[section]` headers, `key = value` lines, `#`/`;` comments) into flat entries.
Entries read_ini(const Path& path);

/// Builds a RunConfig from defaults, then `entries` in order. Unknown keys and
/// malformed values raise ConfigError naming the key.
RunConfig build(const Entries& entries);

/// Every recognised key with its default value rendered as text (empty when there is no default).
Entries documented_keys();

/// Resolves feature selectors against a header.
std::vector<std::size_t> resolve_features(const std::vector<std::string>& selectors,
                                          const std::vector<std::string>& header);
missingness::MechanismSpec resolve(const MechanismSettings& s, const std::vector<std::string>& header);
missingness::PatternSpec resolve(const PatternSettings& s, const std::vector<std::string>& header);

}  // namespace aeimpute::config

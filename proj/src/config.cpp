#include "aeimpute/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "aeimpute/errors.hpp"
#include "aeimpute/random.hpp"

namespace aeimpute::config {

std::uint64_t RunConfig::master_seed() const {
    if (!seed) throw ConfigError("no master seed: set run.seed in the config file or pass --seed");
    return *seed;
}

std::uint64_t stage_seed(std::uint64_t master, Stage stage) {
    return derive_seed(master, static_cast<std::uint64_t>(stage));
}

Entries read_ini(const Path& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        if (e.line() == 0) throw IoError("cannot read config file " + path.string());
        throw ConfigError(path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    Entries entries;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            entries.emplace_back(section, body.data());
            continue;
        }
        for (const auto& [key, value] : body) entries.emplace_back(section + "." + key, value.data());
    }
    return entries;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    throw ConfigError("config key " + key + ": '" + value + "' is not " + expected);
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw, const std::string& expected) {
    const std::string v = trim(raw);
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, raw, expected);
    return out;
}

std::uint64_t as_u64(const std::string& key, const std::string& v) {
    return parse_number<std::uint64_t>(key, v, "an unsigned integer");
}
std::size_t as_size(const std::string& key, const std::string& v) {
    return parse_number<std::size_t>(key, v, "an unsigned integer");
}
double as_double(const std::string& key, const std::string& v) { return parse_number<double>(key, v, "a number"); }

bool as_bool(const std::string& key, const std::string& v) {
    const std::string s = lower(trim(v));
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad_value(key, v, "a boolean");
}

std::vector<std::string> as_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Path as_path(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    if (s.empty()) bad_value(key, v, "a path");
    return s;
}

struct Key {
    std::string default_text;
    std::function<void(RunConfig&, const std::string& key, const std::string& value)> apply;
};

const std::map<std::string, Key>& registry() {
    using M = missingness::Mechanism;
    static const std::map<std::string, Key> keys = [] {
        std::map<std::string, Key> k;
        auto path_key = [&](const std::string& name, std::optional<Path> Paths::*member) {
            k["paths." + name] = {"", [member](RunConfig& c, const std::string& key, const std::string& v) {
                                      c.paths.*member = as_path(key, v);
                                  }};
        };
        path_key("train_data", &Paths::train_data);
        path_key("truth", &Paths::truth);
        path_key("masked", &Paths::masked);
        path_key("mask", &Paths::mask);
        path_key("model", &Paths::model);
        path_key("train_log", &Paths::train_log);
        path_key("completed", &Paths::completed);
        path_key("results", &Paths::results);
        path_key("report", &Paths::report);
        path_key("table", &Paths::table);

        k["run.seed"] = {"", [](RunConfig& c, const std::string& key, const std::string& v) { c.seed = as_u64(key, v); }};
        k["run.workers"] = {"1", [](RunConfig& c, const std::string& key, const std::string& v) {
                                c.workers = as_size(key, v);
                                if (c.workers == 0) bad_value(key, v, "a positive worker count");
                            }};

        k["train.hidden_sizes"] = {"5,3", [](RunConfig& c, const std::string& key, const std::string& v) {
                                       c.train.hidden_sizes.clear();
                                       for (const std::string& item : as_list(v))
                                           c.train.hidden_sizes.push_back(as_size(key, item));
                                   }};
        k["train.learning_rate"] = {"0.5", [](RunConfig& c, const std::string& key, const std::string& v) {
                                        c.train.learning_rate = as_double(key, v);
                                    }};
        k["train.epochs"] = {"200", [](RunConfig& c, const std::string& key, const std::string& v) {
                                 c.train.epochs = as_size(key, v);
                             }};
        k["train.batch_size"] = {"5", [](RunConfig& c, const std::string& key, const std::string& v) {
                                     c.train.batch_size = as_size(key, v);
                                 }};
        k["train.corruption"] = {"0.1", [](RunConfig& c, const std::string& key, const std::string& v) {
                                     c.train.corruption_fraction = as_double(key, v);
                                 }};
        k["train.init_scale"] = {"", [](RunConfig& c, const std::string& key, const std::string& v) {
                                     c.train.init_scale = as_double(key, v);
                                 }};
        k["train.pretrain"] = {"false", [](RunConfig& c, const std::string& key, const std::string& v) {
                                   c.train.pretrain = as_bool(key, v);
                               }};
        k["train.tied"] = {"false", [](RunConfig& c, const std::string& key, const std::string& v) {
                               c.train.tied = as_bool(key, v);
                           }};
        k["train.denoising"] = {"false", [](RunConfig& c, const std::string& key, const std::string& v) {
                                    c.denoising = as_bool(key, v);
                                }};
        k["train.output_activation"] = {"sigmoid", [](RunConfig& c, const std::string& key, const std::string& v) {
                                            const std::string s = lower(trim(v));
                                            if (s == "sigmoid")
                                                c.train.output_activation = net::Activation::Sigmoid;
                                            else if (s == "identity")
                                                c.train.output_activation = net::Activation::Identity;
                                            else
                                                bad_value(key, v, "sigmoid or identity");
                                        }};

        k["mechanism.kind"] = {"mcar", [](RunConfig& c, const std::string& key, const std::string& v) {
                                   const std::string s = lower(trim(v));
                                   if (s == "mcar")
                                       c.mechanism.kind = M::MCAR;
                                   else if (s == "mar")
                                       c.mechanism.kind = M::MAR;
                                   else if (s == "mnar")
                                       c.mechanism.kind = M::MNAR;
                                   else
                                       bad_value(key, v, "one of mcar, mar, mnar");
                               }};
        k["mechanism.targets"] = {"all", [](RunConfig& c, const std::string&, const std::string& v) {
                                      c.mechanism.targets = as_list(v);
                                  }};
        k["mechanism.rate"] = {"0.2", [](RunConfig& c, const std::string& key, const std::string& v) {
                                   c.mechanism.rate = as_double(key, v);
                               }};
        k["mechanism.intercept"] = {"0", [](RunConfig& c, const std::string& key, const std::string& v) {
                                        c.mechanism.intercept = as_double(key, v);
                                    }};
        k["mechanism.slopes"] = {"", [](RunConfig& c, const std::string& key, const std::string& v) {
                                     c.mechanism.slopes.clear();
                                     for (const std::string& item : as_list(v))
                                         c.mechanism.slopes.push_back(as_double(key, item));
                                 }};
        k["mechanism.drivers"] = {"", [](RunConfig& c, const std::string&, const std::string& v) {
                                      c.mechanism.drivers = as_list(v);
                                  }};
        k["pattern.kind"] = {"arbitrary", [](RunConfig& c, const std::string& key, const std::string& v) {
                                 const std::string s = lower(trim(v));
                                 if (s == "arbitrary")
                                     c.pattern.kind = missingness::Pattern::Arbitrary;
                                 else if (s == "monotone")
                                     c.pattern.kind = missingness::Pattern::Monotone;
                                 else
                                     bad_value(key, v, "arbitrary or monotone");
                             }};
        k["pattern.order"] = {"", [](RunConfig& c, const std::string&, const std::string& v) {
                                  c.pattern.order = as_list(v);
                              }};

        k["impute.optimizer"] = {"ga", [](RunConfig& c, const std::string& key, const std::string& v) {
                                     const std::string s = lower(trim(v));
                                     if (s == "ga")
                                         c.impute.optimizer = impute::OptimizerKind::GA;
                                     else if (s == "pso")
                                         c.impute.optimizer = impute::OptimizerKind::PSO;
                                     else if (s == "mle")
                                         c.impute.optimizer = impute::OptimizerKind::MLE;
                                     else
                                         bad_value(key, v, "one of ga, pso, mle");
                                 }};
        k["impute.restarts"] = {"3", [](RunConfig& c, const std::string& key, const std::string& v) {
                                    c.impute.restarts = as_size(key, v);
                                }};
        k["impute.accept_threshold"] = {"", [](RunConfig& c, const std::string& key, const std::string& v) {
                                            c.accept_threshold = as_double(key, v);
                                        }};

        k["ga.population"] = {"50", [](RunConfig& c, const std::string& key, const std::string& v) {
                                  c.impute.ga.population = as_size(key, v);
                              }};
        k["ga.generations"] = {"100", [](RunConfig& c, const std::string& key, const std::string& v) {
                                   c.impute.ga.generations = as_size(key, v);
                               }};
        k["ga.tournament_size"] = {"3", [](RunConfig& c, const std::string& key, const std::string& v) {
                                       c.impute.ga.tournament_size = as_size(key, v);
                                   }};
        k["ga.crossover_rate"] = {"0.9", [](RunConfig& c, const std::string& key, const std::string& v) {
                                      c.impute.ga.crossover_rate = as_double(key, v);
                                  }};
        k["ga.mutation_rate"] = {"0.1", [](RunConfig& c, const std::string& key, const std::string& v) {
                                     c.impute.ga.mutation_rate = as_double(key, v);
                                 }};
        k["ga.blend_alpha"] = {"0.5", [](RunConfig& c, const std::string& key, const std::string& v) {
                                   c.impute.ga.blend_alpha = as_double(key, v);
                               }};
        k["ga.mutation_sigma"] = {"0.1", [](RunConfig& c, const std::string& key, const std::string& v) {
                                      c.impute.ga.mutation_sigma = as_double(key, v);
                                  }};
        k["ga.elitism"] = {"1", [](RunConfig& c, const std::string& key, const std::string& v) {
                               c.impute.ga.elitism = as_size(key, v);
                           }};

        k["pso.swarm"] = {"30", [](RunConfig& c, const std::string& key, const std::string& v) {
                              c.impute.pso.swarm = as_size(key, v);
                          }};
        k["pso.iterations"] = {"200", [](RunConfig& c, const std::string& key, const std::string& v) {
                                   c.impute.pso.iterations = as_size(key, v);
                               }};
        k["pso.inertia"] = {"0.729", [](RunConfig& c, const std::string& key, const std::string& v) {
                                c.impute.pso.inertia = as_double(key, v);
                            }};
        k["pso.cognitive"] = {"1.49445", [](RunConfig& c, const std::string& key, const std::string& v) {
                                  c.impute.pso.cognitive = as_double(key, v);
                              }};
        k["pso.social"] = {"1.49445", [](RunConfig& c, const std::string& key, const std::string& v) {
                               c.impute.pso.social = as_double(key, v);
                           }};
        k["pso.velocity_clamp"] = {"0.5", [](RunConfig& c, const std::string& key, const std::string& v) {
                                       c.impute.pso.velocity_clamp = as_double(key, v);
                                   }};
        k["pso.initial_velocity"] = {"0.1", [](RunConfig& c, const std::string& key, const std::string& v) {
                                         c.impute.pso.initial_velocity = as_double(key, v);
                                     }};

        k["gd.step_size"] = {"0.1", [](RunConfig& c, const std::string& key, const std::string& v) {
                                 c.impute.gd.step_size = as_double(key, v);
                             }};
        k["gd.max_iters"] = {"500", [](RunConfig& c, const std::string& key, const std::string& v) {
                                 c.impute.gd.max_iters = as_size(key, v);
                             }};
        k["gd.gradient_tolerance"] = {"1e-6", [](RunConfig& c, const std::string& key, const std::string& v) {
                                          c.impute.gd.gradient_tolerance = as_double(key, v);
                                      }};

        k["eval.tolerance"] = {"0.1", [](RunConfig& c, const std::string& key, const std::string& v) {
                                   c.tolerance = as_double(key, v);
                                   if (!(c.tolerance > 0.0)) bad_value(key, v, "a positive tolerance");
                               }};
        k["eval.knn_k"] = {"5", [](RunConfig& c, const std::string& key, const std::string& v) {
                               c.knn_k = as_size(key, v);
                               if (c.knn_k == 0) bad_value(key, v, "a positive neighbour count");
                           }};
        return k;
    }();
    return keys;
}

}  // namespace

RunConfig build(const Entries& entries) {
    RunConfig cfg;
    const auto& keys = registry();
    for (const auto& [key, value] : entries) {
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError("unknown config key '" + key + "'");
        it->second.apply(cfg, key, value);
    }
    return cfg;
}

Entries documented_keys() {
    Entries out;
    for (const auto& [key, spec] : registry()) out.emplace_back(key, spec.default_text);
    return out;
}

std::vector<std::size_t> resolve_features(const std::vector<std::string>& selectors,
                                          const std::vector<std::string>& header) {
    std::vector<std::size_t> out;
    for (const std::string& sel : selectors) {
        if (lower(sel) == "all") {
            for (std::size_t i = 0; i < header.size(); ++i) out.push_back(i);
            continue;
        }
        const auto named = std::find(header.begin(), header.end(), sel);
        if (named != header.end()) {
            out.push_back(static_cast<std::size_t>(named - header.begin()));
            continue;
        }
        std::size_t index = 0;
        const auto [ptr, ec] = std::from_chars(sel.data(), sel.data() + sel.size(), index);
        if (ec != std::errc() || ptr != sel.data() + sel.size() || index >= header.size())
            throw ConfigError("feature selector '" + sel + "' matches no column");
        out.push_back(index);
    }
    return out;
}

missingness::MechanismSpec resolve(const MechanismSettings& s, const std::vector<std::string>& header) {
    missingness::MechanismSpec spec;
    spec.kind = s.kind;
    spec.target_features = resolve_features(s.targets, header);
    spec.rate = s.rate;
    spec.intercept = s.intercept;
    spec.slopes = s.slopes;
    spec.driver_features = resolve_features(s.drivers, header);
    return spec;
}

missingness::PatternSpec resolve(const PatternSettings& s, const std::vector<std::string>& header) {
    missingness::PatternSpec spec;
    spec.kind = s.kind;
    if (s.kind == missingness::Pattern::Monotone) {
        if (s.order.empty())
            for (std::size_t i = 0; i < header.size(); ++i) spec.order.push_back(i);
        else
            spec.order = resolve_features(s.order, header);
    }
    return spec;
}

}  // namespace aeimpute::config

#include "aeimpute/model_io.hpp"

#include <fstream>
#include <sstream>

#include "aeimpute/errors.hpp"
#include "json.hpp"

namespace aeimpute::model_io {

using nlohmann::json;

namespace {

const char* activation_name(net::Activation a) { return a == net::Activation::Sigmoid ? "sigmoid" : "identity"; }

net::Activation activation_from(const std::string& name, const std::string& source) {
    if (name == "sigmoid") return net::Activation::Sigmoid;
    if (name == "identity") return net::Activation::Identity;
    throw ParseError(source, 0, 0, "unknown activation '" + name + "'");
}

}  // namespace

std::string to_json(const Model& model) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["input_dim"] = model.network.input_dim;
    doc["tied"] = model.network.tied;
    doc["denoising"] = model.denoising;
    doc["training_records"] = model.training_records;
    doc["final_train_loss"] = model.final_train_loss;
    doc["feature_names"] = model.feature_names;
    json layers = json::array();
    for (const net::Layer& layer : model.network.layers) {
        layers.push_back({{"rows", layer.fan_out()},
                          {"cols", layer.fan_in()},
                          {"activation", activation_name(layer.activation)},
                          {"weights", layer.weights.data()},
                          {"biases", layer.biases}});
    }
    doc["layers"] = std::move(layers);
    json stats = json::array();
    for (const data::NormStats& s : model.norm_stats) stats.push_back({{"min", s.min}, {"max", s.max}});
    doc["norm_stats"] = std::move(stats);
    return doc.dump(1) + "\n";
}

Model from_json(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source, 0, 0, std::string("malformed model document: ") + e.what());
    }
    try {
        const int version = doc.at("format_version").get<int>();
        if (version != kFormatVersion)
            throw ParseError(source, 0, 0, "unsupported model format_version " + std::to_string(version));
        Model model;
        model.network.input_dim = doc.at("input_dim").get<std::size_t>();
        model.network.tied = doc.at("tied").get<bool>();
        model.denoising = doc.value("denoising", false);
        model.training_records = doc.value("training_records", std::size_t{0});
        model.final_train_loss = doc.value("final_train_loss", 0.0);
        model.feature_names = doc.value("feature_names", std::vector<std::string>{});
        for (const json& jl : doc.at("layers")) {
            net::Layer layer;
            const auto rows = jl.at("rows").get<std::size_t>();
            const auto cols = jl.at("cols").get<std::size_t>();
            layer.weights = Matrix(rows, cols);
            const auto weights = jl.at("weights").get<std::vector<double>>();
            if (weights.size() != rows * cols) throw ParseError(source, 0, 0, "layer weight count does not match rows*cols");
            layer.weights.data() = weights;
            layer.biases = jl.at("biases").get<std::vector<double>>();
            layer.activation = activation_from(jl.at("activation").get<std::string>(), source);
            model.network.layers.push_back(std::move(layer));
        }
        for (const json& js : doc.at("norm_stats"))
            model.norm_stats.push_back({js.at("min").get<double>(), js.at("max").get<double>()});
        try {
            net::validate(model.network);
        } catch (const Error& e) {
            throw ParseError(source, 0, 0, std::string("inconsistent network: ") + e.what());
        }
        if (model.norm_stats.size() != model.network.input_dim)
            throw ParseError(source, 0, 0, "norm_stats length does not match input_dim");
        if (!model.feature_names.empty() && model.feature_names.size() != model.network.input_dim)
            throw ParseError(source, 0, 0, "feature_names length does not match input_dim");
        return model;
    } catch (const json::exception& e) {
        throw ParseError(source, 0, 0, std::string("invalid model document: ") + e.what());
    }
}

void save(const std::filesystem::path& path, const Model& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << to_json(model);
    if (!out) throw IoError("failed writing " + path.string());
}

Model load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str(), path.string());
}

}  // namespace aeimpute::model_io

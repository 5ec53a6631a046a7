#include "aeimpute/eval.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"
#include <sstream>

#include "aeimpute/errors.hpp"

namespace aeimpute::eval {

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("pearson: vectors differ in length");
    if (a.size() < 2) return std::nullopt;
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a, db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

Scores score(std::span<const double> truth, std::span<const double> imputed, double tolerance) {
    if (truth.size() != imputed.size()) throw InvalidArgument("score: truth and imputed differ in length");
    if (truth.empty()) throw InvalidArgument("score: nothing to score");
    if (!(tolerance > 0.0)) throw InvalidArgument("score: tolerance must be positive");
    Scores s;
    s.n = truth.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double diff = imputed[i] - truth[i];
        s.sse += diff * diff;
        if (std::abs(diff) <= tolerance) ++hits;
    }
    s.mse = s.sse / static_cast<double>(s.n);
    s.rmse = std::sqrt(s.mse);
    s.pearson_r = pearson(truth, imputed);
    s.relative_accuracy = static_cast<double>(hits) / static_cast<double>(s.n);
    return s;
}

MetricReport score_masked(const Matrix& truth, const Matrix& imputed, const missingness::Mask& mask,
                          std::vector<std::string> feature_names, double tolerance) {
    if (truth.rows() != imputed.rows() || truth.cols() != imputed.cols() || truth.rows() != mask.rows() ||
        truth.cols() != mask.cols())
        throw InvalidArgument("score_masked: truth, imputed and mask shapes differ");
    if (feature_names.empty())
        for (std::size_t c = 0; c < truth.cols(); ++c) feature_names.push_back("X" + std::to_string(c + 1));
    if (feature_names.size() != truth.cols()) throw InvalidArgument("score_masked: feature name count mismatch");

    MetricReport report;
    report.tolerance = tolerance;
    report.feature_names = std::move(feature_names);
    std::vector<double> all_truth, all_imputed;
    for (std::size_t c = 0; c < truth.cols(); ++c) {
        std::vector<double> t, m;
        for (std::size_t r = 0; r < truth.rows(); ++r)
            if (mask(r, c)) {
                t.push_back(truth(r, c));
                m.push_back(imputed(r, c));
            }
        report.per_feature.push_back(t.empty() ? Scores{} : score(t, m, tolerance));
        all_truth.insert(all_truth.end(), t.begin(), t.end());
        all_imputed.insert(all_imputed.end(), m.begin(), m.end());
    }
    report.overall = score(all_truth, all_imputed, tolerance);
    return report;
}

namespace {

std::string number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_scores(std::ostringstream& os, const std::string& prefix, const Scores& s) {
    os << prefix << "n_imputed=" << s.n << '\n';
    os << prefix << "mse=" << number(s.mse) << '\n';
    os << prefix << "rmse=" << number(s.rmse) << '\n';
    os << prefix << "sse=" << number(s.sse) << '\n';
    os << prefix << "pearson_r=" << (s.pearson_r ? number(*s.pearson_r) : std::string("undefined")) << '\n';
    os << prefix << "relative_accuracy=" << number(s.relative_accuracy) << '\n';
}

nlohmann::json scores_json(const Scores& s) {
    return {{"n_imputed", s.n},
            {"mse", s.mse},
            {"rmse", s.rmse},
            {"sse", s.sse},
            {"pearson_r", s.pearson_r ? nlohmann::json(*s.pearson_r) : nlohmann::json(nullptr)},
            {"relative_accuracy", s.relative_accuracy}};
}

}  // namespace

std::string to_key_value(const MetricReport& report) {
    std::ostringstream os;
    os << "tolerance=" << number(report.tolerance) << '\n';
    write_scores(os, "", report.overall);
    for (std::size_t c = 0; c < report.per_feature.size(); ++c)
        if (report.per_feature[c].n > 0) write_scores(os, report.feature_names[c] + ".", report.per_feature[c]);
    return os.str();
}

std::string to_json(const MetricReport& report) {
    nlohmann::json doc;
    doc["tolerance"] = report.tolerance;
    doc["overall"] = scores_json(report.overall);
    nlohmann::json features = nlohmann::json::object();
    for (std::size_t c = 0; c < report.per_feature.size(); ++c)
        if (report.per_feature[c].n > 0) features[report.feature_names[c]] = scores_json(report.per_feature[c]);
    doc["per_feature"] = std::move(features);
    return doc.dump(2) + "\n";
}

namespace {

void check_shapes(const Matrix& data, const missingness::Mask& mask) {
    if (data.rows() != mask.rows() || data.cols() != mask.cols())
        throw ShapeError("mask shape differs from data shape");
}

}  // namespace

Matrix mean_impute(const Matrix& data, const missingness::Mask& mask) {
    check_shapes(data, mask);
    Matrix out = data;
    for (std::size_t c = 0; c < data.cols(); ++c) {
        double sum = 0.0;
        std::size_t observed = 0;
        bool any_missing = false;
        for (std::size_t r = 0; r < data.rows(); ++r) {
            if (mask(r, c)) {
                any_missing = true;
            } else {
                sum += data(r, c);
                ++observed;
            }
        }
        if (!any_missing) continue;
        if (observed == 0) throw DegenerateColumn("column " + std::to_string(c) + " has no observed values");
        const double mean = sum / static_cast<double>(observed);
        for (std::size_t r = 0; r < data.rows(); ++r)
            if (mask(r, c)) out(r, c) = mean;
    }
    return out;
}

Matrix knn_impute(const Matrix& data, const missingness::Mask& mask, std::size_t k) {
    check_shapes(data, mask);
    if (k == 0) throw InvalidArgument("knn_impute: k must be positive");
    Matrix out = data;
    const std::size_t rows = data.rows(), cols = data.cols();

    struct Neighbor {
        double distance;
        std::size_t index;
    };
    std::vector<Neighbor> neighbors;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!mask.row_has_missing(r)) continue;
        neighbors.clear();
        for (std::size_t s = 0; s < rows; ++s) {
            if (s == r) continue;
            double sum = 0.0;
            std::size_t shared = 0;
            for (std::size_t c = 0; c < cols; ++c)
                if (!mask(r, c) && !mask(s, c)) {
                    const double diff = data(r, c) - data(s, c);
                    sum += diff * diff;
                    ++shared;
                }
            if (shared > 0) neighbors.push_back({std::sqrt(sum / static_cast<double>(shared)), s});
        }
        std::sort(neighbors.begin(), neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
            return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
        });
        for (std::size_t c = 0; c < cols; ++c) {
            if (!mask(r, c)) continue;
            double sum = 0.0;
            std::size_t used = 0;
            for (const Neighbor& nb : neighbors) {
                if (used == k) break;
                if (mask(nb.index, c)) continue;
                sum += data(nb.index, c);
                ++used;
            }
            if (used < k)
                throw InsufficientDonors("record " + std::to_string(r) + ", column " + std::to_string(c) + ": only " +
                                         std::to_string(used) + " donors for k=" + std::to_string(k));
            out(r, c) = sum / static_cast<double>(used);
        }
    }
    return out;
}

}  // namespace aeimpute::eval

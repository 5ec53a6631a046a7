#include "aeimpute/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "aeimpute/errors.hpp"
#include "aeimpute/random.hpp"

namespace aeimpute::data {

std::vector<NormStats> compute_stats(const Matrix& values) {
    std::vector<NormStats> stats(values.cols(), NormStats{0.0, 0.0});
    for (std::size_t c = 0; c < values.cols(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < values.rows(); ++r) {
            const double v = values(r, c);
            if (std::isnan(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo <= hi) stats[c] = {lo, hi};
    }
    return stats;
}

Matrix normalize(const Matrix& values, const std::vector<NormStats>& stats, bool clamp) {
    if (stats.size() != values.cols()) throw ShapeError("normalization stats do not match feature count");
    Matrix out = values;
    for (std::size_t r = 0; r < values.rows(); ++r)
        for (std::size_t c = 0; c < values.cols(); ++c) {
            double& v = out(r, c);
            if (std::isnan(v)) continue;
            v = stats[c].normalize(v);
            if (clamp) v = std::clamp(v, 0.0, 1.0);
        }
    return out;
}

Matrix denormalize(const Matrix& values, const std::vector<NormStats>& stats) {
    if (stats.size() != values.cols()) throw ShapeError("normalization stats do not match feature count");
    Matrix out = values;
    for (std::size_t r = 0; r < values.rows(); ++r)
        for (std::size_t c = 0; c < values.cols(); ++c)
            if (!std::isnan(out(r, c))) out(r, c) = stats[c].denormalize(out(r, c));
    return out;
}

std::vector<std::size_t> complete_records(const Matrix& values) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < values.rows(); ++r) {
        const auto row = values.row(r);
        if (std::none_of(row.begin(), row.end(), [](double v) { return std::isnan(v); })) rows.push_back(r);
    }
    return rows;
}

Matrix select_rows(const Matrix& values, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) std::copy_n(values.row(rows[i]).begin(), values.cols(), out.row(i).begin());
    return out;
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    // Trailing blank lines carry no records.
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& source) {
    std::string body = text;
    if (body.starts_with("\xEF\xBB\xBF")) body.erase(0, 3);
    const std::vector<std::string> lines = lines_of(body);
    if (lines.empty()) throw ParseError(source, 0, 0, "empty file, expected a header row");

    Dataset ds;
    ds.feature_names = split_fields(lines[0]);
    const std::size_t cols = ds.feature_names.size();
    for (std::size_t c = 0; c < cols; ++c)
        if (ds.feature_names[c].empty()) throw ParseError(source, 1, c + 1, "empty column name in header");

    ds.values = Matrix(lines.size() - 1, cols);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> fields = split_fields(lines[i]);
        if (fields.size() != cols)
            throw ParseError(source, i + 1, 0,
                             "expected " + std::to_string(cols) + " fields, found " + std::to_string(fields.size()));
        for (std::size_t c = 0; c < cols; ++c) {
            const std::string& f = fields[c];
            double& cell = ds.values(i - 1, c);
            if (f.empty() || f == "?") {
                cell = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const char* begin = f.data();
            const char* end = f.data() + f.size();
            if (*begin == '+') ++begin;
            const auto [ptr, ec] = std::from_chars(begin, end, cell);
            if (ec != std::errc() || ptr != end || !std::isfinite(cell))
                throw ParseError(source, i + 1, c + 1, "not a number: '" + f + "'");
        }
    }
    return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
    return parse_csv(read_file(path), path.string());
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string format_csv(const Dataset& data) {
    std::string out;
    for (std::size_t c = 0; c < data.feature_names.size(); ++c) {
        if (c) out += ',';
        out += data.feature_names[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < data.values.rows(); ++r) {
        for (std::size_t c = 0; c < data.values.cols(); ++c) {
            if (c) out += ',';
            const double v = data.values(r, c);
            out += std::isnan(v) ? std::string("?") : format_number(v);
        }
        out += '\n';
    }
    return out;
}

void save_csv(const std::filesystem::path& path, const Dataset& data) { write_file(path, format_csv(data)); }

void save_mask_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const missingness::Mask& mask) {
    if (header.size() != mask.cols()) throw ShapeError("mask header does not match mask width");
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < mask.rows(); ++r) {
        for (std::size_t c = 0; c < mask.cols(); ++c) {
            if (c) out += ',';
            out += mask(r, c) ? '1' : '0';
        }
        out += '\n';
    }
    write_file(path, out);
}

missingness::Mask load_mask_csv(const std::filesystem::path& path) {
    const Dataset flags = load_csv(path);
    missingness::Mask mask(flags.values.rows(), flags.values.cols());
    for (std::size_t r = 0; r < mask.rows(); ++r)
        for (std::size_t c = 0; c < mask.cols(); ++c) {
            const double v = flags.values(r, c);
            if (v != 0.0 && v != 1.0)
                throw ParseError(path.string(), r + 2, c + 1, "mask cells must be 0 or 1");
            mask.set(r, c, v == 1.0);
        }
    return mask;
}

Dataset synthetic_correlated(std::size_t records, std::uint64_t seed, double noise) {
    // Rows: X4..X7 as {intercept, weight on X1, X2, X3}.
    static constexpr double kAffine[4][4] = {
        {0.10, 0.50, 0.30, 0.20},
        {0.60, 0.40, -0.30, -0.20},
        {0.20, -0.20, 0.50, 0.40},
        {0.30, 0.30, 0.30, -0.40},
    };
    Dataset ds;
    ds.feature_names = {"X1", "X2", "X3", "X4", "X5", "X6", "X7"};
    ds.values = Matrix(records, 7);
    Rng rng(seed);
    for (std::size_t r = 0; r < records; ++r) {
        auto row = ds.values.row(r);
        for (std::size_t j = 0; j < 3; ++j) row[j] = rng.uniform();
        for (std::size_t k = 0; k < 4; ++k) {
            const double* a = kAffine[k];
            row[3 + k] = a[0] + a[1] * row[0] + a[2] * row[1] + a[3] * row[2] + rng.normal(0.0, noise);
        }
    }
    return ds;
}

}  // namespace aeimpute::data

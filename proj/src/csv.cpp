#include "diwe/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <unordered_map>

namespace diwe {

void write_stream_csv(const Stream& stream, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open stream file for writing: " + path);
    for (std::size_t i = 0; i < stream.schema.n; ++i) out << 'f' << i << ',';
    out << "label\n";
    char buf[40];
    for (const LabeledInstance& inst : stream.instances) {
        for (double v : inst.features) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ',';
        }
        out << inst.label << '\n';
    }
    if (!out) throw DataError("stream write failed: " + path);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t lo = 0, hi = s.size();
    while (lo < hi && (s[lo] == ' ' || s[lo] == '\t' || s[lo] == '\r')) ++lo;
    while (hi > lo && (s[hi - 1] == ' ' || s[hi - 1] == '\t' || s[hi - 1] == '\r')) --hi;
    return s.substr(lo, hi - lo);
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

bool parse_nonneg_int(const std::string& s, long& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtol(s.c_str(), &end, 10);
    return end == s.c_str() + s.size() && out >= 0;
}

}  // namespace

Stream ingest_csv(const IngestionSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) throw DataError("cannot open data file: " + spec.path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(spec.path + ": empty file");
    const std::vector<std::string> header = split_row(line);
    if (header.size() < 2) throw DataError(spec.path + ": header needs >= 2 columns");

    // resolve label column
    std::size_t label_col = header.size() - 1;
    if (!spec.label_column.empty()) {
        auto it = std::find(header.begin(), header.end(), spec.label_column);
        if (it == header.end())
            throw DataError(spec.path + ": label column '" + spec.label_column + "' not found");
        label_col = static_cast<std::size_t>(it - header.begin());
    } else if (auto it = std::find(header.begin(), header.end(), "label"); it != header.end()) {
        label_col = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::size_t> feature_cols;
    std::vector<bool> is_nominal;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == label_col) continue;
        feature_cols.push_back(i);
        is_nominal.push_back(std::find(spec.nominal_columns.begin(), spec.nominal_columns.end(),
                                       header[i]) != spec.nominal_columns.end());
    }
    for (const std::string& name : spec.nominal_columns)
        if (std::find(header.begin(), header.end(), name) == header.end())
            throw DataError(spec.path + ": nominal column '" + name + "' not found");

    // read raw rows
    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_row(line);
        if (cells.size() != header.size())
            throw DataError(spec.path + " line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw DataError(spec.path + ": no data rows");

    const std::size_t fit_rows =
        spec.fit_prefix == 0 ? rows.size() : std::min(spec.fit_prefix, rows.size());
    auto line_of = [&](std::size_t row) { return row + 2; };  // header is line 1

    // nominal levels by first appearance inside the fit range
    std::vector<std::vector<std::string>> levels(feature_cols.size());
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
        if (!is_nominal[f]) continue;
        for (std::size_t r = 0; r < fit_rows; ++r) {
            const std::string& v = rows[r][feature_cols[f]];
            if (std::find(levels[f].begin(), levels[f].end(), v) == levels[f].end())
                levels[f].push_back(v);
        }
    }

    // label mapping
    bool numeric_labels = true;
    long max_label = 0;
    for (const auto& row : rows) {
        long v;
        if (!parse_nonneg_int(row[label_col], v)) {
            numeric_labels = false;
            break;
        }
        max_label = std::max(max_label, v);
    }
    std::vector<std::string> label_levels;
    if (!numeric_labels) {
        for (std::size_t r = 0; r < fit_rows; ++r) {
            const std::string& v = rows[r][label_col];
            if (std::find(label_levels.begin(), label_levels.end(), v) == label_levels.end())
                label_levels.push_back(v);
        }
    }

    // expanded width
    std::size_t width = 0;
    for (std::size_t f = 0; f < feature_cols.size(); ++f)
        width += is_nominal[f] ? levels[f].size() : 1;

    Stream stream;
    stream.schema.n = width;
    stream.schema.c =
        numeric_labels ? static_cast<std::size_t>(max_label) + 1 : label_levels.size();
    if (stream.schema.c < 2) stream.schema.c = 2;  // degenerate single-class file
    stream.schema.class_names = label_levels;
    stream.instances.reserve(rows.size());

    for (std::size_t r = 0; r < rows.size(); ++r) {
        LabeledInstance inst;
        inst.t = r + 1;
        inst.features.reserve(width);
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            const std::string& cell = rows[r][feature_cols[f]];
            if (is_nominal[f]) {
                auto it = std::find(levels[f].begin(), levels[f].end(), cell);
                if (it == levels[f].end())
                    throw DataError(spec.path + " line " + std::to_string(line_of(r)) +
                                    ": unseen level '" + cell + "' in column '" +
                                    header[feature_cols[f]] + "'");
                const std::size_t hot = static_cast<std::size_t>(it - levels[f].begin());
                for (std::size_t l = 0; l < levels[f].size(); ++l)
                    inst.features.push_back(l == hot ? 1.0 : 0.0);
            } else {
                double v;
                if (!parse_double(cell, v))
                    throw DataError(spec.path + " line " + std::to_string(line_of(r)) +
                                    ": cannot parse '" + cell + "' in column '" +
                                    header[feature_cols[f]] + "'");
                inst.features.push_back(v);
            }
        }
        if (numeric_labels) {
            long v = 0;
            parse_nonneg_int(rows[r][label_col], v);
            inst.label = static_cast<int>(v);
        } else {
            auto it = std::find(label_levels.begin(), label_levels.end(), rows[r][label_col]);
            if (it == label_levels.end())
                throw DataError(spec.path + " line " + std::to_string(line_of(r)) +
                                ": unseen label '" + rows[r][label_col] + "'");
            inst.label = static_cast<int>(it - label_levels.begin());
        }
        stream.instances.push_back(std::move(inst));
    }

    if (spec.normalize) {
        std::vector<double> lo(width, std::numeric_limits<double>::infinity());
        std::vector<double> hi(width, -std::numeric_limits<double>::infinity());
        for (std::size_t r = 0; r < fit_rows; ++r)
            for (std::size_t f = 0; f < width; ++f) {
                lo[f] = std::min(lo[f], stream.instances[r].features[f]);
                hi[f] = std::max(hi[f], stream.instances[r].features[f]);
            }
        for (LabeledInstance& inst : stream.instances)
            for (std::size_t f = 0; f < width; ++f) {
                const double span = hi[f] - lo[f];
                inst.features[f] = span > 0.0 ? (inst.features[f] - lo[f]) / span : 0.0;
            }
    }
    return stream;
}

}  // namespace diwe

// Copyright 2026 The zeno-dyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zeno/channel.hpp"

namespace zeno::io {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// Matrix serialization: an array of rows, each entry a [re, im] pair.
inline json operator_to_json(const ComplexOperator& a) {
    json rows = json::array();
    for (Index r = 0; r < a.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < a.cols(); ++c)
            row.push_back(json::array({a(r, c).real(), a(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexOperator operator_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw ValidationError("operator_from_json: expected a non-empty array of rows");
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j.front().size());
    ComplexOperator out(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const json& row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw ValidationError("operator_from_json: ragged rows");
        for (Index c = 0; c < cols; ++c) {
            const json& entry = row.at(static_cast<std::size_t>(c));
            if (!entry.is_array() || entry.size() != 2)
                throw ValidationError("operator_from_json: entries must be [re, im] pairs");
            out(r, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
        }
    }
    return out;
}

inline json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("parse error in '" + path + "': " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

inline void write_json(const std::string& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

inline ComplexOperator load_operator(const std::string& path) {
    const json j = parse_file(path);
    // Accept either a bare matrix or {"matrix": ...}.
    return operator_from_json(j.is_object() ? j.at("matrix") : j);
}

inline void save_operator(const std::string& path, const ComplexOperator& a) {
    write_json(path, operator_to_json(a));
}

/// Channel files: { "dim": d, "kraus": [matrix, ...], "labels": [...] }.
inline json channel_to_json(const KrausChannel& channel) {
    json j;
    j["dim"] = channel.dim();
    j["kraus"] = json::array();
    for (const auto& m : channel.kraus()) j["kraus"].push_back(operator_to_json(m));
    if (!channel.labels().empty()) j["labels"] = channel.labels();
    return j;
}

struct RawChannel {
    Index dim = 0;
    std::vector<ComplexOperator> kraus;
    std::vector<std::string> labels;
};

/// Parse without the completeness gate, so `validate` can report violations.
inline RawChannel raw_channel_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kraus"))
        throw ValidationError("channel JSON must be an object with a 'kraus' array");
    RawChannel raw;
    for (const json& m : j.at("kraus")) raw.kraus.push_back(operator_from_json(m));
    if (raw.kraus.empty()) throw ValidationError("channel JSON has an empty 'kraus' array");
    raw.dim = raw.kraus.front().rows();
    if (j.contains("dim") && j.at("dim").get<Index>() != raw.dim)
        throw ValidationError("channel JSON: declared dim " +
                              std::to_string(j.at("dim").get<Index>()) +
                              " does not match Kraus dimension " + std::to_string(raw.dim));
    if (j.contains("labels")) raw.labels = j.at("labels").get<std::vector<std::string>>();
    return raw;
}

inline KrausChannel channel_from_json(const json& j, const Tolerances& tols = {}) {
    RawChannel raw = raw_channel_from_json(j);
    return KrausChannel(std::move(raw.kraus), std::move(raw.labels), tols);
}

inline KrausChannel load_channel(const std::string& path, const Tolerances& tols = {}) {
    return channel_from_json(parse_file(path), tols);
}

inline json tolerances_to_json(const Tolerances& t) {
    return json{{"herm", t.herm},
                {"eig", t.eig},
                {"psd", t.psd},
                {"trace", t.trace},
                {"complete", t.complete},
                {"fix", t.fix},
                {"kernel", t.kernel},
                {"structure", t.structure},
                {"prob", t.prob},
                {"iter_n_max", t.iter_n_max},
                {"compose_cap", t.compose_cap},
                {"decompose_retries", t.decompose_retries},
                {"spectral_dim_cap", t.spectral_dim_cap}};
}

inline Tolerances tolerances_from_json(const json& j, Tolerances base = {}) {
    if (j.contains("herm")) base.herm = j.at("herm").get<double>();
    if (j.contains("eig")) base.eig = j.at("eig").get<double>();
    if (j.contains("psd")) base.psd = j.at("psd").get<double>();
    if (j.contains("trace")) base.trace = j.at("trace").get<double>();
    if (j.contains("complete")) base.complete = j.at("complete").get<double>();
    if (j.contains("fix")) base.fix = j.at("fix").get<double>();
    if (j.contains("kernel")) base.kernel = j.at("kernel").get<double>();
    if (j.contains("structure")) base.structure = j.at("structure").get<double>();
    if (j.contains("prob")) base.prob = j.at("prob").get<double>();
    if (j.contains("iter_n_max")) base.iter_n_max = j.at("iter_n_max").get<long>();
    if (j.contains("compose_cap")) base.compose_cap = j.at("compose_cap").get<long>();
    if (j.contains("decompose_retries"))
        base.decompose_retries = j.at("decompose_retries").get<int>();
    if (j.contains("spectral_dim_cap"))
        base.spectral_dim_cap = j.at("spectral_dim_cap").get<Index>();
    return base;
}

/// FNV-1a over file bytes, for the reproducibility manifest.
inline std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot hash '" + path + "'");
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[4096];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char out[19];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
    return std::string("fnv1a:") + out;
}

/// Fixed-format double for CSV output: full round-trip precision, no locale.
inline std::string format_double(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

struct CsvWriter {
    std::ostringstream out;

    explicit CsvWriter(const std::vector<std::string>& header) {
        for (std::size_t i = 0; i < header.size(); ++i)
            out << (i ? "," : "") << header[i];
        out << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out << (i ? "," : "") << cells[i];
        out << "\n";
    }
    std::string str() const { return out.str(); }
};

}  // namespace zeno::io

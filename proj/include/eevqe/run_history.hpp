// Copyright 2026 The eevqe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Per-iteration energy traces with a configuration snapshot, and their CSV
 * form.
 */
#pragma once
#include "error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace eevqe {

enum class Stage { Mera, Vqe };

[[nodiscard]] inline std::string to_string(Stage s) {
    return s == Stage::Mera ? "mera" : "vqe";
}

[[nodiscard]] inline Stage parse_stage(const std::string &s) {
    if (s == "mera") {
        return Stage::Mera;
    }
    if (s == "vqe") {
        return Stage::Vqe;
    }
    throw Error(ErrorKind::Parse, "unknown stage '" + s + "'");
}

/**
 * @brief Relative error against the exact ground energy, normalized by
 * |E_exact| so that it is non-negative for variational energies.
 */
[[nodiscard]] inline double relative_error(double energy, double exact) {
    return (energy - exact) / std::abs(exact);
}

struct HistoryRow {
    int iteration = 0;
    Stage stage = Stage::Mera;
    /// Energy of the terms as optimized (after the negative shift).
    double shifted_energy = 0.0;
    /// Energy with the total shift added back.
    double energy = 0.0;
    double delta = 0.0;
};

struct RunHistory {
    /// Ordered key/value snapshot of the run configuration.
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<HistoryRow> rows;
    /// Seconds spent; kept out of the CSV so reruns are byte-identical.
    double wall_time = 0.0;

    void set(const std::string &key, const std::string &value) {
        for (auto &kv : metadata) {
            if (kv.first == key) {
                kv.second = value;
                return;
            }
        }
        metadata.emplace_back(key, value);
    }

    [[nodiscard]] std::string get(const std::string &key) const {
        for (const auto &kv : metadata) {
            if (kv.first == key) {
                return kv.second;
            }
        }
        return {};
    }

    void record(int iteration, Stage stage, double shifted_energy,
                double total_shift, double exact) {
        const double e = shifted_energy + total_shift;
        rows.push_back({iteration, stage, shifted_energy, e,
                        relative_error(e, exact)});
    }

    void append(const RunHistory &other) {
        rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    }

    [[nodiscard]] bool empty() const { return rows.empty(); }
    [[nodiscard]] const HistoryRow &back() const { return rows.back(); }
};

namespace detail {

inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline constexpr const char *history_columns =
    "iteration,stage,energy,delta,shifted_energy";

/// Metadata as "# key = value" comment lines followed by the rows.
inline void write_history_csv(std::ostream &os, const RunHistory &h) {
    for (const auto &[k, v] : h.metadata) {
        os << "# " << k << " = " << v << '\n';
    }
    os << history_columns << '\n';
    for (const auto &r : h.rows) {
        os << r.iteration << ',' << to_string(r.stage) << ','
           << detail::csv_double(r.energy) << ','
           << detail::csv_double(r.delta) << ','
           << detail::csv_double(r.shifted_energy) << '\n';
    }
}

[[nodiscard]] inline RunHistory read_history_csv(std::istream &is) {
    RunHistory h;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos) {
                h.metadata.emplace_back(line.substr(2, eq - 2),
                                        line.substr(eq + 3));
            }
            continue;
        }
        if (!header) {
            require(line == history_columns, ErrorKind::Parse,
                    "unexpected history header '" + line + "'");
            header = true;
            continue;
        }
        std::istringstream ls(line);
        std::string field;
        HistoryRow r;
        std::getline(ls, field, ',');
        r.iteration = std::stoi(field);
        std::getline(ls, field, ',');
        r.stage = parse_stage(field);
        std::getline(ls, field, ',');
        r.energy = std::stod(field);
        std::getline(ls, field, ',');
        r.delta = std::stod(field);
        std::getline(ls, field, ',');
        r.shifted_energy = std::stod(field);
        h.rows.push_back(r);
    }
    require(header, ErrorKind::Parse, "history has no column header");
    return h;
}

inline void save_history(const std::string &path, const RunHistory &h) {
    std::ofstream os(path);
    require(static_cast<bool>(os), ErrorKind::Io, "cannot write " + path);
    write_history_csv(os, h);
}

[[nodiscard]] inline RunHistory load_history(const std::string &path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), ErrorKind::Io, "cannot read " + path);
    return read_history_csv(is);
}

} // namespace eevqe

// Copyright 2026 The compass-coherence Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COMPASS_CODE_IO_H
#define COMPASS_CODE_IO_H

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "compass/code.h"
#include "json.hpp"

namespace compass {

/// Canonical JSON text of a coloring: {"d_x":..,"d_z":..,"cells":[["X"|"Z",..],..]}.
/// A non-null `meta` is stored under a trailing "meta" key, which loaders ignore.
inline std::string coloring_to_json(const Coloring &coloring, const nlohmann::ordered_json &meta = nullptr) {
    nlohmann::ordered_json j;
    j["d_x"] = coloring.d_x;
    j["d_z"] = coloring.d_z;
    j["cells"] = nlohmann::ordered_json::array();
    // d_x = 1 has no cell rows; d_z = 1 gives (d_x - 1) empty rows.
    for (size_t r = 0; r < coloring.cell_rows(); r++) {
        auto row = nlohmann::ordered_json::array();
        for (size_t c = 0; c < coloring.cell_cols(); c++) {
            row.push_back(coloring.at(r, c) == Cell::XCut ? "X" : "Z");
        }
        j["cells"].push_back(std::move(row));
    }
    if (!meta.is_null()) {
        j["meta"] = meta;
    }
    return j.dump() + "\n";
}

inline Coloring coloring_from_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw std::invalid_argument(std::string("code file is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("d_x") || !j.contains("d_z") || !j.contains("cells")) {
        throw std::invalid_argument("code file must be an object with keys d_x, d_z, cells");
    }
    if (!j["d_x"].is_number_unsigned() || !j["d_z"].is_number_unsigned() || !j["cells"].is_array()) {
        throw std::invalid_argument("code file: d_x and d_z must be non-negative integers and cells an array");
    }
    Coloring coloring;
    coloring.d_x = j["d_x"].get<size_t>();
    coloring.d_z = j["d_z"].get<size_t>();
    if (coloring.d_x < 1 || coloring.d_z < 1) {
        throw std::invalid_argument("code file: d_x and d_z must be at least 1");
    }
    const auto &rows = j["cells"];
    if (rows.size() != coloring.cell_rows()) {
        throw std::invalid_argument(
            "code file: expected " + std::to_string(coloring.cell_rows()) + " cell rows, got " +
            std::to_string(rows.size()));
    }
    for (const auto &row : rows) {
        if (!row.is_array() || row.size() != coloring.cell_cols()) {
            throw std::invalid_argument(
                "code file: every cell row must have " + std::to_string(coloring.cell_cols()) + " entries");
        }
        for (const auto &cell : row) {
            if (cell == "X") {
                coloring.cells.push_back(Cell::XCut);
            } else if (cell == "Z") {
                coloring.cells.push_back(Cell::ZCut);
            } else {
                throw std::invalid_argument("code file: cells must be \"X\" or \"Z\", got " + cell.dump());
            }
        }
    }
    coloring.check();
    return coloring;
}

inline Coloring load_coloring(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open code file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return coloring_from_json(buffer.str());
}

inline void save_coloring(const Coloring &coloring, const std::string &path,
                          const nlohmann::ordered_json &meta = nullptr) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write code file '" + path + "'");
    }
    out << coloring_to_json(coloring, meta);
}

}  // namespace compass

#endif  // COMPASS_CODE_IO_H

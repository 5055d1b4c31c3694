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

#ifndef COMPASS_SWEEP_IO_H
#define COMPASS_SWEEP_IO_H

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "compass/experiments.h"
#include "json.hpp"

namespace compass {

inline constexpr const char *kSweepColumns =
    "family,dx,dz,h,q_shor,seed,theta_over_pi,provenance,epsilon,delta,kappa,r1,r1_stderr,diamond,diamond_stderr,"
    "n_codes,n_samples";

namespace detail {

/// Shortest decimal form that parses back to the same double; empty for NaN.
inline std::string format_double(double x) {
    if (std::isnan(x)) {
        return "";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string &s) {
    if (s.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double x = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad number '" + s + "'");
    }
    return x;
}

inline uint64_t parse_uint(const std::string &s) {
    if (s.empty()) {
        return 0;
    }
    uint64_t x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad integer '" + s + "'");
    }
    return x;
}

inline nlohmann::ordered_json json_number(double x) {
    if (std::isnan(x)) {
        return nullptr;
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    return x;
}

inline double json_double(const nlohmann::json &j) {
    if (j.is_null()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (j.is_string()) {
        return parse_double(j.get<std::string>());
    }
    return j.get<double>();
}

inline bool random_row(const SweepRow &row) {
    return row.family == "random";
}

}  // namespace detail

/// CSV with one leading "# {meta}" line. Unused fields are left empty.
inline void write_csv(const SweepTable &table, std::ostream &out) {
    using detail::format_double;
    out << "# " << table.meta.dump() << "\n";
    out << kSweepColumns << "\n";
    for (const auto &r : table.rows) {
        bool random = detail::random_row(r);
        out << r.family << ',' << r.dx << ',' << r.dz << ',' << (r.h ? std::to_string(r.h) : "") << ','
            << format_double(r.q_shor) << ',' << (random ? std::to_string(r.seed) : "") << ','
            << format_double(r.theta_over_pi) << ',' << to_string(r.provenance) << ',' << format_double(r.epsilon)
            << ',' << format_double(r.delta) << ',' << format_double(r.kappa) << ',' << format_double(r.r1) << ','
            << format_double(r.r1_stderr) << ',' << format_double(r.diamond) << ','
            << format_double(r.diamond_stderr) << ',' << r.n_codes << ',' << r.n_samples << "\n";
    }
}

inline SweepTable read_csv(std::istream &in) {
    SweepTable table;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::string body = line.substr(1);
            auto parsed = nlohmann::ordered_json::parse(body, nullptr, false);
            if (!parsed.is_discarded() && parsed.is_object()) {
                table.meta = parsed;
            }
            continue;
        }
        if (!header) {
            if (line != kSweepColumns) {
                throw std::invalid_argument("unexpected CSV header: " + line);
            }
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            f.push_back("");
        }
        if (f.size() != 17) {
            throw std::invalid_argument("expected 17 CSV fields, got " + std::to_string(f.size()));
        }
        SweepRow r;
        r.family = f[0];
        r.dx = detail::parse_uint(f[1]);
        r.dz = detail::parse_uint(f[2]);
        r.h = detail::parse_uint(f[3]);
        r.q_shor = detail::parse_double(f[4]);
        r.seed = detail::parse_uint(f[5]);
        r.theta_over_pi = detail::parse_double(f[6]);
        r.provenance = parse_provenance(f[7]);
        r.epsilon = detail::parse_double(f[8]);
        r.delta = detail::parse_double(f[9]);
        r.kappa = detail::parse_double(f[10]);
        r.r1 = detail::parse_double(f[11]);
        r.r1_stderr = detail::parse_double(f[12]);
        r.diamond = detail::parse_double(f[13]);
        r.diamond_stderr = detail::parse_double(f[14]);
        r.n_codes = detail::parse_uint(f[15]);
        r.n_samples = detail::parse_uint(f[16]);
        table.rows.push_back(r);
    }
    if (!header) {
        throw std::invalid_argument("missing CSV header");
    }
    return table;
}

inline nlohmann::ordered_json to_json(const SweepTable &table) {
    using detail::json_number;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &r : table.rows) {
        bool random = detail::random_row(r);
        nlohmann::ordered_json j;
        j["family"] = r.family;
        j["dx"] = r.dx;
        j["dz"] = r.dz;
        j["h"] = r.h ? nlohmann::ordered_json(r.h) : nlohmann::ordered_json(nullptr);
        j["q_shor"] = json_number(r.q_shor);
        j["seed"] = random ? nlohmann::ordered_json(r.seed) : nlohmann::ordered_json(nullptr);
        j["theta_over_pi"] = json_number(r.theta_over_pi);
        j["provenance"] = to_string(r.provenance);
        j["epsilon"] = json_number(r.epsilon);
        j["delta"] = json_number(r.delta);
        j["kappa"] = json_number(r.kappa);
        j["r1"] = json_number(r.r1);
        j["r1_stderr"] = json_number(r.r1_stderr);
        j["diamond"] = json_number(r.diamond);
        j["diamond_stderr"] = json_number(r.diamond_stderr);
        j["n_codes"] = r.n_codes;
        j["n_samples"] = r.n_samples;
        rows.push_back(std::move(j));
    }
    nlohmann::ordered_json out;
    out["meta"] = table.meta;
    out["rows"] = std::move(rows);
    return out;
}

inline SweepTable table_from_json(const nlohmann::json &j) {
    using detail::json_double;
    SweepTable table;
    if (j.contains("meta")) {
        table.meta = nlohmann::ordered_json::parse(j.at("meta").dump());
    }
    for (const auto &x : j.at("rows")) {
        SweepRow r;
        r.family = x.at("family").get<std::string>();
        r.dx = x.at("dx").get<size_t>();
        r.dz = x.at("dz").get<size_t>();
        r.h = x.at("h").is_null() ? 0 : x.at("h").get<size_t>();
        r.q_shor = json_double(x.at("q_shor"));
        r.seed = x.at("seed").is_null() ? 0 : x.at("seed").get<uint64_t>();
        r.theta_over_pi = json_double(x.at("theta_over_pi"));
        r.provenance = parse_provenance(x.at("provenance").get<std::string>());
        r.epsilon = json_double(x.at("epsilon"));
        r.delta = json_double(x.at("delta"));
        r.kappa = json_double(x.at("kappa"));
        r.r1 = json_double(x.at("r1"));
        r.r1_stderr = json_double(x.at("r1_stderr"));
        r.diamond = json_double(x.at("diamond"));
        r.diamond_stderr = json_double(x.at("diamond_stderr"));
        r.n_codes = x.at("n_codes").get<size_t>();
        r.n_samples = x.at("n_samples").get<size_t>();
        table.rows.push_back(r);
    }
    return table;
}

inline bool is_json_path(const std::string &path) {
    return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

/// Writes CSV, or JSON when the path ends in ".json".
inline void save_table(const SweepTable &table, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    if (is_json_path(path)) {
        out << to_json(table).dump(2) << "\n";
    } else {
        write_csv(table, out);
    }
    if (!out) {
        throw std::runtime_error("failed writing " + path);
    }
}

inline SweepTable load_table(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    if (is_json_path(path)) {
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) {
            throw std::invalid_argument(path + " is not valid JSON");
        }
        return table_from_json(j);
    }
    return read_csv(in);
}

}  // namespace compass

#endif  // COMPASS_SWEEP_IO_H

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

#ifndef COMPASS_EXPERIMENTS_H
#define COMPASS_EXPERIMENTS_H

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "compass/analytic.h"
#include "compass/code.h"
#include "compass/exact_backend.h"
#include "compass/parallel.h"
#include "compass/pauli_channel.h"
#include "compass/version.h"
#include "json.hpp"

namespace compass {

enum class Provenance : uint8_t { Analytic, Exact, Sampled };
enum class Metric : uint8_t { R1, Diamond };

inline const char *to_string(Provenance p) {
    switch (p) {
        case Provenance::Analytic:
            return "analytic";
        case Provenance::Exact:
            return "exact";
        case Provenance::Sampled:
            return "sampled";
    }
    return "";
}

inline Provenance parse_provenance(const std::string &s) {
    if (s == "analytic") return Provenance::Analytic;
    if (s == "exact") return Provenance::Exact;
    if (s == "sampled") return Provenance::Sampled;
    throw std::invalid_argument("unknown provenance '" + s + "'");
}

inline const char *to_string(Metric m) {
    return m == Metric::R1 ? "r1" : "diamond";
}

inline Metric parse_metric(const std::string &s) {
    if (s == "r1") return Metric::R1;
    if (s == "diamond") return Metric::Diamond;
    throw std::invalid_argument("unknown metric '" + s + "' (expected r1 or diamond)");
}

inline const char *to_string(Recovery r) {
    return r == Recovery::ML ? "ml" : "minweight";
}

inline Recovery parse_recovery(const std::string &s) {
    if (s == "minweight") return Recovery::MinWeight;
    if (s == "ml") return Recovery::ML;
    throw std::invalid_argument("unknown recovery '" + s + "' (expected minweight or ml)");
}

// ---------------------------------------------------------------------------
// Seeds

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for a tuple of keys under a base seed.
inline uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> keys) {
    uint64_t h = splitmix64(seed);
    for (uint64_t k : keys) {
        h = splitmix64(h ^ splitmix64(k));
    }
    return h;
}

namespace detail {

inline uint64_t double_key(double x) {
    return std::bit_cast<uint64_t>(x);
}

inline double uniform53(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline constexpr uint64_t kColoringStream = 0;
inline constexpr uint64_t kSampleStream = 1;

}  // namespace detail

/// Seed of the code_index-th random coloring of an ensemble.
inline uint64_t ensemble_coloring_seed(uint64_t seed, size_t d_x, size_t d_z, double q_shor, size_t code_index) {
    return derive_seed(seed, {detail::kColoringStream, d_x, d_z, detail::double_key(q_shor), code_index});
}

/// Seed of the syndrome draws for one code of an ensemble at one angle.
inline uint64_t ensemble_sample_seed(
    uint64_t seed, size_t d_x, size_t d_z, double q_shor, size_t code_index, double theta_over_pi) {
    return derive_seed(seed, {detail::kSampleStream, d_x, d_z, detail::double_key(q_shor), code_index,
                              detail::double_key(theta_over_pi)});
}

// ---------------------------------------------------------------------------
// Ensembles

struct EnsembleEstimate {
    double theta_over_pi = 0.0;
    double q_shor = 0.0;
    double q_shor_realized = 0.0;  // mean XCut fraction of the drawn codes
    double epsilon = 0.0;
    double delta = 0.0;
    double r1 = 0.0;
    double r1_stderr = 0.0;
    double diamond = 0.0;
    double diamond_stderr = 0.0;
    // Components of the standard error: spread of the exact per-code values,
    // and syndrome sampling noise (zero without sampling).
    double r1_code_stderr = 0.0;
    double r1_shot_stderr = 0.0;
    double diamond_code_stderr = 0.0;
    double diamond_shot_stderr = 0.0;
    size_t n_codes = 0;
    size_t n_samples = 0;
};

struct EnsembleConfig {
    size_t d_x = 3;
    size_t d_z = 3;
    double q_shor = 0.5;
    size_t n_codes = 1;
    size_t n_samples = 0;  // 0 = exact metrics per code
    uint64_t seed = 0;
    Recovery recovery = Recovery::MinWeight;
};

namespace detail {

struct Moments {
    double mean_ = 0.0;
    double m2 = 0.0;
    size_t count = 0;

    void add(double x) {
        count++;
        double d = x - mean_;
        mean_ += d / static_cast<double>(count);
        m2 += d * (x - mean_);
    }
    void merge(const Moments &o) {
        if (o.count == 0) {
            return;
        }
        const double n = static_cast<double>(count), k = static_cast<double>(o.count);
        const double d = o.mean_ - mean_;
        mean_ += d * k / (n + k);
        m2 += o.m2 + d * d * n * k / (n + k);
        count += o.count;
    }
    double mean() const {
        return mean_;
    }
    /// Unbiased sample variance.
    double variance() const {
        return count < 2 ? 0.0 : std::max(m2 / static_cast<double>(count - 1), 0.0);
    }
};

struct CodeStats {
    double q_realized = 0.0;
    // exact per-code values
    double epsilon = 0.0;
    double delta = 0.0;
    double diamond = 0.0;
    // sampled values (unused when n_samples = 0)
    Moments one_minus_cos;
    Moments sine;
    Moments diamond_samples;
};

inline double stderr_of(const std::vector<double> &xs) {
    Moments m;
    for (double x : xs) {
        m.add(x);
    }
    return m.count < 2 ? 0.0 : std::sqrt(m.variance() / static_cast<double>(m.count));
}

inline CodeStats code_stats(const std::vector<ResolvedSyndrome> &table, size_t n_samples, uint64_t sample_seed) {
    CodeStats stats;
    for (const auto &e : table) {
        double half = std::sin(e.theta_s / 2.0);
        stats.epsilon += e.probability * 2.0 * half * half;
        stats.delta += e.probability * std::sin(e.theta_s);
        stats.diamond += e.probability * 2.0 * std::abs(std::sin(e.theta_s));
    }
    if (n_samples == 0) {
        return stats;
    }
    // Inverse-CDF sampling with sorted uniforms: one pass over the table.
    std::mt19937_64 rng(sample_seed);
    std::vector<double> u(n_samples);
    for (double &x : u) {
        x = uniform53(rng);
    }
    std::sort(u.begin(), u.end());
    double cumulative = 0.0;
    size_t j = 0;
    size_t last_nonzero = 0;
    auto score = [&](const ResolvedSyndrome &e) {
        double half = std::sin(e.theta_s / 2.0);
        stats.one_minus_cos.add(2.0 * half * half);
        stats.sine.add(std::sin(e.theta_s));
        stats.diamond_samples.add(2.0 * std::abs(std::sin(e.theta_s)));
    };
    for (size_t s = 0; s < table.size() && j < n_samples; s++) {
        if (table[s].probability <= 0.0) {
            continue;
        }
        last_nonzero = s;
        cumulative += table[s].probability;
        while (j < n_samples && u[j] < cumulative) {
            score(table[s]);
            j++;
        }
    }
    // Rounding can leave the total a hair below 1.
    for (; j < n_samples; j++) {
        score(table[last_nonzero]);
    }
    return stats;
}

inline EnsembleEstimate summarize_ensemble(const EnsembleConfig &cfg, double theta_over_pi,
                                           const std::vector<CodeStats> &codes) {
    EnsembleEstimate est;
    est.theta_over_pi = theta_over_pi;
    est.q_shor = cfg.q_shor;
    est.n_codes = codes.size();
    est.n_samples = cfg.n_samples;
    std::vector<double> r1_exact, diamond_exact;
    for (const auto &c : codes) {
        est.q_shor_realized += c.q_realized;
        r1_exact.push_back(c.epsilon / 3.0);
        diamond_exact.push_back(c.diamond);
    }
    const double k = static_cast<double>(codes.size());
    est.q_shor_realized /= k;
    est.r1_code_stderr = stderr_of(r1_exact);
    est.diamond_code_stderr = stderr_of(diamond_exact);
    if (cfg.n_samples == 0) {
        for (const auto &c : codes) {
            est.epsilon += c.epsilon;
            est.delta += c.delta;
            est.diamond += c.diamond;
        }
        est.epsilon /= k;
        est.delta /= k;
        est.diamond /= k;
        est.r1 = est.epsilon / 3.0;
        est.r1_stderr = est.r1_code_stderr;
        est.diamond_stderr = est.diamond_code_stderr;
        return est;
    }
    // Pool all draws; the shot component averages the within-code variances.
    Moments eps, sine, dia;
    double within_r1 = 0.0, within_dia = 0.0;
    for (const auto &c : codes) {
        eps.merge(c.one_minus_cos);
        sine.merge(c.sine);
        dia.merge(c.diamond_samples);
        within_r1 += c.one_minus_cos.variance() / 9.0;
        within_dia += c.diamond_samples.variance();
    }
    const double total = static_cast<double>(eps.count);
    est.epsilon = eps.mean();
    est.delta = sine.mean();
    est.r1 = est.epsilon / 3.0;
    est.diamond = dia.mean();
    est.r1_stderr = std::sqrt(eps.variance() / 9.0 / total);
    est.diamond_stderr = std::sqrt(dia.variance() / total);
    est.r1_shot_stderr = std::sqrt(within_r1 / k / total);
    est.diamond_shot_stderr = std::sqrt(within_dia / k / total);
    return est;
}

}  // namespace detail

/// Ensemble of random colorings evaluated at several angles. Each code is
/// enumerated once for all angles; the per-code and per-angle random streams
/// come from derive_seed, so the result does not depend on `jobs`.
inline std::vector<EnsembleEstimate> ensemble_sweep(
    const EnsembleConfig &cfg, std::span<const double> thetas_over_pi, size_t jobs = 1) {
    if (!(cfg.q_shor >= 0.0 && cfg.q_shor <= 1.0)) {
        throw std::invalid_argument("q_shor must lie in [0, 1]");
    }
    if (cfg.n_codes == 0) {
        throw std::invalid_argument("n_codes must be positive");
    }
    if (cfg.d_x * cfg.d_z > kMaxExactQubits) {
        throw LimitError("ensembles use the exact backend, limited to " + std::to_string(kMaxExactQubits) +
                         " qubits; got " + std::to_string(cfg.d_x * cfg.d_z));
    }
    std::vector<double> thetas;
    for (double t : thetas_over_pi) {
        thetas.push_back(t * std::numbers::pi);
    }
    std::vector<std::vector<detail::CodeStats>> per_code(cfg.n_codes);
    parallel_for(cfg.n_codes, jobs, [&](size_t k) {
        Coloring coloring =
            random_coloring(cfg.d_x, cfg.d_z, cfg.q_shor, ensemble_coloring_seed(cfg.seed, cfg.d_x, cfg.d_z, cfg.q_shor, k));
        CompassCode code = build_code(coloring);
        auto tables = outcome_tables(code, thetas, cfg.recovery);
        auto &slot = per_code[k];
        for (size_t t = 0; t < thetas.size(); t++) {
            uint64_t s = ensemble_sample_seed(cfg.seed, cfg.d_x, cfg.d_z, cfg.q_shor, k, thetas_over_pi[t]);
            slot.push_back(detail::code_stats(tables[t], cfg.n_samples, s));
            slot.back().q_realized = coloring.xcut_fraction();
        }
    });
    std::vector<EnsembleEstimate> result;
    for (size_t t = 0; t < thetas.size(); t++) {
        std::vector<detail::CodeStats> column;
        for (const auto &slot : per_code) {
            column.push_back(slot[t]);
        }
        result.push_back(detail::summarize_ensemble(cfg, thetas_over_pi[t], column));
    }
    return result;
}

inline EnsembleEstimate ensemble_estimate(const EnsembleConfig &cfg, double theta_over_pi, size_t jobs = 1) {
    double t[] = {theta_over_pi};
    return ensemble_sweep(cfg, t, jobs)[0];
}

/// Monte Carlo estimate of one code's metrics from n_samples syndrome draws
/// of its exact distribution.
inline EnsembleEstimate sampled_estimate(const SyndromeDistribution &dist, size_t n_samples, uint64_t seed) {
    std::vector<ResolvedSyndrome> table;
    for (const auto &e : dist.entries) {
        table.push_back({e.probability, e.theta_s});
    }
    EnsembleConfig cfg;
    cfg.n_samples = n_samples;
    std::vector<detail::CodeStats> codes{detail::code_stats(table, n_samples, seed)};
    return detail::summarize_ensemble(cfg, dist.theta / std::numbers::pi, codes);
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SourceFamily : uint8_t { Repetition, ZShor, XShor, ZStacked, RotatedSurface, Random };
enum class Backend : uint8_t { Analytic, Exact };

inline const char *to_string(SourceFamily f) {
    switch (f) {
        case SourceFamily::Repetition:
            return "rep";
        case SourceFamily::ZShor:
            return "zshor";
        case SourceFamily::XShor:
            return "xshor";
        case SourceFamily::ZStacked:
            return "zstacked";
        case SourceFamily::RotatedSurface:
            return "rsc";
        case SourceFamily::Random:
            return "random";
    }
    return "";
}

inline SourceFamily parse_source_family(const std::string &s) {
    for (auto f : {SourceFamily::Repetition, SourceFamily::ZShor, SourceFamily::XShor, SourceFamily::ZStacked,
                   SourceFamily::RotatedSurface, SourceFamily::Random}) {
        if (s == to_string(f)) {
            return f;
        }
    }
    throw std::invalid_argument("unknown family '" + s + "'");
}

inline const char *to_string(Backend b) {
    return b == Backend::Analytic ? "analytic" : "exact";
}

inline Backend parse_backend(const std::string &s) {
    if (s == "analytic") return Backend::Analytic;
    if (s == "exact") return Backend::Exact;
    throw std::invalid_argument("unknown backend '" + s + "' (expected analytic or exact)");
}

/// What a sweep evaluates at each distance d. Distances grow d_z; d_x equals
/// d unless `d_x` is set (Z-Shor and X-Shor only). Repetition codes have d_x = 1.
struct SweepSource {
    SourceFamily family = SourceFamily::Repetition;
    Backend backend = Backend::Analytic;
    Recovery recovery = Recovery::MinWeight;
    size_t h = 0;
    size_t d_x = 0;
    // random ensembles
    double q_shor = 0.0;
    size_t n_codes = 1;
    size_t n_samples = 0;
    uint64_t seed = 0;

    void check() const {
        if (family == SourceFamily::ZStacked && h == 0) {
            throw std::invalid_argument("zstacked needs h >= 1");
        }
        if (family != SourceFamily::ZStacked && h != 0) {
            throw std::invalid_argument("h applies to zstacked only");
        }
        if (d_x != 0 && family != SourceFamily::ZShor && family != SourceFamily::XShor) {
            throw std::invalid_argument("a fixed d_x applies to zshor and xshor only");
        }
        if (backend == Backend::Analytic &&
            (family == SourceFamily::RotatedSurface || family == SourceFamily::Random)) {
            throw std::invalid_argument(std::string("no closed form for family ") + to_string(family));
        }
        if (backend == Backend::Analytic && recovery == Recovery::ML &&
            (family == SourceFamily::XShor || family == SourceFamily::ZStacked)) {
            throw std::invalid_argument("X-Shor and Z-stacked closed forms are for min-weight recovery only");
        }
        if (family != SourceFamily::Random && (n_samples != 0 || n_codes != 1)) {
            throw std::invalid_argument("codes and samples apply to random ensembles only");
        }
        if (family == SourceFamily::Random && !(q_shor >= 0.0 && q_shor <= 1.0)) {
            throw std::invalid_argument("q_shor must lie in [0, 1]");
        }
    }

    std::pair<size_t, size_t> dims(size_t d) const {
        if (family == SourceFamily::Repetition) {
            return {1, d};
        }
        return {d_x ? d_x : d, d};
    }

    Coloring coloring(size_t d) const {
        auto [dx, dz] = dims(d);
        switch (family) {
            case SourceFamily::Repetition:
            case SourceFamily::ZShor:
                return family_z_shor(dx, dz);
            case SourceFamily::XShor:
                return family_x_shor(dx, dz);
            case SourceFamily::ZStacked:
                return family_z_stacked(d, h);
            case SourceFamily::RotatedSurface:
                return family_rotated_surface(d);
            case SourceFamily::Random:
                break;
        }
        throw std::invalid_argument("random ensembles have no single coloring");
    }

    FamilySpec family_spec(size_t d) const {
        auto [dx, dz] = dims(d);
        switch (family) {
            case SourceFamily::Repetition:
                return {RepetitionFamily{dz}, recovery};
            case SourceFamily::ZShor:
                return {ZShorFamily{dx, dz}, recovery};
            case SourceFamily::XShor:
                return {XShorFamily{dx, dz}, recovery};
            case SourceFamily::ZStacked:
                return {ZStackedFamily{d, h}, recovery};
            default:
                break;
        }
        throw std::invalid_argument(std::string("no closed form for family ") + to_string(family));
    }
};

inline nlohmann::ordered_json to_json(const SweepSource &s) {
    nlohmann::ordered_json j;
    j["family"] = to_string(s.family);
    j["backend"] = to_string(s.backend);
    j["recovery"] = to_string(s.recovery);
    j["h"] = s.h;
    j["d_x"] = s.d_x;
    j["q_shor"] = s.q_shor;
    j["n_codes"] = s.n_codes;
    j["n_samples"] = s.n_samples;
    j["seed"] = s.seed;
    return j;
}

inline SweepSource source_from_json(const nlohmann::json &j) {
    SweepSource s;
    s.family = parse_source_family(j.at("family").get<std::string>());
    s.backend = parse_backend(j.at("backend").get<std::string>());
    s.recovery = parse_recovery(j.at("recovery").get<std::string>());
    s.h = j.at("h").get<size_t>();
    s.d_x = j.at("d_x").get<size_t>();
    s.q_shor = j.at("q_shor").get<double>();
    s.n_codes = j.at("n_codes").get<size_t>();
    s.n_samples = j.at("n_samples").get<size_t>();
    s.seed = j.at("seed").get<uint64_t>();
    s.check();
    return s;
}

/// One (distance, angle) cell of a sweep. NaN marks a value that is not
/// available (diamond of a composed closed form, stderr of an exact row).
struct SweepRow {
    std::string family;
    size_t dx = 0;
    size_t dz = 0;
    size_t h = 0;
    double q_shor = 0.0;
    uint64_t seed = 0;
    double theta_over_pi = 0.0;
    Provenance provenance = Provenance::Analytic;
    double epsilon = 0.0;
    double delta = 0.0;
    double kappa = 0.0;
    double r1 = 0.0;
    double r1_stderr = std::numeric_limits<double>::quiet_NaN();
    double diamond = std::numeric_limits<double>::quiet_NaN();
    double diamond_stderr = std::numeric_limits<double>::quiet_NaN();
    size_t n_codes = 1;
    size_t n_samples = 0;

    double metric(Metric m) const {
        return m == Metric::R1 ? r1 : diamond;
    }
};

struct SweepTable {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    std::vector<SweepRow> rows;
};

namespace detail {

inline SweepRow channel_row(const SweepSource &source, size_t d, double theta_over_pi, const LogicalPTM &ptm,
                            double diamond, double q_realized, Provenance provenance) {
    auto [dx, dz] = source.dims(d);
    SweepRow row;
    row.family = to_string(source.family);
    row.dx = dx;
    row.dz = dz;
    row.h = source.h;
    row.q_shor = q_realized;
    row.theta_over_pi = theta_over_pi;
    row.provenance = provenance;
    row.epsilon = ptm.epsilon;
    row.delta = ptm.delta;
    row.kappa = kappa(ptm);
    row.r1 = r1(ptm);
    row.diamond = diamond;
    return row;
}

inline double analytic_diamond(const SweepSource &source, size_t d, double theta) {
    auto [dx, dz] = source.dims(d);
    switch (source.family) {
        case SourceFamily::Repetition:
            return repetition_diamond(dz, theta, source.recovery);
        case SourceFamily::ZShor:
            return repetition_diamond(dz, static_cast<double>(dx) * theta, source.recovery);
        default:
            return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace detail

/// Rows for one distance of a deterministic (non-ensemble) source.
inline std::vector<SweepRow> evaluate_distance(
    const SweepSource &source, size_t d, std::span<const double> thetas_over_pi, size_t jobs = 1) {
    std::vector<SweepRow> rows;
    if (source.backend == Backend::Analytic) {
        FamilySpec spec = source.family_spec(d);
        double q = family_coloring(spec).xcut_fraction();
        for (double t : thetas_over_pi) {
            double theta = t * std::numbers::pi;
            rows.push_back(detail::channel_row(source, d, t, family_channel(spec, theta),
                                               detail::analytic_diamond(source, d, theta), q, Provenance::Analytic));
        }
        return rows;
    }
    Coloring coloring = source.coloring(d);
    CompassCode code = build_code(coloring);
    std::vector<double> thetas;
    for (double t : thetas_over_pi) {
        thetas.push_back(t * std::numbers::pi);
    }
    auto summaries = exact_summaries(code, thetas, source.recovery, jobs);
    for (size_t i = 0; i < thetas.size(); i++) {
        rows.push_back(detail::channel_row(source, d, thetas_over_pi[i], summaries[i].ptm, summaries[i].diamond,
                                           coloring.xcut_fraction(), Provenance::Exact));
    }
    return rows;
}

/// Gridded metrics for every (distance, angle). Angles are given as theta / pi.
inline SweepTable sweep(const SweepSource &source, std::span<const double> thetas_over_pi,
                        std::span<const size_t> distances, size_t jobs = 1) {
    source.check();
    if (thetas_over_pi.empty()) {
        throw std::invalid_argument("theta grid is empty");
    }
    if (distances.empty()) {
        throw std::invalid_argument("distance list is empty");
    }
    for (size_t i = 1; i < thetas_over_pi.size(); i++) {
        if (!(thetas_over_pi[i] > thetas_over_pi[i - 1])) {
            throw std::invalid_argument("theta grid must be strictly increasing");
        }
    }
    SweepTable table;
    table.meta["tool"] = kToolName;
    table.meta["version"] = kVersion;
    table.meta["source"] = to_json(source);
    table.meta["distances"] = std::vector<size_t>(distances.begin(), distances.end());
    table.meta["thetas_over_pi"] = std::vector<double>(thetas_over_pi.begin(), thetas_over_pi.end());
    if (source.family == SourceFamily::Random) {
        for (size_t d : distances) {
            auto [dx, dz] = source.dims(d);
            EnsembleConfig cfg{dx, dz, source.q_shor, source.n_codes, source.n_samples, source.seed, source.recovery};
            for (const auto &est : ensemble_sweep(cfg, thetas_over_pi, jobs)) {
                SweepRow row;
                row.family = to_string(source.family);
                row.dx = dx;
                row.dz = dz;
                row.q_shor = source.q_shor;
                row.seed = source.seed;
                row.theta_over_pi = est.theta_over_pi;
                row.provenance = source.n_samples ? Provenance::Sampled : Provenance::Exact;
                row.epsilon = est.epsilon;
                row.delta = est.delta;
                row.kappa = kappa(LogicalPTM{est.epsilon, est.delta});
                row.r1 = est.r1;
                row.r1_stderr = est.r1_stderr;
                row.diamond = est.diamond;
                row.diamond_stderr = est.diamond_stderr;
                row.n_codes = est.n_codes;
                row.n_samples = est.n_samples;
                table.rows.push_back(row);
            }
        }
        return table;
    }
    // Cells are independent; each distance fills its own slot.
    std::vector<std::vector<SweepRow>> slots(distances.size());
    if (source.backend == Backend::Analytic) {
        parallel_for(distances.size(), jobs,
                     [&](size_t i) { slots[i] = evaluate_distance(source, distances[i], thetas_over_pi); });
    } else {
        for (size_t i = 0; i < distances.size(); i++) {
            slots[i] = evaluate_distance(source, distances[i], thetas_over_pi, jobs);
        }
    }
    for (auto &slot : slots) {
        table.rows.insert(table.rows.end(), slot.begin(), slot.end());
    }
    return table;
}

/// Metric of a deterministic source at one point, for refinement.
using MetricFunction = std::function<double(size_t distance, double theta_over_pi)>;

inline MetricFunction source_metric(const SweepSource &source, Metric metric, size_t jobs = 1) {
    source.check();
    if (source.family == SourceFamily::Random) {
        return {};
    }
    return [source, metric, jobs](size_t d, double t) {
        double ts[] = {t};
        return evaluate_distance(source, d, ts, jobs)[0].metric(metric);
    };
}

// ---------------------------------------------------------------------------
// Crossings

struct Crossing {
    double lower = 0.0;  // theta / pi
    double upper = 0.0;
    bool refined = false;
    int direction = 0;  // +1: the larger distance becomes worse as theta grows
};

struct PairCrossings {
    size_t d_low = 0;
    size_t d_high = 0;
    std::vector<Crossing> crossings;
};

/// Threshold bracket in units of pi. lower/upper enclose every per-pair
/// crossing. regime_lower/regime_upper are the innermost angles that are
/// clearly below (metric decreasing for every pair) and clearly above
/// (increasing for every pair) around the first such transition.
struct ThresholdEstimate {
    Metric metric = Metric::R1;
    std::vector<PairCrossings> pairs;
    double lower = std::numeric_limits<double>::quiet_NaN();
    double upper = std::numeric_limits<double>::quiet_NaN();
    bool one_sided = false;
    double regime_lower = std::numeric_limits<double>::quiet_NaN();
    double regime_upper = std::numeric_limits<double>::quiet_NaN();

    size_t num_crossings() const {
        size_t n = 0;
        for (const auto &p : pairs) {
            n += p.crossings.size();
        }
        return n;
    }
};

struct CrossingOptions {
    double tolerance = 1e-4;       // refined interval width, in units of pi
    double tie_tolerance = 1e-12;  // relative difference treated as equal
};

namespace detail {

inline int difference_sign(double lo_metric, double hi_metric, double tie) {
    double diff = hi_metric - lo_metric;
    double scale = std::max(std::abs(lo_metric), std::abs(hi_metric));
    if (std::isnan(diff)) {
        throw std::invalid_argument("metric is not available for these rows");
    }
    if (std::abs(diff) <= tie * scale) {
        return 0;
    }
    return diff > 0.0 ? 1 : -1;
}

template <typename Sign>
Crossing bisect(double a, double b, int sign_a, double tolerance, Sign &&sign_at) {
    while (b - a > tolerance) {
        double mid = 0.5 * (a + b);
        int s = sign_at(mid);
        if (s == 0) {
            return {mid, mid, true, -sign_a};
        }
        (s == sign_a ? a : b) = mid;
    }
    return {a, b, true, -sign_a};
}

}  // namespace detail

/// Sign changes of metric(d_next) - metric(d) along the theta grid for each
/// consecutive distance pair. With `refine`, every bracket is bisected on the
/// underlying source down to options.tolerance. Rows are grouped by d_z.
inline ThresholdEstimate find_crossings(const SweepTable &table, Metric metric, const MetricFunction &refine = {},
                                        const CrossingOptions &options = {}) {
    ThresholdEstimate est;
    est.metric = metric;
    std::vector<size_t> distances;
    for (const auto &row : table.rows) {
        if (std::find(distances.begin(), distances.end(), row.dz) == distances.end()) {
            distances.push_back(row.dz);
        }
    }
    std::sort(distances.begin(), distances.end());
    std::vector<double> grid;
    std::vector<std::vector<double>> values(distances.size());
    for (size_t i = 0; i < distances.size(); i++) {
        std::vector<double> thetas;
        for (const auto &row : table.rows) {
            if (row.dz == distances[i]) {
                thetas.push_back(row.theta_over_pi);
                values[i].push_back(row.metric(metric));
            }
        }
        for (size_t k = 1; k < thetas.size(); k++) {
            if (!(thetas[k] > thetas[k - 1])) {
                throw std::invalid_argument("theta values must be strictly increasing per series");
            }
        }
        if (i == 0) {
            grid = thetas;
        } else if (thetas != grid) {
            throw std::invalid_argument("all distances must share one theta grid");
        }
    }
    if (distances.size() < 2) {
        est.one_sided = true;
        return est;
    }
    const size_t g = grid.size();
    const double tie = options.tie_tolerance;
    // signs[p][k]: sign of the difference for pair p at grid point k.
    std::vector<std::vector<int>> signs(distances.size() - 1, std::vector<int>(g));
    for (size_t p = 0; p + 1 < distances.size(); p++) {
        PairCrossings pc{distances[p], distances[p + 1], {}};
        for (size_t k = 0; k < g; k++) {
            signs[p][k] = detail::difference_sign(values[p][k], values[p + 1][k], tie);
        }
        auto sign_at = [&](double t) {
            return detail::difference_sign(refine(pc.d_low, t), refine(pc.d_high, t), tie);
        };
        std::ptrdiff_t last = -1;
        for (size_t k = 0; k < g; k++) {
            int s = signs[p][k];
            if (s == 0) {
                continue;
            }
            if (last >= 0 && signs[p][last] != s) {
                double a = grid[last], b = grid[k];
                if (refine) {
                    pc.crossings.push_back(detail::bisect(a, b, signs[p][last], options.tolerance, sign_at));
                } else {
                    pc.crossings.push_back({a, b, false, s});
                }
            }
            last = static_cast<std::ptrdiff_t>(k);
        }
        est.pairs.push_back(pc);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto &pc : est.pairs) {
        for (const auto &c : pc.crossings) {
            lo = std::min(lo, c.lower);
            hi = std::max(hi, c.upper);
        }
    }
    auto all_equal = [&](size_t k, int want) {
        for (const auto &row : signs) {
            if (row[k] != want) {
                return false;
            }
        }
        return true;
    };
    if (est.num_crossings() > 0) {
        est.lower = lo;
        est.upper = hi;
    } else {
        // One-sided: the threshold lies beyond a grid edge, if the signs agree.
        // Ties (touching curves) do not count against either side.
        est.one_sided = true;
        bool any_below = false, any_above = false;
        for (const auto &row : signs) {
            for (int s : row) {
                any_below = any_below || s < 0;
                any_above = any_above || s > 0;
            }
        }
        bool below = any_below && !any_above;
        bool above = any_above && !any_below;
        if (below) {
            est.lower = grid.back();
            est.upper = std::numeric_limits<double>::infinity();
        } else if (above) {
            est.lower = -std::numeric_limits<double>::infinity();
            est.upper = grid.front();
        }
    }
    // First transition from a clearly-below to a clearly-above grid point.
    std::ptrdiff_t below_at = -1;
    for (size_t k = 0; k < g; k++) {
        if (all_equal(k, -1)) {
            below_at = static_cast<std::ptrdiff_t>(k);
        } else if (all_equal(k, 1) && below_at >= 0) {
            double a = grid[below_at], b = grid[k];
            if (refine) {
                auto classify = [&](double t) {
                    int agreed = 2;
                    for (size_t p = 0; p + 1 < distances.size(); p++) {
                        int s = detail::difference_sign(refine(distances[p], t), refine(distances[p + 1], t), tie);
                        if (agreed == 2) {
                            agreed = s;
                        } else if (agreed != s) {
                            agreed = 0;
                        }
                    }
                    return agreed;
                };
                double lo = a, hi = b;
                while (hi - lo > options.tolerance) {
                    double mid = 0.5 * (lo + hi);
                    (classify(mid) == -1 ? lo : hi) = mid;
                }
                a = lo;
                hi = b;
                while (hi - lo > options.tolerance) {
                    double mid = 0.5 * (lo + hi);
                    (classify(mid) == 1 ? hi : lo) = mid;
                }
                b = hi;
            }
            est.regime_lower = a;
            est.regime_upper = b;
            break;
        }
    }
    return est;
}

// ---------------------------------------------------------------------------
// Interpolation between Z-Shor (q_shor = 0) and X-Shor (q_shor = 1)

struct InterpolationPoint {
    double q_shor = 0.0;
    ThresholdEstimate threshold;
};

struct InterpolationResult {
    SweepTable table;
    std::vector<InterpolationPoint> points;
    // Mean r1 at each grid angle is non-increasing in q_shor, per distance.
    bool r1_monotone_in_q = true;
};

struct InterpolationConfig {
    std::vector<size_t> distances{3, 5};
    std::vector<double> q_shors{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> thetas_over_pi;
    size_t n_codes = 200;
    size_t n_samples = 0;
    uint64_t seed = 0;
    Recovery recovery = Recovery::MinWeight;
};

inline InterpolationResult interpolation_curve(const InterpolationConfig &cfg, size_t jobs = 1) {
    for (size_t i = 1; i < cfg.q_shors.size(); i++) {
        if (!(cfg.q_shors[i] > cfg.q_shors[i - 1])) {
            throw std::invalid_argument("q_shor grid must be strictly increasing");
        }
    }
    InterpolationResult result;
    result.table.meta["tool"] = kToolName;
    result.table.meta["version"] = kVersion;
    for (double q : cfg.q_shors) {
        SweepSource source;
        source.family = SourceFamily::Random;
        source.backend = Backend::Exact;
        source.recovery = cfg.recovery;
        source.q_shor = q;
        source.n_codes = cfg.n_codes;
        source.n_samples = cfg.n_samples;
        source.seed = cfg.seed;
        SweepTable part = sweep(source, cfg.thetas_over_pi, cfg.distances, jobs);
        result.points.push_back({q, find_crossings(part, Metric::R1)});
        result.table.rows.insert(result.table.rows.end(), part.rows.begin(), part.rows.end());
    }
    // Rows are ordered by q, then distance, then theta.
    const size_t per_q = cfg.distances.size() * cfg.thetas_over_pi.size();
    for (size_t qi = 1; qi < cfg.q_shors.size(); qi++) {
        for (size_t i = 0; i < per_q; i++) {
            if (result.table.rows[qi * per_q + i].r1 > result.table.rows[(qi - 1) * per_q + i].r1) {
                result.r1_monotone_in_q = false;
            }
        }
    }
    return result;
}

}  // namespace compass

#endif  // COMPASS_EXPERIMENTS_H

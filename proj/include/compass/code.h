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

#ifndef COMPASS_CODE_H
#define COMPASS_CODE_H

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "compass/f2.h"

namespace compass {

/// A cell of the coloring grid. An XCut cell severs the vertical X strip
/// running through it; a ZCut cell severs the horizontal Z strip.
enum class Cell : uint8_t { XCut, ZCut };

/// Cell grid of a compass code on a d_x x d_z qubit grid.
///
/// Cell (r, c) sits between qubit rows r, r+1 and qubit columns c, c+1.
/// Stored row-major with (d_x - 1) x (d_z - 1) entries.
struct Coloring {
    size_t d_x = 1;
    size_t d_z = 1;
    std::vector<Cell> cells;

    size_t cell_rows() const {
        return d_x - 1;
    }
    size_t cell_cols() const {
        return d_z - 1;
    }
    size_t num_qubits() const {
        return d_x * d_z;
    }

    Cell at(size_t r, size_t c) const {
        return cells[r * cell_cols() + c];
    }

    /// Fraction of XCut cells (q_shor). Zero for an empty grid.
    double xcut_fraction() const {
        if (cells.empty()) {
            return 0.0;
        }
        size_t count = 0;
        for (Cell c : cells) {
            count += c == Cell::XCut;
        }
        return static_cast<double>(count) / static_cast<double>(cells.size());
    }

    /// Throws std::invalid_argument unless d_z is odd and the grid has the right shape.
    void check() const {
        if (d_x < 1 || d_z < 1) {
            throw std::invalid_argument("compass code dimensions must be at least 1");
        }
        if (d_z % 2 == 0) {
            throw std::invalid_argument(
                "d_z must be odd (even distance codes have no logical coherence), got d_z=" + std::to_string(d_z));
        }
        if (cells.size() != cell_rows() * cell_cols()) {
            throw std::invalid_argument(
                "coloring needs " + std::to_string(cell_rows()) + "x" + std::to_string(cell_cols()) +
                " cells, got " + std::to_string(cells.size()));
        }
    }

    friend bool operator==(const Coloring &, const Coloring &) = default;
};

namespace detail {

inline void require_odd(size_t value, const char *name) {
    if (value < 1 || value % 2 == 0) {
        throw std::invalid_argument(std::string(name) + " must be a positive odd integer, got " + std::to_string(value));
    }
}

inline Coloring uniform_coloring(size_t d_x, size_t d_z, Cell cell) {
    if (d_x < 1) {
        throw std::invalid_argument("d_x must be at least 1");
    }
    require_odd(d_z, "d_z");
    Coloring result{d_x, d_z, {}};
    result.cells.assign(result.cell_rows() * result.cell_cols(), cell);
    return result;
}

}  // namespace detail

inline Coloring family_z_shor(size_t d_x, size_t d_z) {
    return detail::uniform_coloring(d_x, d_z, Cell::ZCut);
}

inline Coloring family_x_shor(size_t d_x, size_t d_z) {
    return detail::uniform_coloring(d_x, d_z, Cell::XCut);
}

/// Rotated surface code on an l x l grid: checkerboard with XCut at cell (0, 0).
inline Coloring family_rotated_surface(size_t l) {
    detail::require_odd(l, "l");
    Coloring result{l, l, {}};
    for (size_t r = 0; r + 1 < l; r++) {
        for (size_t c = 0; c + 1 < l; c++) {
            result.cells.push_back((r + c) % 2 == 0 ? Cell::XCut : Cell::ZCut);
        }
    }
    return result;
}

/// Z-stacked Shor code C_{l,h}: floor(l/h) Z-Shor blocks of height h followed
/// by (l mod h) single rows, glued by full-row Z stabilizers.
///
/// A cell row is all-XCut exactly when it separates two blocks.
inline Coloring family_z_stacked(size_t l, size_t h) {
    detail::require_odd(l, "l");
    if (h < 1 || h > l) {
        throw std::invalid_argument(
            "block height h must satisfy 1 <= h <= l, got h=" + std::to_string(h) + " l=" + std::to_string(l));
    }
    size_t stacked_rows = (l / h) * h;
    Coloring result{l, l, {}};
    for (size_t r = 0; r + 1 < l; r++) {
        bool boundary = (r + 1) % h == 0 || r + 1 >= stacked_rows;
        result.cells.insert(result.cells.end(), l - 1, boundary ? Cell::XCut : Cell::ZCut);
    }
    return result;
}

/// Each cell independently XCut with probability q_shor. Deterministic in `seed`.
inline Coloring random_coloring(size_t d_x, size_t d_z, double q_shor, uint64_t seed) {
    if (!(q_shor >= 0.0 && q_shor <= 1.0)) {
        throw std::invalid_argument("q_shor must lie in [0, 1], got " + std::to_string(q_shor));
    }
    Coloring result = detail::uniform_coloring(d_x, d_z, Cell::ZCut);
    std::mt19937_64 rng(seed);
    for (Cell &cell : result.cells) {
        // 53-bit uniform in [0, 1); avoids implementation-defined distributions.
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        cell = u < q_shor ? Cell::XCut : Cell::ZCut;
    }
    return result;
}

/// Hadamard dual: transpose the grid and swap XCut <-> ZCut.
inline Coloring hadamard_dual(const Coloring &coloring) {
    Coloring result{coloring.d_z, coloring.d_x, {}};
    result.cells.resize(coloring.cells.size());
    for (size_t r = 0; r < coloring.cell_rows(); r++) {
        for (size_t c = 0; c < coloring.cell_cols(); c++) {
            Cell flipped = coloring.at(r, c) == Cell::XCut ? Cell::ZCut : Cell::XCut;
            result.cells[c * result.cell_cols() + r] = flipped;
        }
    }
    return result;
}

enum class PauliKind : uint8_t { X, Z };

/// A single-type Pauli operator given by its support. Qubit (r, c) has index r * d_z + c.
struct PauliSupport {
    PauliKind kind = PauliKind::Z;
    BitVector support;

    size_t weight() const {
        return support.popcount();
    }

    friend bool operator==(const PauliSupport &, const PauliSupport &) = default;
};

struct CompassCode {
    Coloring coloring;
    std::vector<PauliSupport> x_stabilizers;
    std::vector<PauliSupport> z_stabilizers;
    PauliSupport logical_z;
    PauliSupport logical_x;

    size_t num_qubits() const {
        return coloring.num_qubits();
    }
    size_t qubit(size_t row, size_t col) const {
        return row * coloring.d_z + col;
    }
};

/// Builds the gauge-fixed compass code of a coloring.
///
/// X stabilizers: each vertical strip between columns c and c+1 is split into
/// maximal row segments at XCut cells. Z stabilizers: each horizontal strip
/// between rows r and r+1 is split into column segments at ZCut cells.
/// Logical Z is row 0, logical X is column 0.
inline CompassCode build_code(const Coloring &coloring) {
    coloring.check();
    const size_t d_x = coloring.d_x;
    const size_t d_z = coloring.d_z;
    const size_t n = coloring.num_qubits();
    CompassCode code;
    code.coloring = coloring;

    for (size_t c = 0; c + 1 < d_z; c++) {
        size_t start = 0;
        for (size_t r = 0; r < d_x; r++) {
            bool cut_below = r + 1 == d_x || coloring.at(r, c) == Cell::XCut;
            if (!cut_below) {
                continue;
            }
            BitVector support(n);
            for (size_t k = start; k <= r; k++) {
                support.set(k * d_z + c);
                support.set(k * d_z + c + 1);
            }
            code.x_stabilizers.push_back({PauliKind::X, std::move(support)});
            start = r + 1;
        }
    }

    for (size_t r = 0; r + 1 < d_x; r++) {
        size_t start = 0;
        for (size_t c = 0; c < d_z; c++) {
            bool cut_right = c + 1 == d_z || coloring.at(r, c) == Cell::ZCut;
            if (!cut_right) {
                continue;
            }
            BitVector support(n);
            for (size_t k = start; k <= c; k++) {
                support.set(r * d_z + k);
                support.set((r + 1) * d_z + k);
            }
            code.z_stabilizers.push_back({PauliKind::Z, std::move(support)});
            start = c + 1;
        }
    }

    code.logical_z = {PauliKind::Z, BitVector(n)};
    for (size_t c = 0; c < d_z; c++) {
        code.logical_z.support.set(c);
    }
    code.logical_x = {PauliKind::X, BitVector(n)};
    for (size_t r = 0; r < d_x; r++) {
        code.logical_x.support.set(r * d_z);
    }
    return code;
}

/// Bits of the X-check syndrome of a Z error, one per X stabilizer.
inline BitVector x_syndrome(const CompassCode &code, const BitVector &z_error) {
    BitVector result(code.x_stabilizers.size());
    for (size_t k = 0; k < code.x_stabilizers.size(); k++) {
        if (code.x_stabilizers[k].support.overlap(z_error) & 1) {
            result.set(k);
        }
    }
    return result;
}

struct ValidationCheck {
    std::string name;
    bool passed;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool ok() const {
        for (const auto &c : checks) {
            if (!c.passed) {
                return false;
            }
        }
        return true;
    }

    const ValidationCheck *find(const std::string &name) const {
        for (const auto &c : checks) {
            if (c.name == name) {
                return &c;
            }
        }
        return nullptr;
    }
};

/// Checks every structural invariant of a compass code with exact F2 arithmetic.
/// Never throws on a malformed code; failures are recorded in the report.
inline ValidationReport validate(const CompassCode &code) {
    ValidationReport report;
    auto add = [&](std::string name, bool passed, std::string detail = {}) {
        report.checks.push_back({std::move(name), passed, std::move(detail)});
    };

    const size_t n = code.num_qubits();
    std::vector<const PauliSupport *> all;
    for (const auto &s : code.x_stabilizers) {
        all.push_back(&s);
    }
    for (const auto &s : code.z_stabilizers) {
        all.push_back(&s);
    }
    all.push_back(&code.logical_z);
    all.push_back(&code.logical_x);

    bool sizes_ok = true;
    for (const auto *p : all) {
        sizes_ok &= p->support.size() == n;
    }
    add("support_sizes", sizes_ok, sizes_ok ? "" : "some support is not over n=" + std::to_string(n) + " qubits");
    if (!sizes_ok) {
        return report;
    }

    bool kinds_ok = code.logical_z.kind == PauliKind::Z && code.logical_x.kind == PauliKind::X;
    for (const auto &s : code.x_stabilizers) {
        kinds_ok &= s.kind == PauliKind::X;
    }
    for (const auto &s : code.z_stabilizers) {
        kinds_ok &= s.kind == PauliKind::Z;
    }
    add("pauli_kinds", kinds_ok);

    size_t count = code.x_stabilizers.size() + code.z_stabilizers.size();
    add("stabilizer_count", n >= 1 && count == n - 1,
        std::to_string(count) + " stabilizers on " + std::to_string(n) + " qubits");

    bool nonempty = true;
    for (const auto *p : all) {
        nonempty &= p->support.any();
    }
    add("nonempty_supports", nonempty);

    bool even = true;
    for (size_t k = 0; k + 2 < all.size(); k++) {
        even &= all[k]->weight() % 2 == 0;
    }
    add("even_stabilizer_weights", even);
    add("odd_logical_z_weight", code.logical_z.weight() % 2 == 1,
        "weight " + std::to_string(code.logical_z.weight()));

    std::string bad_pair;
    for (size_t i = 0; i < code.x_stabilizers.size() && bad_pair.empty(); i++) {
        for (size_t j = 0; j < code.z_stabilizers.size(); j++) {
            if (code.x_stabilizers[i].support.overlap(code.z_stabilizers[j].support) % 2) {
                bad_pair = "X" + std::to_string(i) + " anticommutes with Z" + std::to_string(j);
                break;
            }
        }
    }
    add("xz_stabilizers_commute", bad_pair.empty(), bad_pair);

    bool lz_ok = true;
    for (const auto &s : code.x_stabilizers) {
        lz_ok &= s.support.overlap(code.logical_z.support) % 2 == 0;
    }
    add("logical_z_commutes_with_x_stabilizers", lz_ok);
    bool lx_ok = true;
    for (const auto &s : code.z_stabilizers) {
        lx_ok &= s.support.overlap(code.logical_x.support) % 2 == 0;
    }
    add("logical_x_commutes_with_z_stabilizers", lx_ok);
    add("logicals_anticommute", code.logical_x.support.overlap(code.logical_z.support) % 2 == 1);

    auto max_per_qubit = [n](const std::vector<PauliSupport> &stabs) {
        size_t worst = 0;
        for (size_t q = 0; q < n; q++) {
            size_t c = 0;
            for (const auto &s : stabs) {
                c += s.support[q];
            }
            worst = std::max(worst, c);
        }
        return worst;
    };
    size_t x_max = max_per_qubit(code.x_stabilizers);
    size_t z_max = max_per_qubit(code.z_stabilizers);
    add("x_stabilizers_per_qubit_at_most_2", x_max <= 2, "max " + std::to_string(x_max));
    add("z_stabilizers_per_qubit_at_most_2", z_max <= 2, "max " + std::to_string(z_max));

    std::vector<BitVector> xs, zs;
    for (const auto &s : code.x_stabilizers) {
        xs.push_back(s.support);
    }
    for (const auto &s : code.z_stabilizers) {
        zs.push_back(s.support);
    }
    size_t x_rank = f2_rank(xs, n);
    size_t z_rank = f2_rank(zs, n);
    add("stabilizers_independent", x_rank == xs.size() && z_rank == zs.size(),
        "rank X " + std::to_string(x_rank) + "/" + std::to_string(xs.size()) + ", rank Z " + std::to_string(z_rank) +
            "/" + std::to_string(zs.size()));
    return report;
}

}  // namespace compass

#endif  // COMPASS_CODE_H

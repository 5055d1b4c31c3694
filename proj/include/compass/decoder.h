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

#ifndef COMPASS_DECODER_H
#define COMPASS_DECODER_H

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "compass/code.h"
#include "compass/errors.h"
#include "compass/f2.h"

namespace compass {

/// X-check measurement outcomes, one bit per X stabilizer.
using Syndrome = BitVector;

/// Supports are ranked by weight first, then by their ascending qubit-index
/// lists compared lexicographically (so a support holding the lowest index
/// where two supports differ is preferred). Both decoders return the unique
/// minimum under this order.
inline bool support_precedes(uint64_t a, uint64_t b) {
    int wa = std::popcount(a);
    int wb = std::popcount(b);
    if (wa != wb) {
        return wa < wb;
    }
    uint64_t diff = a ^ b;
    return diff != 0 && (a & diff & (~diff + 1)) != 0;
}

inline bool support_precedes(const BitVector &a, const BitVector &b) {
    size_t wa = a.popcount();
    size_t wb = b.popcount();
    if (wa != wb) {
        return wa < wb;
    }
    size_t first = (a ^ b).first_one();
    return first < a.size() && a[first];
}

/// Largest code for which edge weights are perturbed to realize the tie-break
/// order exactly. Beyond it all edges weigh 1 and ties resolve by scan order.
inline constexpr size_t kMaxTieBreakQubits = 48;

/// Largest number of nodes handled by one subset-DP matching instance.
inline constexpr size_t kMaxMatchingNodes = 24;

/// Optimal matchings of every subset of k nodes, where each node is paired
/// with another node or with the (reusable) boundary.
///
/// cost[S] is the minimum total cost of subset S; choice[S] is the partner of
/// the lowest node of S (itself when it goes to the boundary).
struct SubsetMatchingTable {
    std::vector<uint64_t> cost;
    std::vector<uint8_t> choice;
};

template <typename PairCost, typename BoundaryCost>
SubsetMatchingTable solve_subset_matching(size_t k, PairCost pair_cost, BoundaryCost boundary_cost) {
    if (k > kMaxMatchingNodes) {
        throw LimitError(
            "exact matching supports at most " + std::to_string(kMaxMatchingNodes) + " nodes per component, got " +
            std::to_string(k));
    }
    constexpr uint64_t inf = std::numeric_limits<uint64_t>::max();
    SubsetMatchingTable table;
    size_t count = size_t{1} << k;
    table.cost.assign(count, inf);
    table.choice.assign(count, 0);
    table.cost[0] = 0;
    for (size_t s = 1; s < count; s++) {
        size_t i = std::countr_zero(s);
        size_t rest = s & (s - 1);
        uint64_t best = inf;
        uint8_t pick = static_cast<uint8_t>(i);
        uint64_t to_boundary = boundary_cost(i);
        if (to_boundary != inf && table.cost[rest] != inf) {
            best = to_boundary + table.cost[rest];
        }
        for (size_t r = rest; r; r &= r - 1) {
            size_t j = std::countr_zero(r);
            size_t remaining = rest & ~(size_t{1} << j);
            uint64_t pc = pair_cost(i, j);
            if (pc == inf || table.cost[remaining] == inf) {
                continue;
            }
            uint64_t candidate = pc + table.cost[remaining];
            if (candidate < best) {
                best = candidate;
                pick = static_cast<uint8_t>(j);
            }
        }
        table.cost[s] = best;
        table.choice[s] = pick;
    }
    return table;
}

/// Decoding graph of the X checks: one node per X stabilizer plus a boundary
/// node, one edge per qubit that lies in at least one X stabilizer.
class MatchingGraph {
   public:
    struct Edge {
        size_t qubit;
        size_t a;
        size_t b;  // == boundary() for qubits in exactly one X stabilizer
    };

    static constexpr uint64_t kUnreachable = std::numeric_limits<uint64_t>::max();

    explicit MatchingGraph(const CompassCode &code) : num_qubits_(code.num_qubits()) {
        const size_t m = code.x_stabilizers.size();
        num_checks_ = m;
        const size_t n = num_qubits_;
        perturbed_ = n <= kMaxTieBreakQubits;

        std::vector<std::vector<size_t>> checks_of(n);
        for (size_t s = 0; s < m; s++) {
            if (code.x_stabilizers[s].support.size() != n) {
                throw std::invalid_argument("X stabilizer support has the wrong length");
            }
            for (size_t q : code.x_stabilizers[s].support.ones()) {
                checks_of[q].push_back(s);
            }
        }
        for (size_t q = 0; q < n; q++) {
            const auto &cs = checks_of[q];
            if (cs.size() > 2) {
                throw std::invalid_argument(
                    "qubit " + std::to_string(q) + " lies in " + std::to_string(cs.size()) +
                    " X stabilizers; matching needs at most 2");
            }
            if (cs.empty()) {
                stabilizer_free_.push_back(q);
            } else {
                edges_.push_back({q, cs[0], cs.size() == 2 ? cs[1] : m});
            }
        }
        compute_shortest_paths();
        compute_components();
    }

    size_t num_qubits() const {
        return num_qubits_;
    }
    size_t num_checks() const {
        return num_checks_;
    }
    size_t boundary() const {
        return num_checks_;
    }
    size_t num_nodes() const {
        return num_checks_ + 1;
    }
    const std::vector<Edge> &edges() const {
        return edges_;
    }
    /// Qubits in no X stabilizer; a Z error there never needs correcting.
    const std::vector<size_t> &stabilizer_free_qubits() const {
        return stabilizer_free_;
    }

    /// Weight of qubit q's edge. Unit weight plus a sub-unit perturbation that
    /// realizes the support_precedes tie-break (lower qubit index = cheaper).
    uint64_t edge_weight(size_t qubit) const {
        if (!perturbed_) {
            return 1;
        }
        return (uint64_t{1} << num_qubits_) - (uint64_t{1} << (num_qubits_ - 1 - qubit));
    }

    /// Perturbed shortest-path cost between two nodes (boundary included).
    uint64_t distance(size_t a, size_t b) const {
        return dist_[a * num_nodes() + b];
    }

    /// Number of qubits on the shortest path between two nodes.
    size_t hop_distance(size_t a, size_t b) const {
        return path_qubits(a, b).size();
    }

    /// Qubits along the shortest path between two nodes, in path order.
    std::vector<size_t> path_qubits(size_t a, size_t b) const {
        std::vector<size_t> result;
        if (distance(a, b) == kUnreachable) {
            throw std::invalid_argument("no path between matching graph nodes");
        }
        while (a != b) {
            size_t k = a * num_nodes() + b;
            result.push_back(next_qubit_[k]);
            a = next_node_[k];
        }
        return result;
    }

    /// Connected components of check nodes (the boundary joins nothing).
    const std::vector<std::vector<size_t>> &components() const {
        return components_;
    }
    size_t component_of(size_t check) const {
        return component_of_[check];
    }

   private:
    void compute_shortest_paths() {
        const size_t v = num_nodes();
        dist_.assign(v * v, kUnreachable);
        next_node_.assign(v * v, 0);
        next_qubit_.assign(v * v, 0);
        for (size_t a = 0; a < v; a++) {
            dist_[a * v + a] = 0;
            next_node_[a * v + a] = a;
        }
        // Edges are visited in ascending qubit order, so among parallel edges
        // the lowest-index qubit wins ties when weights are not perturbed.
        for (const auto &e : edges_) {
            uint64_t w = edge_weight(e.qubit);
            for (auto [x, y] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
                if (w < dist_[x * v + y]) {
                    dist_[x * v + y] = w;
                    next_node_[x * v + y] = y;
                    next_qubit_[x * v + y] = e.qubit;
                }
            }
        }
        for (size_t k = 0; k < v; k++) {
            for (size_t i = 0; i < v; i++) {
                uint64_t dik = dist_[i * v + k];
                if (dik == kUnreachable) {
                    continue;
                }
                for (size_t j = 0; j < v; j++) {
                    uint64_t dkj = dist_[k * v + j];
                    if (dkj == kUnreachable) {
                        continue;
                    }
                    if (dik + dkj < dist_[i * v + j]) {
                        dist_[i * v + j] = dik + dkj;
                        next_node_[i * v + j] = next_node_[i * v + k];
                        next_qubit_[i * v + j] = next_qubit_[i * v + k];
                    }
                }
            }
        }
    }

    void compute_components() {
        std::vector<size_t> parent(num_checks_);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](size_t x) {
            while (parent[x] != x) {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            return x;
        };
        for (const auto &e : edges_) {
            if (e.b != boundary()) {
                size_t ra = find(e.a), rb = find(e.b);
                if (ra != rb) {
                    parent[std::max(ra, rb)] = std::min(ra, rb);
                }
            }
        }
        component_of_.assign(num_checks_, 0);
        std::vector<size_t> index_of_root(num_checks_, SIZE_MAX);
        for (size_t c = 0; c < num_checks_; c++) {
            size_t root = find(c);
            if (index_of_root[root] == SIZE_MAX) {
                index_of_root[root] = components_.size();
                components_.emplace_back();
            }
            component_of_[c] = index_of_root[root];
            components_[index_of_root[root]].push_back(c);
        }
    }

    size_t num_qubits_;
    size_t num_checks_;
    bool perturbed_;
    std::vector<Edge> edges_;
    std::vector<size_t> stabilizer_free_;
    std::vector<uint64_t> dist_;
    std::vector<size_t> next_node_;
    std::vector<size_t> next_qubit_;
    std::vector<std::vector<size_t>> components_;
    std::vector<size_t> component_of_;
};

inline MatchingGraph build_matching_graph(const CompassCode &code) {
    return MatchingGraph(code);
}

/// Minimum-weight Z correction reproducing the X syndrome `s`, found by exact
/// perfect matching of the flagged checks (with boundary copies) over
/// shortest-path distances, solved independently per connected component.
inline PauliSupport decode_mwpm(const MatchingGraph &graph, const Syndrome &s) {
    if (s.size() != graph.num_checks()) {
        throw std::invalid_argument(
            "syndrome has " + std::to_string(s.size()) + " bits but the code has " +
            std::to_string(graph.num_checks()) + " X stabilizers");
    }
    PauliSupport correction{PauliKind::Z, BitVector(graph.num_qubits())};
    std::vector<std::vector<size_t>> flagged(graph.components().size());
    for (size_t k : s.ones()) {
        flagged[graph.component_of(k)].push_back(k);
    }
    const size_t boundary = graph.boundary();
    for (const auto &nodes : flagged) {
        if (nodes.empty()) {
            continue;
        }
        auto table = solve_subset_matching(
            nodes.size(), [&](size_t i, size_t j) { return graph.distance(nodes[i], nodes[j]); },
            [&](size_t i) { return graph.distance(nodes[i], boundary); });
        size_t remaining = (size_t{1} << nodes.size()) - 1;
        if (table.cost[remaining] == MatchingGraph::kUnreachable) {
            throw std::invalid_argument("syndrome cannot be produced by any Z error");
        }
        while (remaining) {
            size_t i = std::countr_zero(remaining);
            size_t j = table.choice[remaining];
            size_t target = j == i ? boundary : nodes[j];
            for (size_t q : graph.path_qubits(nodes[i], target)) {
                correction.support.flip(q);
            }
            remaining &= ~(size_t{1} << i);
            remaining &= ~(size_t{1} << j);
        }
    }
    return correction;
}

/// Minimum-weight correction for every syndrome of a code with at most 64
/// qubits, built from one subset-DP table per matching-graph component.
/// Syndrome bit k / correction bit q follow stabilizer / qubit indices.
class MinWeightTable {
   public:
    explicit MinWeightTable(const MatchingGraph &graph) : num_checks_(graph.num_checks()) {
        if (graph.num_qubits() > 64) {
            throw LimitError("MinWeightTable supports at most 64 qubits");
        }
        const size_t boundary = graph.boundary();
        for (const auto &nodes : graph.components()) {
            Component comp;
            comp.checks = nodes;
            const size_t k = nodes.size();
            comp.pair_path.assign(k * k, 0);
            comp.boundary_path.assign(k, 0);
            auto mask_of = [&](size_t a, size_t b) {
                uint64_t mask = 0;
                for (size_t q : graph.path_qubits(a, b)) {
                    mask ^= uint64_t{1} << q;
                }
                return mask;
            };
            for (size_t i = 0; i < k; i++) {
                if (graph.distance(nodes[i], boundary) != MatchingGraph::kUnreachable) {
                    comp.boundary_path[i] = mask_of(nodes[i], boundary);
                }
                for (size_t j = 0; j < k; j++) {
                    if (i != j) {
                        comp.pair_path[i * k + j] = mask_of(nodes[i], nodes[j]);
                    }
                }
            }
            comp.table = solve_subset_matching(
                k, [&](size_t i, size_t j) { return graph.distance(nodes[i], nodes[j]); },
                [&](size_t i) { return graph.distance(nodes[i], boundary); });
            components_.push_back(std::move(comp));
        }
    }

    uint64_t correction(uint64_t syndrome) const {
        uint64_t result = 0;
        for (const auto &comp : components_) {
            size_t local = 0;
            for (size_t i = 0; i < comp.checks.size(); i++) {
                local |= static_cast<size_t>((syndrome >> comp.checks[i]) & 1) << i;
            }
            if (comp.table.cost[local] == MatchingGraph::kUnreachable) {
                throw std::invalid_argument("syndrome cannot be produced by any Z error");
            }
            const size_t k = comp.checks.size();
            while (local) {
                size_t i = std::countr_zero(local);
                size_t j = comp.table.choice[local];
                result ^= j == i ? comp.boundary_path[i] : comp.pair_path[i * k + j];
                local &= ~(size_t{1} << i);
                local &= ~(size_t{1} << j);
            }
        }
        return result;
    }

    size_t num_checks() const {
        return num_checks_;
    }

   private:
    struct Component {
        std::vector<size_t> checks;
        SubsetMatchingTable table;
        std::vector<uint64_t> pair_path;
        std::vector<uint64_t> boundary_path;
    };
    size_t num_checks_;
    std::vector<Component> components_;
};

/// Largest code the brute-force decoder will enumerate.
inline constexpr size_t kMaxBruteForceQubits = 20;

namespace detail {

inline std::vector<uint64_t> qubit_syndrome_masks(const CompassCode &code) {
    std::vector<uint64_t> masks(code.num_qubits(), 0);
    for (size_t s = 0; s < code.x_stabilizers.size(); s++) {
        for (size_t q : code.x_stabilizers[s].support.ones()) {
            masks[q] |= uint64_t{1} << s;
        }
    }
    return masks;
}

}  // namespace detail

/// Best correction for every syndrome by exhaustive enumeration of all 2^n Z
/// supports. Entry s is the correction mask for syndrome mask s.
inline std::vector<uint64_t> bruteforce_table(const CompassCode &code) {
    const size_t n = code.num_qubits();
    if (n > kMaxBruteForceQubits) {
        throw LimitError(
            "brute-force decoding supports at most " + std::to_string(kMaxBruteForceQubits) + " qubits, got " +
            std::to_string(n));
    }
    const size_t m = code.x_stabilizers.size();
    if (m >= 32) {
        throw LimitError("too many X stabilizers for brute-force decoding");
    }
    auto masks = detail::qubit_syndrome_masks(code);
    constexpr uint64_t unset = std::numeric_limits<uint64_t>::max();
    std::vector<uint64_t> best(size_t{1} << m, unset);
    uint64_t support = 0;
    uint64_t syndrome = 0;
    best[0] = 0;
    for (uint64_t step = 1; step < (uint64_t{1} << n); step++) {
        size_t q = std::countr_zero(step);
        support ^= uint64_t{1} << q;
        syndrome ^= masks[q];
        uint64_t &slot = best[syndrome];
        if (slot == unset || support_precedes(support, slot)) {
            slot = support;
        }
    }
    return best;
}

/// Exhaustive minimum-weight correction for a single syndrome (n <= 20).
inline PauliSupport decode_bruteforce(const CompassCode &code, const Syndrome &s) {
    const size_t n = code.num_qubits();
    if (n > kMaxBruteForceQubits) {
        throw LimitError(
            "brute-force decoding supports at most " + std::to_string(kMaxBruteForceQubits) + " qubits, got " +
            std::to_string(n));
    }
    if (s.size() != code.x_stabilizers.size()) {
        throw std::invalid_argument(
            "syndrome has " + std::to_string(s.size()) + " bits but the code has " +
            std::to_string(code.x_stabilizers.size()) + " X stabilizers");
    }
    auto masks = detail::qubit_syndrome_masks(code);
    const uint64_t target = s.to_mask();
    bool found = target == 0;
    uint64_t best = 0;
    uint64_t support = 0;
    uint64_t syndrome = 0;
    for (uint64_t step = 1; step < (uint64_t{1} << n); step++) {
        size_t q = std::countr_zero(step);
        support ^= uint64_t{1} << q;
        syndrome ^= masks[q];
        if (syndrome == target && (!found || support_precedes(support, best))) {
            best = support;
            found = true;
        }
    }
    if (!found) {
        throw std::invalid_argument("syndrome cannot be produced by any Z error");
    }
    return {PauliKind::Z, BitVector::from_mask(n, best)};
}

}  // namespace compass

#endif  // COMPASS_DECODER_H

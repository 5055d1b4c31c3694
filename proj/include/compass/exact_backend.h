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

#ifndef COMPASS_EXACT_BACKEND_H
#define COMPASS_EXACT_BACKEND_H

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "compass/code.h"
#include "compass/decoder.h"
#include "compass/errors.h"
#include "compass/parallel.h"
#include "compass/pauli_channel.h"

namespace compass {

enum class Recovery : uint8_t { MinWeight, ML };

inline constexpr double kMlTieTolerance = 1e-9;

inline constexpr size_t kMaxExactQubits = 25;

/// Coset weight enumerators of a small compass code.
///
/// Every Z error v decomposes uniquely as e(s) + g + l Zbar, with e(s) a fixed
/// pure error for its X syndrome s, g in the Z-stabilizer group and l in
/// {0, 1}. For each syndrome this walks the 2^(#Z stabilizers) group
/// elements in Gray-code order and histograms the weights of the identity
/// coset (relative to the min-weight recovery) and of the Zbar coset.
class CosetEnumerator {
   public:
    explicit CosetEnumerator(const CompassCode &code) : n_(code.num_qubits()) {
        code.coloring.check();
        if (n_ > kMaxExactQubits) {
            throw LimitError(
                "exact enumeration supports at most " + std::to_string(kMaxExactQubits) + " qubits, got " +
                std::to_string(n_));
        }
        m_ = code.x_stabilizers.size();
        const size_t k = code.z_stabilizers.size();
        if (m_ + k + 1 != n_) {
            throw std::invalid_argument("code must have n - 1 stabilizer generators");
        }
        for (const auto &z : code.z_stabilizers) {
            z_generators_.push_back(z.support.to_mask());
        }
        logical_z_ = code.logical_z.support.to_mask();
        logical_x_ = code.logical_x.support.to_mask();
        build_pure_errors(code);
        table_ = std::make_unique<MinWeightTable>(MatchingGraph(code));
    }

    size_t num_qubits() const {
        return n_;
    }
    size_t num_checks() const {
        return m_;
    }
    uint64_t num_syndromes() const {
        return uint64_t{1} << m_;
    }

    /// Some Z error with syndrome `s`.
    uint64_t pure_error(uint64_t s) const {
        uint64_t e = 0;
        for (uint64_t r = s; r; r &= r - 1) {
            e ^= pure_errors_[std::countr_zero(r)];
        }
        return e;
    }

    /// Min-weight (MWPM) recovery for syndrome `s`.
    uint64_t recovery(uint64_t s) const {
        return table_->correction(s);
    }

    /// Weight histograms (length n + 1) of the identity coset and the Zbar
    /// coset relative to recovery(s). Returns the touched weight range [lo, hi].
    std::pair<size_t, size_t> enumerate(uint64_t s, uint32_t *identity_hist, uint32_t *flipped_hist) const {
        uint64_t e = pure_error(s);
        uint64_t v = e;
        if (std::popcount((e ^ recovery(s)) & logical_x_) & 1) {
            v ^= logical_z_;
        }
        std::fill(identity_hist, identity_hist + n_ + 1, 0);
        std::fill(flipped_hist, flipped_hist + n_ + 1, 0);
        size_t lo = n_, hi = 0;
        auto record = [&](uint64_t x) {
            size_t w0 = std::popcount(x);
            size_t w1 = std::popcount(x ^ logical_z_);
            identity_hist[w0]++;
            flipped_hist[w1]++;
            lo = std::min({lo, w0, w1});
            hi = std::max({hi, w0, w1});
        };
        record(v);
        const uint64_t steps = uint64_t{1} << z_generators_.size();
        for (uint64_t step = 1; step < steps; step++) {
            v ^= z_generators_[std::countr_zero(step)];
            record(v);
        }
        return {lo, hi};
    }

   private:
    void build_pure_errors(const CompassCode &code) {
        // Row-reduce (syndrome | error) pairs of single-qubit errors to find a
        // preimage of every unit syndrome.
        struct Row {
            uint64_t pivot;
            uint64_t syndrome;
            uint64_t error;
        };
        std::vector<uint64_t> qubit_syndrome(n_, 0);
        for (size_t s = 0; s < m_; s++) {
            for (size_t q : code.x_stabilizers[s].support.ones()) {
                qubit_syndrome[q] |= uint64_t{1} << s;
            }
        }
        std::vector<Row> basis;
        for (size_t q = 0; q < n_; q++) {
            Row row{0, qubit_syndrome[q], uint64_t{1} << q};
            for (const auto &b : basis) {
                if (row.syndrome & b.pivot) {
                    row.syndrome ^= b.syndrome;
                    row.error ^= b.error;
                }
            }
            if (!row.syndrome) {
                continue;
            }
            row.pivot = row.syndrome & (~row.syndrome + 1);
            for (auto &b : basis) {
                if (b.syndrome & row.pivot) {
                    b.syndrome ^= row.syndrome;
                    b.error ^= row.error;
                }
            }
            basis.push_back(row);
        }
        if (basis.size() != m_) {
            throw std::invalid_argument("X stabilizers are not independent");
        }
        pure_errors_.assign(m_, 0);
        for (const auto &b : basis) {
            // Fully reduced: each basis syndrome is a single unit vector.
            pure_errors_[std::countr_zero(b.syndrome)] = b.error;
        }
    }

    size_t n_;
    size_t m_ = 0;
    std::vector<uint64_t> z_generators_;
    std::vector<uint64_t> pure_errors_;
    uint64_t logical_z_ = 0;
    uint64_t logical_x_ = 0;
    std::unique_ptr<MinWeightTable> table_;
};

/// Per-weight amplitudes cos(theta/2)^(n-w) (-i sin(theta/2))^w of the
/// expansion of the uniform rotation into Z strings.
class RotationAmplitudes {
   public:
    RotationAmplitudes(size_t n, double theta) : terms_(n + 1) {
        double c = std::cos(theta / 2.0);
        double s = std::sin(theta / 2.0);
        const std::complex<double> minus_i{0.0, -1.0};
        std::complex<double> phase{1.0, 0.0};
        for (size_t w = 0; w <= n; w++) {
            terms_[w] = std::pow(c, static_cast<double>(n - w)) * std::pow(s, static_cast<double>(w)) * phase;
            phase *= minus_i;
        }
    }

    std::complex<double> coset_amplitude(const uint32_t *hist, size_t lo, size_t hi) const {
        std::complex<double> total{0.0, 0.0};
        for (size_t w = lo; w <= hi; w++) {
            if (hist[w]) {
                total += static_cast<double>(hist[w]) * terms_[w];
            }
        }
        return total;
    }

   private:
    std::vector<std::complex<double>> terms_;
};

struct ResolvedSyndrome {
    double probability;
    double theta_s;
};

/// Turns the identity-coset amplitude a0 and the Zbar-coset amplitude a1 into
/// (p_s, theta_s), with the logical action proportional to
/// cos(theta_s/2) I - i sin(theta_s/2) Zbar. ML recovery takes the larger
/// amplitude as the identity coset; magnitudes within a relative
/// kMlTieTolerance count as equal and keep the decoder's coset, so that the
/// result does not hinge on summation order. a0 = 0 maps to theta_s = pi.
inline ResolvedSyndrome resolve_syndrome(std::complex<double> a0, std::complex<double> a1, Recovery recovery) {
    if (recovery == Recovery::ML && std::abs(a1) > std::abs(a0) * (1.0 + kMlTieTolerance)) {
        std::swap(a0, a1);
    }
    double m0 = std::abs(a0);
    double m1 = std::abs(a1);
    // a1 / a0 = -i tan(theta_s / 2); its sign is that of -Im(a1 conj(a0)).
    double sign = -(a1 * std::conj(a0)).imag() < 0.0 ? -1.0 : 1.0;
    return {m0 * m0 + m1 * m1, 2.0 * std::atan2(sign * m1, m0)};
}

/// Exact syndrome distribution by enumeration of all 2^n Z strings.
/// Entries are ordered by syndrome, bit k of the syndrome string = X stabilizer k.
inline SyndromeDistribution syndrome_distribution(
    const CompassCode &code, double theta, Recovery recovery, size_t jobs = 1) {
    CosetEnumerator enumerator(code);
    const size_t n = enumerator.num_qubits();
    const size_t m = enumerator.num_checks();
    RotationAmplitudes amps(n, theta);
    SyndromeDistribution result;
    result.theta = theta;
    result.entries.resize(enumerator.num_syndromes());
    const uint64_t total = enumerator.num_syndromes();
    const size_t chunks = static_cast<size_t>(std::min<uint64_t>(total, 256));
    parallel_for(chunks, jobs, [&](size_t chunk) {
        std::vector<uint32_t> h0(n + 1), h1(n + 1);
        for (uint64_t s = chunk * total / chunks; s < (chunk + 1) * total / chunks; s++) {
            auto [lo, hi] = enumerator.enumerate(s, h0.data(), h1.data());
            auto r = resolve_syndrome(amps.coset_amplitude(h0.data(), lo, hi), amps.coset_amplitude(h1.data(), lo, hi),
                                      recovery);
            result.entries[s] = {BitVector::from_mask(m, s), r.probability, r.theta_s};
        }
    });
    return result;
}

/// Channel summary of one exact evaluation.
struct ExactSummary {
    double theta = 0.0;
    LogicalPTM ptm;
    double diamond = 0.0;
    double total_probability = 0.0;
};

/// epsilon, delta and diamond average for several angles from a single
/// enumeration pass, without materializing the distributions. The reduction
/// order is fixed, so results do not depend on `jobs`.
inline std::vector<ExactSummary> exact_summaries(
    const CompassCode &code, std::span<const double> thetas, Recovery recovery, size_t jobs = 1) {
    CosetEnumerator enumerator(code);
    const size_t n = enumerator.num_qubits();
    std::vector<RotationAmplitudes> amps;
    for (double t : thetas) {
        amps.emplace_back(n, t);
    }
    const uint64_t total = enumerator.num_syndromes();
    const size_t chunks = static_cast<size_t>(std::min<uint64_t>(total, 256));
    std::vector<std::vector<ExactSummary>> partial(chunks, std::vector<ExactSummary>(thetas.size()));
    parallel_for(chunks, jobs, [&](size_t chunk) {
        std::vector<uint32_t> h0(n + 1), h1(n + 1);
        auto &acc = partial[chunk];
        for (uint64_t s = chunk * total / chunks; s < (chunk + 1) * total / chunks; s++) {
            auto [lo, hi] = enumerator.enumerate(s, h0.data(), h1.data());
            for (size_t t = 0; t < thetas.size(); t++) {
                auto r = resolve_syndrome(
                    amps[t].coset_amplitude(h0.data(), lo, hi), amps[t].coset_amplitude(h1.data(), lo, hi), recovery);
                double half = std::sin(r.theta_s / 2.0);
                acc[t].ptm.epsilon += r.probability * 2.0 * half * half;
                acc[t].ptm.delta += r.probability * std::sin(r.theta_s);
                acc[t].diamond += r.probability * 2.0 * std::abs(std::sin(r.theta_s));
                acc[t].total_probability += r.probability;
            }
        }
    });
    std::vector<ExactSummary> result(thetas.size());
    for (size_t t = 0; t < thetas.size(); t++) {
        result[t].theta = thetas[t];
        for (const auto &p : partial) {
            result[t].ptm.epsilon += p[t].ptm.epsilon;
            result[t].ptm.delta += p[t].ptm.delta;
            result[t].diamond += p[t].diamond;
            result[t].total_probability += p[t].total_probability;
        }
    }
    return result;
}

/// Per-syndrome (p_s, theta_s) for several angles from one enumeration pass.
/// result[t][s] belongs to thetas[t] and syndrome mask s.
inline std::vector<std::vector<ResolvedSyndrome>> outcome_tables(
    const CompassCode &code, std::span<const double> thetas, Recovery recovery, size_t jobs = 1) {
    CosetEnumerator enumerator(code);
    const size_t n = enumerator.num_qubits();
    std::vector<RotationAmplitudes> amps;
    for (double t : thetas) {
        amps.emplace_back(n, t);
    }
    const uint64_t total = enumerator.num_syndromes();
    std::vector<std::vector<ResolvedSyndrome>> result(thetas.size(), std::vector<ResolvedSyndrome>(total));
    const size_t chunks = static_cast<size_t>(std::min<uint64_t>(total, 256));
    parallel_for(chunks, jobs, [&](size_t chunk) {
        std::vector<uint32_t> h0(n + 1), h1(n + 1);
        for (uint64_t s = chunk * total / chunks; s < (chunk + 1) * total / chunks; s++) {
            auto [lo, hi] = enumerator.enumerate(s, h0.data(), h1.data());
            for (size_t t = 0; t < thetas.size(); t++) {
                result[t][s] = resolve_syndrome(
                    amps[t].coset_amplitude(h0.data(), lo, hi), amps[t].coset_amplitude(h1.data(), lo, hi), recovery);
            }
        }
    });
    return result;
}

inline LogicalPTM logical_channel(const CompassCode &code, double theta, Recovery recovery, size_t jobs = 1) {
    double t[] = {theta};
    return exact_summaries(code, t, recovery, jobs)[0].ptm;
}

}  // namespace compass

#endif  // COMPASS_EXACT_BACKEND_H

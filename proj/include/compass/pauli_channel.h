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

#ifndef COMPASS_PAULI_CHANNEL_H
#define COMPASS_PAULI_CHANNEL_H

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "compass/f2.h"

namespace compass {

/// Logical channel of a Z-rotation-symmetric code, as the XY block of its
/// Pauli transfer matrix: [[1 - epsilon, delta], [-delta, 1 - epsilon]].
struct LogicalPTM {
    double epsilon = 0.0;
    double delta = 0.0;

    /// 1 - epsilon + i delta, the block's eigenvalue.
    std::complex<double> eigenvalue() const {
        return {1.0 - epsilon, delta};
    }
    static LogicalPTM from_eigenvalue(std::complex<double> z) {
        return {1.0 - z.real(), z.imag()};
    }

    static LogicalPTM identity() {
        return {};
    }
    /// Exact channel of the rotation exp(-i theta/2 Z).
    static LogicalPTM rotation(double theta) {
        return {1.0 - std::cos(theta), std::sin(theta)};
    }

    friend bool operator==(const LogicalPTM &, const LogicalPTM &) = default;
};

/// Log-polar form of the XY block: 1 - epsilon + i delta = exp(lam + i phi).
/// A zero block is represented with lam = -infinity (see saturated()).
struct PolarPTM {
    double lam = 0.0;
    double phi = 0.0;

    bool saturated() const {
        return std::isinf(lam) && lam < 0;
    }
};

inline PolarPTM to_polar(const LogicalPTM &p) {
    double re = 1.0 - p.epsilon;
    if (re == 0.0 && p.delta == 0.0) {
        return {-std::numeric_limits<double>::infinity(), 0.0};
    }
    // |z|^2 - 1 written out so that small epsilon keeps full relative precision.
    double excess = p.epsilon * p.epsilon + p.delta * p.delta - 2.0 * p.epsilon;
    return {0.5 * std::log1p(excess), std::atan2(p.delta, re)};
}

inline LogicalPTM from_polar(const PolarPTM &q) {
    if (q.saturated()) {
        return {1.0, 0.0};
    }
    double half = std::sin(q.phi / 2.0);
    return {-std::expm1(q.lam) * std::cos(q.phi) + 2.0 * half * half, std::exp(q.lam) * std::sin(q.phi)};
}

/// Sequential application of two channels. The blocks commute, so order is irrelevant.
inline LogicalPTM compose(const LogicalPTM &a, const LogicalPTM &b) {
    // (1 - ea + i da)(1 - eb + i db), expanded to avoid cancellation in 1 - (...).
    return {
        a.epsilon + b.epsilon - a.epsilon * b.epsilon + a.delta * b.delta,
        a.delta * (1.0 - b.epsilon) + b.delta * (1.0 - a.epsilon)};
}

/// m-fold application: lam and phi scale by m.
inline LogicalPTM power(const LogicalPTM &a, uint64_t m) {
    if (m == 0) {
        return LogicalPTM::identity();
    }
    PolarPTM q = to_polar(a);
    if (q.saturated()) {
        return from_polar(q);
    }
    double md = static_cast<double>(m);
    return from_polar({md * q.lam, md * q.phi});
}

/// Single-use average infidelity, epsilon / 3.
inline double r1(const LogicalPTM &a) {
    return a.epsilon / 3.0;
}

/// Average infidelity after m uses, from exact powering of the block:
/// r_m = (1 - exp(m lam) cos(m phi)) / 3.
inline double rm_exact(const LogicalPTM &a, uint64_t m) {
    return power(a, m).epsilon / 3.0;
}

/// Low-order expansion epsilon m / 3 - m (m - 1) delta^2 / 6, as it is
/// commonly quoted. Kept for comparison only: for a pure rotation its delta^2
/// term has the opposite sign of rm_exact, which grows like + m^2 delta^2 / 6.
inline double rm_expansion(const LogicalPTM &a, uint64_t m) {
    double md = static_cast<double>(m);
    return a.epsilon * md / 3.0 - md * (md - 1.0) * a.delta * a.delta / 6.0;
}

/// Coherence measure delta^2 / epsilon. Zero for the identity channel and
/// +infinity when epsilon = 0 but delta != 0.
inline double kappa(const LogicalPTM &a) {
    if (a.epsilon == 0.0) {
        return a.delta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return a.delta * (a.delta / a.epsilon);
}

struct SyndromeOutcome {
    BitVector syndrome;
    double probability;
    double theta_s;  // residual logical rotation angle, in (-pi, pi]
};

/// Distribution of residual logical rotations over syndromes at physical angle theta.
struct SyndromeDistribution {
    double theta = 0.0;
    std::vector<SyndromeOutcome> entries;

    double total_probability() const {
        double t = 0.0;
        for (const auto &e : entries) {
            t += e.probability;
        }
        return t;
    }
};

/// epsilon = sum p_s (1 - cos theta_s), delta = sum p_s sin theta_s.
inline LogicalPTM channel_of(const SyndromeDistribution &d) {
    LogicalPTM result;
    for (const auto &e : d.entries) {
        double half = std::sin(e.theta_s / 2.0);
        result.epsilon += e.probability * 2.0 * half * half;
        result.delta += e.probability * std::sin(e.theta_s);
    }
    return result;
}

/// Average logical diamond distance sum p_s 2 |sin theta_s|.
inline double diamond_avg(const SyndromeDistribution &d) {
    double total = 0.0;
    for (const auto &e : d.entries) {
        total += e.probability * 2.0 * std::abs(std::sin(e.theta_s));
    }
    return total;
}

/// Angle reduced into (-pi, pi].
inline double wrap_angle(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(theta, two_pi);
    if (r <= -std::numbers::pi) {
        r += two_pi;
    }
    return r;
}

}  // namespace compass

#endif  // COMPASS_PAULI_CHANNEL_H

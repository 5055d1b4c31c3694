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

#ifndef COMPASS_ANALYTIC_H
#define COMPASS_ANALYTIC_H

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "compass/code.h"
#include "compass/exact_backend.h"
#include "compass/pauli_channel.h"

namespace compass {

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_binomial(size_t n, size_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

/// a * log(x) with the convention 0 * log(0) = 0.
inline double scaled_log(double a, double x) {
    return a == 0.0 ? 0.0 : a * std::log(x);
}

/// Accumulates sign * exp(log_term) without leaving the log domain.
class LogSum {
   public:
    void add(double log_term, double sign = 1.0) {
        if (log_term == kNegInf || sign == 0.0) {
            return;
        }
        terms_.push_back({log_term, sign});
        max_ = std::max(max_, log_term);
    }

    /// Signed value scaled by exp(-max): value = scaled() * exp(max()).
    double scaled() const {
        double total = 0.0;
        for (const auto &[t, s] : terms_) {
            total += s * std::exp(t - max_);
        }
        return total;
    }

    double max() const {
        return max_;
    }

    double value() const {
        return terms_.empty() ? 0.0 : scaled() * std::exp(max_);
    }

    /// log |value|, -infinity for an exact zero.
    double log_abs() const {
        if (terms_.empty()) {
            return kNegInf;
        }
        double sc = std::abs(scaled());
        return sc == 0.0 ? kNegInf : std::log(sc) + max_;
    }

   private:
    std::vector<std::pair<double, double>> terms_;
    double max_ = kNegInf;
};

inline void require_odd_length(size_t l) {
    if (l < 1 || l % 2 == 0) {
        throw std::invalid_argument("repetition length must be a positive odd integer, got " + std::to_string(l));
    }
}

}  // namespace detail

/// One syndrome class of the length-l phase-flip code: the C(l, w) syndromes
/// whose minimum-weight correction has weight w.
struct RepetitionClass {
    size_t weight;
    double log_multiplicity;
    double log_probability;  // of one syndrome in the class
    double theta_s;
};

/// Syndrome classes of the length-l phase-flip code under a uniform rotation.
///
/// A class of min weight w has coset amplitudes a0 = c^(l-w) (-i s)^w and
/// a1 = c^w (-i s)^(l-w), c = cos(theta/2), s = sin(theta/2); everything is
/// kept in log magnitude so l can reach the thousands.
inline std::vector<RepetitionClass> repetition_classes(size_t l, double theta, Recovery recovery) {
    detail::require_odd_length(l);
    theta = wrap_angle(theta);
    const double c = std::abs(std::cos(theta / 2.0));
    const double s = std::abs(std::sin(theta / 2.0));
    const double s_sign = theta < 0.0 ? -1.0 : 1.0;
    std::vector<RepetitionClass> classes;
    for (size_t w = 0; w <= (l - 1) / 2; w++) {
        const size_t k = l - 2 * w;
        double log_a0 = detail::scaled_log(static_cast<double>(l - w), c) + detail::scaled_log(static_cast<double>(w), s);
        double log_a1 = detail::scaled_log(static_cast<double>(w), c) + detail::scaled_log(static_cast<double>(l - w), s);
        // -Im(a1 / a0) = (s / c)^k (-1)^((k-1)/2) with signed s.
        double sign = s_sign * (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0);
        if (recovery == Recovery::ML && log_a1 > log_a0 + std::log1p(kMlTieTolerance)) {
            std::swap(log_a0, log_a1);
            sign = -sign;
        }
        double top = std::max(log_a0, log_a1);
        double log_p = top == detail::kNegInf
                           ? detail::kNegInf
                           : 2.0 * top + std::log(std::exp(2.0 * (log_a0 - top)) + std::exp(2.0 * (log_a1 - top)));
        double theta_s = top == detail::kNegInf
                             ? 0.0
                             : 2.0 * std::atan2(sign * std::exp(log_a1 - top), std::exp(log_a0 - top));
        classes.push_back({w, detail::log_binomial(l, w), log_p, theta_s});
    }
    return classes;
}

/// Logical channel of the length-l phase-flip code, summed exactly over
/// syndrome classes in the log domain.
inline LogicalPTM repetition_exact(size_t l, double theta, Recovery recovery = Recovery::MinWeight) {
    detail::LogSum eps, del;
    for (const auto &cls : repetition_classes(l, theta, recovery)) {
        double half = std::sin(cls.theta_s / 2.0);
        double weight = cls.log_multiplicity + cls.log_probability;
        if (half != 0.0) {
            eps.add(weight + std::log(2.0 * half * half));
        }
        double sn = std::sin(cls.theta_s);
        if (sn != 0.0) {
            del.add(weight + std::log(std::abs(sn)), sn < 0.0 ? -1.0 : 1.0);
        }
    }
    return {eps.value(), del.value()};
}

/// log epsilon of repetition_exact, valid even where epsilon underflows.
inline double repetition_log_epsilon(size_t l, double theta, Recovery recovery = Recovery::MinWeight) {
    detail::LogSum eps;
    for (const auto &cls : repetition_classes(l, theta, recovery)) {
        double half = std::sin(cls.theta_s / 2.0);
        if (half != 0.0) {
            eps.add(cls.log_multiplicity + cls.log_probability + std::log(2.0 * half * half));
        }
    }
    return eps.log_abs();
}

/// Average diamond distance sum p_s 2 |sin theta_s| of the phase-flip code.
inline double repetition_diamond(size_t l, double theta, Recovery recovery = Recovery::MinWeight) {
    detail::LogSum total;
    for (const auto &cls : repetition_classes(l, theta, recovery)) {
        double sn = std::abs(std::sin(cls.theta_s));
        if (sn != 0.0) {
            total.add(cls.log_multiplicity + cls.log_probability + std::log(2.0 * sn));
        }
    }
    return total.value();
}

/// Large-l approximation of the phase-flip channel, valid for |theta| < pi/2:
/// epsilon ~ sqrt(2 / (pi l)) sin^(l+1)(theta) / cos(theta),
/// delta ~ cot(theta) epsilon.
inline LogicalPTM repetition_stirling(size_t l, double theta) {
    detail::require_odd_length(l);
    if (!(std::abs(theta) < std::numbers::pi / 2.0)) {
        throw std::invalid_argument("Stirling approximation requires |theta| < pi/2");
    }
    double prefactor = std::sqrt(2.0 / (std::numbers::pi * static_cast<double>(l)));
    double sin_l = std::pow(std::sin(theta), static_cast<double>(l));
    return {prefactor * sin_l * std::sin(theta) / std::cos(theta), prefactor * sin_l};
}

/// d_x x d_z Z-Shor code: the weight-2 ZZ stabilizers zip each column's
/// rotations together, giving the length-d_z phase-flip code at d_x theta.
inline LogicalPTM z_shor_channel(size_t d_x, size_t d_z, double theta, Recovery recovery = Recovery::MinWeight) {
    if (d_x < 1) {
        throw std::invalid_argument("d_x must be at least 1");
    }
    detail::require_odd(d_z, "d_z");
    return repetition_exact(d_z, wrap_angle(static_cast<double>(d_x) * theta), recovery);
}

/// d_x x d_z X-Shor code: d_x independent length-d_z phase-flip codes, each
/// decoded by minimum weight, so the channel is the d_x-th power.
inline LogicalPTM x_shor_channel(size_t d_x, size_t d_z, double theta) {
    if (d_x < 1) {
        throw std::invalid_argument("d_x must be at least 1");
    }
    detail::require_odd(d_z, "d_z");
    return power(repetition_exact(d_z, theta, Recovery::MinWeight), d_x);
}

/// Z-stacked Shor code C_{l,h}: floor(l/h) zipped blocks at h theta composed
/// with (l mod h) single phase-flip rows at theta.
inline LogicalPTM z_stacked_channel(size_t l, size_t h, double theta) {
    detail::require_odd(l, "l");
    if (h < 1 || h > l) {
        throw std::invalid_argument(
            "block height h must satisfy 1 <= h <= l, got h=" + std::to_string(h) + " l=" + std::to_string(l));
    }
    LogicalPTM blocks = power(repetition_exact(l, wrap_angle(static_cast<double>(h) * theta)), l / h);
    LogicalPTM rows = power(repetition_exact(l, theta), l % h);
    return compose(blocks, rows);
}

struct RepetitionFamily {
    size_t l;
};
struct ZShorFamily {
    size_t d_x;
    size_t d_z;
};
struct XShorFamily {
    size_t d_x;
    size_t d_z;
};
struct ZStackedFamily {
    size_t l;
    size_t h;
};

/// A code family with a repetition-based closed-form channel.
struct FamilySpec {
    std::variant<RepetitionFamily, ZShorFamily, XShorFamily, ZStackedFamily> kind;
    Recovery recovery = Recovery::MinWeight;
};

inline LogicalPTM family_channel(const FamilySpec &family, double theta) {
    struct Visitor {
        double theta;
        Recovery recovery;
        LogicalPTM operator()(const RepetitionFamily &f) const {
            return repetition_exact(f.l, theta, recovery);
        }
        LogicalPTM operator()(const ZShorFamily &f) const {
            return z_shor_channel(f.d_x, f.d_z, theta, recovery);
        }
        LogicalPTM operator()(const XShorFamily &f) const {
            require_min_weight();
            return x_shor_channel(f.d_x, f.d_z, theta);
        }
        LogicalPTM operator()(const ZStackedFamily &f) const {
            require_min_weight();
            return z_stacked_channel(f.l, f.h, theta);
        }
        void require_min_weight() const {
            if (recovery != Recovery::MinWeight) {
                throw std::invalid_argument("X-Shor and Z-stacked closed forms are for min-weight recovery only");
            }
        }
    };
    return std::visit(Visitor{theta, family.recovery}, family.kind);
}

/// The compass code realizing a family, for cross-checks against enumeration.
inline Coloring family_coloring(const FamilySpec &family) {
    struct Visitor {
        Coloring operator()(const RepetitionFamily &f) const {
            return family_z_shor(1, f.l);
        }
        Coloring operator()(const ZShorFamily &f) const {
            return family_z_shor(f.d_x, f.d_z);
        }
        Coloring operator()(const XShorFamily &f) const {
            return family_x_shor(f.d_x, f.d_z);
        }
        Coloring operator()(const ZStackedFamily &f) const {
            return family_z_stacked(f.l, f.h);
        }
    };
    return std::visit(Visitor{}, family.kind);
}

struct ClosedFormThreshold {
    double coherence;  // theta_th
    double infidelity;  // theta_th^{r_1}
};

/// Thresholds implied by the closed forms: pi/2 for repetition and X-Shor,
/// pi/(2 d_x) for Z-Shor, pi/(2h) for C_{l,h}.
inline ClosedFormThreshold closed_form_threshold(const FamilySpec &family) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    struct Visitor {
        double operator()(const RepetitionFamily &) const {
            return half_pi;
        }
        double operator()(const ZShorFamily &f) const {
            return half_pi / static_cast<double>(f.d_x);
        }
        double operator()(const XShorFamily &) const {
            return half_pi;
        }
        double operator()(const ZStackedFamily &f) const {
            return half_pi / static_cast<double>(f.h);
        }
    };
    double t = std::visit(Visitor{}, family.kind);
    return {t, t};
}

}  // namespace compass

#endif  // COMPASS_ANALYTIC_H

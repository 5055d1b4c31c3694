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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "compass/analytic.h"
#include "compass/exact_backend.h"
#include "oracles.h"

using namespace compass;
constexpr double kPi = std::numbers::pi;

TEST(Repetition, SingleQubit) {
    for (double t : {0.0, 0.1, 1.0, 2.0, 3.0, -0.5}) {
        auto a = repetition_exact(1, t);
        EXPECT_NEAR(a.epsilon, 1 - std::cos(t), 1e-15);
        EXPECT_NEAR(a.delta, std::sin(t), 1e-15);
    }
}

TEST(Repetition, ClosedForm) {
    for (int l : {1, 3, 5, 7, 9, 15}) {
        for (double f = 0.05; f < 1.0; f += 0.05) {
            auto a = repetition_exact(l, f * kPi);
            auto ref = oracle::repetition_closed_form(l, f * kPi);
            EXPECT_NEAR(a.epsilon, ref.epsilon, 1e-13) << l << " " << f;
            EXPECT_NEAR(a.delta, ref.delta, 1e-13) << l << " " << f;
        }
    }
}

TEST(Repetition, MatchesEnumeration) {
    for (size_t l : {3, 5, 7}) {
        auto code = build_code(family_z_shor(1, l));
        for (Recovery rec : {Recovery::MinWeight, Recovery::ML}) {
            for (double f = 0.05; f < 0.96; f += 0.05) {
                auto a = repetition_exact(l, f * kPi, rec);
                auto b = logical_channel(code, f * kPi, rec);
                EXPECT_NEAR(a.epsilon, b.epsilon, 1e-12);
                EXPECT_NEAR(a.delta, b.delta, 1e-12);
                EXPECT_NEAR(repetition_diamond(l, f * kPi, rec),
                            exact_summaries(code, std::vector<double>{f * kPi}, rec)[0].diamond, 1e-12);
            }
        }
    }
}

TEST(Repetition, LargeDistanceStaysFinite) {
    auto a = repetition_exact(1001, 0.3 * kPi);
    EXPECT_GT(a.epsilon, 0.0);
    EXPECT_TRUE(std::isfinite(repetition_log_epsilon(5001, 0.1 * kPi)));
    EXPECT_LT(repetition_log_epsilon(5001, 0.1 * kPi), -1000);
    EXPECT_THROW(repetition_exact(4, 0.1), std::invalid_argument);
}

TEST(Repetition, RatioAtLargeDistance) {
    double t = 0.45 * kPi;
    double ratio = std::exp(repetition_log_epsilon(43, t) - repetition_log_epsilon(41, t));
    EXPECT_NEAR(ratio / std::pow(std::sin(t), 2), 1.0, 0.1);
}

TEST(Repetition, MlAgreesBelowHalfPi) {
    for (size_t l : {3, 5, 9, 21}) {
        for (double f : {0.1, 0.3, 0.49}) {
            auto a = repetition_exact(l, f * kPi, Recovery::MinWeight);
            auto b = repetition_exact(l, f * kPi, Recovery::ML);
            EXPECT_NEAR(a.epsilon, b.epsilon, 1e-14);
            EXPECT_NEAR(a.delta, b.delta, 1e-14);
        }
        for (double f : {0.55, 0.7, 0.9}) {
            EXPECT_LT(repetition_exact(l, f * kPi, Recovery::ML).epsilon,
                      repetition_exact(l, f * kPi, Recovery::MinWeight).epsilon);
        }
    }
}

TEST(Stirling, Accuracy) {
    double t = 0.3 * kPi;
    auto exact = repetition_exact(51, t);
    auto approx = repetition_stirling(51, t);
    EXPECT_NEAR(approx.epsilon / exact.epsilon, 1.0, 0.1);
    EXPECT_NEAR(approx.delta / exact.delta, 1.0, 0.1);
    double prev_e = 1.0, prev_d = 1.0;
    for (size_t l : {11, 21, 41, 81}) {
        auto e = repetition_exact(l, t), a = repetition_stirling(l, t);
        double re = std::abs(a.epsilon / e.epsilon - 1), rd = std::abs(a.delta / e.delta - 1);
        EXPECT_LT(re, prev_e);
        EXPECT_LT(rd, prev_d);
        prev_e = re;
        prev_d = rd;
    }
    EXPECT_NEAR(repetition_stirling(11, 1e-9).epsilon, 0.0, 1e-80);
    EXPECT_THROW(repetition_stirling(11, kPi / 2), std::invalid_argument);
}

TEST(Kappa, RepetitionApproximation) {
    // The ratio is 1 + O(1/l): about 2 at l = 5, shrinking roughly as 1/l.
    double cot = std::cos(0.3 * kPi) / std::sin(0.3 * kPi);
    auto excess = [&](size_t l) {
        auto a = repetition_exact(l, 0.3 * kPi);
        return kappa(a) / (cot * cot * a.epsilon) - 1.0;
    };
    EXPECT_GT(excess(5), 0.0);
    EXPECT_LT(excess(5), 1.5);
    for (size_t l : {5, 11, 21, 41, 81}) {
        EXPECT_GT(excess(l), 0.0);
        EXPECT_LT(excess(l) * static_cast<double>(l), 7.0) << l;
        EXPECT_LT(excess(2 * l + 1), excess(l));
    }
}

TEST(ZShor, Zipping) {
    EXPECT_EQ(z_shor_channel(1, 7, 0.4), repetition_exact(7, 0.4));
    for (size_t dx : {1, 3, 5, 7}) {
        for (size_t dz : {1, 3, 5}) {
            for (double f : {0.05, 0.2, 0.31}) {
                double t = f * kPi;
                EXPECT_EQ(kappa(z_shor_channel(dx, dz, t)), kappa(repetition_exact(dz, wrap_angle(dx * t))));
            }
        }
    }
    for (double f = 0.05; f < 0.46; f += 0.05) {
        auto a = z_shor_channel(3, 3, f * kPi);
        auto b = oracle::naive_channel(build_code(family_z_shor(3, 3)), f * kPi);
        EXPECT_NEAR(a.epsilon, b.epsilon, 1e-12);
        EXPECT_NEAR(a.delta, b.delta, 1e-12);
    }
}

TEST(XShor, PoweredRepetition) {
    EXPECT_EQ(x_shor_channel(1, 5, 0.3), repetition_exact(5, 0.3));
    for (double f = 0.05; f < 0.46; f += 0.05) {
        auto a = x_shor_channel(3, 3, f * kPi);
        auto b = oracle::naive_channel(build_code(family_x_shor(3, 3)), f * kPi);
        EXPECT_NEAR(a.epsilon, b.epsilon, 1e-12);
        EXPECT_NEAR(a.delta, b.delta, 1e-12);
    }
}

TEST(XShor, CoherenceScalesWithRows) {
    double t = 0.2 * kPi;
    EXPECT_NEAR(kappa(x_shor_channel(21, 21, t)) / (21 * kappa(repetition_exact(21, t))), 1.0, 0.05);
}

TEST(ZStacked, Composition) {
    for (size_t l : {1, 3, 5, 9}) {
        auto a = z_stacked_channel(l, 1, 0.3);
        auto b = x_shor_channel(l, l, 0.3);
        EXPECT_NEAR(a.epsilon, b.epsilon, 1e-14);
        EXPECT_NEAR(a.delta, b.delta, 1e-14);
    }
    for (double f = 0.05; f < 0.46; f += 0.05) {
        auto a = z_stacked_channel(3, 2, f * kPi);
        auto b = oracle::naive_channel(build_code(family_z_stacked(3, 2)), f * kPi);
        EXPECT_NEAR(a.epsilon, b.epsilon, 1e-12);
        EXPECT_NEAR(a.delta, b.delta, 1e-12);
    }
    EXPECT_THROW(z_stacked_channel(5, 0, 0.1), std::invalid_argument);
    EXPECT_THROW(z_stacked_channel(5, 7, 0.1), std::invalid_argument);
}

TEST(ZStacked, EnumerationAtLargerSizes) {
    for (auto [l, h] : {std::pair<size_t, size_t>{5, 2}, {5, 3}}) {
        auto code = build_code(family_z_stacked(l, h));
        double thetas[] = {0.1 * kPi, 0.3 * kPi};
        auto sums = exact_summaries(code, thetas, Recovery::MinWeight);
        for (size_t k = 0; k < 2; k++) {
            auto a = z_stacked_channel(l, h, thetas[k]);
            EXPECT_NEAR(sums[k].ptm.epsilon, a.epsilon, 1e-10);
            EXPECT_NEAR(sums[k].ptm.delta, a.delta, 1e-10);
        }
    }
}

TEST(ZStacked, CoherenceScalesWithBlocks) {
    size_t l = 21, h = 3;
    double t = 0.05 * kPi;
    double ratio = kappa(z_stacked_channel(l, h, t)) / ((double(l) / h) * kappa(repetition_exact(l, h * t)));
    EXPECT_NEAR(ratio, 1.0, 0.05);
}

TEST(FamilySpec, Dispatch) {
    EXPECT_EQ(family_channel({RepetitionFamily{5}, Recovery::ML}, 2.0), repetition_exact(5, 2.0, Recovery::ML));
    EXPECT_EQ(family_channel({ZShorFamily{3, 5}}, 0.4), z_shor_channel(3, 5, 0.4));
    EXPECT_EQ(family_channel({XShorFamily{3, 5}}, 0.4), x_shor_channel(3, 5, 0.4));
    EXPECT_EQ(family_channel({ZStackedFamily{7, 2}}, 0.4), z_stacked_channel(7, 2, 0.4));
    EXPECT_THROW(family_channel({XShorFamily{3, 5}, Recovery::ML}, 0.4), std::invalid_argument);
    EXPECT_EQ(family_coloring({ZStackedFamily{7, 3}}), family_z_stacked(7, 3));
}

TEST(FamilySpec, Thresholds) {
    EXPECT_DOUBLE_EQ(closed_form_threshold({RepetitionFamily{3}}).coherence, kPi / 2);
    EXPECT_DOUBLE_EQ(closed_form_threshold({XShorFamily{3, 3}}).infidelity, kPi / 2);
    EXPECT_DOUBLE_EQ(closed_form_threshold({ZStackedFamily{9, 2}}).coherence, kPi / 4);
    EXPECT_DOUBLE_EQ(closed_form_threshold({ZStackedFamily{9, 3}}).coherence, kPi / 6);
    EXPECT_DOUBLE_EQ(closed_form_threshold({ZShorFamily{3, 9}}).coherence, kPi / 6);
}

// Below pi/2 the repetition epsilon falls exponentially with l; above it grows.
TEST(Suppression, Repetition) {
    double prev = 0.0;
    for (size_t l = 3; l <= 101; l += 2) {
        double le = repetition_log_epsilon(l, 0.9 * kPi / 2);
        if (l > 3) EXPECT_LT(le, prev);
        prev = le;
    }
    prev = -1e300;
    for (size_t l = 3; l <= 101; l += 2) {
        double e = repetition_exact(l, 1.1 * kPi / 2).epsilon;
        EXPECT_GE(e, prev);
        prev = e;
    }
}

TEST(Repetition, EndpointAngles) {
    for (size_t l : {1, 3, 5, 21}) {
        auto zero = repetition_exact(l, 0.0);
        EXPECT_EQ(zero.epsilon, 0.0);
        EXPECT_EQ(zero.delta, 0.0);
        auto flip = repetition_exact(l, kPi);
        EXPECT_NEAR(flip.epsilon, 2.0, 1e-12);
        EXPECT_NEAR(flip.delta, 0.0, 1e-12);
        EXPECT_FALSE(std::isnan(repetition_diamond(l, 0.0)));
    }
}

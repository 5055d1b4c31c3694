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
#include <random>

#include "compass/pauli_channel.h"
#include "oracles.h"

using namespace compass;
constexpr double kPi = std::numbers::pi;

TEST(Polar, Examples) {
    auto id = to_polar(LogicalPTM::identity());
    EXPECT_EQ(id.lam, 0.0);
    EXPECT_EQ(id.phi, 0.0);
    for (double t : {0.1, 0.7, 2.0, -1.3}) {
        auto q = to_polar(LogicalPTM::rotation(t));
        EXPECT_NEAR(q.lam, 0.0, 1e-15);
        EXPECT_NEAR(q.phi, t, 1e-15);
    }
    LogicalPTM a{0.01, 0.02};
    auto back = from_polar(to_polar(a));
    EXPECT_NEAR(back.epsilon, a.epsilon, 1e-14);
    EXPECT_NEAR(back.delta, a.delta, 1e-14);
}

TEST(Polar, Saturated) {
    auto q = to_polar({1.0, 0.0});
    EXPECT_TRUE(q.saturated());
    auto back = from_polar(q);
    EXPECT_EQ(back.epsilon, 1.0);
    EXPECT_EQ(back.delta, 0.0);
    EXPECT_TRUE(to_polar(power({1.0, 0.0}, 3)).saturated());
}

TEST(Polar, RandomRoundTrip) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 1000; k++) {
        // Points of the closed unit disc give valid (1 - eps, delta).
        double re = u(rng), im = u(rng);
        if (re * re + im * im > 1.0) continue;
        LogicalPTM a{1.0 - re, im};
        auto q = to_polar(a);
        EXPECT_LE(q.lam, 1e-15);
        EXPECT_NEAR(std::exp(q.lam) * std::cos(q.phi), 1.0 - a.epsilon, 1e-12);
        EXPECT_NEAR(std::exp(q.lam) * std::sin(q.phi), a.delta, 1e-12);
        auto b = from_polar(q);
        EXPECT_NEAR(b.epsilon, a.epsilon, 1e-12);
        EXPECT_NEAR(b.delta, a.delta, 1e-12);
    }
}

TEST(Compose, Algebra) {
    LogicalPTM a{0.1, 0.2}, b{0.05, -0.1}, c{0.3, 0.4};
    auto ab_c = compose(compose(a, b), c);
    auto a_bc = compose(a, compose(b, c));
    EXPECT_NEAR(ab_c.epsilon, a_bc.epsilon, 1e-15);
    EXPECT_NEAR(ab_c.delta, a_bc.delta, 1e-15);
    EXPECT_EQ(compose(a, LogicalPTM::identity()), a);
    EXPECT_EQ(power(a, 0), LogicalPTM::identity());
    for (uint64_t m1 : {0, 1, 3, 7}) {
        for (uint64_t m2 : {0, 2, 5}) {
            auto lhs = power(a, m1 + m2);
            auto rhs = compose(power(a, m1), power(a, m2));
            EXPECT_NEAR(lhs.epsilon, rhs.epsilon, 1e-12);
            EXPECT_NEAR(lhs.delta, rhs.delta, 1e-12);
        }
    }
    auto cubed = compose(a, compose(a, a));
    EXPECT_NEAR(power(a, 3).epsilon, cubed.epsilon, 1e-14);
    EXPECT_NEAR(power(a, 3).delta, cubed.delta, 1e-14);
}

TEST(Compose, RotationGroup) {
    for (double t : {0.1, 0.9, 2.5}) {
        for (uint64_t m : {1, 2, 5, 13}) {
            auto p = power(LogicalPTM::rotation(t), m);
            auto r = LogicalPTM::rotation(static_cast<double>(m) * t);
            EXPECT_NEAR(p.epsilon, r.epsilon, 1e-12);
            EXPECT_NEAR(p.delta, r.delta, 1e-12);
        }
    }
}

TEST(Compose, TinyChannelsKeepPrecision) {
    LogicalPTM a{1e-30, 1e-16};
    auto p = power(a, 1000);
    EXPECT_NEAR(p.delta / 1e-13, 1.0, 1e-9);
    EXPECT_GT(p.epsilon, 0.0);
}

TEST(Infidelity, R1) {
    EXPECT_DOUBLE_EQ(r1({0.03, 0.0}), 0.01);
    EXPECT_EQ(r1(LogicalPTM::identity()), 0.0);
    for (double t : {0.2, 1.0, 2.4}) {
        EXPECT_NEAR(r1(LogicalPTM::rotation(t)), (1 - std::cos(t)) / 3, 1e-15);
        // Direct state averaging over the sphere.
        EXPECT_NEAR(r1(LogicalPTM::rotation(t)), oracle::bloch_rotation_infidelity(t), 1e-4);
        EXPECT_NEAR(r1(LogicalPTM::rotation(t)), oracle::octahedron_infidelity(LogicalPTM::rotation(t), 1), 1e-15);
    }
}

TEST(Infidelity, RmMatchesStateAverage) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 200; k++) {
        double re = u(rng), im = u(rng);
        if (re * re + im * im > 1.0) continue;
        LogicalPTM a{1.0 - re, im};
        for (int m : {0, 1, 2, 5, 11}) {
            double r = rm_exact(a, m);
            EXPECT_NEAR(r, oracle::octahedron_infidelity(a, m), 1e-12);
            EXPECT_GE(r, -1e-15);
            EXPECT_LE(r, 2.0 / 3.0 + 1e-15);
        }
    }
}

TEST(Infidelity, RmRotation) {
    for (double t : {0.05, 0.4, 1.7}) {
        for (uint64_t m : {0, 1, 4, 9}) {
            EXPECT_NEAR(rm_exact(LogicalPTM::rotation(t), m), (1 - std::cos(m * t)) / 3, 1e-13);
            EXPECT_NEAR(rm_exact(LogicalPTM::rotation(t), m), rm_exact(LogicalPTM::rotation(t + 2 * kPi), m), 1e-12);
        }
    }
    EXPECT_EQ(rm_exact({0.2, 0.1}, 0), 0.0);
    EXPECT_DOUBLE_EQ(rm_exact({0.2, 0.1}, 1), r1({0.2, 0.1}));
}

TEST(Infidelity, SmallChannelExpansion) {
    LogicalPTM a{1e-4, 1e-3};
    double exact = rm_exact(a, 10);
    double plus = a.epsilon * 10 / 3 + 100 * a.delta * a.delta / 6;
    EXPECT_NEAR(exact / plus, 1.0, 0.1);
    // The commonly quoted expansion carries the opposite sign on delta^2.
    double quoted = rm_expansion(a, 10);
    EXPECT_DOUBLE_EQ(quoted, a.epsilon * 10 / 3 - 90 * a.delta * a.delta / 6);
    EXPECT_LT(quoted, exact);
}

TEST(Kappa, Values) {
    for (double t : {0.3, 1.0, 2.0}) {
        EXPECT_NEAR(kappa(LogicalPTM::rotation(t)), std::sin(t) * std::sin(t) / (1 - std::cos(t)), 1e-12);
    }
    EXPECT_EQ(kappa(LogicalPTM::identity()), 0.0);
    EXPECT_TRUE(std::isinf(kappa({0.0, 0.1})));
    EXPECT_DOUBLE_EQ(kappa({0.5, 0.5}), 0.5);
}

TEST(Diamond, Values) {
    SyndromeDistribution id{0.0, {{BitVector(0), 1.0, 0.0}}};
    EXPECT_EQ(diamond_avg(id), 0.0);
    SyndromeDistribution one{0.1 * kPi, {{BitVector(0), 1.0, 0.1 * kPi}}};
    EXPECT_NEAR(diamond_avg(one), 2 * std::sin(0.1 * kPi), 1e-15);
    auto ch = channel_of(one);
    EXPECT_NEAR(ch.epsilon, 1 - std::cos(0.1 * kPi), 1e-15);
    EXPECT_NEAR(ch.delta, std::sin(0.1 * kPi), 1e-15);
}

TEST(WrapAngle, Range) {
    EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
    EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
    EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
    EXPECT_NEAR(wrap_angle(0.3 + 4 * kPi), 0.3, 1e-14);
}

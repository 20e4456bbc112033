// Copyright 2026 The qtier Authors
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

#include "qtier/kernels.hpp"
#include "qtier/local_state.hpp"
#include "reference.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace qtier;

namespace {

const double kS = 1.0 / std::sqrt(2.0);

void expectState(const LocalState& s, const std::vector<Amplitude>& expected, double tol = 1e-15) {
    ASSERT_EQ(s.size(), expected.size());
    for (Index i = 0; i < s.size(); ++i) {
        EXPECT_NEAR(s.amplitude(i).real(), expected[i].real(), tol) << "i=" << i;
        EXPECT_NEAR(s.amplitude(i).imag(), expected[i].imag(), tol) << "i=" << i;
    }
}

// Records which indices a kernel reads; stores nothing.
struct ProbeView {
    Index n;
    mutable std::vector<Index> loads;
    Index size() const { return n; }
    Amplitude load(Index i) const {
        loads.push_back(i);
        return 0.0;
    }
};

}  // namespace

TEST(Bits, InsertAndRemove) {
    EXPECT_EQ(insertZeroBit(0b111, 1), 0b1101u);
    EXPECT_EQ(removeBit(0b1101, 1), 0b111u);
    EXPECT_EQ(insertTwoZeroBits(0b11, 2, 0), 0b1010u);
    EXPECT_EQ(log2Exact(1024), 10u);
    EXPECT_TRUE(isPowerOfTwo(64));
    EXPECT_FALSE(isPowerOfTwo(0));
    EXPECT_FALSE(isPowerOfTwo(12));
}

TEST(Gates, PhaseExponentSign) {
    EXPECT_DOUBLE_EQ(phaseAngle(2), std::numbers::pi / 2);
    EXPECT_DOUBLE_EQ(phaseAngle(-3), -std::numbers::pi / 4);
    EXPECT_DOUBLE_EQ(phaseAngle(1), std::numbers::pi);
}

TEST(Gates, DiagonalKinds) {
    EXPECT_TRUE(Gate::z(0).isDiagonal());
    EXPECT_TRUE(Gate::phase(0, 3).isDiagonal());
    EXPECT_TRUE(Gate::cphase(0, 1, 3).isDiagonal());
    EXPECT_FALSE(Gate::h(0).isDiagonal());
    EXPECT_FALSE(Gate::cnot(0, 1).isDiagonal());
}

TEST(Gates, ValidationRejectsBadOperands) {
    EXPECT_THROW(validateGate(Gate::h(3), 3), ValidationError);
    EXPECT_THROW(validateGate(Gate::cnot(1, 1), 3), ValidationError);
    EXPECT_THROW(validateGate(Gate::cphase(2, 2, 1), 3), ValidationError);
    Mat2 notUnitary;
    notUnitary << 1, 1, 0, 1;
    EXPECT_THROW(validateGate(Gate::u2(0, notUnitary), 1), ValidationError);
    EXPECT_NO_THROW(validateGate(Gate::h(2), 3));
}

TEST(Kernels, HadamardOnQubitZero) {
    auto s = LocalState::zero(2, PrecisionMode::FP64);
    applyGate(s, Gate::h(0));
    expectState(s, {kS, kS, 0, 0});
}

TEST(Kernels, XOnQubitOne) {
    auto s = LocalState::zero(2, PrecisionMode::FP64);
    applyGate(s, Gate::x(1));
    expectState(s, {0, 0, 1, 0});
}

TEST(Kernels, ControlledPhaseExamples) {
    std::vector<Amplitude> half(4, 0.5);
    auto s = LocalState::fromAmplitudes(half, PrecisionMode::FP64);
    applyControlledPhase(s, 0, 1, std::numbers::pi);
    expectState(s, {0.5, 0.5, 0.5, -0.5});

    auto t = LocalState::fromAmplitudes(half, PrecisionMode::FP64);
    applyControlledPhase(t, 0, 1, 0.0);
    expectState(t, half);
}

TEST(Kernels, ControlledPhaseQuarterTurnMatchesReference) {
    const double a = 1.0 / std::sqrt(8.0);
    std::vector<Amplitude> uniform(8, a);
    auto s = LocalState::fromAmplitudes(uniform, PrecisionMode::FP64);
    applyGate(s, Gate::cphase(0, 1, 2));
    const auto expected = reference::step(uniform, Gate::cphase(0, 1, 2));
    expectState(s, expected);
    EXPECT_NEAR(s.amplitude(3).imag(), a, 1e-15);
    EXPECT_NEAR(s.amplitude(7).imag(), a, 1e-15);
    EXPECT_NEAR(s.amplitude(5).real(), a, 1e-15);
}

TEST(Kernels, CnotExamples) {
    Mat4 cnot = Gate::cnot(0, 1).matrix4();
    auto s = LocalState::zero(2, PrecisionMode::FP64);
    applyTwoQubit(s, cnot, 0, 1);
    expectState(s, {1, 0, 0, 0});

    auto t = LocalState::fromAmplitudes(std::vector<Amplitude>{0, 1, 0, 0}, PrecisionMode::FP64);
    applyGate(t, Gate::cnot(0, 1));
    expectState(t, {0, 0, 0, 1});
}

TEST(Kernels, TouchedPairsAtQubitThirteen) {
    const Qubit localQubits = 20;
    const Qubit q = 13;
    const Index n = Index{1} << localQubits;
    std::vector<std::pair<Index, Index>> touched;
    forEachPair(n, q, [&](Index lo, Index hi) { touched.push_back({lo, hi}); });

    std::vector<std::pair<Index, Index>> expected;
    for (Index i = 0; i < n; ++i)
        if (((i >> q) & 1) == 0) expected.push_back({i, i + 8192});
    std::sort(touched.begin(), touched.end());
    EXPECT_EQ(touched.size(), Index{1} << 19);
    EXPECT_EQ(touched, expected);
}

TEST(Kernels, PairsAreDisjoint) {
    for (Qubit q = 0; q < 6; ++q) {
        ProbeView view{64, {}};
        visitSingleQubit(view, Mat2::Identity(), q, [](Index, const Amplitude&) {});
        std::set<Index> seen(view.loads.begin(), view.loads.end());
        EXPECT_EQ(seen.size(), view.loads.size()) << "q=" << q;
        EXPECT_EQ(view.loads.size(), 64u);
    }
    for (Qubit a = 0; a < 6; ++a) {
        for (Qubit b = 0; b < 6; ++b) {
            if (a == b) continue;
            ProbeView view{64, {}};
            visitTwoQubit(view, Mat4::Identity(), a, b, [](Index, const Amplitude&) {});
            std::set<Index> seen(view.loads.begin(), view.loads.end());
            EXPECT_EQ(seen.size(), 64u);
            EXPECT_EQ(view.loads.size(), 64u);
        }
    }
}

TEST(Kernels, SingleQubitGateCountsHalfTheElements) {
    for (Qubit localQubits : {1u, 5u, 10u}) {
        Index products = 0;
        forEachPair(Index{1} << localQubits, 0, [&](Index, Index) { ++products; });
        EXPECT_EQ(products, Index{1} << (localQubits - 1));
    }
    Index quads = 0;
    forEachQuad(Index{1} << 10, 3, 7, [&](Index, Index, Index, Index) { ++quads; });
    EXPECT_EQ(quads, Index{1} << 8);
}

TEST(Kernels, RandomTwoQubitUnitaryMatchesReference) {
    std::mt19937_64 rng(7);
    const Qubit n = 10;
    for (int trial = 0; trial < 5; ++trial) {
        const auto input = reference::randomState(n, rng);
        std::uniform_int_distribution<Qubit> pick(0, n - 1);
        const Qubit a = pick(rng);
        Qubit b = pick(rng);
        while (b == a) b = pick(rng);
        const Gate g = Gate::u4(a, b, reference::randomUnitary(4, rng));
        auto s = LocalState::fromAmplitudes(input, PrecisionMode::FP64);
        applyGate(s, g);
        EXPECT_LT(reference::maxDifference(reference::step(input, g), s.amplitudes()), 1e-12);
    }
}

TEST(Kernels, EveryKindMatchesReferenceInEveryMode) {
    std::mt19937_64 rng(11);
    const Qubit n = 6;
    for (int trial = 0; trial < 20; ++trial) {
        const auto circuit = reference::randomCircuit(n, 30, rng);
        const auto expected = reference::run(circuit);
        for (PrecisionMode mode : {PrecisionMode::FP64, PrecisionMode::FP32}) {
            auto s = LocalState::zero(n, mode);
            for (const Gate& g : circuit.gates)
                if (g.kind != GateKind::MeasureAll) applyGate(s, g);
            EXPECT_LT(reference::maxDifference(expected, s.amplitudes()), mode == PrecisionMode::FP64 ? 1e-12 : 1e-5);
            EXPECT_NEAR(s.normSquared(), 1.0, normTolerance(mode));
        }
    }
}

TEST(Kernels, FloatStorageKeepsDoubleArithmetic) {
    auto s = LocalState::zero(1, PrecisionMode::FP32);
    applyGate(s, Gate::h(0));
    applyGate(s, Gate::h(0));
    // Two rounded halves recombine to one within float storage precision.
    EXPECT_NEAR(s.amplitude(0).real(), 1.0, 1e-7);
    EXPECT_EQ(s.storageBytes(), 2u * 8u);
}

TEST(Kernels, LocalQubitOutOfRangeThrows) {
    auto s = LocalState::zero(3, PrecisionMode::FP64);
    EXPECT_THROW(applySingleQubit(s, Mat2::Identity(), 3), std::out_of_range);
    EXPECT_THROW(applyTwoQubit(s, Mat4::Identity(), 0, 5), std::out_of_range);
}

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

#pragma once

#include "qtier/types.hpp"

#include <array>
#include <span>
#include <string>

namespace qtier {

enum class GateKind { H, X, Y, Z, Phase, CPhase, CNot, U2, U4, MeasureAll };

std::string_view mnemonic(GateKind kind);

/// Angle of a phase gate with exponent k: sign(k) * 2*pi / 2^|k|.
/// Negative exponents denote the inverse rotation (used by inverse QFTs).
double phaseAngle(int exponent);

/// e^{i phaseAngle(k)}, exact for |k| <= 2.
Amplitude phaseFactor(int exponent);

/// One circuit instruction.
///
/// Phase and CPhase carry an exponent instead of a free angle so that
/// circuits stay exactly serializable. U2 keeps its matrix in the top-left
/// 2x2 block of `matrix`.
struct Gate {
    GateKind kind = GateKind::H;
    std::array<Qubit, 2> qubits{0, 0};
    int exponent = 0;
    Mat4 matrix = Mat4::Identity();

    static Gate h(Qubit q);
    static Gate x(Qubit q);
    static Gate y(Qubit q);
    static Gate z(Qubit q);
    static Gate phase(Qubit q, int k);
    static Gate cphase(Qubit control, Qubit target, int k);
    static Gate cnot(Qubit control, Qubit target);
    static Gate u2(Qubit q, const Mat2& m);
    static Gate u4(Qubit q1, Qubit q2, const Mat4& m);
    static Gate measureAll();

    /// Number of qubit operands (0 for MeasureAll).
    unsigned arity() const;
    std::span<const Qubit> operands() const { return {qubits.data(), arity()}; }

    /// Z, Phase and CPhase: no pairing of amplitudes, no data exchange.
    bool isDiagonal() const;

    /// 2x2 matrix of a single-qubit kind.
    Mat2 matrix2() const;
    /// 4x4 matrix of a two-qubit kind in the basis order
    /// (none, qubits[0], qubits[1], both).
    Mat4 matrix4() const;

    /// Diagonal gates only: factor applied to the amplitudes selected by
    /// diagonalMask(). Z is the phase gate with angle pi.
    Amplitude diagonalFactor() const;
    Index diagonalMask() const;

    bool operator==(const Gate& other) const;
};

/// ||U^dagger U - I||_inf below `tolerance`.
bool isUnitary(const Eigen::MatrixXcd& u, double tolerance = 1e-12);

/// Checks operand ranges, distinctness and unitarity against a register of
/// `qubitCount` qubits. Throws ValidationError.
void validateGate(const Gate& gate, Qubit qubitCount);

}  // namespace qtier

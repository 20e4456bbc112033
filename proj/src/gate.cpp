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

#include "qtier/gate.hpp"

#include <cmath>
#include <numbers>

namespace qtier {

std::string_view toString(PrecisionMode mode) {
    switch (mode) {
        case PrecisionMode::FP64: return "fp64";
        case PrecisionMode::FP32: return "fp32";
        case PrecisionMode::BYTE: return "be";
    }
    return "?";
}

PrecisionMode parsePrecisionMode(std::string_view text) {
    if (text == "fp64") return PrecisionMode::FP64;
    if (text == "fp32") return PrecisionMode::FP32;
    if (text == "be" || text == "byte") return PrecisionMode::BYTE;
    throw ValidationError("unknown precision mode '" + std::string(text) + "'");
}

std::string_view mnemonic(GateKind kind) {
    switch (kind) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::Phase: return "PHASE";
        case GateKind::CPhase: return "CPHASE";
        case GateKind::CNot: return "CNOT";
        case GateKind::U2: return "U2";
        case GateKind::U4: return "U4";
        case GateKind::MeasureAll: return "M";
    }
    return "?";
}

double phaseAngle(int exponent) {
    const double magnitude = 2.0 * std::numbers::pi / std::ldexp(1.0, std::abs(exponent));
    return exponent < 0 ? -magnitude : magnitude;
}

namespace {

Gate single(GateKind kind, Qubit q) {
    Gate g;
    g.kind = kind;
    g.qubits = {q, 0};
    return g;
}

}  // namespace

Gate Gate::h(Qubit q) { return single(GateKind::H, q); }
Gate Gate::x(Qubit q) { return single(GateKind::X, q); }
Gate Gate::y(Qubit q) { return single(GateKind::Y, q); }
Gate Gate::z(Qubit q) { return single(GateKind::Z, q); }

Gate Gate::phase(Qubit q, int k) {
    Gate g = single(GateKind::Phase, q);
    g.exponent = k;
    return g;
}

Gate Gate::cphase(Qubit control, Qubit target, int k) {
    Gate g;
    g.kind = GateKind::CPhase;
    g.qubits = {control, target};
    g.exponent = k;
    return g;
}

Gate Gate::cnot(Qubit control, Qubit target) {
    Gate g;
    g.kind = GateKind::CNot;
    g.qubits = {control, target};
    return g;
}

Gate Gate::u2(Qubit q, const Mat2& m) {
    Gate g = single(GateKind::U2, q);
    g.matrix.topLeftCorner<2, 2>() = m;
    return g;
}

Gate Gate::u4(Qubit q1, Qubit q2, const Mat4& m) {
    Gate g;
    g.kind = GateKind::U4;
    g.qubits = {q1, q2};
    g.matrix = m;
    return g;
}

Gate Gate::measureAll() {
    Gate g;
    g.kind = GateKind::MeasureAll;
    return g;
}

unsigned Gate::arity() const {
    switch (kind) {
        case GateKind::CPhase:
        case GateKind::CNot:
        case GateKind::U4: return 2;
        case GateKind::MeasureAll: return 0;
        default: return 1;
    }
}

bool Gate::isDiagonal() const {
    return kind == GateKind::Z || kind == GateKind::Phase || kind == GateKind::CPhase;
}

Mat2 Gate::matrix2() const {
    const double s = std::numbers::sqrt2 / 2.0;
    Mat2 m;
    switch (kind) {
        case GateKind::H: m << s, s, s, -s; break;
        case GateKind::X: m << 0, 1, 1, 0; break;
        case GateKind::Y: m << 0, Amplitude(0, -1), Amplitude(0, 1), 0; break;
        case GateKind::Z:
        case GateKind::Phase: m << 1, 0, 0, diagonalFactor(); break;
        case GateKind::U2: m = matrix.topLeftCorner<2, 2>(); break;
        default: throw ValidationError("matrix2() on a gate that is not single-qubit");
    }
    return m;
}

Mat4 Gate::matrix4() const {
    Mat4 m = Mat4::Identity();
    switch (kind) {
        case GateKind::CPhase: m(3, 3) = diagonalFactor(); break;
        case GateKind::CNot:
            // control = qubits[0] (basis bit 0), target = qubits[1] (basis bit 1)
            m(1, 1) = 0;
            m(3, 3) = 0;
            m(1, 3) = 1;
            m(3, 1) = 1;
            break;
        case GateKind::U4: m = matrix; break;
        default: throw ValidationError("matrix4() on a gate that is not two-qubit");
    }
    return m;
}

Amplitude phaseFactor(int exponent) {
    // Quarter turns are exact so that Clifford-angle circuits stay exact.
    switch (exponent) {
        case 0: return {1.0, 0.0};
        case 1:
        case -1: return {-1.0, 0.0};
        case 2: return {0.0, 1.0};
        case -2: return {0.0, -1.0};
        default: return std::polar(1.0, phaseAngle(exponent));
    }
}

Amplitude Gate::diagonalFactor() const {
    if (kind == GateKind::Z) return {-1.0, 0.0};
    return phaseFactor(exponent);
}

Index Gate::diagonalMask() const {
    if (kind == GateKind::CPhase) return bitMask(qubits[0]) | bitMask(qubits[1]);
    return bitMask(qubits[0]);
}

bool Gate::operator==(const Gate& other) const {
    if (kind != other.kind) return false;
    for (unsigned i = 0; i < arity(); ++i)
        if (qubits[i] != other.qubits[i]) return false;
    if (kind == GateKind::Phase || kind == GateKind::CPhase) return exponent == other.exponent;
    if (kind == GateKind::U2) return matrix.topLeftCorner<2, 2>() == other.matrix.topLeftCorner<2, 2>();
    if (kind == GateKind::U4) return matrix == other.matrix;
    return true;
}

bool isUnitary(const Eigen::MatrixXcd& u, double tolerance) {
    if (u.rows() != u.cols()) return false;
    const Eigen::MatrixXcd residual = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return residual.cwiseAbs().maxCoeff() < tolerance;
}

void validateGate(const Gate& gate, Qubit qubitCount) {
    const auto ops = gate.operands();
    for (Qubit q : ops)
        if (q >= qubitCount)
            throw ValidationError("qubit index out of range: " + std::to_string(q) + " >= " +
                                  std::to_string(qubitCount));
    if (ops.size() == 2 && ops[0] == ops[1])
        throw ValidationError(std::string(mnemonic(gate.kind)) + " operands must be distinct");
    if (gate.kind == GateKind::U2 && !isUnitary(gate.matrix.topLeftCorner<2, 2>()))
        throw ValidationError("U2 matrix is not unitary");
    if (gate.kind == GateKind::U4 && !isUnitary(gate.matrix))
        throw ValidationError("U4 matrix is not unitary");
}

}  // namespace qtier

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

#include "qtier/oracle.hpp"

#include <string>

namespace qtier {

DenseState denseZero(Qubit qubits) {
    if (qubits > kOracleMaxQubits)
        throw ValidationError("the dense oracle is limited to " + std::to_string(kOracleMaxQubits) + " qubits");
    DenseState s = DenseState::Zero(Eigen::Index{1} << qubits);
    s(0) = 1.0;
    return s;
}

DenseState denseApply(const DenseState& state, const Gate& gate) {
    const Eigen::Index size = state.size();
    DenseState out = DenseState::Zero(size);
    if (gate.arity() == 1) {
        const Mat2 u = gate.matrix2();
        const Qubit q = gate.qubits[0];
        for (Eigen::Index i = 0; i < size; ++i) {
            const int row = (i >> q) & 1;
            const Eigen::Index base = i & ~(Eigen::Index{1} << q);
            for (int col = 0; col < 2; ++col) out(i) += u(row, col) * state(base | (Eigen::Index{col} << q));
        }
    } else if (gate.arity() == 2) {
        const Mat4 u = gate.matrix4();
        const Qubit q1 = gate.qubits[0], q2 = gate.qubits[1];
        for (Eigen::Index i = 0; i < size; ++i) {
            const int row = static_cast<int>(((i >> q1) & 1) | (((i >> q2) & 1) << 1));
            const Eigen::Index base = i & ~((Eigen::Index{1} << q1) | (Eigen::Index{1} << q2));
            for (int col = 0; col < 4; ++col) {
                const Eigen::Index j = base | (Eigen::Index{col & 1} << q1) | (Eigen::Index{col >> 1} << q2);
                out(i) += u(row, col) * state(j);
            }
        }
    } else {
        return state;
    }
    return out;
}

ExpectationReport denseMeasure(const DenseState& state) {
    const Eigen::Index size = state.size();
    Qubit qubits = 0;
    while ((Eigen::Index{1} << qubits) < size) ++qubits;

    ExpectationReport report;
    report.qubits.resize(qubits);
    report.normSquared = state.squaredNorm();
    report.normFlagged = std::abs(report.normSquared - 1.0) > normTolerance(PrecisionMode::FP64);
    for (Qubit q = 0; q < qubits; ++q) {
        std::complex<double> coherence = 0.0;
        double one = 0.0;
        for (Eigen::Index i = 0; i < size; ++i) {
            if ((i >> q) & 1) {
                one += std::norm(state(i));
            } else {
                coherence += std::conj(state(i)) * state(i | (Eigen::Index{1} << q));
            }
        }
        report.qubits[q].qz = one;
        report.qubits[q].qx = 0.5 - coherence.real();
        report.qubits[q].qy = 0.5 - coherence.imag();
    }
    return report;
}

OracleResult oracleRun(const Circuit& circuit) {
    circuit.validate();
    OracleResult result;
    result.state = denseZero(circuit.qubitCount);
    for (const Gate& g : circuit.gates) {
        if (g.kind == GateKind::MeasureAll)
            result.report = unpermute(denseMeasure(result.state), circuit);
        else
            result.state = denseApply(result.state, g);
    }
    return result;
}

}  // namespace qtier

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

#include "qtier/measure.hpp"

#include <cmath>

namespace qtier {

ExpectationReport unpermute(const ExpectationReport& physical, const Circuit& circuit) {
    ExpectationReport out = physical;
    for (Qubit l = 0; l < circuit.qubitCount; ++l) out.qubits[l] = physical.qubits[circuit.physical(l)];
    return out;
}

MeasurementSums localSums(std::span<const Amplitude> local, const PartitionLayout& layout, Rank rank) {
    const Qubit n = layout.totalQubits();
    const Qubit localQubits = layout.localQubits();
    MeasurementSums sums(n);

    double norm = 0.0;
    for (const Amplitude& a : local) norm += std::norm(a);
    sums.norm() = norm;

    const Index size = local.size();
    for (Qubit q = 0; q < localQubits; ++q) {
        const Index stride = bitMask(q);
        double z = 0.0, re = 0.0, im = 0.0;
        for (Index k = 0; k < size / 2; ++k) {
            const Index lo = insertZeroBit(k, q);
            const Amplitude a0 = local[lo];
            const Amplitude a1 = local[lo | stride];
            z += std::norm(a1);
            re += a0.real() * a1.real() + a0.imag() * a1.imag();
            im += a0.real() * a1.imag() - a0.imag() * a1.real();
        }
        sums.z(q) = z;
        sums.re(q, n) = re;
        sums.im(q, n) = im;
    }
    const Index base = layout.rankBase(rank);
    for (Qubit q = localQubits; q < n; ++q) sums.z(q) = testBit(base, q) ? norm : 0.0;
    return sums;
}

void addCrossSums(MeasurementSums& sums, Qubit q, Qubit qubits, std::span<const Amplitude> lower,
                  std::span<const Amplitude> upper) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < lower.size(); ++k) {
        const Amplitude a0 = lower[k];
        const Amplitude a1 = upper[k];
        re += a0.real() * a1.real() + a0.imag() * a1.imag();
        im += a0.real() * a1.imag() - a0.imag() * a1.real();
    }
    sums.re(q, qubits) += re;
    sums.im(q, qubits) += im;
}

ExpectationReport finishReport(std::span<const MeasurementSums> perRank, Qubit qubits, PrecisionMode mode) {
    MeasurementSums total(qubits);
    for (const MeasurementSums& s : perRank)
        for (std::size_t i = 0; i < total.values.size(); ++i) total.values[i] += s.values[i];

    ExpectationReport report;
    report.qubits.resize(qubits);
    for (Qubit q = 0; q < qubits; ++q) {
        report.qubits[q].qz = total.z(q);
        report.qubits[q].qx = (1.0 - 2.0 * total.re(q, qubits)) / 2.0;
        report.qubits[q].qy = (1.0 - 2.0 * total.im(q, qubits)) / 2.0;
    }
    report.normSquared = total.norm();
    report.normFlagged = std::abs(report.normSquared - 1.0) > normTolerance(mode);
    return report;
}

std::vector<std::byte> packDoubles(std::span<const double> values) {
    return packElements<double>(values);
}

std::vector<double> unpackDoubles(std::span<const std::byte> bytes) { return unpackElements<double>(bytes); }

}  // namespace qtier

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

// Three-axis expectation values of every qubit.
//
// Q values are probabilities of the -1 eigenvalue, Q = (1 - <sigma>)/2:
//   Qz(i) = sum of |a|^2 over indices with bit i set
//   Qx(i) = (1 - 2 sum Re(a0* a1)) / 2
//   Qy(i) = (1 - 2 sum Im(a0* a1)) / 2
// where (a0, a1) runs over the pairs differing in bit i.

#include "qtier/circuit.hpp"
#include "qtier/codec.hpp"
#include "qtier/layout.hpp"
#include "qtier/transport.hpp"

#include <cstring>
#include <span>
#include <vector>

namespace qtier {

struct QubitExpectation {
    double qx = 0.5;
    double qy = 0.5;
    double qz = 0.0;

    bool operator==(const QubitExpectation&) const = default;
};

struct ExpectationReport {
    std::vector<QubitExpectation> qubits;
    double normSquared = 1.0;
    /// |normSquared - 1| exceeded the tolerance of the precision mode.
    bool normFlagged = false;

    bool operator==(const ExpectationReport&) const = default;
};

/// Report indexed by logical label (entry l taken from physical(l)).
ExpectationReport unpermute(const ExpectationReport& physical, const Circuit& circuit);

/// Per-rank sums. Index layout: z[0..N), re[0..N), im[0..N), norm.
struct MeasurementSums {
    std::vector<double> values;

    explicit MeasurementSums(Qubit qubits) : values(3 * std::size_t{qubits} + 1, 0.0) {}
    double& z(Qubit q) { return values[q]; }
    double& re(Qubit q, Qubit n) { return values[n + q]; }
    double& im(Qubit q, Qubit n) { return values[2 * std::size_t{n} + q]; }
    double& norm() { return values.back(); }
};

/// Sums of one rank over its own partition: z for every qubit, re/im for
/// local qubits, and the norm. Accumulated in ascending index order.
MeasurementSums localSums(std::span<const Amplitude> local, const PartitionLayout& layout, Rank rank);

/// Adds sum Re/Im(a0* a1) over k of lower[k], upper[k] into re/im of q.
void addCrossSums(MeasurementSums& sums, Qubit q, Qubit qubits, std::span<const Amplitude> lower,
                  std::span<const Amplitude> upper);

/// Report from the sums of all ranks, added in rank order.
ExpectationReport finishReport(std::span<const MeasurementSums> perRank, Qubit qubits, PrecisionMode mode);

std::vector<std::byte> packDoubles(std::span<const double> values);
std::vector<double> unpackDoubles(std::span<const std::byte> bytes);

template <class Element>
std::vector<std::byte> packElements(std::span<const Element> elements) {
    std::vector<std::byte> out(elements.size_bytes());
    std::memcpy(out.data(), elements.data(), out.size());
    return out;
}

template <class Element>
std::vector<Element> unpackElements(std::span<const std::byte> bytes) {
    std::vector<Element> out(bytes.size() / sizeof(Element));
    std::memcpy(out.data(), bytes.data(), out.size() * sizeof(Element));
    return out;
}

/// Distributed measurement on one rank. `local` is the rank's partition in
/// storage format; every rank must call this together. For each qubit
/// j >= N' partners exchange half of their partition (read only, nothing is
/// sent back); the sums are combined with one collective.
template <class Policy>
ExpectationReport measureRank(std::span<const typename Policy::Element> local, const Codebook* codebook,
                              const PartitionLayout& layout, Rank rank, Transport& transport,
                              TrafficLedger& ledger, PrecisionMode mode) {
    using Element = typename Policy::Element;
    const Qubit n = layout.totalQubits();
    const Qubit localQubits = layout.localQubits();
    const Index half = layout.localSize() / 2;

    std::vector<Amplitude> decoded(local.size());
    for (std::size_t i = 0; i < local.size(); ++i) decoded[i] = Policy::load(local[i], codebook);
    MeasurementSums sums = localSums(decoded, layout, rank);

    for (Qubit q = localQubits; q < n; ++q) {
        const Rank partner = rank ^ (Rank{1} << (q - localQubits));
        const bool lower = partner > rank;
        // The lower rank keeps the half with the top local bit clear.
        const Index keepBase = lower ? 0 : half;
        const Index sendBase = lower ? half : 0;
        transport.send(rank, partner, packElements<Element>(local.subspan(sendBase, half)));
        const auto received = unpackElements<Element>(transport.receive(rank, partner));
        ledger.interRankBytesSent += half * sizeof(Element);
        ledger.interRankBytesReceived += received.size() * sizeof(Element);
        ledger.interRankMessages += 1;

        std::vector<Amplitude> theirs(received.size());
        for (std::size_t i = 0; i < received.size(); ++i) theirs[i] = Policy::load(received[i], codebook);
        const std::span<const Amplitude> mine(decoded.data() + keepBase, half);
        if (lower)
            addCrossSums(sums, q, n, mine, theirs);
        else
            addCrossSums(sums, q, n, theirs, mine);
    }

    const auto gathered = transport.allGather(rank, packDoubles(sums.values));
    ledger.collectiveBytes += sums.values.size() * sizeof(double) * (transport.rankCount() - 1);
    std::vector<MeasurementSums> perRank;
    perRank.reserve(gathered.size());
    for (const auto& bytes : gathered) {
        MeasurementSums s(n);
        s.values = unpackDoubles(bytes);
        perRank.push_back(std::move(s));
    }
    return finishReport(perRank, n, mode);
}

}  // namespace qtier

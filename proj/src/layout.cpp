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

#include "qtier/layout.hpp"

#include <string>

namespace qtier {

PartitionLayout::PartitionLayout(Qubit totalQubits, Qubit localQubits)
    : totalQubits_(totalQubits), localQubits_(localQubits) {
    if (totalQubits == 0) throw ValidationError("a layout needs at least one qubit");
    if (localQubits > totalQubits)
        throw ValidationError("local qubits (" + std::to_string(localQubits) + ") exceed total qubits (" +
                              std::to_string(totalQubits) + ")");
    if (totalQubits - localQubits > 30) throw ValidationError("too many ranks");
    // Exchanges split a partition into halves and quarters.
    if (localQubits < totalQubits && localQubits < 2)
        throw ValidationError("distributed layouts need at least two local qubits");
}

PartitionLayout PartitionLayout::withRanks(Qubit totalQubits, Rank ranks) {
    if (!isPowerOfTwo(ranks)) throw ValidationError("rank count must be a power of two");
    const unsigned rankBits = log2Exact(ranks);
    if (rankBits > totalQubits) throw ValidationError("more ranks than amplitudes");
    return PartitionLayout(totalQubits, totalQubits - rankBits);
}

std::uint64_t memoryBytes(Qubit qubits, PrecisionMode mode) {
    return (std::uint64_t{1} << qubits) * bytesPerElement(mode);
}

ExchangePlan planExchange(const PartitionLayout& layout, const Gate& gate, Rank rank, PrecisionMode mode) {
    ExchangePlan plan;
    plan.bytesPerElement = bytesPerElement(mode);
    if (gate.kind == GateKind::MeasureAll || gate.isDiagonal()) return plan;

    const Qubit n = layout.localQubits();
    const Index half = layout.localSize() / 2;
    auto pairwise = [&](Qubit high) {
        plan.kind = ExchangeKind::Pairwise;
        plan.partners = {rank ^ (Rank{1} << (high - n))};
        plan.elementCount = half;
    };

    if (gate.arity() == 1) {
        if (!layout.isLocal(gate.qubits[0])) pairwise(gate.qubits[0]);
        return plan;
    }
    if (gate.kind == GateKind::CNot) {
        // A high control is constant on a rank: either the whole partition
        // takes part or none of it does.
        const Qubit control = gate.qubits[0];
        if (!layout.isLocal(control) && !testBit(layout.rankBase(rank), control)) return plan;
        if (!layout.isLocal(gate.qubits[1])) pairwise(gate.qubits[1]);
        return plan;
    }
    const bool high1 = !layout.isLocal(gate.qubits[0]);
    const bool high2 = !layout.isLocal(gate.qubits[1]);
    if (high1 && high2) {
        const Rank m1 = Rank{1} << (gate.qubits[0] - n);
        const Rank m2 = Rank{1} << (gate.qubits[1] - n);
        const Rank groupBase = rank & ~(m1 | m2);
        plan.kind = ExchangeKind::Quad;
        for (unsigned position = 0; position < 4; ++position) {
            const Rank member = groupBase | ((position & 1) ? m1 : 0) | ((position & 2) ? m2 : 0);
            if (member != rank) plan.partners.push_back(member);
        }
        plan.elementCount = 3 * (layout.localSize() / 4);
    } else if (high1) {
        pairwise(gate.qubits[0]);
    } else if (high2) {
        pairwise(gate.qubits[1]);
    }
    return plan;
}

std::uint64_t measurementBytesPerRank(const PartitionLayout& layout, PrecisionMode mode) {
    const std::uint64_t highQubits = layout.totalQubits() - layout.localQubits();
    return highQubits * (layout.localSize() / 2) * bytesPerElement(mode);
}

TrafficLedger& TrafficLedger::operator+=(const TrafficLedger& other) {
    interRankBytesSent += other.interRankBytesSent;
    interRankBytesReceived += other.interRankBytesReceived;
    interRankMessages += other.interRankMessages;
    interRankReturnBytes += other.interRankReturnBytes;
    collectiveBytes += other.collectiveBytes;
    tierBytesMoved += other.tierBytesMoved;
    tierTransferCount += other.tierTransferCount;
    gateOperations += other.gateOperations;
    return *this;
}

std::uint64_t gibibytesExchanged(const TrafficLedger& ledger) {
    constexpr std::uint64_t kGiB = std::uint64_t{1} << 30;
    const std::uint64_t bytes = ledger.interRankBytesSent + ledger.interRankBytesReceived;
    return (bytes + kGiB / 2) / kGiB;
}

}  // namespace qtier

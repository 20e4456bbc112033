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

#include "qtier/gate.hpp"
#include "qtier/types.hpp"

#include <cstdint>
#include <vector>

namespace qtier {

using Rank = unsigned;

/// Partition of an N-qubit state over 2^(N-N') ranks. A rank owns the
/// global indices whose high N-N' bits equal the rank number.
class PartitionLayout {
  public:
    PartitionLayout(Qubit totalQubits, Qubit localQubits);

    /// Layout with the given rank count (a power of two).
    static PartitionLayout withRanks(Qubit totalQubits, Rank ranks);

    Qubit totalQubits() const { return totalQubits_; }
    Qubit localQubits() const { return localQubits_; }
    Rank rankCount() const { return Rank{1} << (totalQubits_ - localQubits_); }
    /// Amplitudes per rank, L = 2^N'.
    Index localSize() const { return Index{1} << localQubits_; }

    Rank rankOf(Index globalIndex) const { return static_cast<Rank>(globalIndex >> localQubits_); }
    Index rankBase(Rank rank) const { return Index{rank} << localQubits_; }
    bool isLocal(Qubit q) const { return q < localQubits_; }

    bool operator==(const PartitionLayout&) const = default;

  private:
    Qubit totalQubits_;
    Qubit localQubits_;
};

/// Bytes to hold a full N-qubit state: 2^(N+4) in FP64.
std::uint64_t memoryBytes(Qubit qubits, PrecisionMode mode);

enum class ExchangeKind { None, Pairwise, Quad };

/// What one rank sends to execute one gate.
struct ExchangePlan {
    ExchangeKind kind = ExchangeKind::None;
    /// Pairwise: one partner. Quad: the three other ranks of the group,
    /// ordered by their position in the group.
    std::vector<Rank> partners;
    /// Amplitudes this rank sends in total (L/2 pairwise, 3L/4 quad).
    Index elementCount = 0;
    std::size_t bytesPerElement = 0;

    std::uint64_t bytes() const { return elementCount * bytesPerElement; }
};

ExchangePlan planExchange(const PartitionLayout& layout, const Gate& gate, Rank rank, PrecisionMode mode);

/// Per-rank bytes sent by a full three-axis measurement: one L/2 pairwise
/// exchange for every qubit at or above N'.
std::uint64_t measurementBytesPerRank(const PartitionLayout& layout, PrecisionMode mode);

/// Monotone per-rank traffic counters.
///
/// `interRankBytesSent` / `Received` count the rank's share of each exchange
/// plan: the half (or three quarters) of its partition shipped to partners
/// and the partners' data it receives. Updated amplitudes travelling back to
/// their owner within the same plan are counted in `interRankReturnBytes`.
/// Codebook merges and scalar reductions are counted in `collectiveBytes`.
struct TrafficLedger {
    std::uint64_t interRankBytesSent = 0;
    std::uint64_t interRankBytesReceived = 0;
    std::uint64_t interRankMessages = 0;
    std::uint64_t interRankReturnBytes = 0;
    std::uint64_t collectiveBytes = 0;
    std::uint64_t tierBytesMoved = 0;
    std::uint64_t tierTransferCount = 0;
    std::uint64_t gateOperations = 0;

    TrafficLedger& operator+=(const TrafficLedger& other);
    bool operator==(const TrafficLedger&) const = default;
};

/// (sent + received) in GiB, rounded to the nearest integer.
std::uint64_t gibibytesExchanged(const TrafficLedger& ledger);

}  // namespace qtier

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

// Two-tier memory per rank.
//
// A rank's partition is cut into K equally sized chunks of 2^c amplitudes.
// Every chunk has a home in the slow tier; the fast tier has F chunk slots
// and gates are only computed on resident chunks. A gate on a local qubit
// q >= c pairs chunk j with chunk j + 2^(q-c), so those chunks have to be
// resident together. The planner walks the gate sequence, groups runs of
// gates whose partner chunks fit into the fast tier at once and orders the
// chunk blocks of each pass so that chunks still resident from the previous
// pass are used first.

#include "qtier/gate.hpp"
#include "qtier/kernels.hpp"
#include "qtier/layout.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <vector>

namespace qtier {

struct TierConfig {
    std::uint64_t fastCapacityBytes = 0;
    std::uint64_t chunkBytes = 0;
    unsigned lookaheadWindow = 64;
    /// Stage every gate on its own (baseline for comparisons).
    bool naive = false;
};

/// Chunking of one partition, resolved from a TierConfig.
struct TierGeometry {
    unsigned chunkBits = 0;   // c
    Index chunkCount = 1;     // K
    Index slotCount = 1;      // F
    unsigned lookaheadWindow = 64;
    bool naive = false;

    Index chunkSize() const { return Index{1} << chunkBits; }
    bool tiered() const { return slotCount < chunkCount; }
};

/// One chunk covering the whole partition, always resident.
TierGeometry untieredGeometry(Qubit localQubits);

/// Validates `config` against a partition. A fast tier holding the whole
/// partition switches tiering off.
TierGeometry resolveGeometry(const TierConfig& config, Qubit localQubits, PrecisionMode mode);

/// Slow-tier to fast-tier data ratio of a born state (e.g. 4/11).
double slowToFastRatio(const TierGeometry& geometry);

/// Fast-tier capacity, in whole chunks, that leaves slow:fast data at (or
/// just above) `ratio` for a partition of `stateBytes`.
std::uint64_t fastCapacityForRatio(std::uint64_t stateBytes, std::uint64_t chunkBytes, double ratio);

enum class Access { Read, ReadWrite, Write };

/// A chunk crossing the tier boundary.
struct ChunkMove {
    Index chunk = 0;
    Index slot = 0;
    bool inward = true;  // slow -> fast; otherwise a write-back
};

/// Which chunk sits in which fast slot, and the moves needed to make a set
/// of chunks resident. Shared by the planner (prediction) and the store
/// (execution), so both make identical decisions.
///
/// Chunks are born resident in a Listing-1 style alternation: of every K/F
/// consecutive chunks one is in the fast tier. Eviction prefers chunks that
/// were already used in the current pass, then the least recently used.
/// Clean chunks are dropped without a write-back.
class ResidencyModel {
  public:
    ResidencyModel(Index chunkCount, Index slotCount);

    Index chunkCount() const { return chunkCount_; }
    Index slotCount() const { return slotCount_; }
    std::optional<Index> slotOf(Index chunk) const;
    bool resident(Index chunk) const { return chunkSlot_[chunk] != kNone; }
    bool dirty(Index chunk) const { return dirty_[chunk]; }
    Index residentCount() const;
    Index highWater() const { return highWater_; }

    void beginPass();
    /// Makes `chunks` resident and pins them until release(). Returned moves
    /// must be carried out in order.
    std::vector<ChunkMove> acquire(std::span<const Index> chunks, Access access);
    void release();

  private:
    static constexpr Index kNone = ~Index{0};

    Index victimSlot() const;

    Index chunkCount_;
    Index slotCount_;
    std::vector<Index> slotChunk_;
    std::vector<Index> chunkSlot_;
    std::vector<bool> dirty_;
    std::vector<bool> pinned_;
    std::vector<std::uint64_t> lastUse_;
    std::vector<std::uint64_t> lastPass_;
    std::uint64_t clock_ = 0;
    std::uint64_t pass_ = 0;
    Index highWater_ = 0;
};

/// How a rank executes one operation.
enum class OpClass {
    Local,     // all non-diagonal operands below N' (a high CNOT control is a rank constant)
    Exchange,  // needs partner data
    Measure,
};

OpClass classify(const Gate& gate, const PartitionLayout& layout, Rank rank);

enum class PassKind {
    Apply,    // apply gates [begin, end) to every block
    Propose,  // byte mode: collect the values gate `begin` would produce
    Commit,   // byte mode: apply gate `begin` and encode
    Gather,   // copy the partition into the exchange buffer (before op `begin`)
    Scatter,  // copy the exchange buffer back (after op `begin`)
};

std::string_view toString(PassKind kind);

struct Pass {
    PassKind kind = PassKind::Apply;
    std::size_t begin = 0;
    std::size_t end = 0;
    Access access = Access::ReadWrite;
    /// Local qubits at or above the chunk bit count that are view bits of a
    /// block, ascending. Block member m holds chunk base | bits of m spread
    /// over these qubits.
    std::vector<Qubit> spanQubits;
    /// Chunk ids of every block, in processing order.
    std::vector<std::vector<Index>> blocks;
    std::uint64_t predictedBytes = 0;
    std::uint64_t predictedTransfers = 0;
};

struct StagingPlan {
    TierGeometry geometry;
    std::vector<Pass> passes;
    std::uint64_t predictedBytes = 0;
    std::uint64_t predictedTransfers = 0;
    /// Gates staged one at a time because their partner chunks do not fit
    /// into the fast tier together.
    std::size_t fallbackGates = 0;
};

/// Staging plan of one rank for the whole gate sequence.
StagingPlan planPasses(std::span<const Gate> gates, const TierGeometry& geometry, const PartitionLayout& layout,
                       Rank rank, PrecisionMode mode);

/// Local qubit q as a view bit of a block with the given span qubits, or
/// nothing when q is constant over the block.
std::optional<Qubit> viewQubit(Qubit q, unsigned chunkBits, std::span<const Qubit> spanQubits);

/// Chunked partition storage in both tiers.
template <class Policy>
class TierStore {
  public:
    using Element = typename Policy::Element;

    TierStore(const TierGeometry& geometry, Qubit localQubits)
        : geometry_(geometry),
          model_(geometry.chunkCount, geometry.slotCount),
          fast_(geometry.slotCount * geometry.chunkSize()) {
        if (geometry.chunkCount << geometry.chunkBits != Index{1} << localQubits)
            throw ValidationError("tier geometry does not match the partition");
        if (geometry.tiered()) slow_.resize(Index{1} << localQubits);
    }

    const TierGeometry& geometry() const { return geometry_; }
    const ResidencyModel& residency() const { return model_; }
    std::uint64_t chunkBytes() const { return geometry_.chunkSize() * sizeof(Element); }

    /// Sets an element in every copy without counting traffic (initial state).
    void initialize(Index local, const Element& value) {
        const Index chunk = local >> geometry_.chunkBits;
        const Index offset = local & (geometry_.chunkSize() - 1);
        if (!slow_.empty()) slow_[local] = value;
        if (auto slot = model_.slotOf(chunk)) fast_[*slot * geometry_.chunkSize() + offset] = value;
    }

    void beginPass() { model_.beginPass(); }

    BlockView<Policy> acquire(const std::vector<Index>& chunks, Access access, Index rankBase,
                              const Codebook* codebook, TrafficLedger& ledger) {
        const Index size = geometry_.chunkSize();
        for (const ChunkMove& move : model_.acquire(chunks, access)) {
            Element* fast = fast_.data() + move.slot * size;
            Element* slow = slow_.data() + move.chunk * size;
            if (move.inward)
                std::copy(slow, slow + size, fast);
            else
                std::copy(fast, fast + size, slow);
            ledger.tierBytesMoved += chunkBytes();
            ledger.tierTransferCount += 1;
        }
        std::vector<Element*> pointers;
        pointers.reserve(chunks.size());
        for (Index chunk : chunks) pointers.push_back(fast_.data() + *model_.slotOf(chunk) * size);
        return BlockView<Policy>(std::move(pointers), chunks, geometry_.chunkBits, rankBase, codebook);
    }

    void release() { model_.release(); }

    /// Current content in local index order, read without staging.
    std::vector<Element> snapshot() const {
        const Index size = geometry_.chunkSize();
        std::vector<Element> out(geometry_.chunkCount * size);
        for (Index chunk = 0; chunk < geometry_.chunkCount; ++chunk) {
            const auto slot = model_.slotOf(chunk);
            const Element* src = slot ? fast_.data() + *slot * size : slow_.data() + chunk * size;
            std::copy(src, src + size, out.begin() + chunk * size);
        }
        return out;
    }

  private:
    TierGeometry geometry_;
    ResidencyModel model_;
    std::vector<Element> fast_;
    std::vector<Element> slow_;
};

}  // namespace qtier

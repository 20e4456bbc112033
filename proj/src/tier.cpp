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

#include "qtier/tier.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace qtier {

TierGeometry untieredGeometry(Qubit localQubits) {
    TierGeometry g;
    g.chunkBits = localQubits;
    g.chunkCount = 1;
    g.slotCount = 1;
    return g;
}

TierGeometry resolveGeometry(const TierConfig& config, Qubit localQubits, PrecisionMode mode) {
    const std::uint64_t bpe = bytesPerElement(mode);
    const std::uint64_t stateBytes = (std::uint64_t{1} << localQubits) * bpe;
    if (config.lookaheadWindow == 0) throw ValidationError("lookahead window must be at least one gate");

    TierGeometry g = untieredGeometry(localQubits);
    g.lookaheadWindow = config.lookaheadWindow;
    g.naive = config.naive;
    if (config.fastCapacityBytes >= stateBytes) return g;

    if (!isPowerOfTwo(config.chunkBytes) || config.chunkBytes < bpe)
        throw ValidationError("chunk bytes must be a power of two of at least one element (" +
                              std::to_string(bpe) + " bytes)");
    if (config.chunkBytes > stateBytes)
        throw ValidationError("chunk bytes (" + std::to_string(config.chunkBytes) +
                              ") exceed the partition size (" + std::to_string(stateBytes) + " bytes)");
    const Index slots = config.fastCapacityBytes / config.chunkBytes;
    if (slots < 2) throw ValidationError("the fast tier must hold at least two chunks");

    g.chunkBits = log2Exact(config.chunkBytes / bpe);
    g.chunkCount = stateBytes / config.chunkBytes;
    g.slotCount = slots;
    return g;
}

double slowToFastRatio(const TierGeometry& geometry) {
    const Index fast = std::min(geometry.slotCount, geometry.chunkCount);
    return static_cast<double>(geometry.chunkCount - fast) / static_cast<double>(fast);
}

std::uint64_t fastCapacityForRatio(std::uint64_t stateBytes, std::uint64_t chunkBytes, double ratio) {
    if (chunkBytes == 0 || ratio < 0) throw ValidationError("invalid tier ratio request");
    const std::uint64_t chunks = stateBytes / chunkBytes;
    const auto fast = static_cast<std::uint64_t>(std::floor(static_cast<double>(chunks) / (1.0 + ratio) + 1e-9));
    return std::max<std::uint64_t>(fast, 1) * chunkBytes;
}

// ---------------------------------------------------------------------------

ResidencyModel::ResidencyModel(Index chunkCount, Index slotCount)
    : chunkCount_(chunkCount),
      slotCount_(std::min(slotCount, chunkCount)),
      slotChunk_(slotCount_, kNone),
      chunkSlot_(chunkCount, kNone),
      dirty_(chunkCount, false),
      pinned_(slotCount_, false),
      lastUse_(slotCount_, 0),
      lastPass_(slotCount_, 0) {
    if (chunkCount == 0 || slotCount == 0) throw ValidationError("residency model needs chunks and slots");
    Index slot = 0;
    for (Index j = 0; j < chunkCount_; ++j) {
        if ((j + 1) * slotCount_ / chunkCount_ > j * slotCount_ / chunkCount_) {
            slotChunk_[slot] = j;
            chunkSlot_[j] = slot;
            ++slot;
        }
    }
    highWater_ = slot;
}

std::optional<Index> ResidencyModel::slotOf(Index chunk) const {
    if (chunkSlot_[chunk] == kNone) return std::nullopt;
    return chunkSlot_[chunk];
}

Index ResidencyModel::residentCount() const {
    Index count = 0;
    for (Index chunk : slotChunk_) count += chunk != kNone;
    return count;
}

void ResidencyModel::beginPass() { ++pass_; }

Index ResidencyModel::victimSlot() const {
    Index best = kNone;
    auto key = [&](Index s) { return std::tuple(lastPass_[s] != pass_, lastUse_[s]); };
    for (Index s = 0; s < slotCount_; ++s) {
        if (pinned_[s]) continue;
        if (slotChunk_[s] == kNone) return s;
        if (best == kNone || key(s) < key(best)) best = s;
    }
    if (best == kNone) throw std::logic_error("no evictable fast-tier slot");
    return best;
}

std::vector<ChunkMove> ResidencyModel::acquire(std::span<const Index> chunks, Access access) {
    if (chunks.size() > slotCount_) throw std::logic_error("block larger than the fast tier");
    std::vector<ChunkMove> moves;
    auto touch = [&](Index chunk) {
        const Index s = chunkSlot_[chunk];
        pinned_[s] = true;
        lastUse_[s] = ++clock_;
        lastPass_[s] = pass_;
        if (access != Access::Read) dirty_[chunk] = true;
    };
    for (Index chunk : chunks)
        if (resident(chunk)) touch(chunk);
    for (Index chunk : chunks) {
        if (resident(chunk)) continue;
        const Index s = victimSlot();
        if (const Index old = slotChunk_[s]; old != kNone) {
            if (dirty_[old]) moves.push_back({old, s, false});
            dirty_[old] = false;
            chunkSlot_[old] = kNone;
        }
        slotChunk_[s] = chunk;
        chunkSlot_[chunk] = s;
        dirty_[chunk] = false;
        if (access != Access::Write) moves.push_back({chunk, s, true});
        touch(chunk);
    }
    highWater_ = std::max(highWater_, residentCount());
    return moves;
}

void ResidencyModel::release() { std::fill(pinned_.begin(), pinned_.end(), false); }

// ---------------------------------------------------------------------------

OpClass classify(const Gate& gate, const PartitionLayout& layout, Rank rank) {
    if (gate.kind == GateKind::MeasureAll) return OpClass::Measure;
    // The byte width does not matter for the classification.
    if (planExchange(layout, gate, rank, PrecisionMode::FP64).kind != ExchangeKind::None) return OpClass::Exchange;
    return OpClass::Local;
}

std::string_view toString(PassKind kind) {
    switch (kind) {
        case PassKind::Apply: return "apply";
        case PassKind::Propose: return "propose";
        case PassKind::Commit: return "commit";
        case PassKind::Gather: return "gather";
        case PassKind::Scatter: return "scatter";
    }
    return "?";
}

std::optional<Qubit> viewQubit(Qubit q, unsigned chunkBits, std::span<const Qubit> spanQubits) {
    if (q < chunkBits) return q;
    for (std::size_t i = 0; i < spanQubits.size(); ++i)
        if (spanQubits[i] == q) return chunkBits + static_cast<Qubit>(i);
    return std::nullopt;
}

namespace {

// Local qubits of `gate` that pair amplitudes across chunks.
std::vector<Qubit> spanQubitsOf(const Gate& gate, unsigned chunkBits, Qubit localQubits) {
    std::vector<Qubit> out;
    if (gate.isDiagonal() || gate.kind == GateKind::MeasureAll) return out;
    auto add = [&](Qubit q) {
        if (q >= chunkBits && q < localQubits) out.push_back(q);
    };
    if (gate.kind == GateKind::CNot) {
        add(gate.qubits[1]);
    } else {
        for (Qubit q : gate.operands()) add(q);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Qubit> unite(const std::vector<Qubit>& a, const std::vector<Qubit>& b) {
    std::vector<Qubit> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

class Planner {
  public:
    Planner(const TierGeometry& geometry, StagingPlan& plan)
        : geometry_(geometry), plan_(plan), model_(geometry.chunkCount, geometry.slotCount) {}

    void emit(PassKind kind, std::size_t begin, std::size_t end, Access access, std::vector<Qubit> span) {
        Pass pass;
        pass.kind = kind;
        pass.begin = begin;
        pass.end = end;
        pass.access = access;
        pass.spanQubits = std::move(span);
        pass.blocks = blocks(pass.spanQubits);

        model_.beginPass();
        for (const auto& block : pass.blocks) {
            const auto moves = model_.acquire(block, access);
            pass.predictedTransfers += moves.size();
            model_.release();
        }
        pass.predictedBytes = pass.predictedTransfers * chunkBytes_;
        plan_.predictedBytes += pass.predictedBytes;
        plan_.predictedTransfers += pass.predictedTransfers;
        plan_.passes.push_back(std::move(pass));
    }

    void setChunkBytes(std::uint64_t bytes) { chunkBytes_ = bytes; }

  private:
    // Blocks of partner chunks, those with the most resident members first.
    std::vector<std::vector<Index>> blocks(const std::vector<Qubit>& span) const {
        Index spanMask = 0;
        for (Qubit q : span) spanMask |= bitMask(q - geometry_.chunkBits);
        const Index members = Index{1} << span.size();

        std::vector<std::pair<Index, std::vector<Index>>> keyed;
        for (Index base = 0; base < geometry_.chunkCount; ++base) {
            if (base & spanMask) continue;
            std::vector<Index> block(members);
            Index missing = 0;
            for (Index m = 0; m < members; ++m) {
                Index chunk = base;
                for (std::size_t b = 0; b < span.size(); ++b)
                    if (testBit(m, static_cast<unsigned>(b))) chunk |= bitMask(span[b] - geometry_.chunkBits);
                block[m] = chunk;
                missing += !model_.resident(chunk);
            }
            keyed.emplace_back(missing, std::move(block));
        }
        std::stable_sort(keyed.begin(), keyed.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::vector<Index>> out;
        out.reserve(keyed.size());
        for (auto& entry : keyed) out.push_back(std::move(entry.second));
        return out;
    }

    const TierGeometry& geometry_;
    StagingPlan& plan_;
    ResidencyModel model_;
    std::uint64_t chunkBytes_ = 0;
};

}  // namespace

StagingPlan planPasses(std::span<const Gate> gates, const TierGeometry& geometry, const PartitionLayout& layout,
                       Rank rank, PrecisionMode mode) {
    StagingPlan plan;
    plan.geometry = geometry;
    Planner planner(geometry, plan);
    planner.setChunkBytes(geometry.chunkSize() * bytesPerElement(mode));

    const Qubit localQubits = layout.localQubits();
    const Index slots = std::min(geometry.slotCount, geometry.chunkCount);
    auto fits = [&](const std::vector<Qubit>& span) { return (Index{1} << span.size()) <= slots; };

    std::size_t i = 0;
    while (i < gates.size()) {
        const Gate& gate = gates[i];
        switch (classify(gate, layout, rank)) {
            case OpClass::Measure:
                planner.emit(PassKind::Gather, i, i + 1, Access::Read, {});
                ++i;
                continue;
            case OpClass::Exchange:
                planner.emit(PassKind::Gather, i, i + 1, Access::Read, {});
                planner.emit(PassKind::Scatter, i, i + 1, Access::Write, {});
                ++i;
                continue;
            case OpClass::Local: break;
        }

        std::vector<Qubit> span = spanQubitsOf(gate, geometry.chunkBits, localQubits);
        if (!fits(span)) {
            planner.emit(PassKind::Gather, i, i + 1, Access::Read, {});
            planner.emit(PassKind::Scatter, i, i + 1, Access::Write, {});
            ++plan.fallbackGates;
            ++i;
            continue;
        }
        if (mode == PrecisionMode::BYTE) {
            // Every byte-encoded gate ends at a codebook barrier.
            planner.emit(PassKind::Propose, i, i + 1, Access::Read, span);
            planner.emit(PassKind::Commit, i, i + 1, Access::ReadWrite, span);
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (!geometry.naive && j < gates.size() && j - i < geometry.lookaheadWindow &&
               classify(gates[j], layout, rank) == OpClass::Local) {
            auto wider = unite(span, spanQubitsOf(gates[j], geometry.chunkBits, localQubits));
            if (!fits(wider)) break;
            span = std::move(wider);
            ++j;
        }
        planner.emit(PassKind::Apply, i, j, Access::ReadWrite, std::move(span));
        i = j;
    }
    return plan;
}

}  // namespace qtier

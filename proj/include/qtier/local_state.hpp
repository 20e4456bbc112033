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

#include "qtier/codec.hpp"
#include "qtier/gate.hpp"
#include "qtier/kernels.hpp"

#include <span>
#include <variant>
#include <vector>

namespace qtier {

/// One partition of the state vector: 2^localQubits amplitudes in the
/// storage format of `mode`. Byte-encoded states carry their copy of the
/// (globally synchronized) codebook.
class LocalState {
  public:
    using Storage = std::variant<std::vector<Fp64Storage::Element>, std::vector<Fp32Storage::Element>,
                                 std::vector<ByteStorage::Element>>;

    /// All-zero partition whose index 0 is global index `globalBase`.
    LocalState(Qubit localQubits, PrecisionMode mode, Index globalBase = 0);

    /// |0...0> on a single partition.
    static LocalState zero(Qubit localQubits, PrecisionMode mode);

    /// Partition holding `amplitudes` (length must be a power of two).
    /// Byte mode first grows the codebook with every value.
    static LocalState fromAmplitudes(std::span<const Amplitude> amplitudes, PrecisionMode mode,
                                     Index globalBase = 0);

    Qubit localQubits() const { return localQubits_; }
    PrecisionMode mode() const { return mode_; }
    Index size() const { return Index{1} << localQubits_; }
    Index globalBase() const { return globalBase_; }

    Amplitude amplitude(Index i) const;
    std::vector<Amplitude> amplitudes() const;
    double normSquared() const;

    /// Bytes used by the amplitude storage (excluding the codebook).
    std::size_t storageBytes() const { return size() * bytesPerElement(mode_); }

    Codebook& codebook() { return codebook_; }
    const Codebook& codebook() const { return codebook_; }

    Storage& storage() { return storage_; }
    const Storage& storage() const { return storage_; }

    template <class Policy>
    std::vector<typename Policy::Element>& elements() {
        return std::get<std::vector<typename Policy::Element>>(storage_);
    }
    template <class Policy>
    const std::vector<typename Policy::Element>& elements() const {
        return std::get<std::vector<typename Policy::Element>>(storage_);
    }

    /// Bitwise (FP modes) or index-wise (byte mode) equality of storage.
    bool sameStorage(const LocalState& other) const { return storage_ == other.storage_; }

  private:
    Qubit localQubits_;
    PrecisionMode mode_;
    Index globalBase_;
    Storage storage_;
    Codebook codebook_;
};

/// Calls `f(Policy{})` with the storage policy matching `mode`.
template <class F>
decltype(auto) dispatchMode(PrecisionMode mode, F&& f) {
    switch (mode) {
        case PrecisionMode::FP64: return f(Fp64Storage{});
        case PrecisionMode::FP32: return f(Fp32Storage{});
        case PrecisionMode::BYTE: break;
    }
    return f(ByteStorage{});
}

// Single-partition gate application. Byte-encoded partitions run the
// propose / synchronize / encode sequence against their own codebook.

void applySingleQubit(LocalState& state, const Mat2& matrix, Qubit q);
void applyTwoQubit(LocalState& state, const Mat4& matrix, Qubit q1, Qubit q2);
/// Multiplies by e^{i angle} every amplitude whose global index has bits c
/// and t set. c and t may exceed the local range.
void applyControlledPhase(LocalState& state, Qubit c, Qubit t, double angle);
/// Any non-measurement gate whose non-diagonal operands are local.
void applyGate(LocalState& state, const Gate& gate);

}  // namespace qtier

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

#include "qtier/local_state.hpp"

#include <cmath>

namespace qtier {

namespace {

LocalState::Storage makeStorage(PrecisionMode mode, Index size) {
    switch (mode) {
        case PrecisionMode::FP64: return std::vector<Fp64Storage::Element>(size);
        case PrecisionMode::FP32: return std::vector<Fp32Storage::Element>(size);
        case PrecisionMode::BYTE: break;
    }
    return std::vector<ByteStorage::Element>(size);
}

Amplitude unitPhase(double angle) {
    Amplitude z = std::polar(1.0, angle);
    auto snap = [](double v) {
        if (std::abs(v) < 1e-15) return 0.0;
        if (std::abs(v - 1.0) < 1e-15) return 1.0;
        if (std::abs(v + 1.0) < 1e-15) return -1.0;
        return v;
    };
    return {snap(z.real()), snap(z.imag())};
}

// Runs `visit(view, sink)` on the whole partition: directly for FP modes,
// as propose / merge / encode for byte mode.
template <class Visit>
void runOnState(LocalState& state, Visit&& visit) {
    dispatchMode(state.mode(), [&]<class Policy>(Policy) {
        auto& data = state.elements<Policy>();
        const auto view =
            BlockView<Policy>::contiguous(data.data(), data.size(), state.globalBase(), &state.codebook());
        if constexpr (Policy::mode == PrecisionMode::BYTE) {
            ProposalCollector collector(state.codebook());
            visit(view, ProposeSink{collector});
            const Proposal proposal = collector.finish();
            synchronizeCodebooks(state.codebook(), std::span(&proposal, 1));
        }
        visit(view, StoreSink<BlockView<Policy>>{view});
    });
}

}  // namespace

LocalState::LocalState(Qubit localQubits, PrecisionMode mode, Index globalBase)
    : localQubits_(localQubits),
      mode_(mode),
      globalBase_(globalBase),
      storage_(makeStorage(mode, Index{1} << localQubits)) {
    if (localQubits > 40) throw ValidationError("local partition too large");
}

LocalState LocalState::zero(Qubit localQubits, PrecisionMode mode) {
    LocalState state(localQubits, mode);
    dispatchMode(mode, [&]<class Policy>(Policy) {
        state.elements<Policy>()[0] = Policy::store({1.0, 0.0}, &state.codebook());
    });
    return state;
}

LocalState LocalState::fromAmplitudes(std::span<const Amplitude> amplitudes, PrecisionMode mode,
                                      Index globalBase) {
    if (!isPowerOfTwo(amplitudes.size())) throw ValidationError("amplitude count must be a power of two");
    LocalState state(log2Exact(amplitudes.size()), mode, globalBase);
    if (mode == PrecisionMode::BYTE) {
        ProposalCollector collector(state.codebook());
        for (const Amplitude& a : amplitudes) collector.add(a);
        const Proposal proposal = collector.finish();
        synchronizeCodebooks(state.codebook(), std::span(&proposal, 1));
    }
    dispatchMode(mode, [&]<class Policy>(Policy) {
        auto& data = state.elements<Policy>();
        for (std::size_t i = 0; i < amplitudes.size(); ++i)
            data[i] = Policy::store(amplitudes[i], &state.codebook());
    });
    return state;
}

Amplitude LocalState::amplitude(Index i) const {
    if (i >= size()) throw std::out_of_range("amplitude index out of range");
    return dispatchMode(mode_, [&]<class Policy>(Policy) { return Policy::load(elements<Policy>()[i], &codebook_); });
}

std::vector<Amplitude> LocalState::amplitudes() const {
    std::vector<Amplitude> out(size());
    dispatchMode(mode_, [&]<class Policy>(Policy) {
        const auto& data = elements<Policy>();
        for (Index i = 0; i < size(); ++i) out[i] = Policy::load(data[i], &codebook_);
    });
    return out;
}

double LocalState::normSquared() const {
    double sum = 0.0;
    for (const Amplitude& a : amplitudes()) sum += std::norm(a);
    return sum;
}

void applySingleQubit(LocalState& state, const Mat2& matrix, Qubit q) {
    if (q >= state.localQubits()) throw std::out_of_range("qubit index out of local range");
    runOnState(state, [&](const auto& view, auto&& sink) { visitSingleQubit(view, matrix, q, sink); });
}

void applyTwoQubit(LocalState& state, const Mat4& matrix, Qubit q1, Qubit q2) {
    if (q1 >= state.localQubits() || q2 >= state.localQubits())
        throw std::out_of_range("qubit index out of local range");
    if (q1 == q2) throw ValidationError("two-qubit gate operands must be distinct");
    runOnState(state, [&](const auto& view, auto&& sink) { visitTwoQubit(view, matrix, q1, q2, sink); });
}

void applyControlledPhase(LocalState& state, Qubit c, Qubit t, double angle) {
    if (c == t) throw ValidationError("controlled phase needs distinct control and target");
    const Index mask = bitMask(c) | bitMask(t);
    const Amplitude factor = unitPhase(angle);
    runOnState(state, [&](const auto& view, auto&& sink) { visitDiagonal(view, mask, factor, sink); });
}

void applyGate(LocalState& state, const Gate& gate) {
    if (gate.isDiagonal()) {
        const Index mask = gate.diagonalMask();
        const Amplitude factor = gate.diagonalFactor();
        runOnState(state, [&](const auto& view, auto&& sink) { visitDiagonal(view, mask, factor, sink); });
        return;
    }
    switch (gate.arity()) {
        case 1: applySingleQubit(state, gate.matrix2(), gate.qubits[0]); break;
        case 2: applyTwoQubit(state, gate.matrix4(), gate.qubits[0], gate.qubits[1]); break;
        default: throw ValidationError("measurement is not a unitary gate");
    }
}

}  // namespace qtier

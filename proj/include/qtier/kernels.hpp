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

// Gate kernels over strided pairs and quadruples of amplitudes.
//
// Kernels never touch storage directly. They read through a view
// (`load(i)`, `global(i)`, `size()`) and hand every result to a sink
// `sink(i, value)`, so one kernel serves plain FP64/FP32 updates, the
// proposal pass of byte-encoded runs and instrumented test runs alike. All
// inputs of a pair or quadruple are loaded before any result is emitted,
// which makes in-place sinks safe.

#include "qtier/codec.hpp"
#include "qtier/types.hpp"

#include <complex>
#include <vector>

namespace qtier {

// Storage policies: element type plus decode/encode to double precision.

struct Fp64Storage {
    using Element = std::complex<double>;
    static constexpr PrecisionMode mode = PrecisionMode::FP64;
    static Amplitude load(const Element& e, const Codebook*) { return e; }
    static Element store(const Amplitude& a, const Codebook*) { return a; }
};

struct Fp32Storage {
    using Element = std::complex<float>;
    static constexpr PrecisionMode mode = PrecisionMode::FP32;
    static Amplitude load(const Element& e, const Codebook*) { return {e.real(), e.imag()}; }
    static Element store(const Amplitude& a, const Codebook*) {
        return {static_cast<float>(a.real()), static_cast<float>(a.imag())};
    }
};

struct ByteStorage {
    using Element = EncodedAmplitude;
    static constexpr PrecisionMode mode = PrecisionMode::BYTE;
    static Amplitude load(const Element& e, const Codebook* cb) { return cb->decode(e); }
    static Element store(const Amplitude& a, const Codebook* cb) { return cb->encode(a); }
};

/// A rank-local index space assembled from 2^h equally sized chunks.
///
/// View index i addresses chunk `i >> chunkBits` of the block at offset
/// `i & (chunkSize - 1)`. A single chunk covering a whole local state is the
/// plain contiguous case.
template <class Policy>
class BlockView {
  public:
    using Element = typename Policy::Element;

    BlockView(std::vector<Element*> chunks, std::vector<Index> chunkIds, unsigned chunkBits, Index rankBase,
              const Codebook* codebook)
        : chunks_(std::move(chunks)),
          chunkIds_(std::move(chunkIds)),
          chunkBits_(chunkBits),
          offsetMask_(bitMask(chunkBits) - 1),
          rankBase_(rankBase),
          codebook_(codebook) {}

    /// Contiguous view of `size` elements whose index 0 is global `base`.
    static BlockView contiguous(Element* data, Index size, Index base, const Codebook* codebook) {
        return BlockView({data}, {0}, log2Exact(size), base, codebook);
    }

    Index size() const { return Index{chunks_.size()} << chunkBits_; }
    unsigned chunkBits() const { return chunkBits_; }

    Element& element(Index i) const { return chunks_[i >> chunkBits_][i & offsetMask_]; }
    Amplitude load(Index i) const { return Policy::load(element(i), codebook_); }
    void store(Index i, const Amplitude& a) const { element(i) = Policy::store(a, codebook_); }

    /// Rank-local index of view index i.
    Index local(Index i) const { return (chunkIds_[i >> chunkBits_] << chunkBits_) | (i & offsetMask_); }
    Index global(Index i) const { return rankBase_ | local(i); }

    const Codebook* codebook() const { return codebook_; }

  private:
    std::vector<Element*> chunks_;
    std::vector<Index> chunkIds_;
    unsigned chunkBits_;
    Index offsetMask_;
    Index rankBase_;
    const Codebook* codebook_;
};

/// Sink writing results back through the view.
template <class View>
struct StoreSink {
    const View& view;
    void operator()(Index i, const Amplitude& a) const { view.store(i, a); }
};

/// Sink feeding a proposal collector (first pass of a byte-encoded gate).
struct ProposeSink {
    ProposalCollector& collector;
    void operator()(Index, const Amplitude& a) const { collector.add(a); }
};

/// Calls f(lo, hi) for every disjoint pair (lo, lo + 2^q) with bit q of lo
/// clear; 2^(n-1) calls for a space of 2^n indices.
template <class F>
void forEachPair(Index size, Qubit q, F&& f) {
    const Index stride = bitMask(q);
    for (Index k = 0; k < size / 2; ++k) {
        const Index lo = insertZeroBit(k, q);
        f(lo, lo | stride);
    }
}

/// Calls f(i0, i1, i2, i3) for every quadruple
/// (i, i + 2^q1, i + 2^q2, i + 2^q1 + 2^q2) with bits q1, q2 of i clear.
template <class F>
void forEachQuad(Index size, Qubit q1, Qubit q2, F&& f) {
    const Index m1 = bitMask(q1);
    const Index m2 = bitMask(q2);
    for (Index k = 0; k < size / 4; ++k) {
        const Index i = insertTwoZeroBits(k, q1, q2);
        f(i, i | m1, i | m2, i | m1 | m2);
    }
}

template <class View, class Sink>
void visitSingleQubit(const View& view, const Mat2& u, Qubit q, Sink&& sink) {
    const Amplitude u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    forEachPair(view.size(), q, [&](Index lo, Index hi) {
        const Amplitude a0 = view.load(lo);
        const Amplitude a1 = view.load(hi);
        sink(lo, mul(u00, a0) + mul(u01, a1));
        sink(hi, mul(u10, a0) + mul(u11, a1));
    });
}

template <class View, class Sink>
void visitTwoQubit(const View& view, const Mat4& u, Qubit q1, Qubit q2, Sink&& sink) {
    forEachQuad(view.size(), q1, q2, [&](Index i0, Index i1, Index i2, Index i3) {
        const Amplitude in[4] = {view.load(i0), view.load(i1), view.load(i2), view.load(i3)};
        const Index idx[4] = {i0, i1, i2, i3};
        for (int r = 0; r < 4; ++r) {
            Amplitude acc = mul(u(r, 0), in[0]);
            for (int c = 1; c < 4; ++c) acc += mul(u(r, c), in[c]);
            sink(idx[r], acc);
        }
    });
}

/// Multiplies by `factor` every amplitude whose global index has all bits of
/// `globalMask` set. No pairing; works for masks above the local range.
template <class View, class Sink>
void visitDiagonal(const View& view, Index globalMask, const Amplitude& factor, Sink&& sink) {
    const Index n = view.size();
    for (Index i = 0; i < n; ++i)
        if ((view.global(i) & globalMask) == globalMask) sink(i, mul(view.load(i), factor));
}

}  // namespace qtier

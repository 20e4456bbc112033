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

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qtier {

/// One element of the state vector. Arithmetic is always carried out in
/// double precision, whatever the storage mode.
using Amplitude = std::complex<double>;

using Index = std::uint64_t;
using Qubit = unsigned;

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

/// Storage precision of a simulation run.
enum class PrecisionMode { FP64, FP32, BYTE };

/// Bytes needed to store one amplitude in the given mode (16 / 8 / 2).
constexpr std::size_t bytesPerElement(PrecisionMode mode) {
    switch (mode) {
        case PrecisionMode::FP64: return 16;
        case PrecisionMode::FP32: return 8;
        case PrecisionMode::BYTE: return 2;
    }
    return 0;
}

std::string_view toString(PrecisionMode mode);

/// Accepts "fp64", "fp32", "be" (also "byte").
PrecisionMode parsePrecisionMode(std::string_view text);

/// Norm tolerance used when flagging an unnormalized state.
constexpr double normTolerance(PrecisionMode mode) {
    return mode == PrecisionMode::FP32 ? 1e-5 : 1e-12;
}

class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Bit helpers. Qubit k is bit k of an amplitude index.

constexpr Index bitMask(unsigned bit) { return Index{1} << bit; }

constexpr bool testBit(Index value, unsigned bit) { return (value >> bit) & 1U; }

/// Inserts a zero bit at position `bit`, shifting higher bits up.
constexpr Index insertZeroBit(Index value, unsigned bit) {
    const Index low = value & (bitMask(bit) - 1);
    return ((value >> bit) << (bit + 1)) | low;
}

/// Inserts zero bits at two distinct positions.
constexpr Index insertTwoZeroBits(Index value, unsigned bitA, unsigned bitB) {
    const unsigned lo = bitA < bitB ? bitA : bitB;
    const unsigned hi = bitA < bitB ? bitB : bitA;
    return insertZeroBit(insertZeroBit(value, lo), hi);
}

/// Removes the bit at position `bit`, shifting higher bits down.
constexpr Index removeBit(Index value, unsigned bit) {
    const Index low = value & (bitMask(bit) - 1);
    return ((value >> (bit + 1)) << bit) | low;
}

constexpr bool isPowerOfTwo(std::uint64_t value) { return value != 0 && (value & (value - 1)) == 0; }

constexpr unsigned log2Exact(std::uint64_t value) {
    unsigned result = 0;
    while (value > 1) {
        value >>= 1;
        ++result;
    }
    return result;
}

// Complex product without the NaN/Inf recovery of std::complex::operator*.
inline Amplitude mul(const Amplitude& a, const Amplitude& b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace qtier

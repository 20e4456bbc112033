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
#include "qtier/layout.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qtier {

/// Gate list over physical qubit indices.
///
/// `labelPermutation[l]` is the physical index of logical qubit l (empty
/// means identity). Reports are presented in logical labels.
struct Circuit {
    Qubit qubitCount = 0;
    std::vector<Gate> gates;
    std::vector<Qubit> labelPermutation;

    Qubit physical(Qubit logical) const {
        return labelPermutation.empty() ? logical : labelPermutation[logical];
    }
    /// Unitary gates, i.e. everything but MEASURE_ALL.
    std::size_t unitaryCount() const;
    /// Throws ValidationError on any invalid gate or permutation.
    void validate() const;

    bool operator==(const Circuit&) const = default;
};

class ParseError : public ValidationError {
  public:
    ParseError(const std::string& reason, std::size_t line);
    std::size_t line() const { return line_; }
    const std::string& reason() const { return reason_; }

  private:
    std::string reason_;
    std::size_t line_;
};

/// Text format, one instruction per line, `#` starts a comment:
///
///     qubits N            (first instruction)
///     RELABEL p0 .. pN-1  (optional, before any gate)
///     H q | X q | Y q | Z q
///     PHASE q k | CPHASE c t k | CNOT c t
///     U2 q <4 complex as re im>  | U4 q1 q2 <16 complex as re im>
///     M
///
/// Matrices are row-major. Numbers may be decimal or hex floats.
Circuit parseCircuit(std::string_view text);
std::string serializeCircuit(const Circuit& circuit);
/// Throws std::runtime_error("cannot open ...") or ParseError.
Circuit loadCircuit(const std::filesystem::path& path);

bool isPermutation(std::span<const Qubit> permutation, Qubit size);

/// Contiguous named qubit ranges.
struct Register {
    std::string name;
    Qubit first = 0;
    Qubit size = 0;
};

class RegisterMap {
  public:
    void add(std::string name, Qubit first, Qubit size);
    const Register& at(std::string_view name) const;
    std::span<const Register> registers() const { return registers_; }

  private:
    std::vector<Register> registers_;
};

/// H on N-1 down to 0, then H on N-5, N-6, N-1, 0, N-2, 1, then MEASURE_ALL.
Circuit buildBenchmark(Qubit qubits);

struct AdderCircuit {
    Circuit circuit;
    RegisterMap registers;  // R1, R2[, R3]; the last one receives the sum
    Qubit bits = 0;
};

/// QFT adder for 2 or 3 integers of `bits` bits. Register i occupies qubits
/// [i*bits, (i+1)*bits); the last register holds the last addend and ends up
/// with the sum modulo 2^bits. The most significant bit of an integer sits
/// on the lowest qubit of its register.
AdderCircuit buildAdder(Qubit bits, std::span<const std::uint64_t> addends);

/// Integer held by a register given per-qubit bit values (index = qubit).
std::uint64_t decodeRegister(const Register& reg, std::span<const int> qubitBits);

/// Gate qubit q becomes permutation[q]; the label permutation is composed.
Circuit relabel(const Circuit& circuit, std::span<const Qubit> permutation);

/// Sum over ranks and operations of exchange bytes (gate exchanges plus
/// measurement exchanges).
std::uint64_t predictedInterRankBytes(const Circuit& circuit, const PartitionLayout& layout, PrecisionMode mode);

/// Permutation moving the qubits with the most exchange-inducing gates to
/// the lowest indices, or the identity unless that strictly lowers the
/// predicted traffic.
std::vector<Qubit> optimizeLabels(const Circuit& circuit, const PartitionLayout& layout);

}  // namespace qtier

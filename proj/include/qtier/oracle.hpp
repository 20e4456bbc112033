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

// Dense reference simulator. One array, one out-of-place update per gate,
// no partitioning and no encoding; the yardstick for everything else.

#include "qtier/circuit.hpp"
#include "qtier/measure.hpp"

#include <Eigen/Dense>

#include <optional>

namespace qtier {

using DenseState = Eigen::VectorXcd;

inline constexpr Qubit kOracleMaxQubits = 20;

/// |0...0> on `qubits` qubits.
DenseState denseZero(Qubit qubits);

/// Applies one unitary gate; returns the new state.
DenseState denseApply(const DenseState& state, const Gate& gate);

/// Expectations by direct summation over the full array.
ExpectationReport denseMeasure(const DenseState& state);

struct OracleResult {
    DenseState state;                         // physical qubit order
    std::optional<ExpectationReport> report;  // last MEASURE_ALL, logical labels
};

/// Refuses circuits above kOracleMaxQubits qubits (ValidationError).
OracleResult oracleRun(const Circuit& circuit);

}  // namespace qtier

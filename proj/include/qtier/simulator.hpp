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

#include "qtier/circuit.hpp"
#include "qtier/codec.hpp"
#include "qtier/layout.hpp"
#include "qtier/measure.hpp"
#include "qtier/tier.hpp"
#include "qtier/transport.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace qtier {

class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Rank ranks = 1;
    /// Defaults to qubits - log2(ranks).
    std::optional<Qubit> localQubits;
    PrecisionMode mode = PrecisionMode::FP64;
    std::optional<TierConfig> tier;
    /// Non-zero: perturb worker scheduling (see InProcessTransport).
    std::uint64_t jitterSeed = 0;
    /// Keep the final state vector in the result.
    bool captureState = false;
};

struct RunResult {
    PartitionLayout layout{1, 1};
    PrecisionMode mode = PrecisionMode::FP64;
    std::vector<TrafficLedger> ledgers;  // per rank
    std::vector<StagingPlan> plans;      // per rank
    std::vector<Codebook> codebooks;     // per rank, byte mode only
    std::vector<Index> residentHighWater;  // per rank, in chunks
    /// Last MEASURE_ALL, in logical labels.
    std::optional<ExpectationReport> expectations;
    /// Final state in physical global index order (captureState only).
    std::vector<Amplitude> state;

    /// Element-wise maximum over ranks.
    TrafficLedger maxLedger() const;
    /// Element-wise sum over ranks.
    TrafficLedger totalLedger() const;
    bool codebookOverflow() const;
};

PartitionLayout resolveLayout(Qubit qubits, const RunConfig& config);

/// Runs `circuit` from |0...0> on rank workers connected by an in-process
/// transport.
RunResult simulate(const Circuit& circuit, const RunConfig& config);

/// Same, over a caller-provided transport with config.ranks endpoints.
RunResult simulate(const Circuit& circuit, const RunConfig& config, Transport& transport);

}  // namespace qtier

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

#include "qtier/measure.hpp"
#include "qtier/simulator.hpp"

#include <string>
#include <vector>

namespace qtier {

/// Summary of one run. Traffic counters are per rank, maximum over ranks;
/// `interRankBytes` is sent + received of the busiest rank.
struct RunReport {
    Qubit qubits = 0;
    Rank ranks = 1;
    Qubit localQubits = 0;
    std::string mode = "fp64";
    std::uint64_t gateOperations = 0;
    std::uint64_t interRankBytes = 0;
    std::uint64_t interRankBytesSent = 0;
    std::uint64_t interRankBytesReceived = 0;
    std::uint64_t interRankReturnBytes = 0;
    std::uint64_t interRankMessages = 0;
    std::uint64_t interRankGiB = 0;
    std::uint64_t collectiveBytes = 0;
    std::uint64_t tierBytes = 0;
    std::uint64_t tierTransferCount = 0;
    bool magnitudeOverflow = false;
    bool phaseOverflow = false;
    std::size_t codebookMagnitudes = 0;
    std::size_t codebookPhases = 0;
    std::vector<Qubit> labelPermutation;
    double normSquared = 1.0;
    bool normFlagged = false;
    std::vector<QubitExpectation> expectations;
    double wallTimeSeconds = 0.0;

    bool operator==(const RunReport&) const = default;
    /// Equality ignoring wallTimeSeconds.
    bool sameResults(const RunReport& other) const;
};

RunReport makeReport(const RunResult& result, const Circuit& circuit, double wallTimeSeconds);

std::string toJson(const RunReport& report);
RunReport reportFromJson(const std::string& text);

/// Header line, counter row, blank line, then `qubit,qx,qy,qz` rows.
std::string toCsv(const RunReport& report);

/// Human-readable counters and an expectation table with two decimals.
std::string toTable(const RunReport& report);

}  // namespace qtier

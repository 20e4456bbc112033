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

#include "qtier/report.hpp"

#include <json.hpp>

#include <cstdio>

namespace qtier {

bool RunReport::sameResults(const RunReport& other) const {
    RunReport a = *this;
    RunReport b = other;
    a.wallTimeSeconds = b.wallTimeSeconds = 0.0;
    return a == b;
}

RunReport makeReport(const RunResult& result, const Circuit& circuit, double wallTimeSeconds) {
    RunReport r;
    r.qubits = result.layout.totalQubits();
    r.ranks = result.layout.rankCount();
    r.localQubits = result.layout.localQubits();
    r.mode = std::string(toString(result.mode));

    const TrafficLedger m = result.maxLedger();
    for (const TrafficLedger& l : result.ledgers)
        r.interRankBytes = std::max(r.interRankBytes, l.interRankBytesSent + l.interRankBytesReceived);
    r.gateOperations = m.gateOperations;
    r.interRankBytesSent = m.interRankBytesSent;
    r.interRankBytesReceived = m.interRankBytesReceived;
    r.interRankReturnBytes = m.interRankReturnBytes;
    r.interRankMessages = m.interRankMessages;
    r.collectiveBytes = m.collectiveBytes;
    r.tierBytes = m.tierBytesMoved;
    r.tierTransferCount = m.tierTransferCount;
    for (const TrafficLedger& l : result.ledgers) r.interRankGiB = std::max(r.interRankGiB, gibibytesExchanged(l));

    if (!result.codebooks.empty()) {
        const Codebook& cb = result.codebooks.front();
        r.magnitudeOverflow = cb.magnitudeOverflow();
        r.phaseOverflow = cb.phaseOverflow();
        r.codebookMagnitudes = cb.magnitudes().size();
        r.codebookPhases = cb.phases().size();
    }
    r.labelPermutation = circuit.labelPermutation;
    if (result.expectations) {
        r.expectations = result.expectations->qubits;
        r.normSquared = result.expectations->normSquared;
        r.normFlagged = result.expectations->normFlagged;
    }
    r.wallTimeSeconds = wallTimeSeconds;
    return r;
}

namespace {

nlohmann::ordered_json toJsonValue(const RunReport& r) {
    nlohmann::ordered_json j;
    j["qubits"] = r.qubits;
    j["ranks"] = r.ranks;
    j["localQubits"] = r.localQubits;
    j["mode"] = r.mode;
    j["gateOperations"] = r.gateOperations;
    j["interRankBytes"] = r.interRankBytes;
    j["interRankBytesSent"] = r.interRankBytesSent;
    j["interRankBytesReceived"] = r.interRankBytesReceived;
    j["interRankReturnBytes"] = r.interRankReturnBytes;
    j["interRankMessages"] = r.interRankMessages;
    j["interRankGiB"] = r.interRankGiB;
    j["collectiveBytes"] = r.collectiveBytes;
    j["tierBytes"] = r.tierBytes;
    j["tierTransferCount"] = r.tierTransferCount;
    j["codebookOverflowFlags"] = {{"magnitudes", r.magnitudeOverflow}, {"phases", r.phaseOverflow}};
    j["codebookEntries"] = {{"magnitudes", r.codebookMagnitudes}, {"phases", r.codebookPhases}};
    j["labelPermutation"] = r.labelPermutation;
    j["normSquared"] = r.normSquared;
    j["normFlagged"] = r.normFlagged;
    auto& e = j["expectations"] = nlohmann::ordered_json::array();
    for (std::size_t q = 0; q < r.expectations.size(); ++q)
        e.push_back({{"qubit", q}, {"qx", r.expectations[q].qx}, {"qy", r.expectations[q].qy},
                     {"qz", r.expectations[q].qz}});
    j["wallTimeSeconds"] = r.wallTimeSeconds;
    return j;
}

std::string formatDouble(const char* format, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, format, value);
    return buffer;
}

}  // namespace

std::string toJson(const RunReport& report) { return toJsonValue(report).dump(2) + "\n"; }

RunReport reportFromJson(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    RunReport r;
    r.qubits = j.at("qubits").get<Qubit>();
    r.ranks = j.at("ranks").get<Rank>();
    r.localQubits = j.at("localQubits").get<Qubit>();
    r.mode = j.at("mode").get<std::string>();
    r.gateOperations = j.at("gateOperations").get<std::uint64_t>();
    r.interRankBytes = j.at("interRankBytes").get<std::uint64_t>();
    r.interRankBytesSent = j.at("interRankBytesSent").get<std::uint64_t>();
    r.interRankBytesReceived = j.at("interRankBytesReceived").get<std::uint64_t>();
    r.interRankReturnBytes = j.at("interRankReturnBytes").get<std::uint64_t>();
    r.interRankMessages = j.at("interRankMessages").get<std::uint64_t>();
    r.interRankGiB = j.at("interRankGiB").get<std::uint64_t>();
    r.collectiveBytes = j.at("collectiveBytes").get<std::uint64_t>();
    r.tierBytes = j.at("tierBytes").get<std::uint64_t>();
    r.tierTransferCount = j.at("tierTransferCount").get<std::uint64_t>();
    r.magnitudeOverflow = j.at("codebookOverflowFlags").at("magnitudes").get<bool>();
    r.phaseOverflow = j.at("codebookOverflowFlags").at("phases").get<bool>();
    r.codebookMagnitudes = j.at("codebookEntries").at("magnitudes").get<std::size_t>();
    r.codebookPhases = j.at("codebookEntries").at("phases").get<std::size_t>();
    r.labelPermutation = j.at("labelPermutation").get<std::vector<Qubit>>();
    r.normSquared = j.at("normSquared").get<double>();
    r.normFlagged = j.at("normFlagged").get<bool>();
    for (const auto& e : j.at("expectations"))
        r.expectations.push_back({e.at("qx").get<double>(), e.at("qy").get<double>(), e.at("qz").get<double>()});
    r.wallTimeSeconds = j.at("wallTimeSeconds").get<double>();
    return r;
}

std::string toCsv(const RunReport& r) {
    std::string out =
        "qubits,ranks,localQubits,mode,gateOperations,interRankBytes,interRankMessages,tierBytes,"
        "tierTransferCount,magnitudeOverflow,phaseOverflow,interRankReturnBytes,collectiveBytes,normSquared,"
        "wallTimeSeconds\n";
    out += std::to_string(r.qubits) + "," + std::to_string(r.ranks) + "," + std::to_string(r.localQubits) + "," +
           r.mode + "," + std::to_string(r.gateOperations) + "," + std::to_string(r.interRankBytes) + "," +
           std::to_string(r.interRankMessages) + "," + std::to_string(r.tierBytes) + "," +
           std::to_string(r.tierTransferCount) + "," + (r.magnitudeOverflow ? "1" : "0") + "," +
           (r.phaseOverflow ? "1" : "0") + "," + std::to_string(r.interRankReturnBytes) + "," +
           std::to_string(r.collectiveBytes) + "," + formatDouble("%.17g", r.normSquared) + "," +
           formatDouble("%.6f", r.wallTimeSeconds) + "\n";
    out += "\nqubit,qx,qy,qz\n";
    for (std::size_t q = 0; q < r.expectations.size(); ++q)
        out += std::to_string(q) + "," + formatDouble("%.17g", r.expectations[q].qx) + "," +
               formatDouble("%.17g", r.expectations[q].qy) + "," + formatDouble("%.17g", r.expectations[q].qz) +
               "\n";
    return out;
}

std::string toTable(const RunReport& r) {
    auto row = [](const std::string& name, const std::string& value) {
        std::string line = name;
        line.resize(24, ' ');
        return line + value + "\n";
    };
    std::string out;
    out += row("qubits", std::to_string(r.qubits));
    out += row("ranks", std::to_string(r.ranks));
    out += row("local qubits", std::to_string(r.localQubits));
    out += row("mode", r.mode);
    out += row("gate operations", std::to_string(r.gateOperations));
    out += row("inter-rank bytes", std::to_string(r.interRankBytes) + " (" + std::to_string(r.interRankGiB) +
                                       " GiB)");
    out += row("inter-rank messages", std::to_string(r.interRankMessages));
    out += row("return bytes", std::to_string(r.interRankReturnBytes));
    out += row("tier bytes", std::to_string(r.tierBytes));
    out += row("tier transfers", std::to_string(r.tierTransferCount));
    if (r.mode == "be")
        out += row("codebook", std::to_string(r.codebookMagnitudes) + " magnitudes, " +
                                   std::to_string(r.codebookPhases) + " phases" +
                                   (r.magnitudeOverflow || r.phaseOverflow ? " (overflow)" : ""));
    if (r.normFlagged) out += row("norm", formatDouble("%.12f", r.normSquared) + " (not normalized)");
    out += row("wall time [s]", formatDouble("%.3f", r.wallTimeSeconds));
    if (!r.expectations.empty()) {
        out += "\nqubit   <Qx>   <Qy>   <Qz>\n";
        for (std::size_t q = 0; q < r.expectations.size(); ++q) {
            // Tiny negative round-off would print as -0.00.
            auto clean = [](double v) { return v < 0.0 && v > -0.005 ? 0.0 : v; };
            char line[80];
            std::snprintf(line, sizeof line, "%5zu  %5.2f  %5.2f  %5.2f\n", q, clean(r.expectations[q].qx),
                          clean(r.expectations[q].qy), clean(r.expectations[q].qz));
            out += line;
        }
    }
    return out;
}

}  // namespace qtier

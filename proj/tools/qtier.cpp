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

// Command-line runner.
//
//   qtier run  --builder benchmark:12 --ranks 4 --mode be --report json
//   qtier run  --circuit adder.qc --fast-bytes 4096 --chunk-bytes 512
//   qtier emit --builder adder:2:1:2

#include "qtier/circuit.hpp"
#include "qtier/report.hpp"
#include "qtier/simulator.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace qtier;

// Input problems: exit status 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> splitColons(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ':')) parts.push_back(part);
    return parts;
}

std::uint64_t parseUnsigned(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty() || text[0] == '-')
        throw UsageError("malformed " + what + " '" + text + "'");
    return value;
}

Circuit buildFromSpec(const std::string& spec) {
    const auto parts = splitColons(spec);
    if (parts.size() == 2 && parts[0] == "benchmark")
        return buildBenchmark(static_cast<Qubit>(parseUnsigned(parts[1], "qubit count")));
    if ((parts.size() == 4 || parts.size() == 5) && parts[0] == "adder") {
        const auto bits = static_cast<Qubit>(parseUnsigned(parts[1], "register width"));
        std::vector<std::uint64_t> addends;
        for (std::size_t i = 2; i < parts.size(); ++i) addends.push_back(parseUnsigned(parts[i], "addend"));
        return buildAdder(bits, addends).circuit;
    }
    throw UsageError("unknown builder '" + spec + "' (expected benchmark:N or adder:M:a:b[:c])");
}

struct CircuitSource {
    std::string circuitPath;
    std::string builder;

    Circuit load() const {
        if (!circuitPath.empty() && !builder.empty()) throw UsageError("--circuit and --builder are exclusive");
        if (!circuitPath.empty()) {
            try {
                return loadCircuit(circuitPath);
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
        }
        if (!builder.empty()) return buildFromSpec(builder);
        throw UsageError("one of --circuit or --builder is required");
    }
};

void writeOutput(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open " + path + " for writing");
    out << text;
}

struct RunOptions {
    CircuitSource source;
    Rank ranks = 1;
    std::optional<Qubit> localQubits;
    std::string mode = "fp64";
    std::optional<std::uint64_t> fastBytes;
    std::optional<std::uint64_t> chunkBytes;
    unsigned lookahead = 64;
    bool naiveStaging = false;
    bool optimize = false;
    std::string report = "table";
    std::string out;
    std::string codebookOut;
    std::uint64_t jitterSeed = 0;
};

int run(const RunOptions& o) {
    Circuit circuit = o.source.load();
    RunConfig config;
    config.ranks = o.ranks;
    config.localQubits = o.localQubits;
    config.mode = parsePrecisionMode(o.mode);
    config.jitterSeed = o.jitterSeed;
    const PartitionLayout layout = resolveLayout(circuit.qubitCount, config);

    if (o.chunkBytes && !o.fastBytes) throw UsageError("--chunk-bytes needs --fast-bytes");
    if (o.fastBytes) {
        TierConfig tier;
        tier.fastCapacityBytes = *o.fastBytes;
        tier.lookaheadWindow = o.lookahead;
        tier.naive = o.naiveStaging;
        if (o.chunkBytes) {
            tier.chunkBytes = *o.chunkBytes;
        } else {
            // Default: a quarter of the fast tier.
            tier.chunkBytes = std::uint64_t{1} << log2Exact(std::max<std::uint64_t>(*o.fastBytes / 4, 1));
        }
        config.tier = tier;
    }
    if (o.optimize) circuit = relabel(circuit, optimizeLabels(circuit, layout));

    const auto start = std::chrono::steady_clock::now();
    const RunResult result = simulate(circuit, config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const RunReport report = makeReport(result, circuit, seconds);

    if (!o.codebookOut.empty()) {
        if (result.codebooks.empty()) throw UsageError("--codebook-out needs --mode be");
        writeOutput(o.codebookOut, result.codebooks.front().dump());
    }
    if (o.report == "json")
        writeOutput(o.out, toJson(report));
    else if (o.report == "csv")
        writeOutput(o.out, toCsv(report));
    else
        writeOutput(o.out, toTable(report));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed state-vector simulator with byte encoding and two-tier memory"};
    app.require_subcommand(1);

    RunOptions o;
    auto* runCmd = app.add_subcommand("run", "simulate a circuit and print a report");
    auto* circuitOpt = runCmd->add_option("--circuit", o.source.circuitPath, "circuit file");
    auto* builderOpt = runCmd->add_option("--builder", o.source.builder, "benchmark:N | adder:M:a:b[:c]");
    circuitOpt->excludes(builderOpt);
    runCmd->add_option("--ranks", o.ranks, "number of ranks (power of two)");
    runCmd->add_option("--local-qubits", o.localQubits, "qubits per rank (default: qubits - log2 ranks)");
    runCmd->add_option("--mode", o.mode, "be | fp32 | fp64")->check(CLI::IsMember({"be", "byte", "fp32", "fp64"}));
    runCmd->add_option("--fast-bytes", o.fastBytes, "fast-tier capacity per rank");
    runCmd->add_option("--chunk-bytes", o.chunkBytes, "staging chunk size (power of two)");
    runCmd->add_option("--lookahead", o.lookahead, "gates examined ahead when grouping")->check(CLI::PositiveNumber);
    runCmd->add_flag("--naive-staging", o.naiveStaging, "stage every gate separately");
    runCmd->add_flag("--optimize-labels", o.optimize, "relabel qubits to reduce inter-rank traffic");
    runCmd->add_option("--report", o.report, "json | csv | table")->check(CLI::IsMember({"json", "csv", "table"}));
    runCmd->add_option("--out", o.out, "report file (default: standard output)");
    runCmd->add_option("--codebook-out", o.codebookOut, "write the final codebook (byte mode)");
    runCmd->add_option("--jitter-seed", o.jitterSeed, "perturb worker scheduling");

    CircuitSource emitSource;
    std::string emitOut;
    auto* emitCmd = app.add_subcommand("emit", "print a circuit in the text format");
    emitCmd->add_option("--circuit", emitSource.circuitPath, "circuit file");
    emitCmd->add_option("--builder", emitSource.builder, "benchmark:N | adder:M:a:b[:c]");
    emitCmd->add_option("--out", emitOut, "output file (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*runCmd) return run(o);
        writeOutput(emitOut, serializeCircuit(emitSource.load()));
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "qtier: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "qtier: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qtier: " << e.what() << "\n";
        return 1;
    }
}

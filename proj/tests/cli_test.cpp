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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qtier;

namespace {

struct Outcome {
    int status = -1;
    std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Outcome cli(const std::string& args) {
    const std::string command = std::string(QTIER_CLI_PATH) + " " + args + " 2>&1";
    Outcome o;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return o;
    char buffer[4096];
    while (std::size_t n = std::fread(buffer, 1, sizeof buffer, pipe)) o.out.append(buffer, n);
    const int raw = pclose(pipe);
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return o;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "qtier_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Report, JsonRoundTrips) {
    RunConfig config;
    config.ranks = 4;
    config.mode = PrecisionMode::BYTE;
    const Circuit c = buildBenchmark(10);
    const RunReport r = makeReport(simulate(c, config), c, 0.125);
    const RunReport back = reportFromJson(toJson(r));
    EXPECT_EQ(back, r);
    EXPECT_EQ(back.mode, "be");
    EXPECT_EQ(back.expectations.size(), 10u);
}

TEST(Report, CountersEqualTheLedger) {
    RunConfig config;
    config.ranks = 4;
    TierConfig t;
    t.fastCapacityBytes = 1024;
    t.chunkBytes = 256;
    config.tier = t;
    const Circuit c = buildBenchmark(10);
    const RunResult result = simulate(c, config);
    const RunReport r = makeReport(result, c, 0);
    const TrafficLedger m = result.maxLedger();
    EXPECT_EQ(r.interRankBytesSent, m.interRankBytesSent);
    EXPECT_EQ(r.interRankBytes, m.interRankBytesSent + m.interRankBytesReceived);
    EXPECT_EQ(r.tierBytes, m.tierBytesMoved);
    EXPECT_EQ(r.tierTransferCount, m.tierTransferCount);
    EXPECT_EQ(r.gateOperations, c.gates.size());
    EXPECT_GT(r.tierBytes, 0u);
}

TEST(Report, CsvLayout) {
    RunReport r;
    r.qubits = 2;
    r.expectations = {{0.5, 0.5, 1.0}, {0.0, 0.5, 0.5}};
    const std::string csv = toCsv(r);
    std::istringstream in(csv);
    std::string header, row, blank, sub, q0;
    std::getline(in, header);
    std::getline(in, row);
    std::getline(in, blank);
    std::getline(in, sub);
    std::getline(in, q0);
    EXPECT_EQ(header.rfind("qubits,ranks,localQubits,mode,gateOperations,interRankBytes,", 0), 0u);
    EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
    EXPECT_TRUE(blank.empty());
    EXPECT_EQ(sub, "qubit,qx,qy,qz");
    EXPECT_EQ(q0, "0,0.5,0.5,1");
}

TEST(Report, TableHasTwoDecimals) {
    RunReport r;
    r.expectations = {{0.5, 0.5, 1.0}, {-1e-17, 0.5, 0.5}};
    const std::string t = toTable(r);
    EXPECT_NE(t.find("    0   0.50   0.50   1.00"), std::string::npos) << t;
    EXPECT_EQ(t.find("-0.00"), std::string::npos) << t;
}

TEST(Cli, AdderTableShowsTheSum) {
    const Outcome o = cli("run --builder adder:2:1:2 --ranks 1 --mode fp64 --report table");
    ASSERT_EQ(o.status, 0) << o.out;
    EXPECT_NE(o.out.find("    0   0.50   0.50   0.00"), std::string::npos) << o.out;
    EXPECT_NE(o.out.find("    1   0.50   0.50   1.00"), std::string::npos) << o.out;
    EXPECT_NE(o.out.find("    2   0.50   0.50   1.00"), std::string::npos) << o.out;
    EXPECT_NE(o.out.find("    3   0.50   0.50   1.00"), std::string::npos) << o.out;
}

TEST(Cli, BenchmarkJsonFollowsTheVolumeLaw) {
    const auto path = scratch("bench.json");
    const Outcome o =
        cli("run --builder benchmark:12 --ranks 4 --local-qubits 10 --mode be --report json --out " + path.string());
    ASSERT_EQ(o.status, 0) << o.out;
    const RunReport r = reportFromJson(slurp(path));
    // H on qubits 11 and 10 twice each, then two measurement exchanges.
    const std::uint64_t half = (std::uint64_t{1} << 10) / 2 * 2;
    EXPECT_EQ(r.interRankBytesSent, (4 + 2) * half);
    EXPECT_EQ(r.interRankBytesReceived, (4 + 2) * half);
    EXPECT_EQ(r.interRankBytes, 2 * (4 + 2) * half);
    EXPECT_EQ(r.gateOperations, 19u);
    EXPECT_FALSE(r.magnitudeOverflow || r.phaseOverflow);
}

TEST(Cli, ExitCodes) {
    Outcome o = cli("run --circuit missing.qc");
    EXPECT_EQ(o.status, 2);
    EXPECT_NE(o.out.find("cannot open"), std::string::npos) << o.out;

    EXPECT_EQ(cli("run --builder benchmark:8 --circuit x.qc").status, 2);
    EXPECT_EQ(cli("run --builder benchmark:8 --ranks 3").status, 2);
    EXPECT_EQ(cli("run --builder benchmark:8 --ranks 2 --local-qubits 9").status, 2);
    EXPECT_EQ(cli("run --builder adder:2:7:1").status, 2);
    EXPECT_EQ(cli("run --builder nonsense").status, 2);
    EXPECT_EQ(cli("run --builder benchmark:8 --mode fp16").status, 2);
    EXPECT_EQ(cli("frobnicate").status, 2);
    EXPECT_EQ(cli("run --builder benchmark:8 --fast-bytes 64 --chunk-bytes 48").status, 2);

    const auto bad = scratch("bad.qc");
    std::ofstream(bad) << "qubits 2\nH 9\n";
    o = cli("run --circuit " + bad.string());
    EXPECT_EQ(o.status, 2);
    EXPECT_NE(o.out.find("line 2"), std::string::npos) << o.out;
}

TEST(Cli, EmitAndRunFile) {
    const auto file = scratch("adder.qc");
    ASSERT_EQ(cli("emit --builder adder:3:5:6 --out " + file.string()).status, 0);
    const Outcome o = cli("run --circuit " + file.string() + " --ranks 2 --report csv");
    ASSERT_EQ(o.status, 0) << o.out;
    // 5 + 6 = 11 = 0b011 mod 8, most significant bit on qubit 3.
    std::istringstream in(o.out.substr(o.out.find("qubit,qx,qy,qz")));
    std::string line;
    std::getline(in, line);
    std::vector<double> qz;
    while (std::getline(in, line)) qz.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    ASSERT_EQ(qz.size(), 6u);
    EXPECT_NEAR(qz[3], 0.0, 1e-12);
    EXPECT_NEAR(qz[4], 1.0, 1e-12);
    EXPECT_NEAR(qz[5], 1.0, 1e-12);
}

TEST(Cli, OptimizedLabelsKeepTheReport) {
    const auto plain = scratch("plain.json");
    const auto moved = scratch("moved.json");
    ASSERT_EQ(cli("run --builder adder:4:5:9 --ranks 4 --report json --out " + plain.string()).status, 0);
    ASSERT_EQ(cli("run --builder adder:4:5:9 --ranks 4 --optimize-labels --report json --out " + moved.string()).status,
              0);
    const RunReport a = reportFromJson(slurp(plain));
    const RunReport b = reportFromJson(slurp(moved));
    EXPECT_LT(b.interRankBytes, a.interRankBytes);
    EXPECT_FALSE(b.labelPermutation.empty());
    ASSERT_EQ(a.expectations.size(), b.expectations.size());
    for (std::size_t q = 0; q < a.expectations.size(); ++q) EXPECT_NEAR(a.expectations[q].qz, b.expectations[q].qz, 1e-12);
}

TEST(Cli, ReportsAreDeterministicAcrossScheduling) {
    const auto a = scratch("a.csv");
    const auto b = scratch("b.csv");
    const auto cbA = scratch("a.cb");
    const auto cbB = scratch("b.cb");
    const std::string common = "run --builder adder:4:3:11 --ranks 8 --mode be --fast-bytes 16 --chunk-bytes 4 "
                               "--report json ";
    ASSERT_EQ(cli(common + "--jitter-seed 1 --out " + a.string() + " --codebook-out " + cbA.string()).status, 0);
    ASSERT_EQ(cli(common + "--jitter-seed 2 --out " + b.string() + " --codebook-out " + cbB.string()).status, 0);
    EXPECT_TRUE(reportFromJson(slurp(a)).sameResults(reportFromJson(slurp(b))));
    EXPECT_EQ(slurp(cbA), slurp(cbB));
    EXPECT_EQ(slurp(cbA).rfind("M 0 0x0p+0\n", 0), 0u);
}

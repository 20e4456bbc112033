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

#include "qtier/layout.hpp"
#include "qtier/simulator.hpp"
#include "qtier/transport.hpp"
#include "reference.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

using namespace qtier;

namespace {

constexpr std::uint64_t GiB = std::uint64_t{1} << 30;
constexpr std::uint64_t TiB = std::uint64_t{1} << 40;

// Fails the n-th send issued by one rank.
class FaultyTransport : public Transport {
  public:
    FaultyTransport(Rank ranks, Rank faultyRank, int failOnSend)
        : inner_(ranks), faultyRank_(faultyRank), failOnSend_(failOnSend) {}

    Rank rankCount() const override { return inner_.rankCount(); }
    void send(Rank from, Rank to, Message message) override {
        if (from == faultyRank_ && ++sends_ == failOnSend_) throw TransportError("link down");
        inner_.send(from, to, std::move(message));
    }
    Message receive(Rank to, Rank from) override { return inner_.receive(to, from); }
    std::vector<Message> allGather(Rank rank, Message contribution) override {
        return inner_.allGather(rank, std::move(contribution));
    }
    void abort(const std::string& reason) override { inner_.abort(reason); }

  private:
    InProcessTransport inner_;
    Rank faultyRank_;
    int failOnSend_;
    std::atomic<int> sends_{0};
};

RunResult runFp64(const Circuit& c, Rank ranks, bool state = true) {
    RunConfig config;
    config.ranks = ranks;
    config.captureState = state;
    return simulate(c, config);
}

Circuit single(Qubit n, const Gate& g) {
    Circuit c;
    c.qubitCount = n;
    c.gates.push_back(g);
    return c;
}

}  // namespace

TEST(Memory, PowersOfTwoLaw) {
    EXPECT_EQ(memoryBytes(32, PrecisionMode::FP64), 64 * GiB);
    EXPECT_EQ(memoryBytes(50, PrecisionMode::BYTE), 2048 * TiB);
    EXPECT_EQ(memoryBytes(1, PrecisionMode::FP64), 32u);
    for (Qubit n = 1; n <= 50; ++n) {
        EXPECT_EQ(memoryBytes(n, PrecisionMode::FP64), std::uint64_t{1} << (n + 4));
        EXPECT_EQ(memoryBytes(n, PrecisionMode::FP32), std::uint64_t{1} << (n + 3));
        EXPECT_EQ(memoryBytes(n, PrecisionMode::BYTE), std::uint64_t{1} << (n + 1));
    }
}

TEST(Layout, RankOwnsHighBits) {
    const PartitionLayout layout(10, 7);
    EXPECT_EQ(layout.rankCount(), 8u);
    EXPECT_EQ(layout.localSize(), 128u);
    for (Index g = 0; g < 1024; ++g) {
        EXPECT_EQ(layout.rankOf(g), g >> 7);
        EXPECT_EQ(layout.rankBase(layout.rankOf(g)), g & ~Index{127});
    }
    EXPECT_TRUE(layout.isLocal(6));
    EXPECT_FALSE(layout.isLocal(7));
    EXPECT_EQ(PartitionLayout::withRanks(10, 8), layout);
    EXPECT_THROW(PartitionLayout(4, 5), ValidationError);
}

TEST(Exchange, HighSingleQubitGate) {
    const PartitionLayout layout(40, 32);
    for (Rank r : {0u, 1u, 77u, 255u}) {
        const ExchangePlan plan = planExchange(layout, Gate::h(35), r, PrecisionMode::FP64);
        EXPECT_EQ(plan.kind, ExchangeKind::Pairwise);
        ASSERT_EQ(plan.partners.size(), 1u);
        EXPECT_EQ(plan.partners[0], r ^ 8u);
        EXPECT_EQ(plan.elementCount, Index{1} << 31);
    }
}

TEST(Exchange, FullStateTraversesTheNetwork) {
    // Every rank ships half its partition out and the updated half back.
    const PartitionLayout layout(40, 32);
    std::uint64_t outbound = 0;
    for (Rank r = 0; r < layout.rankCount(); ++r) outbound += planExchange(layout, Gate::h(35), r, PrecisionMode::FP64).bytes();
    EXPECT_EQ(outbound, 8192 * GiB);
    EXPECT_EQ(2 * outbound, 16384 * GiB);
}

TEST(Exchange, DiagonalGatesNeverExchange) {
    const PartitionLayout layout(40, 32);
    EXPECT_EQ(planExchange(layout, Gate::cphase(38, 39, 3), 5, PrecisionMode::FP64).kind, ExchangeKind::None);
    EXPECT_EQ(planExchange(layout, Gate::z(39), 5, PrecisionMode::FP64).kind, ExchangeKind::None);
    EXPECT_EQ(planExchange(layout, Gate::phase(33, 2), 5, PrecisionMode::FP64).kind, ExchangeKind::None);
    EXPECT_EQ(planExchange(layout, Gate::h(31), 5, PrecisionMode::FP64).kind, ExchangeKind::None);
}

TEST(Exchange, TwoQubitPlans) {
    const PartitionLayout layout(6, 3);
    const Mat4 u = Mat4::Identity();
    const ExchangePlan one = planExchange(layout, Gate::u4(1, 4, u), 2, PrecisionMode::FP32);
    EXPECT_EQ(one.kind, ExchangeKind::Pairwise);
    EXPECT_EQ(one.partners, std::vector<Rank>{2 ^ 2});
    EXPECT_EQ(one.elementCount, 4u);
    EXPECT_EQ(one.bytes(), 32u);

    const ExchangePlan both = planExchange(layout, Gate::u4(3, 5, u), 2, PrecisionMode::BYTE);
    EXPECT_EQ(both.kind, ExchangeKind::Quad);
    EXPECT_EQ(both.partners.size(), 3u);
    EXPECT_EQ(both.elementCount, 6u);
    EXPECT_EQ(both.bytes(), 12u);
    // Rank bits 0 and 2: group {2, 3, 6, 7}.
    std::vector<Rank> group = both.partners;
    group.push_back(2);
    std::sort(group.begin(), group.end());
    EXPECT_EQ(group, (std::vector<Rank>{2, 3, 6, 7}));
}

TEST(Exchange, CnotWithHighControlIsRankConstant) {
    const PartitionLayout layout(4, 2);
    for (Rank r = 0; r < 4; ++r) {
        const ExchangePlan local = planExchange(layout, Gate::cnot(3, 0), r, PrecisionMode::FP64);
        EXPECT_EQ(local.kind, ExchangeKind::None);
        const ExchangePlan high = planExchange(layout, Gate::cnot(3, 2), r, PrecisionMode::FP64);
        EXPECT_EQ(high.kind, r & 2 ? ExchangeKind::Pairwise : ExchangeKind::None) << "rank " << r;
    }
}

TEST(Distributed, HadamardOnTopQubitOfFourRanks) {
    Circuit c = single(4, Gate::h(3));
    const RunResult one = runFp64(c, 1);
    const RunResult four = runFp64(c, 4);
    EXPECT_EQ(one.state, four.state);
    for (const TrafficLedger& l : four.ledgers) {
        EXPECT_EQ(l.interRankBytesSent, 2u * 16u);
        EXPECT_EQ(l.interRankBytesReceived, 2u * 16u);
        EXPECT_EQ(l.gateOperations, 1u);
    }
    EXPECT_EQ(one.maxLedger().interRankBytesSent, 0u);
}

TEST(Distributed, VolumeLawAcrossSmallLayouts) {
    const Mat4 u = Mat4::Identity();
    for (Qubit n = 3; n <= 7; ++n) {
        for (Qubit local = 2; local < n; ++local) {
            const Rank ranks = Rank{1} << (n - local);
            const PartitionLayout layout(n, local);
            const Index l = layout.localSize();
            for (PrecisionMode mode : {PrecisionMode::FP64, PrecisionMode::FP32, PrecisionMode::BYTE}) {
                const std::size_t bpe = bytesPerElement(mode);
                RunConfig config;
                config.ranks = ranks;
                config.mode = mode;
                for (Qubit j = local; j < n; ++j) {
                    const RunResult r = simulate(single(n, Gate::h(j)), config);
                    for (const TrafficLedger& led : r.ledgers) {
                        EXPECT_EQ(led.interRankBytesSent, l / 2 * bpe);
                        EXPECT_EQ(led.interRankReturnBytes, l / 2 * bpe);
                    }
                    for (Rank rank = 0; rank < ranks; ++rank) {
                        const ExchangePlan plan = planExchange(layout, Gate::h(j), rank, mode);
                        EXPECT_EQ(plan.partners[0], rank ^ (Rank{1} << (j - local)));
                        EXPECT_EQ(plan.bytes(), r.ledgers[rank].interRankBytesSent);
                    }
                }
                if (n - local >= 2) {
                    const RunResult r = simulate(single(n, Gate::u4(n - 1, local, u)), config);
                    for (const TrafficLedger& led : r.ledgers) EXPECT_EQ(led.interRankBytesSent, 3 * l / 4 * bpe);
                }
            }
        }
    }
}

TEST(Distributed, SymmetryAndConservation) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const Circuit c = reference::randomCircuit(7, 25, rng);
        for (Rank ranks : {2u, 4u, 8u}) {
            const RunResult r = runFp64(c, ranks, false);
            const TrafficLedger total = r.totalLedger();
            EXPECT_EQ(total.interRankBytesSent, total.interRankBytesReceived);
            for (const TrafficLedger& l : r.ledgers) EXPECT_EQ(l.interRankBytesSent, l.interRankBytesReceived);
        }
    }
}

TEST(Distributed, RankCountInvariance) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const Circuit c = reference::randomCircuit(8, 40, rng);
        const auto expected = reference::run(c);
        for (Rank ranks : {1u, 2u, 4u, 8u, 16u, 64u}) {
            const RunResult r = runFp64(c, ranks);
            EXPECT_LT(reference::maxDifference(expected, r.state), 1e-12) << "ranks " << ranks;
        }
    }
}

TEST(Distributed, BenchmarkReportsAgreeAcrossRankCounts) {
    const Circuit c = buildBenchmark(12);
    const RunResult base = runFp64(c, 1, false);
    for (Rank ranks : {2u, 4u, 8u}) {
        const RunResult r = runFp64(c, ranks, false);
        EXPECT_LT(reference::maxDifference(base.expectations->qubits, r.expectations->qubits), 1e-12);
    }
}

TEST(Distributed, DiagonalOnlyCircuitsAreSilent) {
    Circuit c;
    c.qubitCount = 6;
    for (Qubit q = 0; q < 6; ++q) c.gates.push_back(Gate::z(q));
    for (Qubit q = 0; q + 1 < 6; ++q) c.gates.push_back(Gate::cphase(q, 5 - q, 3));
    c.gates.push_back(Gate::phase(5, -4));
    for (Rank ranks : {2u, 4u, 16u}) {
        const RunResult r = runFp64(c, ranks, false);
        EXPECT_EQ(r.totalLedger().interRankBytesSent, 0u);
        EXPECT_EQ(r.totalLedger().interRankMessages, 0u);
    }
}

TEST(Distributed, TransportFailureNamesGateAndRanks) {
    Circuit c;
    c.qubitCount = 4;
    c.gates = {Gate::h(0), Gate::z(3), Gate::x(2)};
    FaultyTransport transport(4, 1, 1);
    RunConfig config;
    config.ranks = 4;
    try {
        simulate(c, config, transport);
        FAIL() << "expected a failure";
    } catch (const SimulationError& e) {
        const std::string what = e.what();
        // Rank 1 first sends on X 2, to rank 0.
        EXPECT_NE(what.find("gate #3 (X 2)"), std::string::npos) << what;
        EXPECT_NE(what.find("rank 1 and rank 0"), std::string::npos) << what;
        EXPECT_NE(what.find("link down"), std::string::npos) << what;
    }
}

TEST(Transport, PairwiseFifoAndGather) {
    InProcessTransport t(3);
    std::vector<std::jthread> threads;
    std::vector<std::vector<Message>> gathered(3);
    std::vector<Message> received(3);
    for (Rank r = 0; r < 3; ++r) {
        threads.emplace_back([&, r] {
            const Rank next = (r + 1) % 3;
            const Rank prev = (r + 2) % 3;
            t.send(r, next, Message{std::byte(r), std::byte(1)});
            t.send(r, next, Message{std::byte(r), std::byte(2)});
            Message a = t.receive(r, prev);
            Message b = t.receive(r, prev);
            received[r] = {a[1], b[1]};
            gathered[r] = t.allGather(r, Message{std::byte(10 + r)});
        });
    }
    threads.clear();
    for (Rank r = 0; r < 3; ++r) {
        EXPECT_EQ(received[r], (Message{std::byte(1), std::byte(2)}));
        ASSERT_EQ(gathered[r].size(), 3u);
        for (Rank s = 0; s < 3; ++s) EXPECT_EQ(gathered[r][s], Message{std::byte(10 + s)});
    }
}

TEST(Transport, AbortWakesBlockedReceivers) {
    InProcessTransport t(2);
    std::jthread waiter([&] { EXPECT_THROW(t.receive(0, 1), TransportError); });
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    t.abort("stop");
    waiter.join();
    EXPECT_THROW(t.send(0, 1, {}), TransportError);
}

TEST(Ledger, GibibyteConversion) {
    TrafficLedger l;
    EXPECT_EQ(gibibytesExchanged(l), 0u);
    l.interRankBytesSent = 3 * GiB;
    l.interRankBytesReceived = 3 * GiB;
    EXPECT_EQ(gibibytesExchanged(l), 6u);
    l.interRankBytesSent += GiB / 2 + 1;
    EXPECT_EQ(gibibytesExchanged(l), 7u);
    l.interRankBytesSent -= 2;
    EXPECT_EQ(gibibytesExchanged(l), 6u);
}

TEST(Ledger, Accumulates) {
    TrafficLedger a, b;
    a.interRankBytesSent = 5;
    a.gateOperations = 2;
    b.interRankBytesSent = 7;
    b.tierBytesMoved = 3;
    a += b;
    EXPECT_EQ(a.interRankBytesSent, 12u);
    EXPECT_EQ(a.tierBytesMoved, 3u);
    EXPECT_EQ(a.gateOperations, 2u);
}

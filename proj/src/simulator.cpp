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

#include "qtier/simulator.hpp"

#include "qtier/kernels.hpp"
#include "qtier/local_state.hpp"

#include <algorithm>
#include <mutex>
#include <string>
#include <thread>

namespace qtier {

TrafficLedger RunResult::maxLedger() const {
    TrafficLedger m;
    for (const TrafficLedger& l : ledgers) {
        m.interRankBytesSent = std::max(m.interRankBytesSent, l.interRankBytesSent);
        m.interRankBytesReceived = std::max(m.interRankBytesReceived, l.interRankBytesReceived);
        m.interRankMessages = std::max(m.interRankMessages, l.interRankMessages);
        m.interRankReturnBytes = std::max(m.interRankReturnBytes, l.interRankReturnBytes);
        m.collectiveBytes = std::max(m.collectiveBytes, l.collectiveBytes);
        m.tierBytesMoved = std::max(m.tierBytesMoved, l.tierBytesMoved);
        m.tierTransferCount = std::max(m.tierTransferCount, l.tierTransferCount);
        m.gateOperations = std::max(m.gateOperations, l.gateOperations);
    }
    return m;
}

TrafficLedger RunResult::totalLedger() const {
    TrafficLedger t;
    for (const TrafficLedger& l : ledgers) t += l;
    return t;
}

bool RunResult::codebookOverflow() const {
    return std::any_of(codebooks.begin(), codebooks.end(), [](const Codebook& c) { return c.overflow(); });
}

PartitionLayout resolveLayout(Qubit qubits, const RunConfig& config) {
    if (!isPowerOfTwo(config.ranks)) throw ValidationError("rank count must be a power of two");
    const unsigned rankBits = log2Exact(config.ranks);
    if (rankBits > qubits) throw ValidationError("more ranks than amplitudes");
    if (config.localQubits) {
        if (*config.localQubits > qubits)
            throw ValidationError("local qubits (" + std::to_string(*config.localQubits) +
                                  ") exceed the qubit count (" + std::to_string(qubits) + ")");
        if (*config.localQubits + rankBits != qubits)
            throw ValidationError("local qubits must equal qubits - log2(ranks) = " +
                                  std::to_string(qubits - rankBits));
    }
    return PartitionLayout(qubits, qubits - rankBits);
}

namespace {

constexpr std::uint64_t kMaxStateBytes = std::uint64_t{8} << 30;

std::string describe(std::size_t index, const Gate& gate) {
    std::string s = "gate #" + std::to_string(index + 1) + " (" + std::string(mnemonic(gate.kind));
    for (Qubit q : gate.operands()) s += " " + std::to_string(q);
    return s + ")";
}

Index insertBit(Index k, unsigned bit, bool value) {
    return insertZeroBit(k, bit) | (value ? bitMask(bit) : 0);
}

/// Everything one rank does, start to finish.
template <class Policy>
class RankWorker {
  public:
    using Element = typename Policy::Element;

    RankWorker(const Circuit& circuit, const PartitionLayout& layout, Rank rank, PrecisionMode mode,
               StagingPlan plan, Transport& transport)
        : circuit_(circuit),
          layout_(layout),
          rank_(rank),
          mode_(mode),
          plan_(std::move(plan)),
          transport_(transport),
          store_(plan_.geometry, layout.localQubits()) {}

    void run() {
        if (rank_ == 0) store_.initialize(0, Policy::store({1.0, 0.0}, &codebook_));
        for (const Pass& pass : plan_.passes) execute(pass);
    }

    const TrafficLedger& ledger() const { return ledger_; }
    const Codebook& codebook() const { return codebook_; }
    const std::optional<ExpectationReport>& report() const { return report_; }
    Index highWater() const { return store_.residency().highWater(); }

    std::vector<Amplitude> finalAmplitudes() const {
        const auto elements = store_.snapshot();
        std::vector<Amplitude> out(elements.size());
        for (std::size_t i = 0; i < elements.size(); ++i) out[i] = Policy::load(elements[i], &codebook_);
        return out;
    }

  private:
    Index rankBase() const { return layout_.rankBase(rank_); }

    void execute(const Pass& pass) {
        const Gate& gate = circuit_.gates[pass.begin];
        switch (pass.kind) {
            case PassKind::Apply:
                sweep(pass, [&](const BlockView<Policy>& view) {
                    for (std::size_t g = pass.begin; g < pass.end; ++g)
                        applyOnView(view, circuit_.gates[g], pass.spanQubits, StoreSink<BlockView<Policy>>{view});
                });
                ledger_.gateOperations += pass.end - pass.begin;
                break;
            case PassKind::Propose: {
                ProposalCollector collector(codebook_);
                sweep(pass, [&](const BlockView<Policy>& view) {
                    applyOnView(view, gate, pass.spanQubits, ProposeSink{collector});
                });
                synchronize(collector.finish(), pass.begin);
                break;
            }
            case PassKind::Commit:
                sweep(pass, [&](const BlockView<Policy>& view) {
                    applyOnView(view, gate, pass.spanQubits, StoreSink<BlockView<Policy>>{view});
                });
                ledger_.gateOperations += 1;
                break;
            case PassKind::Gather:
                buffer_.resize(layout_.localSize());
                sweep(pass, [&](const BlockView<Policy>& view) {
                    for (Index i = 0; i < view.size(); ++i) buffer_[view.local(i)] = view.element(i);
                });
                if (gate.kind == GateKind::MeasureAll) {
                    measure(pass.begin);
                } else if (classify(gate, layout_, rank_) == OpClass::Exchange) {
                    exchange(pass.begin);
                } else {
                    auto view = BlockView<Policy>::contiguous(buffer_.data(), buffer_.size(), rankBase(), &codebook_);
                    applyGateEncoded(view, gate, pass.begin);
                }
                break;
            case PassKind::Scatter:
                sweep(pass, [&](const BlockView<Policy>& view) {
                    for (Index i = 0; i < view.size(); ++i) view.element(i) = buffer_[view.local(i)];
                });
                ledger_.gateOperations += 1;
                break;
        }
    }

    template <class F>
    void sweep(const Pass& pass, F&& f) {
        store_.beginPass();
        for (const auto& block : pass.blocks) {
            const auto view = store_.acquire(block, pass.access, rankBase(), &codebook_, ledger_);
            f(view);
            store_.release();
        }
    }

    template <class View, class Sink>
    void applyOnView(const View& view, const Gate& gate, std::span<const Qubit> span, Sink&& sink) {
        const unsigned chunkBits = view.chunkBits();
        auto mapped = [&](Qubit q) {
            const auto v = viewQubit(q, chunkBits, span);
            if (!v) throw std::logic_error("operand is not a view bit");
            return *v;
        };
        if (gate.isDiagonal()) {
            visitDiagonal(view, gate.diagonalMask(), gate.diagonalFactor(), sink);
            return;
        }
        if (gate.arity() == 1) {
            visitSingleQubit(view, gate.matrix2(), mapped(gate.qubits[0]), sink);
            return;
        }
        if (gate.kind == GateKind::CNot) {
            const auto control = viewQubit(gate.qubits[0], chunkBits, span);
            if (control) {
                visitTwoQubit(view, gate.matrix4(), *control, mapped(gate.qubits[1]), sink);
            } else if (testBit(view.global(0), gate.qubits[0])) {
                // The control bit is constant over this block.
                visitSingleQubit(view, Gate::x(0).matrix2(), mapped(gate.qubits[1]), sink);
            }
            return;
        }
        visitTwoQubit(view, gate.matrix4(), mapped(gate.qubits[0]), mapped(gate.qubits[1]), sink);
    }

    // Applies a gate to a contiguous view; byte mode first synchronizes the
    // codebook with every rank.
    void applyGateEncoded(const BlockView<Policy>& view, const Gate& gate, std::size_t index) {
        if constexpr (Policy::mode == PrecisionMode::BYTE) {
            ProposalCollector collector(codebook_);
            applyOnView(view, gate, {}, ProposeSink{collector});
            synchronize(collector.finish(), index);
        }
        applyOnView(view, gate, {}, StoreSink<BlockView<Policy>>{view});
    }

    void synchronize(const Proposal& proposal, std::size_t index) {
        std::vector<Message> gathered;
        try {
            gathered = transport_.allGather(rank_, proposal.serialize());
        } catch (const std::exception& e) {
            throw SimulationError(describe(index, circuit_.gates[index]) + ": codebook synchronization on rank " +
                                  std::to_string(rank_) + " failed: " + e.what());
        }
        std::vector<Proposal> proposals;
        proposals.reserve(gathered.size());
        for (const auto& bytes : gathered) proposals.push_back(Proposal::deserialize(bytes));
        ledger_.collectiveBytes += gathered[rank_].size() * (gathered.size() - 1);
        synchronizeCodebooks(codebook_, proposals);
    }

    void send(Rank to, std::span<const Element> data, std::size_t index) {
        try {
            transport_.send(rank_, to, packElements<Element>(data));
        } catch (const std::exception& e) {
            throw SimulationError(describe(index, circuit_.gates[index]) + ": exchange between rank " +
                                  std::to_string(rank_) + " and rank " + std::to_string(to) + " failed: " + e.what());
        }
        ledger_.interRankMessages += 1;
    }

    std::vector<Element> receive(Rank from, Index expected, std::size_t index) {
        std::vector<Element> data;
        try {
            data = unpackElements<Element>(transport_.receive(rank_, from));
        } catch (const std::exception& e) {
            throw SimulationError(describe(index, circuit_.gates[index]) + ": exchange between rank " +
                                  std::to_string(rank_) + " and rank " + std::to_string(from) +
                                  " failed: " + e.what());
        }
        if (data.size() != expected)
            throw SimulationError(describe(index, circuit_.gates[index]) + ": rank " + std::to_string(from) +
                                  " sent " + std::to_string(data.size()) + " elements to rank " +
                                  std::to_string(rank_) + ", expected " + std::to_string(expected));
        return data;
    }

    void exchange(std::size_t index) {
        const Gate& original = circuit_.gates[index];
        const ExchangePlan plan = planExchange(layout_, original, rank_, mode_);
        Gate gate = original;
        // A high control is set on this rank (otherwise there is no exchange).
        if (gate.kind == GateKind::CNot && !layout_.isLocal(gate.qubits[0])) gate = Gate::x(gate.qubits[1]);
        if (plan.kind == ExchangeKind::Pairwise)
            pairwise(gate, plan, index);
        else
            quad(gate, plan, index);
    }

    void pairwise(const Gate& gate, const ExchangePlan& plan, std::size_t index) {
        const Qubit n = layout_.localQubits();
        const Index half = layout_.localSize() / 2;
        const Rank partner = plan.partners[0];

        Qubit high = 0;
        std::optional<Qubit> local;
        for (Qubit q : gate.operands()) {
            if (layout_.isLocal(q))
                local = q;
            else
                high = q;
        }
        // Selector bit splitting the partition into kept and shipped halves.
        const unsigned s = (local && *local == n - 1) ? n - 2 : n - 1;
        const bool lower = !testBit(rankBase(), high);
        const bool keep = !lower;

        std::vector<Element> outgoing(half);
        for (Index k = 0; k < half; ++k) outgoing[k] = buffer_[insertBit(k, s, !keep)];
        send(partner, outgoing, index);
        const auto incoming = receive(partner, half, index);
        ledger_.interRankBytesSent += half * sizeof(Element);
        ledger_.interRankBytesReceived += half * sizeof(Element);

        // Work space: lower rank's amplitudes first, partner pairs at stride L/2.
        std::vector<Element> work(layout_.localSize());
        const Index mine = lower ? 0 : half;
        const Index theirs = lower ? half : 0;
        for (Index k = 0; k < half; ++k) {
            work[mine + k] = buffer_[insertBit(k, s, keep)];
            work[theirs + k] = incoming[k];
        }
        Gate mapped = gate;
        for (unsigned i = 0; i < gate.arity(); ++i) {
            const Qubit q = gate.qubits[i];
            mapped.qubits[i] = !layout_.isLocal(q) ? n - 1 : (q < s ? q : q - 1);
        }
        auto view = BlockView<Policy>::contiguous(work.data(), work.size(), 0, &codebook_);
        applyGateEncoded(view, mapped, index);

        send(partner, std::span<const Element>(work.data() + theirs, half), index);
        ledger_.interRankReturnBytes += half * sizeof(Element);
        const auto returned = receive(partner, half, index);
        for (Index k = 0; k < half; ++k) {
            buffer_[insertBit(k, s, keep)] = work[mine + k];
            buffer_[insertBit(k, s, !keep)] = returned[k];
        }
    }

    void quad(const Gate& gate, const ExchangePlan& plan, std::size_t index) {
        const Qubit n = layout_.localQubits();
        const Index quarter = layout_.localSize() / 4;
        const Qubit q1 = gate.qubits[0], q2 = gate.qubits[1];
        const unsigned position = (testBit(rankBase(), q1) ? 1U : 0U) | (testBit(rankBase(), q2) ? 2U : 0U);
        std::array<Rank, 4> members{};
        {
            std::size_t next = 0;
            for (unsigned t = 0; t < 4; ++t) members[t] = t == position ? rank_ : plan.partners[next++];
        }
        auto quarterOf = [&](std::vector<Element>& v, unsigned t) {
            return std::span<Element>(v.data() + t * quarter, quarter);
        };

        // Quarter t (top two local bits) goes to the member at position t.
        for (unsigned t = 0; t < 4; ++t)
            if (t != position) send(members[t], quarterOf(buffer_, t), index);
        std::vector<Element> work(layout_.localSize());
        for (unsigned t = 0; t < 4; ++t) {
            if (t == position) {
                std::ranges::copy(quarterOf(buffer_, t), work.begin() + t * quarter);
            } else {
                const auto incoming = receive(members[t], quarter, index);
                std::ranges::copy(incoming, work.begin() + t * quarter);
            }
        }
        ledger_.interRankBytesSent += 3 * quarter * sizeof(Element);
        ledger_.interRankBytesReceived += 3 * quarter * sizeof(Element);

        Gate mapped = gate;
        mapped.qubits = {n - 2, n - 1};
        auto view = BlockView<Policy>::contiguous(work.data(), work.size(), 0, &codebook_);
        applyGateEncoded(view, mapped, index);

        for (unsigned t = 0; t < 4; ++t) {
            if (t == position) continue;
            send(members[t], quarterOf(work, t), index);
            ledger_.interRankReturnBytes += quarter * sizeof(Element);
        }
        for (unsigned t = 0; t < 4; ++t) {
            if (t == position) {
                std::ranges::copy(quarterOf(work, t), buffer_.begin() + t * quarter);
            } else {
                const auto returned = receive(members[t], quarter, index);
                std::ranges::copy(returned, buffer_.begin() + t * quarter);
            }
        }
    }

    void measure(std::size_t index) {
        try {
            report_ = measureRank<Policy>(buffer_, &codebook_, layout_, rank_, transport_, ledger_, mode_);
        } catch (const SimulationError&) {
            throw;
        } catch (const std::exception& e) {
            throw SimulationError(describe(index, circuit_.gates[index]) + ": measurement on rank " +
                                  std::to_string(rank_) + " failed: " + e.what());
        }
        ledger_.gateOperations += 1;
    }

    const Circuit& circuit_;
    const PartitionLayout& layout_;
    Rank rank_;
    PrecisionMode mode_;
    StagingPlan plan_;
    Transport& transport_;
    TierStore<Policy> store_;
    Codebook codebook_;
    TrafficLedger ledger_;
    std::vector<Element> buffer_;
    std::optional<ExpectationReport> report_;
};

template <class Policy>
RunResult runWorkers(const Circuit& circuit, const RunConfig& config, const PartitionLayout& layout,
                     const TierGeometry& geometry, Transport& transport) {
    const Rank ranks = layout.rankCount();
    std::vector<std::unique_ptr<RankWorker<Policy>>> workers;
    RunResult result;
    result.layout = layout;
    result.mode = config.mode;
    for (Rank r = 0; r < ranks; ++r) {
        StagingPlan plan = planPasses(circuit.gates, geometry, layout, r, config.mode);
        result.plans.push_back(plan);
        workers.push_back(std::make_unique<RankWorker<Policy>>(circuit, layout, r, config.mode, std::move(plan),
                                                               transport));
    }

    std::mutex errorMutex;
    std::string firstError;
    bool failed = false;
    {
        std::vector<std::jthread> threads;
        threads.reserve(ranks);
        for (Rank r = 0; r < ranks; ++r) {
            threads.emplace_back([&, r] {
                try {
                    workers[r]->run();
                } catch (const std::exception& e) {
                    {
                        std::lock_guard lock(errorMutex);
                        if (!failed) {
                            failed = true;
                            firstError = e.what();
                        }
                    }
                    transport.abort(e.what());
                }
            });
        }
    }
    if (failed) throw SimulationError(firstError);

    for (Rank r = 0; r < ranks; ++r) {
        result.ledgers.push_back(workers[r]->ledger());
        result.residentHighWater.push_back(workers[r]->highWater());
        if (config.mode == PrecisionMode::BYTE) result.codebooks.push_back(workers[r]->codebook());
    }
    if (workers[0]->report()) result.expectations = unpermute(*workers[0]->report(), circuit);
    if (config.captureState) {
        result.state.reserve(Index{1} << layout.totalQubits());
        for (Rank r = 0; r < ranks; ++r) {
            const auto part = workers[r]->finalAmplitudes();
            result.state.insert(result.state.end(), part.begin(), part.end());
        }
    }
    return result;
}

}  // namespace

RunResult simulate(const Circuit& circuit, const RunConfig& config) {
    const PartitionLayout layout = resolveLayout(circuit.qubitCount, config);
    InProcessTransport transport(layout.rankCount(), config.jitterSeed);
    return simulate(circuit, config, transport);
}

RunResult simulate(const Circuit& circuit, const RunConfig& config, Transport& transport) {
    circuit.validate();
    const PartitionLayout layout = resolveLayout(circuit.qubitCount, config);
    if (transport.rankCount() != layout.rankCount())
        throw ValidationError("transport has " + std::to_string(transport.rankCount()) + " endpoints, layout needs " +
                              std::to_string(layout.rankCount()));
    if (memoryBytes(circuit.qubitCount, config.mode) > kMaxStateBytes)
        throw ValidationError("state of " + std::to_string(circuit.qubitCount) +
                              " qubits exceeds the in-process memory limit");
    const TierGeometry geometry = config.tier ? resolveGeometry(*config.tier, layout.localQubits(), config.mode)
                                              : untieredGeometry(layout.localQubits());
    return dispatchMode(config.mode, [&]<class Policy>(Policy) {
        return runWorkers<Policy>(circuit, config, layout, geometry, transport);
    });
}

}  // namespace qtier

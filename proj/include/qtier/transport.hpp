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

#include "qtier/layout.hpp"

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtier {

using Message = std::vector<std::byte>;

class TransportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Point-to-point and collective endpoints connecting the rank workers.
///
/// Messages between a fixed (from, to) pair arrive in order. `allGather` is a
/// barrier: it returns once every rank contributed, with the contributions
/// ordered by rank. After `abort` every pending and future call throws
/// TransportError.
class Transport {
  public:
    virtual ~Transport() = default;

    virtual Rank rankCount() const = 0;
    virtual void send(Rank from, Rank to, Message message) = 0;
    virtual Message receive(Rank to, Rank from) = 0;
    virtual std::vector<Message> allGather(Rank rank, Message contribution) = 0;
    virtual void abort(const std::string& reason) = 0;
};

/// Worker-per-rank transport inside one process.
class InProcessTransport final : public Transport {
  public:
    /// A non-zero `jitterSeed` inserts pseudo-random pauses into every call
    /// to perturb worker interleaving (results must not change).
    explicit InProcessTransport(Rank ranks, std::uint64_t jitterSeed = 0);

    Rank rankCount() const override { return ranks_; }
    void send(Rank from, Rank to, Message message) override;
    Message receive(Rank to, Rank from) override;
    std::vector<Message> allGather(Rank rank, Message contribution) override;
    void abort(const std::string& reason) override;

  private:
    struct Mailbox {
        std::deque<Message> queue;
    };

    void jitter(Rank rank);
    void throwIfAborted() const;

    Rank ranks_;
    std::mutex mutex_;
    std::condition_variable changed_;
    std::vector<Mailbox> mailboxes_;  // index from * ranks + to
    std::vector<Message> gatherSlots_;
    std::shared_ptr<const std::vector<Message>> gathered_;
    Rank gatherArrived_ = 0;
    std::uint64_t gatherGeneration_ = 0;
    bool aborted_ = false;
    std::string abortReason_;
    std::uint64_t jitterSeed_;
    std::vector<std::mt19937_64> jitterRngs_;
};

}  // namespace qtier

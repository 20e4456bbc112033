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

#include "qtier/transport.hpp"

#include <chrono>
#include <thread>

namespace qtier {

InProcessTransport::InProcessTransport(Rank ranks, std::uint64_t jitterSeed)
    : ranks_(ranks), mailboxes_(std::size_t{ranks} * ranks), gatherSlots_(ranks), jitterSeed_(jitterSeed) {
    if (ranks == 0) throw ValidationError("transport needs at least one rank");
    if (jitterSeed_ != 0)
        for (Rank r = 0; r < ranks; ++r) jitterRngs_.emplace_back(jitterSeed_ * 1000003U + r);
}

void InProcessTransport::jitter(Rank rank) {
    if (jitterSeed_ == 0) return;
    // Each rank only touches its own generator.
    const auto pause = jitterRngs_[rank]() % 200;
    if (pause < 100)
        std::this_thread::yield();
    else
        std::this_thread::sleep_for(std::chrono::microseconds(pause - 100));
}

void InProcessTransport::throwIfAborted() const {
    if (aborted_) throw TransportError("transport aborted: " + abortReason_);
}

void InProcessTransport::send(Rank from, Rank to, Message message) {
    if (from >= ranks_ || to >= ranks_) throw TransportError("send to unknown rank");
    jitter(from);
    {
        std::lock_guard lock(mutex_);
        throwIfAborted();
        mailboxes_[std::size_t{from} * ranks_ + to].queue.push_back(std::move(message));
    }
    changed_.notify_all();
}

Message InProcessTransport::receive(Rank to, Rank from) {
    if (from >= ranks_ || to >= ranks_) throw TransportError("receive from unknown rank");
    jitter(to);
    std::unique_lock lock(mutex_);
    auto& box = mailboxes_[std::size_t{from} * ranks_ + to];
    changed_.wait(lock, [&] { return aborted_ || !box.queue.empty(); });
    throwIfAborted();
    Message message = std::move(box.queue.front());
    box.queue.pop_front();
    return message;
}

std::vector<Message> InProcessTransport::allGather(Rank rank, Message contribution) {
    jitter(rank);
    std::unique_lock lock(mutex_);
    throwIfAborted();
    gatherSlots_[rank] = std::move(contribution);
    const std::uint64_t generation = gatherGeneration_;
    if (++gatherArrived_ == ranks_) {
        gathered_ = std::make_shared<const std::vector<Message>>(std::move(gatherSlots_));
        gatherSlots_ = std::vector<Message>(ranks_);
        gatherArrived_ = 0;
        ++gatherGeneration_;
        changed_.notify_all();
    } else {
        changed_.wait(lock, [&] { return aborted_ || gatherGeneration_ != generation; });
        throwIfAborted();
    }
    // The next round cannot complete before this rank joins it, so the
    // published result is still ours.
    return *gathered_;
}

void InProcessTransport::abort(const std::string& reason) {
    {
        std::lock_guard lock(mutex_);
        if (!aborted_) {
            aborted_ = true;
            abortReason_ = reason;
        }
    }
    changed_.notify_all();
}

}  // namespace qtier

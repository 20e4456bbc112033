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

// Two-byte polar encoding of amplitudes.
//
// An amplitude r*e^{i theta} is stored as one byte indexing a magnitude table
// and one byte indexing a phase table. The tables grow while a circuit runs:
// after every gate each rank proposes the values it produced that are not
// yet representable, the proposals of all ranks are merged, and only then is
// anything encoded. Merging takes the union, sorts it and appends, so the
// tables are the same for any rank count and any worker interleaving.

#include "qtier/types.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qtier {

struct EncodedAmplitude {
    std::uint8_t magIndex = 0;
    std::uint8_t phaseIndex = 0;

    bool operator==(const EncodedAmplitude&) const = default;
};
static_assert(sizeof(EncodedAmplitude) == 2);

struct Polar {
    double magnitude = 0.0;
    double phase = 0.0;  // [0, 2*pi)
};

/// Polar normal form; a zero magnitude forces a zero phase.
Polar canonicalize(const Amplitude& a);

/// Values proposed by one rank for one gate. Both lists are sorted and free
/// of exact duplicates. `*Saturated` records that an unrepresentable value
/// was seen while the corresponding table was already full.
struct Proposal {
    std::vector<double> magnitudes;
    std::vector<double> phases;
    bool magnitudesSaturated = false;
    bool phasesSaturated = false;

    std::vector<std::byte> serialize() const;
    static Proposal deserialize(std::span<const std::byte> bytes);
};

class Codebook {
  public:
    static constexpr std::size_t kCapacity = 256;
    /// Relative tolerance under which two magnitudes are the same entry.
    static constexpr double kMagnitudeTolerance = 1e-12;
    /// Absolute (circular) tolerance under which two phases are the same entry.
    static constexpr double kPhaseTolerance = 1e-12;
    /// Magnitudes below this are round-off and encode as exact zero.
    static constexpr double kZeroMagnitude = 1e-14;

    /// Magnitudes {0, 1}, phases {0}.
    Codebook();

    std::span<const double> magnitudes() const { return magnitudes_; }
    std::span<const double> phases() const { return phases_; }
    bool magnitudeOverflow() const { return magnitudeOverflow_; }
    bool phaseOverflow() const { return phaseOverflow_; }
    bool overflow() const { return magnitudeOverflow_ || phaseOverflow_; }

    /// Index of the entry that represents the value within tolerance.
    std::optional<std::uint8_t> findMagnitude(double magnitude) const;
    std::optional<std::uint8_t> findPhase(double phase) const;

    /// Nearest entry; ties go to the smaller index. Phases use circular
    /// distance.
    std::uint8_t nearestMagnitude(double magnitude) const;
    std::uint8_t nearestPhase(double phase) const;

    EncodedAmplitude encode(const Amplitude& a) const;
    Amplitude decode(EncodedAmplitude e) const {
        const double r = magnitudes_[e.magIndex];
        return {r * cos_[e.phaseIndex], r * sin_[e.phaseIndex]};
    }

    /// Upper bound on |decode(encode(a)) - a| for |a| <= 1, derived from the
    /// widest gaps between neighbouring table entries.
    double roundTripBound() const;

    /// Appends new entries from the proposals of every rank. Must be called
    /// with the same proposals, in any order, on every rank.
    void merge(std::span<const Proposal> proposals);

    /// `M <index> <hex-float>` / `P <index> <hex-float>`, one per line.
    std::string dump() const;

    bool operator==(const Codebook& other) const;

  private:
    void appendMagnitude(double value);
    void appendPhase(double value);

    std::vector<double> magnitudes_;
    std::vector<double> phases_;
    // (value, index) sorted by value, for lookups.
    std::vector<std::pair<double, std::uint8_t>> sortedMagnitudes_;
    std::vector<std::pair<double, std::uint8_t>> sortedPhases_;
    std::array<double, kCapacity> cos_{};
    std::array<double, kCapacity> sin_{};
    bool magnitudeOverflow_ = false;
    bool phaseOverflow_ = false;
};

/// Accumulates the values one rank produces during a gate.
class ProposalCollector {
  public:
    explicit ProposalCollector(const Codebook& codebook) : codebook_(&codebook) {}

    void add(const Amplitude& a);
    void add(const Polar& p);
    /// Sorted, de-duplicated proposal; resets the collector.
    Proposal finish();

  private:
    const Codebook* codebook_;
    Proposal pending_;
    std::size_t compactAt_ = std::size_t{1} << 16;
};

/// Values of `values` not representable by `codebook`.
Proposal proposeEntries(std::span<const Polar> values, const Codebook& codebook);

/// Merges all ranks' proposals into `codebook`.
void synchronizeCodebooks(Codebook& codebook, std::span<const Proposal> proposals);

}  // namespace qtier

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

#include "qtier/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

namespace qtier {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double circularDistance(double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, kTwoPi - d);
}

bool sameMagnitude(double a, double b) {
    return std::abs(a - b) <= Codebook::kMagnitudeTolerance * std::max(a, b);
}

// Snaps round-off so that quarter turns decode exactly.
double snapTrig(double v) {
    if (std::abs(v) < 1e-15) return 0.0;
    if (std::abs(v - 1.0) < 1e-15) return 1.0;
    if (std::abs(v + 1.0) < 1e-15) return -1.0;
    return v;
}

using SortedTable = std::vector<std::pair<double, std::uint8_t>>;

void insertSorted(SortedTable& table, double value, std::uint8_t index) {
    auto it = std::lower_bound(table.begin(), table.end(), std::make_pair(value, index));
    table.insert(it, {value, index});
}

// Nearest entry by linear distance, ties to the smaller index.
std::uint8_t nearestLinear(const SortedTable& table, double value) {
    auto it = std::lower_bound(table.begin(), table.end(), value,
                               [](const auto& entry, double v) { return entry.first < v; });
    std::uint8_t best = 0;
    double bestDistance = INFINITY;
    auto consider = [&](SortedTable::const_iterator c) {
        const double d = std::abs(c->first - value);
        if (d < bestDistance || (d == bestDistance && c->second < best)) {
            bestDistance = d;
            best = c->second;
        }
    };
    if (it != table.end()) consider(it);
    if (it != table.begin()) consider(std::prev(it));
    return best;
}

std::uint8_t nearestCircular(const SortedTable& table, double value) {
    auto it = std::lower_bound(table.begin(), table.end(), value,
                               [](const auto& entry, double v) { return entry.first < v; });
    std::uint8_t best = 0;
    double bestDistance = INFINITY;
    auto consider = [&](SortedTable::const_iterator c) {
        const double d = circularDistance(c->first, value);
        if (d < bestDistance || (d == bestDistance && c->second < best)) {
            bestDistance = d;
            best = c->second;
        }
    };
    if (it != table.end()) consider(it);
    if (it != table.begin()) consider(std::prev(it));
    consider(table.begin());
    consider(std::prev(table.end()));
    return best;
}

template <class T>
void put(std::vector<std::byte>& out, const T& value) {
    const auto* p = reinterpret_cast<const std::byte*>(&value);
    out.insert(out.end(), p, p + sizeof(T));
}

template <class T>
T take(std::span<const std::byte>& in) {
    if (in.size() < sizeof(T)) throw std::runtime_error("truncated proposal message");
    T value;
    std::memcpy(&value, in.data(), sizeof(T));
    in = in.subspan(sizeof(T));
    return value;
}

void sortUnique(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
}

}  // namespace

Polar canonicalize(const Amplitude& a) {
    const double r = std::hypot(a.real(), a.imag());
    if (r == 0.0) return {0.0, 0.0};
    double theta = std::atan2(a.imag(), a.real());
    if (theta < 0.0) theta += kTwoPi;
    if (theta >= kTwoPi) theta = 0.0;
    return {r, theta};
}

std::vector<std::byte> Proposal::serialize() const {
    std::vector<std::byte> out;
    out.reserve(2 + 16 + 8 * (magnitudes.size() + phases.size()));
    put(out, static_cast<std::uint8_t>(magnitudesSaturated));
    put(out, static_cast<std::uint8_t>(phasesSaturated));
    put(out, static_cast<std::uint64_t>(magnitudes.size()));
    for (double v : magnitudes) put(out, v);
    put(out, static_cast<std::uint64_t>(phases.size()));
    for (double v : phases) put(out, v);
    return out;
}

Proposal Proposal::deserialize(std::span<const std::byte> bytes) {
    Proposal p;
    p.magnitudesSaturated = take<std::uint8_t>(bytes) != 0;
    p.phasesSaturated = take<std::uint8_t>(bytes) != 0;
    p.magnitudes.resize(take<std::uint64_t>(bytes));
    for (double& v : p.magnitudes) v = take<double>(bytes);
    p.phases.resize(take<std::uint64_t>(bytes));
    for (double& v : p.phases) v = take<double>(bytes);
    return p;
}

Codebook::Codebook() {
    appendMagnitude(0.0);
    appendMagnitude(1.0);
    appendPhase(0.0);
}

void Codebook::appendMagnitude(double value) {
    const auto index = static_cast<std::uint8_t>(magnitudes_.size());
    magnitudes_.push_back(value);
    insertSorted(sortedMagnitudes_, value, index);
}

void Codebook::appendPhase(double value) {
    const auto index = static_cast<std::uint8_t>(phases_.size());
    phases_.push_back(value);
    insertSorted(sortedPhases_, value, index);
    cos_[index] = snapTrig(std::cos(value));
    sin_[index] = snapTrig(std::sin(value));
}

std::optional<std::uint8_t> Codebook::findMagnitude(double magnitude) const {
    if (magnitude < kZeroMagnitude) return std::uint8_t{0};
    const std::uint8_t i = nearestMagnitude(magnitude);
    if (sameMagnitude(magnitudes_[i], magnitude)) return i;
    return std::nullopt;
}

std::optional<std::uint8_t> Codebook::findPhase(double phase) const {
    const std::uint8_t i = nearestPhase(phase);
    if (circularDistance(phases_[i], phase) <= kPhaseTolerance) return i;
    return std::nullopt;
}

std::uint8_t Codebook::nearestMagnitude(double magnitude) const {
    return nearestLinear(sortedMagnitudes_, magnitude);
}

std::uint8_t Codebook::nearestPhase(double phase) const { return nearestCircular(sortedPhases_, phase); }

EncodedAmplitude Codebook::encode(const Amplitude& a) const {
    const Polar p = canonicalize(a);
    if (p.magnitude < kZeroMagnitude) return {0, 0};
    const std::uint8_t m = nearestMagnitude(p.magnitude);
    if (m == 0) return {0, 0};
    return {m, nearestPhase(p.phase)};
}

double Codebook::roundTripBound() const {
    // Magnitudes of a normalized state lie in [0, 1].
    double magGap = 0.0;
    double previous = 0.0;
    for (const auto& [value, index] : sortedMagnitudes_) {
        magGap = std::max(magGap, value - previous);
        previous = value;
    }
    magGap = std::max(magGap, 1.0 - previous);
    double phaseGap = 0.0;
    for (std::size_t i = 0; i + 1 < sortedPhases_.size(); ++i)
        phaseGap = std::max(phaseGap, sortedPhases_[i + 1].first - sortedPhases_[i].first);
    phaseGap = std::max(phaseGap, kTwoPi - sortedPhases_.back().first + sortedPhases_.front().first);
    // |r e^{ia} - s e^{ib}| <= |r - s| + s |a - b| with s <= 1.
    return magGap / 2 + phaseGap / 2;
}

void Codebook::merge(std::span<const Proposal> proposals) {
    std::vector<double> mags;
    std::vector<double> phases;
    bool magSaturated = false;
    bool phaseSaturated = false;
    for (const Proposal& p : proposals) {
        mags.insert(mags.end(), p.magnitudes.begin(), p.magnitudes.end());
        phases.insert(phases.end(), p.phases.begin(), p.phases.end());
        magSaturated = magSaturated || p.magnitudesSaturated;
        phaseSaturated = phaseSaturated || p.phasesSaturated;
    }
    sortUnique(mags);
    sortUnique(phases);

    std::optional<double> lastKept;
    for (double v : mags) {
        if (findMagnitude(v)) continue;
        if (lastKept && sameMagnitude(*lastKept, v)) continue;
        if (magnitudes_.size() == kCapacity) {
            magSaturated = true;
            break;
        }
        appendMagnitude(v);
        lastKept = v;
    }
    lastKept.reset();
    for (double v : phases) {
        if (findPhase(v)) continue;
        if (lastKept && circularDistance(*lastKept, v) <= kPhaseTolerance) continue;
        if (phases_.size() == kCapacity) {
            phaseSaturated = true;
            break;
        }
        appendPhase(v);
        lastKept = v;
    }
    magnitudeOverflow_ = magnitudeOverflow_ || magSaturated;
    phaseOverflow_ = phaseOverflow_ || phaseSaturated;
}

std::string Codebook::dump() const {
    std::string out;
    char line[64];
    for (std::size_t i = 0; i < magnitudes_.size(); ++i) {
        std::snprintf(line, sizeof line, "M %zu %a\n", i, magnitudes_[i]);
        out += line;
    }
    for (std::size_t i = 0; i < phases_.size(); ++i) {
        std::snprintf(line, sizeof line, "P %zu %a\n", i, phases_[i]);
        out += line;
    }
    return out;
}

bool Codebook::operator==(const Codebook& other) const {
    return magnitudes_ == other.magnitudes_ && phases_ == other.phases_ &&
           magnitudeOverflow_ == other.magnitudeOverflow_ && phaseOverflow_ == other.phaseOverflow_;
}

void ProposalCollector::add(const Amplitude& a) { add(canonicalize(a)); }

void ProposalCollector::add(const Polar& p) {
    if (p.magnitude < Codebook::kZeroMagnitude) return;
    if (!codebook_->findMagnitude(p.magnitude)) {
        if (codebook_->magnitudes().size() == Codebook::kCapacity)
            pending_.magnitudesSaturated = true;
        else
            pending_.magnitudes.push_back(p.magnitude);
    }
    if (!codebook_->findPhase(p.phase)) {
        if (codebook_->phases().size() == Codebook::kCapacity)
            pending_.phasesSaturated = true;
        else
            pending_.phases.push_back(p.phase);
    }
    // Bound memory on gates producing many duplicates.
    if (pending_.magnitudes.size() + pending_.phases.size() > compactAt_) {
        sortUnique(pending_.magnitudes);
        sortUnique(pending_.phases);
        compactAt_ = std::max<std::size_t>(compactAt_, 2 * (pending_.magnitudes.size() + pending_.phases.size()));
    }
}

Proposal ProposalCollector::finish() {
    sortUnique(pending_.magnitudes);
    sortUnique(pending_.phases);
    Proposal out = std::move(pending_);
    pending_ = Proposal{};
    return out;
}

Proposal proposeEntries(std::span<const Polar> values, const Codebook& codebook) {
    ProposalCollector collector(codebook);
    for (const Polar& p : values) collector.add(p);
    return collector.finish();
}

void synchronizeCodebooks(Codebook& codebook, std::span<const Proposal> proposals) {
    codebook.merge(proposals);
}

}  // namespace qtier

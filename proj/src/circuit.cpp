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

#include "qtier/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qtier {

std::size_t Circuit::unitaryCount() const {
    return static_cast<std::size_t>(
        std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return g.kind != GateKind::MeasureAll; }));
}

void Circuit::validate() const {
    if (qubitCount == 0) throw ValidationError("circuit has no qubits");
    if (!labelPermutation.empty() && !isPermutation(labelPermutation, qubitCount))
        throw ValidationError("label permutation is not a bijection");
    for (const Gate& g : gates) validateGate(g, qubitCount);
}

ParseError::ParseError(const std::string& reason, std::size_t line)
    : ValidationError(reason + ", line " + std::to_string(line)), reason_(reason), line_(line) {}

bool isPermutation(std::span<const Qubit> permutation, Qubit size) {
    if (permutation.size() != size) return false;
    std::vector<bool> seen(size, false);
    for (Qubit p : permutation) {
        if (p >= size || seen[p]) return false;
        seen[p] = true;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

constexpr Qubit kMaxQubits = 60;

std::vector<std::string_view> splitWords(std::string_view line) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) words.push_back(line.substr(start, i - start));
    }
    return words;
}

class LineParser {
  public:
    LineParser(std::vector<std::string_view> words, std::size_t line) : words_(std::move(words)), line_(line) {}

    [[noreturn]] void fail(const std::string& reason) const { throw ParseError(reason, line_); }

    void expectCount(std::size_t operands) const {
        if (words_.size() != operands + 1)
            fail(std::string(words_[0]) + " expects " + std::to_string(operands) + " operands, got " +
                 std::to_string(words_.size() - 1));
    }

    long long integer(std::size_t i) const {
        const std::string_view w = words_[i];
        long long value = 0;
        const auto [end, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
        if (ec != std::errc() || end != w.data() + w.size()) fail("malformed integer '" + std::string(w) + "'");
        return value;
    }

    Qubit qubit(std::size_t i, Qubit count) const {
        const long long value = integer(i);
        if (value < 0 || value >= static_cast<long long>(count)) fail("qubit index out of range");
        return static_cast<Qubit>(value);
    }

    double real(std::size_t i) const {
        const std::string text(words_[i]);
        char* end = nullptr;
        errno = 0;
        const double value = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(value))
            fail("malformed number '" + text + "'");
        return value;
    }

    Amplitude complex(std::size_t i) const { return {real(i), real(i + 1)}; }

  private:
    std::vector<std::string_view> words_;
    std::size_t line_;
};

void appendHex(std::string& out, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, " %a", value);
    out += buffer;
}

}  // namespace

Circuit parseCircuit(std::string_view text) {
    Circuit circuit;
    bool haveQubits = false;
    std::size_t lineNumber = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++lineNumber;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto words = splitWords(line);
        if (words.empty()) continue;
        const std::string op(words[0]);
        LineParser p(std::move(words), lineNumber);

        if (!haveQubits) {
            if (op != "qubits") p.fail("expected 'qubits N' as the first instruction");
            p.expectCount(1);
            const long long n = p.integer(1);
            if (n < 1 || n > kMaxQubits) p.fail("qubit count must be between 1 and " + std::to_string(kMaxQubits));
            circuit.qubitCount = static_cast<Qubit>(n);
            haveQubits = true;
            continue;
        }

        const Qubit n = circuit.qubitCount;
        Gate gate;
        if (op == "qubits") {
            p.fail("duplicate qubit count");
        } else if (op == "RELABEL") {
            if (!circuit.gates.empty()) p.fail("RELABEL must precede all gates");
            if (!circuit.labelPermutation.empty()) p.fail("duplicate RELABEL");
            p.expectCount(n);
            std::vector<Qubit> perm(n);
            for (Qubit i = 0; i < n; ++i) perm[i] = p.qubit(i + 1, n);
            if (!isPermutation(perm, n)) p.fail("RELABEL is not a permutation");
            circuit.labelPermutation = std::move(perm);
            continue;
        } else if (op == "H" || op == "X" || op == "Y" || op == "Z") {
            p.expectCount(1);
            const Qubit q = p.qubit(1, n);
            gate = op == "H" ? Gate::h(q) : op == "X" ? Gate::x(q) : op == "Y" ? Gate::y(q) : Gate::z(q);
        } else if (op == "PHASE") {
            p.expectCount(2);
            const long long k = p.integer(2);
            if (std::llabs(k) > 1000) p.fail("phase exponent out of range");
            gate = Gate::phase(p.qubit(1, n), static_cast<int>(k));
        } else if (op == "CPHASE") {
            p.expectCount(3);
            const long long k = p.integer(3);
            if (std::llabs(k) > 1000) p.fail("phase exponent out of range");
            gate = Gate::cphase(p.qubit(1, n), p.qubit(2, n), static_cast<int>(k));
        } else if (op == "CNOT") {
            p.expectCount(2);
            gate = Gate::cnot(p.qubit(1, n), p.qubit(2, n));
        } else if (op == "U2") {
            p.expectCount(1 + 8);
            Mat2 m;
            for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = p.complex(2 + 2 * i);
            gate = Gate::u2(p.qubit(1, n), m);
        } else if (op == "U4") {
            p.expectCount(2 + 32);
            Mat4 m;
            for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = p.complex(3 + 2 * i);
            gate = Gate::u4(p.qubit(1, n), p.qubit(2, n), m);
        } else if (op == "M") {
            p.expectCount(0);
            gate = Gate::measureAll();
        } else {
            p.fail("unknown mnemonic '" + op + "'");
        }
        try {
            validateGate(gate, n);
        } catch (const ValidationError& e) {
            p.fail(e.what());
        }
        circuit.gates.push_back(std::move(gate));
    }
    if (!haveQubits) throw ParseError("missing 'qubits N'", lineNumber);
    return circuit;
}

std::string serializeCircuit(const Circuit& circuit) {
    std::string out = "qubits " + std::to_string(circuit.qubitCount) + "\n";
    if (!circuit.labelPermutation.empty()) {
        out += "RELABEL";
        for (Qubit p : circuit.labelPermutation) out += " " + std::to_string(p);
        out += "\n";
    }
    for (const Gate& g : circuit.gates) {
        out += mnemonic(g.kind);
        for (Qubit q : g.operands()) out += " " + std::to_string(q);
        if (g.kind == GateKind::Phase || g.kind == GateKind::CPhase) out += " " + std::to_string(g.exponent);
        const int dim = g.kind == GateKind::U2 ? 2 : g.kind == GateKind::U4 ? 4 : 0;
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                appendHex(out, g.matrix(r, c).real());
                appendHex(out, g.matrix(r, c).imag());
            }
        }
        out += "\n";
    }
    return out;
}

Circuit loadCircuit(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parseCircuit(buffer.str());
}

// ---------------------------------------------------------------------------
// Builders

void RegisterMap::add(std::string name, Qubit first, Qubit size) {
    for (const Register& r : registers_) {
        if (r.name == name) throw ValidationError("duplicate register " + name);
        if (first < r.first + r.size && r.first < first + size)
            throw ValidationError("register " + name + " overlaps " + r.name);
    }
    registers_.push_back({std::move(name), first, size});
}

const Register& RegisterMap::at(std::string_view name) const {
    for (const Register& r : registers_)
        if (r.name == name) return r;
    throw std::out_of_range("no register named " + std::string(name));
}

Circuit buildBenchmark(Qubit qubits) {
    if (qubits < 8) throw ValidationError("the benchmark circuit needs at least 8 qubits");
    Circuit c;
    c.qubitCount = qubits;
    for (Qubit q = qubits; q-- > 0;) c.gates.push_back(Gate::h(q));
    for (Qubit q : {qubits - 5, qubits - 6, qubits - 1, Qubit{0}, qubits - 2, Qubit{1}}) c.gates.push_back(Gate::h(q));
    c.gates.push_back(Gate::measureAll());
    return c;
}

AdderCircuit buildAdder(Qubit bits, std::span<const std::uint64_t> addends) {
    if (bits < 1) throw ValidationError("adder registers need at least one qubit");
    if (addends.size() != 2 && addends.size() != 3) throw ValidationError("the adder takes 2 or 3 integers");
    const Qubit registers = static_cast<Qubit>(addends.size());
    if (bits * registers > kMaxQubits) throw ValidationError("adder too large");
    for (std::uint64_t a : addends)
        if (bits < 64 && a >> bits) throw ValidationError("addend " + std::to_string(a) + " does not fit into " +
                                                          std::to_string(bits) + " bits");

    AdderCircuit adder;
    adder.bits = bits;
    Circuit& c = adder.circuit;
    c.qubitCount = bits * registers;
    for (Qubit r = 0; r < registers; ++r) adder.registers.add("R" + std::to_string(r + 1), r * bits, bits);

    for (Qubit r = 0; r < registers; ++r)
        for (Qubit i = 0; i < bits; ++i)
            if ((addends[r] >> i) & 1U) c.gates.push_back(Gate::x(r * bits + (bits - 1 - i)));

    const Qubit sum = (registers - 1) * bits;
    std::vector<Gate> qft;
    for (Qubit k = 0; k < bits; ++k) {
        qft.push_back(Gate::h(sum + k));
        for (Qubit m = k + 1; m < bits; ++m)
            qft.push_back(Gate::cphase(sum + m, sum + k, static_cast<int>(m - k + 1)));
    }
    c.gates.insert(c.gates.end(), qft.begin(), qft.end());

    for (Qubit r = 0; r + 1 < registers; ++r)
        for (Qubit k = 0; k < bits; ++k)
            for (Qubit m = k; m < bits; ++m)
                c.gates.push_back(Gate::cphase(r * bits + m, sum + k, static_cast<int>(m - k + 1)));

    for (auto it = qft.rbegin(); it != qft.rend(); ++it) {
        Gate g = *it;
        g.exponent = -g.exponent;
        c.gates.push_back(g);
    }
    c.gates.push_back(Gate::measureAll());
    return adder;
}

std::uint64_t decodeRegister(const Register& reg, std::span<const int> qubitBits) {
    std::uint64_t value = 0;
    for (Qubit k = 0; k < reg.size; ++k)
        if (qubitBits[reg.first + k]) value |= std::uint64_t{1} << (reg.size - 1 - k);
    return value;
}

// ---------------------------------------------------------------------------
// Relabeling

Circuit relabel(const Circuit& circuit, std::span<const Qubit> permutation) {
    if (!isPermutation(permutation, circuit.qubitCount)) throw ValidationError("relabeling is not a bijection");
    Circuit out = circuit;
    for (Gate& g : out.gates)
        for (unsigned i = 0; i < g.arity(); ++i) g.qubits[i] = permutation[g.qubits[i]];
    out.labelPermutation.assign(circuit.qubitCount, 0);
    for (Qubit l = 0; l < circuit.qubitCount; ++l) out.labelPermutation[l] = permutation[circuit.physical(l)];
    bool identity = true;
    for (Qubit l = 0; l < circuit.qubitCount; ++l) identity = identity && out.labelPermutation[l] == l;
    if (identity) out.labelPermutation.clear();
    return out;
}

std::uint64_t predictedInterRankBytes(const Circuit& circuit, const PartitionLayout& layout, PrecisionMode mode) {
    std::uint64_t total = 0;
    for (Rank r = 0; r < layout.rankCount(); ++r) {
        for (const Gate& g : circuit.gates) {
            if (g.kind == GateKind::MeasureAll)
                total += measurementBytesPerRank(layout, mode);
            else
                total += planExchange(layout, g, r, mode).bytes();
        }
    }
    return total;
}

std::vector<Qubit> optimizeLabels(const Circuit& circuit, const PartitionLayout& layout) {
    const Qubit n = circuit.qubitCount;
    if (layout.totalQubits() != n) throw ValidationError("layout and circuit disagree on the qubit count");
    std::vector<Qubit> identity(n);
    std::iota(identity.begin(), identity.end(), Qubit{0});

    // Operands that would pair amplitudes across ranks if placed high.
    std::vector<std::uint64_t> weight(n, 0);
    for (const Gate& g : circuit.gates) {
        if (g.kind == GateKind::MeasureAll || g.isDiagonal()) continue;
        if (g.kind == GateKind::CNot) {
            ++weight[g.qubits[1]];
        } else {
            for (Qubit q : g.operands()) ++weight[q];
        }
    }
    std::vector<Qubit> order = identity;
    std::stable_sort(order.begin(), order.end(), [&](Qubit a, Qubit b) { return weight[a] > weight[b]; });
    std::vector<Qubit> candidate(n);
    for (Qubit position = 0; position < n; ++position) candidate[order[position]] = position;

    const PrecisionMode mode = PrecisionMode::FP64;
    const std::uint64_t before = predictedInterRankBytes(circuit, layout, mode);
    const std::uint64_t after = predictedInterRankBytes(relabel(circuit, candidate), layout, mode);
    return after < before ? candidate : identity;
}

}  // namespace qtier

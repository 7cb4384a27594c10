#include "ppadkit/boolcircuit.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ppadkit {

void BoolCircuit::validate() const {
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const auto& g = gates[i];
        auto check_ref = [&](int r) {
            if (r < 0 || r >= static_cast<int>(i))
                throw std::invalid_argument("gate " + std::to_string(i) +
                                            " references non-earlier gate " + std::to_string(r));
        };
        switch (g.op) {
            case BoolOp::And:
            case BoolOp::Or:
                check_ref(g.a);
                check_ref(g.b);
                break;
            case BoolOp::Not:
                check_ref(g.a);
                break;
            case BoolOp::Input:
                if (g.a < 0 || g.a >= n_inputs)
                    throw std::invalid_argument("input index out of range");
                break;
            case BoolOp::Const0:
            case BoolOp::Const1:
                break;
        }
    }
    for (int o : outputs)
        if (o < 0 || o >= static_cast<int>(gates.size()))
            throw std::invalid_argument("output references missing gate");
}

BitVec eval_circuit(const BoolCircuit& c, const BitVec& x) {
    if (static_cast<int>(x.size()) != c.n_inputs)
        throw std::invalid_argument("input width mismatch: got " + std::to_string(x.size()) +
                                    ", circuit expects " + std::to_string(c.n_inputs));
    std::vector<std::uint8_t> val(c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto& g = c.gates[i];
        switch (g.op) {
            case BoolOp::And: val[i] = val[g.a] & val[g.b]; break;
            case BoolOp::Or: val[i] = val[g.a] | val[g.b]; break;
            case BoolOp::Not: val[i] = val[g.a] ^ 1u; break;
            case BoolOp::Const0: val[i] = 0; break;
            case BoolOp::Const1: val[i] = 1; break;
            case BoolOp::Input: val[i] = x[g.a]; break;
        }
    }
    BitVec out(c.outputs.size());
    for (std::size_t i = 0; i < c.outputs.size(); ++i) out[i] = val[c.outputs[i]];
    return out;
}

BoolBuilder::BoolBuilder(int n_inputs) {
    c_.n_inputs = n_inputs;
    input_wire_.assign(n_inputs, -1);
}

int BoolBuilder::push(BoolOp op, int a, int b) {
    c_.gates.push_back({op, a, b});
    return static_cast<int>(c_.gates.size()) - 1;
}

int BoolBuilder::input(int idx) {
    if (idx < 0 || idx >= c_.n_inputs) throw std::invalid_argument("input index out of range");
    if (input_wire_[idx] < 0) input_wire_[idx] = push(BoolOp::Input, idx);
    return input_wire_[idx];
}

int BoolBuilder::constant(bool v) {
    int& cache = v ? const1_ : const0_;
    if (cache < 0) cache = push(v ? BoolOp::Const1 : BoolOp::Const0);
    return cache;
}

// is_const returns 0/1 for constant wires, -1 otherwise.
int BoolBuilder::is_const(int w) const {
    switch (c_.gates[w].op) {
        case BoolOp::Const0: return 0;
        case BoolOp::Const1: return 1;
        default: return -1;
    }
}

int BoolBuilder::and2(int a, int b) {
    int ca = is_const(a), cb = is_const(b);
    if (ca == 0 || cb == 0) return constant(false);
    if (ca == 1) return b;
    if (cb == 1) return a;
    return push(BoolOp::And, a, b);
}

int BoolBuilder::or2(int a, int b) {
    int ca = is_const(a), cb = is_const(b);
    if (ca == 1 || cb == 1) return constant(true);
    if (ca == 0) return b;
    if (cb == 0) return a;
    return push(BoolOp::Or, a, b);
}

int BoolBuilder::not1(int a) {
    int ca = is_const(a);
    if (ca >= 0) return constant(ca == 0);
    return push(BoolOp::Not, a);
}

int BoolBuilder::xor2(int a, int b) {
    return or2(and2(a, not1(b)), and2(not1(a), b));
}

int BoolBuilder::mux(int sel, int when1, int when0) {
    if (when1 == when0) return when1;
    int c1 = is_const(when1), c0 = is_const(when0);
    if (c1 == 1 && c0 == 0) return sel;
    if (c1 == 0 && c0 == 1) return not1(sel);
    return or2(and2(sel, when1), and2(not1(sel), when0));
}

int BoolBuilder::and_all(const std::vector<int>& ws) {
    if (ws.empty()) return constant(true);
    int acc = ws[0];
    for (std::size_t i = 1; i < ws.size(); ++i) acc = and2(acc, ws[i]);
    return acc;
}

int BoolBuilder::or_all(const std::vector<int>& ws) {
    if (ws.empty()) return constant(false);
    int acc = ws[0];
    for (std::size_t i = 1; i < ws.size(); ++i) acc = or2(acc, ws[i]);
    return acc;
}

std::vector<int> BoolBuilder::embed(const BoolCircuit& sub, const std::vector<int>& wires) {
    if (static_cast<int>(wires.size()) != sub.n_inputs)
        throw std::invalid_argument("embed: wire count mismatch");
    std::vector<int> map(sub.gates.size());
    for (std::size_t i = 0; i < sub.gates.size(); ++i) {
        const auto& g = sub.gates[i];
        switch (g.op) {
            case BoolOp::And: map[i] = and2(map[g.a], map[g.b]); break;
            case BoolOp::Or: map[i] = or2(map[g.a], map[g.b]); break;
            case BoolOp::Not: map[i] = not1(map[g.a]); break;
            case BoolOp::Const0: map[i] = constant(false); break;
            case BoolOp::Const1: map[i] = constant(true); break;
            case BoolOp::Input: map[i] = wires[g.a]; break;
        }
    }
    std::vector<int> outs(sub.outputs.size());
    for (std::size_t i = 0; i < sub.outputs.size(); ++i) outs[i] = map[sub.outputs[i]];
    return outs;
}

BoolCircuit BoolBuilder::finish(std::vector<int> output_wires) {
    c_.outputs = std::move(output_wires);
    c_.validate();
    return std::move(c_);
}

BoolCircuit circuit_from_truth_table(int n_in, int n_out,
                                     const std::vector<std::uint64_t>& table) {
    if (table.size() != (std::size_t{1} << n_in))
        throw std::invalid_argument("truth table has wrong size");
    BoolBuilder b(n_in);
    std::vector<int> outs;
    for (int bit = 0; bit < n_out; ++bit) {
        // Shannon expansion over the inputs, highest bit first.
        // rec(prefix) returns the wire for rows whose high bits equal prefix.
        std::vector<int> layer(table.size());
        for (std::size_t row = 0; row < table.size(); ++row)
            layer[row] = b.constant((table[row] >> bit) & 1u);
        for (int var = n_in - 1; var >= 0; --var) {
            std::vector<int> next(layer.size() / 2);
            for (std::size_t k = 0; k < next.size(); ++k) {
                // rows with input bit `var` clear come first in LSB-first indexing
                // when we halve from the top bit down.
                int w0 = layer[k];
                int w1 = layer[k + next.size()];
                next[k] = (w0 == w1) ? w0 : b.mux(b.input(var), w1, w0);
            }
            layer.swap(next);
        }
        outs.push_back(layer[0]);
    }
    return b.finish(outs);
}

void write_circuit_section(std::ostream& os, const BoolCircuit& c) {
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto& g = c.gates[i];
        os << "g" << i << " = ";
        switch (g.op) {
            case BoolOp::And: os << "AND g" << g.a << " g" << g.b; break;
            case BoolOp::Or: os << "OR g" << g.a << " g" << g.b; break;
            case BoolOp::Not: os << "NOT g" << g.a; break;
            case BoolOp::Const0: os << "C0"; break;
            case BoolOp::Const1: os << "C1"; break;
            case BoolOp::Input: os << "IN " << g.a; break;
        }
        os << "\n";
    }
    os << "OUT";
    for (int o : c.outputs) os << " g" << o;
    os << "\n";
}

namespace {

int parse_gate_ref(const std::string& tok, int lineno) {
    if (tok.size() < 2 || tok[0] != 'g')
        throw std::invalid_argument("line " + std::to_string(lineno) +
                                    ": expected gate reference, got '" + tok + "'");
    return std::stoi(tok.substr(1));
}

} // namespace

BoolCircuit parse_circuit_section(std::istream& is, int n_inputs, int& lineno) {
    BoolCircuit c;
    c.n_inputs = n_inputs;
    std::string line;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string first;
        ls >> first;
        if (first == "OUT") {
            std::string tok;
            while (ls >> tok) c.outputs.push_back(parse_gate_ref(tok, lineno));
            c.validate();
            return c;
        }
        int idx = parse_gate_ref(first, lineno);
        if (idx != static_cast<int>(c.gates.size()))
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": gates must be numbered consecutively");
        std::string eq, op;
        ls >> eq >> op;
        if (eq != "=")
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected '='");
        BoolGate g;
        std::string ta, tb;
        if (op == "AND") {
            g.op = BoolOp::And;
            ls >> ta >> tb;
            g.a = parse_gate_ref(ta, lineno);
            g.b = parse_gate_ref(tb, lineno);
        } else if (op == "OR") {
            g.op = BoolOp::Or;
            ls >> ta >> tb;
            g.a = parse_gate_ref(ta, lineno);
            g.b = parse_gate_ref(tb, lineno);
        } else if (op == "NOT") {
            g.op = BoolOp::Not;
            ls >> ta;
            g.a = parse_gate_ref(ta, lineno);
        } else if (op == "IN") {
            g.op = BoolOp::Input;
            ls >> g.a;
        } else if (op == "C0") {
            g.op = BoolOp::Const0;
        } else if (op == "C1") {
            g.op = BoolOp::Const1;
        } else {
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": unknown gate op '" + op + "'");
        }
        c.gates.push_back(g);
    }
    throw std::invalid_argument("circuit section ended without OUT line");
}

} // namespace ppadkit

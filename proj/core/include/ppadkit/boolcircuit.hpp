#pragma once

#include <iosfwd>
#include <vector>

#include "ppadkit/bits.hpp"

namespace ppadkit {

enum class BoolOp : std::uint8_t { And, Or, Not, Const0, Const1, Input };

struct BoolGate {
    BoolOp op;
    int a = -1; // first operand gate index, or input index for Input
    int b = -1; // second operand gate index (And/Or only)
};

// Combinational circuit over {AND, OR, NOT, constants}. Gates may reference
// only earlier gates; outputs name one gate per output bit.
struct BoolCircuit {
    int n_inputs = 0;
    std::vector<BoolGate> gates;
    std::vector<int> outputs;

    int n_outputs() const { return static_cast<int>(outputs.size()); }
    void validate() const; // throws std::invalid_argument on structural errors
};

BitVec eval_circuit(const BoolCircuit& c, const BitVec& x);

// Incremental builder used to assemble step circuits. Wires are gate indices.
class BoolBuilder {
  public:
    explicit BoolBuilder(int n_inputs);

    int input(int idx);
    int constant(bool v);
    int and2(int a, int b);
    int or2(int a, int b);
    int not1(int a);
    int xor2(int a, int b);
    int eq2(int a, int b) { return not1(xor2(a, b)); }
    int mux(int sel, int when1, int when0);
    int and_all(const std::vector<int>& ws);
    int or_all(const std::vector<int>& ws);

    // Appends every gate of `sub`, rewiring its inputs to `wires`.
    // Returns the wires carrying sub's outputs.
    std::vector<int> embed(const BoolCircuit& sub, const std::vector<int>& wires);

    BoolCircuit finish(std::vector<int> output_wires);
    const BoolCircuit& circuit() const { return c_; }

  private:
    BoolCircuit c_;
    std::vector<int> input_wire_;
    int const0_ = -1;
    int const1_ = -1;
    int push(BoolOp op, int a = -1, int b = -1);
    int is_const(int w) const;
};

// Builds a circuit computing the given truth table (one entry per input
// pattern, LSB-first indexing) with `n_out` output bits.
BoolCircuit circuit_from_truth_table(int n_in, int n_out,
                                     const std::vector<std::uint64_t>& table);

void write_circuit_section(std::ostream& os, const BoolCircuit& c);
BoolCircuit parse_circuit_section(std::istream& is, int n_inputs, int& lineno);

} // namespace ppadkit

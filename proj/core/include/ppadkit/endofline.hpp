#pragma once

#include <iosfwd>
#include <vector>

#include "ppadkit/bits.hpp"
#include "ppadkit/boolcircuit.hpp"

namespace ppadkit::eol {

// Successor/predecessor circuit pair over n-bit vertices, with the root
// anchored at 0^n: pred(0) = 0 and succ(0) != 0 (checked at construction).
struct EndOfLineInstance {
    int n = 0;
    BoolCircuit succ;
    BoolCircuit pred;

    EndOfLineInstance() = default;
    EndOfLineInstance(int n_bits, BoolCircuit s, BoolCircuit p);

    BitVec s_of(const BitVec& x) const { return eval_circuit(succ, x); }
    BitVec p_of(const BitVec& x) const { return eval_circuit(pred, x); }
};

// A solution is x with P(S(x)) != x, or S(P(x)) != x != 0^n.
bool verify_eol_solution(const EndOfLineInstance& inst, const BitVec& x);

// One vertex of the (2n+1)-dimensional hypercube walk: current vertex u,
// next-vertex scratch v, and the compute-next vs copy bit.
struct EmbeddedState {
    BitVec u;
    BitVec v;
    std::uint8_t phase = 0;

    friend bool operator==(const EmbeddedState&, const EmbeddedState&) = default;
};

EmbeddedState state_from_bits(const BitVec& vertex, int n);
BitVec state_to_bits(const EmbeddedState& s);

// Total step functions over {0,1}^{2n+1}. States not on any embedded path
// are fixed points of both.
EmbeddedState h_successor(const EndOfLineInstance& inst, const EmbeddedState& s);

// Predecessor; the all-zero home state reports from_above instead of moving,
// mirroring the construction where home continues a path from the subcube
// above it.
struct PredResult {
    EmbeddedState state;
    bool from_above = false;
};
PredResult h_predecessor(const EndOfLineInstance& inst, const EmbeddedState& s);

// Summary of how the embedded paths treat one hypercube vertex.
struct HInfo {
    enum class Status { OffPath, Home, Start, End, Mid };
    Status status = Status::OffPath;
    // 1-based signed axes over the (2n+2)-cube: +k means the path travels in
    // +xi_{k-1} through the corresponding facet. 0 = none.
    int enter = 0;
    int exit = 0;
};
HInfo h_info(const EndOfLineInstance& inst, const BitVec& vertex);

// Test-fixture generator: truth-table circuits realizing an explicit edge
// list (partial matching; must contain an edge out of 0, none into 0).
EndOfLineInstance make_line_instance(int n, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& edges);

// Boolean circuits over 2n+2 bits computing one h_successor / h_predecessor
// step; the last input bit is ignored and the last output bit flags the
// home state's predecessor-from-above.
struct HStepCircuits {
    BoolCircuit step_succ;
    BoolCircuit step_pred;
};
HStepCircuits build_h_step_circuits(const EndOfLineInstance& inst);

void write_instance(std::ostream& os, const EndOfLineInstance& inst);
EndOfLineInstance parse_instance(std::istream& is);

} // namespace ppadkit::eol

#pragma once

#include <string>
#include <vector>

#include "ppadkit/brouwer.hpp"
#include "ppadkit/endofline.hpp"
#include "ppadkit/gcircuit.hpp"

namespace ppadkit::b2c {

// Per-sample node handles produced by the cube-decoding stage.
struct CubeDecode {
    std::vector<int> b;        // upper-cell indicator bits
    std::vector<int> sh, ph;   // step-circuit outputs (next / previous vertex)
    std::vector<int> bin_pos, bin_neg, bout_pos, bout_neg;
    std::vector<int> b_in, b_out; // per-coordinate OR of the signed entry/exit bits
    std::vector<int> zin, zout;   // entrance / exit facet centers
    int t_in = -1, t_out = -1;    // type bits
};

struct PolarBlock {
    int u = -1, v = -1;   // distances from the entry / exit wall planes
    int rho = -1;         // max(u, v): edge radius
    int rin = -1, rout = -1;
    std::vector<int> pin_pos, pin_neg, pout_pos, pout_neg;
};

struct DisplacementBlock {
    std::vector<int> g_pos, g_neg; // per-sample displacement, split and delta-scaled
    int corner = -1;               // corner-detector node
};

struct CompiledBundle {
    gc::GeneralizedCircuit circuit;
    int n = 0;
    int dim = 0;
    Rational eps;
    Rational delta{1, 44};
    Rational corner_tau{1, 24};
    std::vector<int> y_nodes;        // the cyclic inputs
    std::vector<int> g_pos, g_neg;   // averaged displacement outputs
    std::vector<std::pair<std::string, int>> symbols;
    long long total_gates = 0;
};

class Compiler {
  public:
    Compiler(gc::GeneralizedCircuit& c, const Rational& eps, const Rational& delta,
             const Rational& corner_tau);

    std::vector<std::vector<int>> build_equiangle(const std::vector<int>& y_nodes);
    CubeDecode build_cube_decode(const std::vector<int>& sample, const eol::HStepCircuits& steps,
                                 const std::string& tag);
    PolarBlock build_polar_block(const std::vector<int>& sample, const CubeDecode& dec,
                                 const std::string& tag);
    DisplacementBlock build_displacement_block(const std::vector<int>& sample,
                                               const CubeDecode& dec, const PolarBlock& polar,
                                               const std::string& tag);
    std::pair<std::vector<int>, std::vector<int>> build_average(
        const std::vector<DisplacementBlock>& blocks, const std::string& tag);
    void close_loop(const std::vector<int>& y_nodes, const std::vector<int>& g_pos,
                    const std::vector<int>& g_neg);

    int granularity() const { return K_; }

  private:
    friend CompiledBundle compile(const eol::EndOfLineInstance&, const Rational&,
                                  const Rational&, const Rational&);
    gc::GeneralizedCircuit& c_;
    Rational eps_;
    Rational delta_;
    Rational tau_;
    int K_;
    int dim_ = 0;
    std::vector<int> dh_; // per-coordinate |y_i - 1/2| of the current sample
    std::vector<std::pair<std::string, int>> symbols_;

    int fresh();
    int named(const std::string& name);
    int konst(const Rational& v);
    int gate(gc::GateType t, Rational zeta, int a, int b, int out = -1);
    int absdiff(int a, int b);
    int keep_if(int x, int bit);      // x when bit = 1, else 0
    int keep_ifnot(int x, int bit);   // x when bit = 0, else 0
    int scale_up(int x, int factor);  // min(factor * x, 1), factor 2^k or 3*2^k
    struct Weights { int w0, w1, w2, w3; };
    Weights ring_weights(int r);
    // suction plus upward parts of one wall profile (travel handled at the
    // blend level)
    std::vector<int> rest_profile(const Weights& w, const std::vector<int>& p_part,
                                  bool add_up_term);
};

// The whole pipeline: equiangle translation, per-sample decode/polar/
// displacement, averaging, and the two-gate cycle through the y nodes.
CompiledBundle compile(const eol::EndOfLineInstance& inst, const Rational& eps,
                       const Rational& delta = Rational(1, 44),
                       const Rational& corner_tau = Rational(1, 24));

// Reads the y point out of an assignment (the circuit-stage decode).
std::vector<double> extract_point(const CompiledBundle& bundle, const gc::Assignment& x);

void write_symbols(std::ostream& os, const CompiledBundle& bundle);

} // namespace ppadkit::b2c

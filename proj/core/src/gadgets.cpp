#include "ppadkit/gadgets.hpp"

#include <cmath>
#include <stdexcept>

namespace ppadkit::gadgets {

using gc::Gate;
using gc::GateType;

int unary_granularity(const Rational& eps) {
    if (!(Rational(0) < eps) || !(eps < Rational(1)))
        throw std::invalid_argument("eps must lie in (0,1)");
    // K^2 = den/num must be a perfect square integer
    if (eps.den % eps.num != 0) throw std::invalid_argument("1/sqrt(eps) is not integral");
    std::int64_t k2 = eps.den / eps.num;
    auto k = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(k2))));
    if (k * k != k2) throw std::invalid_argument("1/sqrt(eps) is not integral");
    return static_cast<int>(k);
}

namespace {

struct Counter {
    gc::GeneralizedCircuit& c;
    GadgetHandle h;
    explicit Counter(gc::GeneralizedCircuit& circuit) : c(circuit) {}
    int fresh() {
        ++h.fresh_nodes;
        return c.add_node();
    }
    void gate(GateType t, Rational zeta, int in1, int in2, int out) {
        c.add_gate({t, zeta, in1, in2, out});
        ++h.gates_appended;
    }
};

} // namespace

GadgetHandle build_multiply(gc::GeneralizedCircuit& c, int a, int b, const Rational& eps) {
    const int K = unary_granularity(eps);
    Counter ct(c);
    ct.h.granularity = K;
    int h_prev = ct.fresh();
    ct.gate(GateType::Const, Rational(0), -1, -1, h_prev);
    for (int k = 1; k <= K; ++k) {
        int zeta_k = ct.fresh();
        ct.gate(GateType::Const, Rational(k, K), -1, -1, zeta_k);
        int abar_k = ct.fresh(); // 1 when a < k*sqrt(eps)
        ct.gate(GateType::Less, {}, a, zeta_k, abar_k);
        int d_k = ct.fresh(); // b * sqrt(eps)
        ct.gate(GateType::Scale, Rational(1, K), b, -1, d_k);
        int e_k = ct.fresh(); // survives only while the unary bit is low
        ct.gate(GateType::Sub, {}, d_k, abar_k, e_k);
        int h_k = ct.fresh();
        ct.gate(GateType::Add, {}, h_prev, e_k, h_k);
        h_prev = h_k;
    }
    int out = ct.fresh();
    ct.gate(GateType::Copy, {}, h_prev, -1, out);
    ct.h.out = out;
    ct.h.outs = {out};
    return ct.h;
}

GadgetHandle build_divide(gc::GeneralizedCircuit& c, int a, int b, const Rational& eps) {
    const int K = unary_granularity(eps);
    Counter ct(c);
    ct.h.granularity = K;
    int h_prev = ct.fresh();
    ct.gate(GateType::Const, Rational(0), -1, -1, h_prev);
    for (int k = 1; k <= K; ++k) {
        int b_k = ct.fresh();
        ct.gate(GateType::Scale, Rational(k, K), b, -1, b_k);
        int d_k = ct.fresh(); // 1 while k*sqrt(eps)*b < a
        ct.gate(GateType::Less, {}, b_k, a, d_k);
        int e_k = ct.fresh();
        ct.gate(GateType::Scale, Rational(1, K), d_k, -1, e_k);
        int h_k = ct.fresh();
        ct.gate(GateType::Add, {}, h_prev, e_k, h_k);
        h_prev = h_k;
    }
    int out = ct.fresh();
    ct.gate(GateType::Copy, {}, h_prev, -1, out);
    ct.h.out = out;
    ct.h.outs = {out};
    return ct.h;
}

GadgetHandle build_max(gc::GeneralizedCircuit& c, const std::vector<int>& inputs,
                       const Rational& eps) {
    if (inputs.empty()) throw std::invalid_argument("max over zero inputs");
    const int K = unary_granularity(eps);
    Counter ct(c);
    ct.h.granularity = K;
    int h_prev = ct.fresh();
    ct.gate(GateType::Const, Rational(0), -1, -1, h_prev);
    for (int k = 1; k <= K; ++k) {
        int zeta_k = ct.fresh();
        ct.gate(GateType::Const, Rational(k, K), -1, -1, zeta_k);
        int d_prev = ct.fresh();
        ct.gate(GateType::Const, Rational(0), -1, -1, d_prev);
        for (int ai : inputs) {
            int c_ki = ct.fresh(); // 1 while k*sqrt(eps) < a_i
            ct.gate(GateType::Less, {}, zeta_k, ai, c_ki);
            int d_ki = ct.fresh();
            ct.gate(GateType::Or, {}, d_prev, c_ki, d_ki);
            d_prev = d_ki;
        }
        int e_k = ct.fresh();
        ct.gate(GateType::Scale, Rational(1, K), d_prev, -1, e_k);
        int h_k = ct.fresh();
        ct.gate(GateType::Add, {}, h_prev, e_k, h_k);
        h_prev = h_k;
    }
    int out = ct.fresh();
    ct.gate(GateType::Copy, {}, h_prev, -1, out);
    ct.h.out = out;
    ct.h.outs = {out};
    return ct.h;
}

GadgetHandle build_interpolate(gc::GeneralizedCircuit& c, int a, int w_a, int b, int w_b,
                               const Rational& eps) {
    const int K = unary_granularity(eps);
    Counter ct(c);
    ct.h.granularity = K;
    int wa2 = ct.fresh();
    ct.gate(GateType::Scale, Rational(1, 2), w_a, -1, wa2);
    int wb2 = ct.fresh();
    ct.gate(GateType::Scale, Rational(1, 2), w_b, -1, wb2);
    int s = ct.fresh();
    ct.gate(GateType::Add, {}, wa2, wb2, s);
    GadgetHandle wan = build_divide(c, wa2, s, eps);
    GadgetHandle wbn = build_divide(c, wb2, s, eps);
    GadgetHandle ca = build_multiply(c, wan.out, a, eps);
    GadgetHandle cb = build_multiply(c, wbn.out, b, eps);
    ct.h.gates_appended += wan.gates_appended + wbn.gates_appended + ca.gates_appended +
                           cb.gates_appended;
    ct.h.fresh_nodes += wan.fresh_nodes + wbn.fresh_nodes + ca.fresh_nodes + cb.fresh_nodes;
    int out = ct.fresh();
    ct.gate(GateType::Add, {}, ca.out, cb.out, out);
    ct.h.out = out;
    ct.h.outs = {out};
    return ct.h;
}

} // namespace ppadkit::gadgets

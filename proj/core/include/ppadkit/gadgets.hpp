#pragma once

#include <vector>

#include "ppadkit/gcircuit.hpp"

namespace ppadkit::gadgets {

struct GadgetHandle {
    int out = -1;
    std::vector<int> outs;
    int gates_appended = 0;
    int fresh_nodes = 0;
    int granularity = 0; // K = 1/sqrt(eps)
};

// eps must be 1/K^2 for integer K; throws otherwise.
int unary_granularity(const Rational& eps);

// x[c] = x[a] * x[b] +- 4*sqrt(eps) in any eps-satisfying assignment.
// Appends 5K+2 gates.
GadgetHandle build_multiply(gc::GeneralizedCircuit& c, int a, int b, const Rational& eps);

// x[c] = x[a] / x[b] +- 3*sqrt(eps)/x[b]. Appends 4K+2 gates.
GadgetHandle build_divide(gc::GeneralizedCircuit& c, int a, int b, const Rational& eps);

// x[b] = max_i x[a_i] +- 4*sqrt(eps). Appends (2m+4)K+2 gates.
GadgetHandle build_max(gc::GeneralizedCircuit& c, const std::vector<int>& inputs,
                       const Rational& eps);

// x[c] = (w_a*a + w_b*b)/(w_a+w_b) +- 30*sqrt(eps)/(x[w_a]+x[w_b]).
// Appends 18K+12 gates.
GadgetHandle build_interpolate(gc::GeneralizedCircuit& c, int a, int w_a, int b, int w_b,
                               const Rational& eps);

} // namespace ppadkit::gadgets

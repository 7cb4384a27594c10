#pragma once

#include <vector>

#include "ppadkit/gcircuit.hpp"

namespace ppadkit::fanout2 {

// 4/eps_prime must be integral; throws otherwise.
int bus_width(const Rational& eps_prime);

// Unary bus b_1..b_{4/eps'}: b_k reads high while k*eps'/4 is below a.
// Every appended gate keeps fan-out <= 2.
std::vector<int> build_real2unary(gc::GeneralizedCircuit& c, int a, const Rational& eps_prime);

// Recovers a' = a +- eps' from a unary bus.
int build_unary2real(gc::GeneralizedCircuit& c, const std::vector<int>& bus,
                     const Rational& eps_prime);

// Whole-circuit transformation capping fan-out at 2: logical sources are
// copied through even-depth double-negation trees, arithmetic sources go
// through a unary bus, per-consumer reconstruction costs eps' accuracy.
gc::GeneralizedCircuit transform_fanout2(const gc::GeneralizedCircuit& c,
                                         const Rational& eps_prime);

} // namespace ppadkit::fanout2

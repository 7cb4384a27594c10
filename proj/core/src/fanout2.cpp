#include "ppadkit/fanout2.hpp"

#include <array>
#include <stdexcept>

namespace ppadkit::fanout2 {

using gc::Gate;
using gc::GateType;

int bus_width(const Rational& eps_prime) {
    if (!(Rational(0) < eps_prime) || !(eps_prime < Rational(1)))
        throw std::invalid_argument("eps' must lie in (0,1)");
    std::int64_t num = eps_prime.num, den = eps_prime.den;
    if ((4 * den) % num != 0) throw std::invalid_argument("4/eps' is not integral");
    return static_cast<int>(4 * den / num);
}

std::vector<int> build_real2unary(gc::GeneralizedCircuit& c, int a, const Rational& eps_prime) {
    const int L = bus_width(eps_prime);
    int prev = c.add_node();
    c.add_gate({GateType::Copy, {}, a, -1, prev});
    std::vector<int> bus;
    bus.reserve(L);
    for (int k = 1; k <= L; ++k) {
        int ck = c.add_node();
        c.add_gate({GateType::Copy, {}, prev, -1, ck});
        int zk = c.add_node();
        c.add_gate({GateType::Const, Rational(k, L), -1, -1, zk});
        int bk = c.add_node();
        c.add_gate({GateType::Less, {}, zk, ck, bk});
        bus.push_back(bk);
        prev = ck;
    }
    return bus;
}

int build_unary2real(gc::GeneralizedCircuit& c, const std::vector<int>& bus,
                     const Rational& eps_prime) {
    const int L = bus_width(eps_prime);
    if (static_cast<int>(bus.size()) != L)
        throw std::invalid_argument("bus length does not match eps'");
    int prev = c.add_node();
    c.add_gate({GateType::Const, Rational(0), -1, -1, prev});
    for (int k = 1; k <= L; ++k) {
        int ck = c.add_node();
        c.add_gate({GateType::Scale, Rational(1, L), bus[k - 1], -1, ck});
        int dk = c.add_node();
        c.add_gate({GateType::Add, {}, prev, ck, dk});
        prev = dk;
    }
    int out = c.add_node();
    c.add_gate({GateType::Copy, {}, prev, -1, out});
    return out;
}

namespace {

bool is_logical(GateType t) {
    return t == GateType::Less || t == GateType::Or || t == GateType::And || t == GateType::Not;
}

// Even-depth tree of negations delivering `fanout` copies of src, every
// node read at most twice.
std::vector<int> build_not_tree(gc::GeneralizedCircuit& c, int src, int fanout) {
    int depth = 0;
    std::int64_t cap = 1;
    while (cap < fanout || (depth % 2) != 0) {
        cap *= 2;
        ++depth;
    }
    std::vector<int> widths(depth + 1);
    widths[depth] = fanout;
    for (int d = depth; d > 0; --d) widths[d - 1] = (widths[d] + 1) / 2;
    std::vector<int> prev{src};
    for (int d = 1; d <= depth; ++d) {
        std::vector<int> level(widths[d]);
        for (int i = 0; i < widths[d]; ++i) {
            level[i] = c.add_node();
            c.add_gate({GateType::Not, {}, prev[i / 2], -1, level[i]});
        }
        prev = std::move(level);
    }
    return prev;
}

} // namespace

gc::GeneralizedCircuit transform_fanout2(const gc::GeneralizedCircuit& c,
                                         const Rational& eps_prime) {
    if (c.max_fanout() <= 2) return c;

    gc::GeneralizedCircuit t;
    for (int v = 0; v < c.n_nodes(); ++v) {
        if (c.has_name(v)) t.add_node(c.name_of(v));
        else t.add_node();
    }

    const auto& gates = c.gates();
    // reader list per node: (gate index, input slot)
    std::vector<std::vector<std::pair<int, int>>> readers(c.n_nodes());
    for (std::size_t gi = 0; gi < gates.size(); ++gi) {
        if (gates[gi].in1 >= 0) readers[gates[gi].in1].push_back({static_cast<int>(gi), 0});
        if (gates[gi].in2 >= 0) readers[gates[gi].in2].push_back({static_cast<int>(gi), 1});
    }

    std::vector<std::array<int, 2>> rewired(gates.size());
    for (std::size_t gi = 0; gi < gates.size(); ++gi)
        rewired[gi] = {gates[gi].in1, gates[gi].in2};

    for (int v = 0; v < c.n_nodes(); ++v) {
        int f = static_cast<int>(readers[v].size());
        if (f <= 2) continue;
        int w = c.writer_of(v);
        std::vector<int> leaves;
        if (w >= 0 && is_logical(gates[w].type)) {
            leaves = build_not_tree(t, v, f);
        } else {
            std::vector<int> bus = build_real2unary(t, v, eps_prime);
            std::vector<std::vector<int>> bit_copies;
            bit_copies.reserve(bus.size());
            for (int bit : bus) bit_copies.push_back(build_not_tree(t, bit, f));
            for (int j = 0; j < f; ++j) {
                std::vector<int> consumer_bus;
                consumer_bus.reserve(bus.size());
                for (auto& copies : bit_copies) consumer_bus.push_back(copies[j]);
                leaves.push_back(build_unary2real(t, consumer_bus, eps_prime));
            }
        }
        for (int j = 0; j < f; ++j) {
            auto [gi, slot] = readers[v][j];
            rewired[gi][slot] = leaves[j];
        }
    }

    for (std::size_t gi = 0; gi < gates.size(); ++gi) {
        Gate g = gates[gi];
        g.in1 = rewired[gi][0];
        g.in2 = rewired[gi][1];
        t.add_gate(g);
    }
    return t;
}

} // namespace ppadkit::fanout2

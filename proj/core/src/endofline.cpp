#include "ppadkit/endofline.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ppadkit::eol {

namespace {

bool all_zero(const BitVec& x) {
    for (auto b : x)
        if (b) return false;
    return true;
}

// Does the instance realize a genuine edge u -> S(u)?  Requires the pointers
// to agree in both directions; unpaired pointers do not create path segments
// (otherwise the embedded walks of two lines could collide).
bool real_out(const EndOfLineInstance& inst, const BitVec& u) {
    BitVec w = inst.s_of(u);
    return w != u && inst.p_of(w) == u;
}

bool real_in(const EndOfLineInstance& inst, const BitVec& u) {
    BitVec p = inst.p_of(u);
    return p != u && inst.s_of(p) == u;
}

// x must equal `from` with the lowest-index k differing bits (vs `to`)
// already flipped, for some k.
bool on_greedy_path(const BitVec& x, const BitVec& from, const BitVec& to) {
    int first_unflipped = -1;
    for (std::size_t i = 0; i < x.size(); ++i) {
        bool diff = from[i] != to[i];
        bool flipped = x[i] != from[i];
        if (flipped && !diff) return false;
        if (diff && !flipped && first_unflipped < 0) first_unflipped = static_cast<int>(i);
        if (flipped && first_unflipped >= 0 && static_cast<int>(i) > first_unflipped) return false;
    }
    return true;
}

BitVec flip_lowest_diff(const BitVec& x, const BitVec& target) {
    BitVec r = x;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != target[i]) {
            r[i] ^= 1u;
            return r;
        }
    throw std::logic_error("flip_lowest_diff on equal vectors");
}

BitVec unflip_highest_diff(const BitVec& x, const BitVec& origin) {
    BitVec r = x;
    for (int i = static_cast<int>(x.size()) - 1; i >= 0; --i)
        if (x[i] != origin[i]) {
            r[i] ^= 1u;
            return r;
        }
    throw std::logic_error("unflip_highest_diff on equal vectors");
}

} // namespace

EndOfLineInstance::EndOfLineInstance(int n_bits, BoolCircuit s, BoolCircuit p)
    : n(n_bits), succ(std::move(s)), pred(std::move(p)) {
    succ.validate();
    pred.validate();
    if (succ.n_inputs != n || succ.n_outputs() != n || pred.n_inputs != n ||
        pred.n_outputs() != n)
        throw std::invalid_argument("circuit width does not match n");
    BitVec zero(n, 0);
    if (p_of(zero) != zero) throw std::invalid_argument("P(0^n) must be 0^n");
    if (s_of(zero) == zero) throw std::invalid_argument("S(0^n) must differ from 0^n");
}

bool verify_eol_solution(const EndOfLineInstance& inst, const BitVec& x) {
    if (static_cast<int>(x.size()) != inst.n)
        throw std::invalid_argument("solution width mismatch");
    if (inst.p_of(inst.s_of(x)) != x) return true;
    return inst.s_of(inst.p_of(x)) != x && !all_zero(x);
}

EmbeddedState state_from_bits(const BitVec& vertex, int n) {
    if (static_cast<int>(vertex.size()) != 2 * n + 1)
        throw std::invalid_argument("vertex width must be 2n+1");
    EmbeddedState s;
    s.u.assign(vertex.begin(), vertex.begin() + n);
    s.v.assign(vertex.begin() + n, vertex.begin() + 2 * n);
    s.phase = vertex[2 * n];
    return s;
}

BitVec state_to_bits(const EmbeddedState& s) {
    BitVec b;
    b.reserve(s.u.size() + s.v.size() + 1);
    b.insert(b.end(), s.u.begin(), s.u.end());
    b.insert(b.end(), s.v.begin(), s.v.end());
    b.push_back(s.phase);
    return b;
}

EmbeddedState h_successor(const EndOfLineInstance& inst, const EmbeddedState& s) {
    if (s.phase == 0) {
        if (!real_out(inst, s.u)) return s; // end point or off-path
        BitVec w = inst.s_of(s.u);
        if (!on_greedy_path(s.v, s.u, w)) return s;
        if (s.v == w) return {s.u, s.v, 1};
        return {s.u, flip_lowest_diff(s.v, w), 0};
    }
    if (s.u == s.v) {
        if (real_in(inst, s.u)) return {s.u, s.v, 0};
        return s;
    }
    if (!real_in(inst, s.v)) return s;
    BitVec pu = inst.p_of(s.v);
    if (!on_greedy_path(s.u, pu, s.v)) return s;
    return {flip_lowest_diff(s.u, s.v), s.v, 1};
}

PredResult h_predecessor(const EndOfLineInstance& inst, const EmbeddedState& s) {
    if (s.phase == 0) {
        if (s.u == s.v) {
            if (all_zero(s.u)) return {s, true}; // home: enters from above
            if (real_in(inst, s.u)) return {{s.u, s.v, 1}, false};
            return {s, false}; // non-home starting points map to themselves
        }
        if (!real_out(inst, s.u)) return {s, false};
        BitVec w = inst.s_of(s.u);
        if (!on_greedy_path(s.v, s.u, w)) return {s, false};
        return {{s.u, unflip_highest_diff(s.v, s.u), 0}, false};
    }
    if (!real_in(inst, s.v)) return {s, false};
    BitVec pu = inst.p_of(s.v);
    if (!on_greedy_path(s.u, pu, s.v)) return {s, false};
    if (s.u == pu) return {{s.u, s.v, 0}, false};
    return {{unflip_highest_diff(s.u, pu), s.v, 1}, false};
}

HInfo h_info(const EndOfLineInstance& inst, const BitVec& vertex) {
    EmbeddedState s = state_from_bits(vertex, inst.n);
    EmbeddedState nxt = h_successor(inst, s);
    PredResult prv = h_predecessor(inst, s);
    const int dim = 2 * inst.n + 2;

    auto signed_axis = [&](const EmbeddedState& from, const EmbeddedState& to) {
        BitVec a = state_to_bits(from), b = state_to_bits(to);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return b[i] ? static_cast<int>(i) + 1 : -(static_cast<int>(i) + 1);
        return 0;
    };

    HInfo info;
    bool has_succ = nxt != s;
    bool has_pred = prv.state != s;
    if (prv.from_above) {
        info.status = HInfo::Status::Home;
        info.enter = -dim;
        info.exit = has_succ ? signed_axis(s, nxt) : 0;
        return info;
    }
    if (!has_succ && !has_pred) {
        info.status = HInfo::Status::OffPath;
        return info;
    }
    if (has_succ && has_pred) info.status = HInfo::Status::Mid;
    else if (has_succ) info.status = HInfo::Status::Start;
    else info.status = HInfo::Status::End;
    if (has_pred) info.enter = signed_axis(prv.state, s);
    if (has_succ) info.exit = signed_axis(s, nxt);
    return info;
}

EndOfLineInstance make_line_instance(
    int n, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& edges) {
    const std::uint64_t size = std::uint64_t{1} << n;
    std::vector<std::uint64_t> s_tab(size), p_tab(size);
    for (std::uint64_t i = 0; i < size; ++i) s_tab[i] = p_tab[i] = i;
    for (auto [a, b] : edges) {
        if (a >= size || b >= size) throw std::invalid_argument("edge endpoint out of range");
        if (a == b) throw std::invalid_argument("self-loop edge");
        if (b == 0) throw std::invalid_argument("edge into 0^n violates P(0)=0");
        if (s_tab[a] != a) throw std::invalid_argument("vertex has two outgoing edges");
        if (p_tab[b] != b) throw std::invalid_argument("vertex has two incoming edges");
        s_tab[a] = b;
        p_tab[b] = a;
    }
    if (s_tab[0] == 0) throw std::invalid_argument("instance requires S(0) != 0");
    return EndOfLineInstance(n, circuit_from_truth_table(n, n, s_tab),
                             circuit_from_truth_table(n, n, p_tab));
}

HStepCircuits build_h_step_circuits(const EndOfLineInstance& inst) {
    const int n = inst.n;

    struct Common {
        std::vector<int> u, v, w, pw, pv, spv;
        int ph = 0;
        int real_out = 0, real_in_v = 0;
        std::vector<int> flip0, flip1, d0, d1;
        int on_g0 = 0, on_g1 = 0;
        int eq_uv = 0, v_eq_w = 0, u_eq_pv = 0;
    };

    auto prepare = [&](BoolBuilder& bb) {
        Common c;
        for (int i = 0; i < n; ++i) c.u.push_back(bb.input(i));
        for (int i = 0; i < n; ++i) c.v.push_back(bb.input(n + i));
        c.ph = bb.input(2 * n);
        c.w = bb.embed(inst.succ, c.u);
        c.pw = bb.embed(inst.pred, c.w);
        c.pv = bb.embed(inst.pred, c.v);
        c.spv = bb.embed(inst.succ, c.pv);

        auto eq_vec = [&](const std::vector<int>& a, const std::vector<int>& b) {
            std::vector<int> eqs;
            for (int i = 0; i < n; ++i) eqs.push_back(bb.eq2(a[i], b[i]));
            return bb.and_all(eqs);
        };
        auto ne_vec = [&](const std::vector<int>& a, const std::vector<int>& b) {
            std::vector<int> ds;
            for (int i = 0; i < n; ++i) ds.push_back(bb.xor2(a[i], b[i]));
            return bb.or_all(ds);
        };

        int w_ne_u = ne_vec(c.w, c.u);
        c.real_out = bb.and2(w_ne_u, eq_vec(c.pw, c.u));
        int pv_ne_v = ne_vec(c.pv, c.v);
        c.real_in_v = bb.and2(pv_ne_v, eq_vec(c.spv, c.v));

        // greedy-prefix validity: flipped bits form a lowest-first prefix of
        // the differing positions
        auto greedy = [&](const std::vector<int>& x, const std::vector<int>& from,
                          const std::vector<int>& to, std::vector<int>& flipped,
                          std::vector<int>& diff) {
            flipped.clear();
            diff.clear();
            for (int i = 0; i < n; ++i) {
                flipped.push_back(bb.xor2(x[i], from[i]));
                diff.push_back(bb.xor2(from[i], to[i]));
            }
            std::vector<int> ok;
            int seen_unflipped = bb.constant(false);
            for (int i = 0; i < n; ++i) {
                ok.push_back(bb.not1(bb.and2(flipped[i], bb.not1(diff[i]))));
                ok.push_back(bb.not1(bb.and2(flipped[i], seen_unflipped)));
                seen_unflipped =
                    bb.or2(seen_unflipped, bb.and2(diff[i], bb.not1(flipped[i])));
            }
            return bb.and_all(ok);
        };
        c.on_g0 = greedy(c.v, c.u, c.w, c.flip0, c.d0);
        c.on_g1 = greedy(c.u, c.pv, c.v, c.flip1, c.d1);
        c.eq_uv = bb.not1(bb.or_all(c.flip0));
        c.v_eq_w = eq_vec(c.v, c.w);
        c.u_eq_pv = bb.not1(bb.or_all(c.flip1));
        return c;
    };

    auto lowest_onehot = [&](BoolBuilder& bb, const std::vector<int>& d) {
        std::vector<int> oh(n);
        int seen = bb.constant(false);
        for (int i = 0; i < n; ++i) {
            oh[i] = bb.and2(d[i], bb.not1(seen));
            seen = bb.or2(seen, d[i]);
        }
        return oh;
    };
    auto highest_onehot = [&](BoolBuilder& bb, const std::vector<int>& d) {
        std::vector<int> oh(n);
        int seen = bb.constant(false);
        for (int i = n - 1; i >= 0; --i) {
            oh[i] = bb.and2(d[i], bb.not1(seen));
            seen = bb.or2(seen, d[i]);
        }
        return oh;
    };

    HStepCircuits out;

    { // successor step
        BoolBuilder bb(2 * n + 2);
        Common c = prepare(bb);
        std::vector<int> dvw;
        for (int i = 0; i < n; ++i) dvw.push_back(bb.xor2(c.v[i], c.w[i]));
        auto low_vw = lowest_onehot(bb, dvw);
        std::vector<int> duv = c.flip0; // u xor v
        auto low_uv = lowest_onehot(bb, duv);

        int base0 = bb.and2(bb.not1(c.ph), bb.and2(c.real_out, c.on_g0));
        int adv_v = bb.and2(base0, bb.not1(c.v_eq_w));
        int adv_ph = bb.and2(base0, c.v_eq_w);
        int base1 = bb.and2(c.ph, c.real_in_v);
        int adv_u = bb.and2(base1, bb.and2(c.on_g1, bb.not1(c.eq_uv)));
        int ph_down = bb.and2(base1, c.eq_uv);

        std::vector<int> outs;
        for (int i = 0; i < n; ++i)
            outs.push_back(bb.mux(adv_u, bb.xor2(c.u[i], low_uv[i]), c.u[i]));
        for (int i = 0; i < n; ++i)
            outs.push_back(bb.mux(adv_v, bb.xor2(c.v[i], low_vw[i]), c.v[i]));
        outs.push_back(bb.mux(adv_ph, bb.constant(true), bb.mux(ph_down, bb.constant(false), c.ph)));
        outs.push_back(bb.constant(false));
        out.step_succ = bb.finish(std::move(outs));
    }

    { // predecessor step
        BoolBuilder bb(2 * n + 2);
        Common c = prepare(bb);
        auto high_vu = highest_onehot(bb, c.flip0);
        auto high_upv = highest_onehot(bb, c.flip1);

        std::vector<int> zbits;
        for (int i = 0; i < n; ++i) zbits.push_back(bb.not1(c.u[i]));
        for (int i = 0; i < n; ++i) zbits.push_back(bb.not1(c.v[i]));
        zbits.push_back(bb.not1(c.ph));
        int home = bb.and_all(zbits);

        int ph0_eq = bb.and2(bb.not1(c.ph), c.eq_uv);
        int pred_ph1 = bb.and2(ph0_eq, c.real_in_v); // (u,u,0) <- (u,u,1)
        int retr_v = bb.and2(bb.not1(c.ph),
                             bb.and2(bb.not1(c.eq_uv), bb.and2(c.real_out, c.on_g0)));
        int base1 = bb.and2(c.ph, bb.and2(c.real_in_v, c.on_g1));
        int pred_flip = bb.and2(base1, c.u_eq_pv); // (u,v,1) <- (u,v,0)
        int retr_u = bb.and2(base1, bb.not1(c.u_eq_pv));

        std::vector<int> outs;
        for (int i = 0; i < n; ++i)
            outs.push_back(bb.mux(retr_u, bb.xor2(c.u[i], high_upv[i]), c.u[i]));
        for (int i = 0; i < n; ++i)
            outs.push_back(bb.mux(retr_v, bb.xor2(c.v[i], high_vu[i]), c.v[i]));
        outs.push_back(bb.mux(pred_ph1, bb.constant(true),
                              bb.mux(pred_flip, bb.constant(false), c.ph)));
        outs.push_back(home);
        out.step_pred = bb.finish(std::move(outs));
    }

    return out;
}

void write_instance(std::ostream& os, const EndOfLineInstance& inst) {
    os << "EOL n=" << inst.n << "\n";
    os << "S:\n";
    write_circuit_section(os, inst.succ);
    os << "P:\n";
    write_circuit_section(os, inst.pred);
}

EndOfLineInstance parse_instance(std::istream& is) {
    int lineno = 0;
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty instance file");
    ++lineno;
    int n = 0;
    if (std::sscanf(line.c_str(), "EOL n=%d", &n) != 1 || n <= 0)
        throw std::invalid_argument("line 1: expected header 'EOL n=<n>'");
    if (!std::getline(is, line) || line != "S:")
        throw std::invalid_argument("expected 'S:' section");
    ++lineno;
    BoolCircuit s = parse_circuit_section(is, n, lineno);
    if (!std::getline(is, line) || line != "P:")
        throw std::invalid_argument("expected 'P:' section");
    ++lineno;
    BoolCircuit p = parse_circuit_section(is, n, lineno);
    return EndOfLineInstance(n, std::move(s), std::move(p));
}

} // namespace ppadkit::eol

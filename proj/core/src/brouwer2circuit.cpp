#include "ppadkit/brouwer2circuit.hpp"

#include <ostream>
#include <stdexcept>

#include "ppadkit/gadgets.hpp"

namespace ppadkit::b2c {

using gc::Gate;
using gc::GateType;

namespace {

// Boolean circuit embedded gate-for-gate: AND/OR/NOT map onto the logical
// gates, constants become constant gates, inputs are just wires.
std::vector<int> embed_bool(gc::GeneralizedCircuit& c, const BoolCircuit& bc,
                            const std::vector<int>& wires) {
    std::vector<int> map(bc.gates.size(), -1);
    for (std::size_t i = 0; i < bc.gates.size(); ++i) {
        const auto& g = bc.gates[i];
        auto fresh = [&]() { return c.add_node(); };
        switch (g.op) {
            case BoolOp::And: {
                int o = fresh();
                c.add_gate({GateType::And, {}, map[g.a], map[g.b], o});
                map[i] = o;
                break;
            }
            case BoolOp::Or: {
                int o = fresh();
                c.add_gate({GateType::Or, {}, map[g.a], map[g.b], o});
                map[i] = o;
                break;
            }
            case BoolOp::Not: {
                int o = fresh();
                c.add_gate({GateType::Not, {}, map[g.a], -1, o});
                map[i] = o;
                break;
            }
            case BoolOp::Const0: {
                int o = fresh();
                c.add_gate({GateType::Const, Rational(0), -1, -1, o});
                map[i] = o;
                break;
            }
            case BoolOp::Const1: {
                int o = fresh();
                c.add_gate({GateType::Const, Rational(1), -1, -1, o});
                map[i] = o;
                break;
            }
            case BoolOp::Input: map[i] = wires[g.a]; break;
        }
    }
    std::vector<int> outs(bc.outputs.size());
    for (std::size_t i = 0; i < bc.outputs.size(); ++i) outs[i] = map[bc.outputs[i]];
    return outs;
}

} // namespace

Compiler::Compiler(gc::GeneralizedCircuit& c, const Rational& eps, const Rational& delta,
                   const Rational& corner_tau)
    : c_(c), eps_(eps), delta_(delta), tau_(corner_tau) {
    K_ = gadgets::unary_granularity(eps);
    if (!(Rational(0) < delta_) || Rational(1, 8) < delta_)
        throw std::invalid_argument("delta outside (0, 1/8]");
}

int Compiler::fresh() { return c_.add_node(); }

int Compiler::named(const std::string& name) {
    int id = c_.add_node(name);
    symbols_.emplace_back(name, id);
    return id;
}

int Compiler::konst(const Rational& v) {
    int o = fresh();
    c_.add_gate({GateType::Const, v, -1, -1, o});
    return o;
}

int Compiler::gate(GateType t, Rational zeta, int a, int b, int out) {
    if (out < 0) out = fresh();
    c_.add_gate({t, zeta, a, b, out});
    return out;
}

int Compiler::absdiff(int a, int b) {
    int s1 = gate(GateType::Sub, {}, a, b);
    int s2 = gate(GateType::Sub, {}, b, a);
    return gate(GateType::Add, {}, s1, s2);
}

int Compiler::keep_if(int x, int bit) {
    int nb = gate(GateType::Not, {}, bit, -1);
    return gate(GateType::Sub, {}, x, nb);
}

int Compiler::keep_ifnot(int x, int bit) { return gate(GateType::Sub, {}, x, bit); }

int Compiler::scale_up(int x, int factor) {
    // factor must be 2^k or 3*2^k; doubling keeps every parameter in [0,1]
    int k = 0;
    int f = factor;
    while (f % 2 == 0) {
        f /= 2;
        ++k;
    }
    if (f != 1 && f != 3) throw std::invalid_argument("unsupported scale factor");
    int cur = x;
    for (int i = 0; i < k; ++i) cur = gate(GateType::Add, {}, cur, cur);
    if (f == 1) return cur;
    int more = gate(GateType::Add, {}, cur, cur); // 2^{k+1} x
    return gate(GateType::Add, {}, cur, more);    // 3*2^k x, still min-clamped
}

Compiler::Weights Compiler::ring_weights(int r) {
    Weights w;
    int s0 = scale_up(r, 48);
    int t1 = gate(GateType::Sub, {}, r, konst(Rational(1, 48)));
    int s1 = scale_up(t1, 48);
    int t2 = gate(GateType::Sub, {}, r, konst(Rational(1, 24)));
    int s2 = scale_up(t2, 24);
    int one = konst(Rational(1));
    w.w0 = gate(GateType::Sub, {}, one, s0);
    w.w1 = gate(GateType::Sub, {}, s0, s1);
    w.w2 = gate(GateType::Sub, {}, s1, s2);
    w.w3 = s2;
    return w;
}

std::vector<int> Compiler::rest_profile(const Weights& w, const std::vector<int>& p_part,
                                        bool add_up_term) {
    std::vector<int> out(dim_);
    for (int i = 0; i < dim_; ++i) {
        out[i] = gadgets::build_multiply(c_, w.w1, p_part[i], eps_).out;
        if (add_up_term && i == dim_ - 1) out[i] = gate(GateType::Add, {}, out[i], w.w3);
    }
    return out;
}

std::vector<std::vector<int>> Compiler::build_equiangle(const std::vector<int>& y_nodes) {
    dim_ = static_cast<int>(y_nodes.size());
    std::vector<std::vector<int>> samples(K_);
    for (int l = 0; l < K_; ++l) {
        samples[l].resize(dim_);
        for (int i = 0; i < dim_; ++i) {
            if (l == 0) {
                samples[l][i] = gate(GateType::Copy, {}, y_nodes[i], -1);
            } else {
                // shift by 6*l*eps along the all-ones direction, saturating;
                // at demo-scale eps the shift itself caps at 1
                Rational amount = Rational(6 * l) * eps_;
                if (Rational(1) < amount) amount = Rational(1);
                int shift = konst(amount);
                samples[l][i] = gate(GateType::Add, {}, y_nodes[i], shift);
            }
        }
    }
    return samples;
}

CubeDecode Compiler::build_cube_decode(const std::vector<int>& sample,
                                       const eol::HStepCircuits& steps, const std::string& tag) {
    CubeDecode d;
    const int D = dim_;
    int c_half = konst(Rational(1, 2));
    for (int i = 0; i < D; ++i) {
        int b = named(tag + ".b" + std::to_string(i));
        gate(GateType::Less, {}, c_half, sample[i], b); // 1 iff 1/2 < y_i
        d.b.push_back(b);
    }
    d.sh = embed_bool(c_, steps.step_succ, d.b);
    d.ph = embed_bool(c_, steps.step_pred, d.b);
    for (int i = 0; i < D; ++i) {
        symbols_.emplace_back(tag + ".sh" + std::to_string(i), d.sh[i]);
        symbols_.emplace_back(tag + ".ph" + std::to_string(i), d.ph[i]);
    }
    for (int i = 0; i < D; ++i) {
        int nb = gate(GateType::Not, {}, d.b[i], -1);
        int np = gate(GateType::Not, {}, d.ph[i], -1);
        int ns = gate(GateType::Not, {}, d.sh[i], -1);
        int binp = gate(GateType::And, {}, d.b[i], np);
        int binn = gate(GateType::And, {}, nb, d.ph[i]);
        int boutp = gate(GateType::And, {}, nb, d.sh[i]);
        int boutn = gate(GateType::And, {}, d.b[i], ns);
        symbols_.emplace_back(tag + ".bin+" + std::to_string(i), binp);
        symbols_.emplace_back(tag + ".bin-" + std::to_string(i), binn);
        symbols_.emplace_back(tag + ".bout+" + std::to_string(i), boutp);
        symbols_.emplace_back(tag + ".bout-" + std::to_string(i), boutn);
        d.bin_pos.push_back(binp);
        d.bin_neg.push_back(binn);
        d.bout_pos.push_back(boutp);
        d.bout_neg.push_back(boutn);
        d.b_in.push_back(gate(GateType::Or, {}, binp, binn));
        d.b_out.push_back(gate(GateType::Or, {}, boutp, boutn));
    }
    for (int i = 0; i < D; ++i) {
        // facet centers: cell center off the travel axis, the shared 1/2
        // wall on it
        int base = konst(Rational(5, 12));
        int sixth = gate(GateType::Scale, Rational(1, 6), d.b[i], -1);
        int zc = gate(GateType::Add, {}, base, sixth);
        int zin = named(tag + ".zin" + std::to_string(i));
        gate(GateType::Add, {}, keep_ifnot(zc, d.b_in[i]),
             gate(GateType::Scale, Rational(1, 2), d.b_in[i], -1), zin);
        int zout = named(tag + ".zout" + std::to_string(i));
        gate(GateType::Add, {}, keep_ifnot(zc, d.b_out[i]),
             gate(GateType::Scale, Rational(1, 2), d.b_out[i], -1), zout);
        d.zin.push_back(zin);
        d.zout.push_back(zout);
    }
    int tin = d.b_in[0];
    int tout = d.b_out[0];
    for (int i = 1; i < D; ++i) {
        tin = gate(GateType::Or, {}, tin, d.b_in[i]);
        tout = gate(GateType::Or, {}, tout, d.b_out[i]);
    }
    d.t_in = gate(GateType::Copy, {}, tin, -1, named(tag + ".Tin"));
    d.t_out = gate(GateType::Copy, {}, tout, -1, named(tag + ".Tout"));
    return d;
}

PolarBlock Compiler::build_polar_block(const std::vector<int>& sample, const CubeDecode& dec,
                                       const std::string& tag) {
    PolarBlock p;
    const int D = dim_;
    int c_half = konst(Rational(1, 2));
    std::vector<int> dh(D);
    for (int i = 0; i < D; ++i) dh[i] = absdiff(sample[i], c_half);
    dh_.assign(dh.begin(), dh.end());

    auto masked_sum = [&](const std::vector<int>& bits) {
        int acc = keep_if(dh[0], bits[0]);
        for (int i = 1; i < D; ++i) acc = gate(GateType::Add, {}, acc, keep_if(dh[i], bits[i]));
        return acc;
    };
    p.u = masked_sum(dec.b_in);
    p.v = masked_sum(dec.b_out);
    p.rho = gate(GateType::Add, {}, p.u, gate(GateType::Sub, {}, p.v, p.u));

    int c112 = konst(Rational(1, 12));
    int arc = absdiff(p.rho, c112);
    int arc_in = keep_if(arc, dec.t_out);
    int arc_out = keep_if(arc, dec.t_in);

    std::vector<int> axm(D);
    for (int i = 0; i < D; ++i) axm[i] = gate(GateType::Or, {}, dec.b_in[i], dec.b_out[i]);

    auto radius = [&](const std::vector<int>& z, int arc_term) {
        std::vector<int> terms;
        for (int i = 0; i < D; ++i)
            terms.push_back(gate(GateType::Sub, {}, absdiff(sample[i], z[i]), axm[i]));
        terms.push_back(arc_term);
        return gadgets::build_max(c_, terms, eps_).out;
    };
    p.rin = gate(GateType::Copy, {}, radius(dec.zin, arc_in), -1, named(tag + ".rin"));
    p.rout = gate(GateType::Copy, {}, radius(dec.zout, arc_out), -1, named(tag + ".rout"));

    int srp = gate(GateType::Sub, {}, p.rho, c112); // (rho - h/2)^+
    int spr = gate(GateType::Sub, {}, c112, p.rho); // (h/2 - rho)^+

    for (int i = 0; i < D; ++i) {
        // coordinate terms vanish on the travel axes; the partner-axis
        // component rides on the edge radius with the wall-side sign
        int cpos = gate(GateType::Sub, {}, gate(GateType::Sub, {}, sample[i], dec.zin[i]), axm[i]);
        int cneg = gate(GateType::Sub, {}, gate(GateType::Sub, {}, dec.zin[i], sample[i]), axm[i]);
        int pin_pos_num = gate(GateType::Add, {},
                               gate(GateType::Add, {}, cpos, keep_if(srp, dec.bout_neg[i])),
                               keep_if(spr, dec.bout_pos[i]));
        int pin_neg_num = gate(GateType::Add, {},
                               gate(GateType::Add, {}, cneg, keep_if(spr, dec.bout_neg[i])),
                               keep_if(srp, dec.bout_pos[i]));
        int opos = gate(GateType::Sub, {}, gate(GateType::Sub, {}, sample[i], dec.zout[i]), axm[i]);
        int oneg = gate(GateType::Sub, {}, gate(GateType::Sub, {}, dec.zout[i], sample[i]), axm[i]);
        int pout_pos_num = gate(GateType::Add, {},
                                gate(GateType::Add, {}, opos, keep_if(srp, dec.bin_pos[i])),
                                keep_if(spr, dec.bin_neg[i]));
        int pout_neg_num = gate(GateType::Add, {},
                                gate(GateType::Add, {}, oneg, keep_if(spr, dec.bin_pos[i])),
                                keep_if(srp, dec.bin_neg[i]));
        int pp = gadgets::build_divide(c_, pin_pos_num, p.rin, eps_).out;
        int pn = gadgets::build_divide(c_, pin_neg_num, p.rin, eps_).out;
        int qp = gadgets::build_divide(c_, pout_pos_num, p.rout, eps_).out;
        int qn = gadgets::build_divide(c_, pout_neg_num, p.rout, eps_).out;
        symbols_.emplace_back(tag + ".pin+" + std::to_string(i), pp);
        symbols_.emplace_back(tag + ".pin-" + std::to_string(i), pn);
        symbols_.emplace_back(tag + ".pout+" + std::to_string(i), qp);
        symbols_.emplace_back(tag + ".pout-" + std::to_string(i), qn);
        p.pin_pos.push_back(pp);
        p.pin_neg.push_back(pn);
        p.pout_pos.push_back(qp);
        p.pout_neg.push_back(qn);
    }
    return p;
}

DisplacementBlock Compiler::build_displacement_block(const std::vector<int>& sample,
                                                     const CubeDecode& dec,
                                                     const PolarBlock& polar,
                                                     const std::string& tag) {
    (void)sample;
    DisplacementBlock blk;
    const int D = dim_;
    Weights win = ring_weights(polar.rin);
    Weights wout = ring_weights(polar.rout);

    // unscaled suction/up profiles (delta applied at the very end)
    std::vector<int> fin_pos = rest_profile(win, polar.pin_neg, true);
    std::vector<int> fin_neg = rest_profile(win, polar.pin_pos, false);
    std::vector<int> fout_pos = rest_profile(wout, polar.pout_neg, true);
    std::vector<int> fout_neg = rest_profile(wout, polar.pout_pos, false);

    // wall blend: angular between two tube walls, Cartesian handover to the
    // center profile in start/end subcubes
    int nt_out = gate(GateType::Not, {}, dec.t_out, -1);
    int nt_in = gate(GateType::Not, {}, dec.t_in, -1);
    int c112 = konst(Rational(1, 12));
    int w_in = gate(GateType::Add, {}, gate(GateType::Sub, {}, polar.v, nt_out),
                    gate(GateType::Sub, {}, gate(GateType::Sub, {}, c112, polar.u), dec.t_out));
    int w_out = gate(GateType::Add, {}, gate(GateType::Sub, {}, polar.u, nt_in),
                     gate(GateType::Sub, {}, gate(GateType::Sub, {}, c112, polar.v), dec.t_in));
    int wa2 = gate(GateType::Scale, Rational(1, 2), w_in, -1);
    int wb2 = gate(GateType::Scale, Rational(1, 2), w_out, -1);
    int ws = gate(GateType::Add, {}, wa2, wb2);
    int wbar_in = gadgets::build_divide(c_, wa2, ws, eps_).out;
    int wbar_out = gadgets::build_divide(c_, wb2, ws, eps_).out;

    // the travel component rotates between the two travel axes at full
    // strength instead of being averaged away
    int mix_p = gate(GateType::Add, {}, gadgets::build_multiply(c_, wbar_in, win.w0, eps_).out,
                     gadgets::build_multiply(c_, wbar_out, wout.w0, eps_).out);
    int mix_n = gate(GateType::Add, {}, gadgets::build_multiply(c_, wbar_in, win.w2, eps_).out,
                     gadgets::build_multiply(c_, wbar_out, wout.w2, eps_).out);
    int om_in = scale_up(wbar_in, 2);
    int om_out = scale_up(wbar_out, 2);
    int tin_p = gadgets::build_multiply(c_, om_in, mix_p, eps_).out;
    int tin_n = gadgets::build_multiply(c_, om_in, mix_n, eps_).out;
    int tout_p = gadgets::build_multiply(c_, om_out, mix_p, eps_).out;
    int tout_n = gadgets::build_multiply(c_, om_out, mix_n, eps_).out;

    std::vector<int> blend_pos(D), blend_neg(D);
    for (int i = 0; i < D; ++i) {
        int rest_p = gate(GateType::Add, {},
                          gadgets::build_multiply(c_, wbar_in, fin_pos[i], eps_).out,
                          gadgets::build_multiply(c_, wbar_out, fout_pos[i], eps_).out);
        int rest_n = gate(GateType::Add, {},
                          gadgets::build_multiply(c_, wbar_in, fin_neg[i], eps_).out,
                          gadgets::build_multiply(c_, wbar_out, fout_neg[i], eps_).out);
        int tp = gate(GateType::Add, {}, keep_if(tin_p, dec.bin_pos[i]),
                      keep_if(tin_n, dec.bin_neg[i]));
        tp = gate(GateType::Add, {}, tp,
                  gate(GateType::Add, {}, keep_if(tout_p, dec.bout_pos[i]),
                       keep_if(tout_n, dec.bout_neg[i])));
        int tn = gate(GateType::Add, {}, keep_if(tin_n, dec.bin_pos[i]),
                      keep_if(tin_p, dec.bin_neg[i]));
        tn = gate(GateType::Add, {}, tn,
                  gate(GateType::Add, {}, keep_if(tout_n, dec.bout_pos[i]),
                       keep_if(tout_p, dec.bout_neg[i])));
        blend_pos[i] = gate(GateType::Add, {}, rest_p, tp);
        blend_neg[i] = gate(GateType::Add, {}, rest_n, tn);
    }

    // corner detector: OR over pairs of near-wall coordinates
    int c_tau = konst(tau_);
    std::vector<int> ind(D);
    for (int i = 0; i < D; ++i) ind[i] = gate(GateType::Less, {}, dh_[i], c_tau);
    int z = -1;
    for (int i = 0; i < D; ++i)
        for (int j = i + 1; j < D; ++j) {
            int pr = gate(GateType::And, {}, ind[i], ind[j]);
            z = (z < 0) ? pr : gate(GateType::Or, {}, z, pr);
        }
    z = gate(GateType::Copy, {}, z, -1, named(tag + ".corner"));
    blk.corner = z;
    int not_z = gate(GateType::Not, {}, z, -1);

    int on = gate(GateType::Or, {}, dec.t_in, dec.t_out);
    int not_on = gate(GateType::Not, {}, on, -1);

    for (int i = 0; i < D; ++i) {
        // corner override toward the upward unit field, then the off-tube
        // default, then the delta scaling
        int tp = gadgets::build_multiply(c_, not_z, blend_pos[i], eps_).out;
        if (i == D - 1) tp = gate(GateType::Add, {}, tp, z);
        int tn = gadgets::build_multiply(c_, not_z, blend_neg[i], eps_).out;
        int sp = gate(GateType::Sub, {}, tp, not_on);
        if (i == D - 1) sp = gate(GateType::Add, {}, sp, not_on);
        int sn = gate(GateType::Sub, {}, tn, not_on);
        int gp = named(tag + ".g+" + std::to_string(i));
        gate(GateType::Scale, delta_, sp, -1, gp);
        int gn = named(tag + ".g-" + std::to_string(i));
        gate(GateType::Scale, delta_, sn, -1, gn);
        blk.g_pos.push_back(gp);
        blk.g_neg.push_back(gn);
    }
    return blk;
}

std::pair<std::vector<int>, std::vector<int>> Compiler::build_average(
    const std::vector<DisplacementBlock>& blocks, const std::string& tag) {
    std::vector<int> gp(dim_), gn(dim_);
    auto average = [&](auto pick, const std::string& name) {
        std::vector<int> out(dim_);
        for (int i = 0; i < dim_; ++i) {
            int acc = konst(Rational(0));
            for (const auto& blk : blocks) {
                int term = gate(GateType::Scale, Rational(1, K_), pick(blk)[i], -1);
                acc = gate(GateType::Add, {}, acc, term);
            }
            out[i] = gate(GateType::Copy, {}, acc, -1, named(tag + name + std::to_string(i)));
        }
        return out;
    };
    gp = average([](const DisplacementBlock& b) -> const std::vector<int>& { return b.g_pos; },
                 "g+");
    gn = average([](const DisplacementBlock& b) -> const std::vector<int>& { return b.g_neg; },
                 "g-");
    return {gp, gn};
}

void Compiler::close_loop(const std::vector<int>& y_nodes, const std::vector<int>& g_pos,
                          const std::vector<int>& g_neg) {
    for (int i = 0; i < dim_; ++i) {
        int w = gate(GateType::Add, {}, y_nodes[i], g_pos[i]);
        gate(GateType::Sub, {}, w, g_neg[i], y_nodes[i]); // writes the cyclic node
    }
}

CompiledBundle compile(const eol::EndOfLineInstance& inst, const Rational& eps,
                       const Rational& delta, const Rational& corner_tau) {
    CompiledBundle bundle;
    bundle.n = inst.n;
    bundle.dim = 2 * inst.n + 2;
    bundle.eps = eps;
    bundle.delta = delta;
    bundle.corner_tau = corner_tau;

    Compiler comp(bundle.circuit, eps, delta, corner_tau);
    for (int i = 0; i < bundle.dim; ++i)
        bundle.y_nodes.push_back(comp.named("y" + std::to_string(i)));

    eol::HStepCircuits steps = eol::build_h_step_circuits(inst);
    auto samples = comp.build_equiangle(bundle.y_nodes);

    std::vector<DisplacementBlock> blocks;
    blocks.reserve(samples.size());
    for (std::size_t l = 0; l < samples.size(); ++l) {
        std::string tag = "s" + std::to_string(l);
        CubeDecode dec = comp.build_cube_decode(samples[l], steps, tag);
        PolarBlock polar = comp.build_polar_block(samples[l], dec, tag);
        blocks.push_back(comp.build_displacement_block(samples[l], dec, polar, tag));
    }
    auto [gp, gn] = comp.build_average(blocks, "");
    bundle.g_pos = gp;
    bundle.g_neg = gn;
    comp.close_loop(bundle.y_nodes, gp, gn);
    bundle.symbols = comp.symbols_;
    bundle.total_gates = static_cast<long long>(bundle.circuit.gates().size());
    return bundle;
}

std::vector<double> extract_point(const CompiledBundle& bundle, const gc::Assignment& x) {
    std::vector<double> y;
    y.reserve(bundle.y_nodes.size());
    for (int node : bundle.y_nodes) y.push_back(x[node]);
    return y;
}

void write_symbols(std::ostream& os, const CompiledBundle& bundle) {
    for (const auto& [name, node] : bundle.symbols)
        os << name << ' ' << bundle.circuit.name_of(node) << '\n';
}

} // namespace ppadkit::b2c

#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

#include "doctest.h"
#include "ppadkit/brouwer2circuit.hpp"
#include "ppadkit/gadgets.hpp"
#include "test_util.hpp"

using namespace ppadkit;
using namespace ppadkit::b2c;
using testutil::end_vertex;
using testutil::inst_n1;
using testutil::max_norm;
using testutil::subcube_center;

namespace {

const Rational kEps(1, 4096);
const double kE = 1.0 / 4096.0;
const double kSE = 1.0 / 64.0;
const double kQE = 1.0 / 8.0; // eps^{1/4}

struct Setup {
    gc::GeneralizedCircuit c;
    Compiler comp{c, kEps, Rational(1, 44), Rational(1, 24)};
    std::vector<int> y;
    eol::EndOfLineInstance inst = inst_n1();
    eol::HStepCircuits steps = eol::build_h_step_circuits(inst);

    Setup() {
        for (int i = 0; i < 4; ++i) y.push_back(c.add_node("y" + std::to_string(i)));
    }
};

gc::Assignment run_pinned(const gc::GeneralizedCircuit& c, const std::vector<int>& pins,
                          const std::vector<double>& vals) {
    std::unordered_map<int, double> m;
    for (std::size_t i = 0; i < pins.size(); ++i) m[pins[i]] = vals[i];
    return gc::ideal_forward(c, m);
}

} // namespace

TEST_CASE("equiangle translates") {
    Setup s;
    auto samples = s.comp.build_equiangle(s.y);
    CHECK(samples.size() == 64);
    auto x = run_pinned(s.c, s.y, {0.4, 0.45, 0.38, 0.41});
    CHECK(x[samples[0][0]] == 0.4); // the l = 0 block is a plain copy
    CHECK(x[samples[1][0]] == doctest::Approx(0.4 + 6.0 / 4096.0).epsilon(1e-14));
    CHECK(x[samples[63][3]] == doctest::Approx(0.41 + 6.0 * 63 / 4096.0).epsilon(1e-14));
    // saturation at 1
    auto x2 = run_pinned(s.c, s.y, {0.999, 0.4, 0.4, 0.4});
    CHECK(x2[samples[63][0]] == 1.0);
}

TEST_CASE("the translate ladder satisfies the one-boundary property") {
    // at most one translate can sit near any half-wall unless every
    // translate is within the corner threshold of one
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1.0 / 3.0, 2.0 / 3.0);
    for (int trial = 0; trial < 20000; ++trial) {
        double y[4];
        for (double& v : y) v = u(rng);
        int boundary = 0;
        bool all_corner = true;
        for (int l = 0; l < 64; ++l) {
            bool near = false;
            int close_coords = 0;
            for (double v : y) {
                double s = std::min(v + 6.0 * l * kE, 1.0);
                if (std::abs(s - 0.5) <= kE) near = true;
                if (std::abs(s - 0.5) < kQE) ++close_coords;
            }
            boundary += near;
            all_corner = all_corner && close_coords >= 2;
        }
        if (!all_corner) CHECK(boundary <= 1);
    }
}

TEST_CASE("cube decode extracts bits, steps and facet centers") {
    Setup s;
    auto samples = s.comp.build_equiangle(s.y);
    auto dec = s.comp.build_cube_decode(samples[0], s.steps, "s0");

    // the end subcube of the n=1 instance: vertex (1,1,0), all walls far
    auto x = run_pinned(s.c, s.y, {0.55, 0.61, 0.45, 0.41});
    CHECK(x[dec.b[0]] == 1.0); // upper-cell indicator
    CHECK(x[dec.b[1]] == 1.0);
    CHECK(x[dec.b[2]] == 0.0);
    CHECK(x[dec.b[3]] == 0.0);
    // end vertex: the step circuit reports no successor, so every exit bit
    // is clear and the entry arrives through the phase axis from above
    CHECK(x[dec.t_out] == 0.0);
    CHECK(x[dec.t_in] == 1.0);
    CHECK(x[dec.bin_neg[2]] == 1.0); // (1,1,1) -> (1,1,0) travels down axis 3

    // entry facet center: 1/2 on the travel axis, cell centers elsewhere
    CHECK(x[dec.zin[2]] == doctest::Approx(0.5));
    CHECK(x[dec.zin[0]] == doctest::Approx(7.0 / 12.0));
    CHECK(x[dec.zin[3]] == doctest::Approx(5.0 / 12.0));
    // no exit: the out-center degenerates to the subcube center
    CHECK(x[dec.zout[2]] == doctest::Approx(5.0 / 12.0));
    CHECK(x[dec.zout[0]] == doctest::Approx(7.0 / 12.0));

    // home: the predecessor circuit raises the above-slice flag
    auto xh = run_pinned(s.c, s.y, {0.41, 0.43, 0.44, 0.46});
    for (int i = 0; i < 3; ++i) CHECK(xh[dec.ph[i]] == 0.0);
    CHECK(xh[dec.ph[3]] == 1.0);
    CHECK(xh[dec.bin_neg[3]] == 1.0); // enters downward through the slice top
    CHECK(xh[dec.zin[3]] == doctest::Approx(0.5));
}

TEST_CASE("polar block approximates the max-norm coordinates") {
    Setup s;
    auto samples = s.comp.build_equiangle(s.y);
    auto dec = s.comp.build_cube_decode(samples[0], s.steps, "s0");
    auto pol = s.comp.build_polar_block(samples[0], dec, "s0");

    // inside the end subcube, offset from the entry-facet center along a
    // free coordinate; oracle: maxnorm_polar against the facet center
    brouwer::BrouwerInstance binst(s.inst);
    brouwer::Point zin{7.0 / 12.0, 7.0 / 12.0, 0.5, 5.0 / 12.0};
    brouwer::Point pt = zin;
    pt[0] += 1.0 / 24.0;
    pt[2] = 0.45; // into the cell, off the facet
    auto pc = brouwer::maxnorm_polar({zin[0], zin[1], zin[3]}, {pt[0], pt[1], pt[3]});
    auto x = run_pinned(s.c, s.y, pt);
    CHECK(std::abs(x[pol.rin] - pc.r) <= 10 * kSE);
    CHECK(pc.r == doctest::Approx(1.0 / 24.0));
    double p0 = x[pol.pin_pos[0]] - x[pol.pin_neg[0]];
    CHECK(std::abs(p0 - 1.0) <= 0.15); // the unit direction, up to divider error

    // wall distances: u measures the entry axis, and rho = max(u, v)
    CHECK(std::abs(x[pol.u] - 0.05) <= 3 * kE);
    CHECK(std::abs(x[pol.v] - 0.0) <= 3 * kE);
}

TEST_CASE("displacement block handles off-tube, corner and tube samples") {
    Setup s;
    brouwer::BrouwerInstance binst(s.inst);
    auto samples = s.comp.build_equiangle(s.y);
    auto dec = s.comp.build_cube_decode(samples[0], s.steps, "s0");
    auto pol = s.comp.build_polar_block(samples[0], dec, "s0");
    auto blk = s.comp.build_displacement_block(samples[0], dec, pol, "s0");

    auto estimate = [&](const std::vector<double>& y) {
        auto x = run_pinned(s.c, s.y, y);
        std::vector<double> g(4);
        for (int i = 0; i < 4; ++i) g[i] = x[blk.g_pos[i]] - x[blk.g_neg[i]];
        return g;
    };
    const double d = binst.delta;

    // off-tube subcube: the one-sample estimate already points straight up
    std::vector<double> off{7.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0};
    auto g = estimate(off);
    CHECK(std::abs(g[3] - d) <= 10 * kSE);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(g[i]) <= 10 * kSE);

    // corner sample: two coordinates within tau of their walls
    std::vector<double> corner{0.5 + 0.005, 0.5 - 0.005, 0.45, 0.44};
    g = estimate(corner);
    CHECK(std::abs(g[3] - d) <= 10 * kSE);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(g[i]) <= 10 * kSE);

    // interior tube samples against the direct evaluator
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> cell(0.012, 1.0 / 6.0 - 0.012);
    for (int t = 0; t < 60; ++t) {
        std::uint64_t v = rng() % 8;
        if (binst.vertex_info(v).status == eol::HInfo::Status::OffPath) continue;
        std::vector<double> y(4);
        for (int i = 0; i < 3; ++i) y[i] = (((v >> i) & 1) ? 0.5 : 1.0 / 3.0) + cell(rng);
        y[3] = 1.0 / 3.0 + cell(rng);
        // stay away from the corner detector so the tube path is active
        bool near = false;
        for (int i = 0; i < 4; ++i) near |= std::abs(y[i] - 0.5) < 1.0 / 24.0 + 0.01;
        if (near) continue;
        std::vector<double> gt(4);
        brouwer::displacement(binst, y.data(), gt.data());
        g = estimate(y);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(g[i] - gt[i]) <= 12 * kSE);
    }
}

TEST_CASE("averaging dampens a single corrupted block") {
    Setup s;
    s.comp.build_equiangle(s.y); // fixes the dimension
    std::vector<DisplacementBlock> blocks(64);
    std::vector<int> pins = s.y; // the equiangle copies still read the y nodes
    std::vector<double> vals(4, 0.4);
    for (int l = 0; l < 64; ++l) {
        for (int i = 0; i < 4; ++i) {
            blocks[l].g_pos.push_back(s.c.add_node());
            blocks[l].g_neg.push_back(s.c.add_node());
            pins.push_back(blocks[l].g_pos[i]);
            pins.push_back(blocks[l].g_neg[i]);
            vals.push_back(0.4);
            vals.push_back(0.1);
        }
    }
    auto [gp, gn] = s.comp.build_average(blocks, "avg");
    auto x = run_pinned(s.c, pins, vals);
    CHECK(std::abs(x[gp[0]] - 0.4) <= 1e-9); // equal blocks reproduce the value
    CHECK(std::abs(x[gn[0]] - 0.1) <= 1e-9);

    vals[4] = 1.0; // corrupt one block's positive part entirely
    auto x2 = run_pinned(s.c, pins, vals);
    CHECK(std::abs(x2[gp[0]] - x[gp[0]]) <= kSE + 1e-12);
}

TEST_CASE("close_loop writes the cyclic nodes exactly once") {
    Setup s;
    s.comp.build_equiangle(s.y);
    std::vector<int> gp, gn;
    for (int i = 0; i < 4; ++i) {
        gp.push_back(s.c.add_node());
        gn.push_back(s.c.add_node());
    }
    s.comp.close_loop(s.y, gp, gn);
    CHECK_THROWS_AS(s.comp.close_loop(s.y, gp, gn), std::invalid_argument);
}

TEST_CASE("compile: budget, symbols, loop-only violations and fidelity") {
    auto inst = inst_n1();
    brouwer::BrouwerInstance binst(inst);
    CompiledBundle bundle = compile(inst, kEps);
    const int D = 4, K = 64;

    // closed-form gate budget assembled from the block and gadget counts
    auto steps = eol::build_h_step_circuits(inst);
    auto non_input = [](const BoolCircuit& bc) {
        long long n = 0;
        for (const auto& g : bc.gates) n += g.op != BoolOp::Input;
        return n;
    };
    long long ngs = non_input(steps.step_succ), ngp = non_input(steps.step_pred);
    long long mult = 5 * K + 2, divi = 4 * K + 2;
    long long equi = D * (2 * K - 1);
    long long decode = ngs + ngp + 21 * D + 1;
    long long polar = 1 + 3 * D + 2 * (3 * D - 1) + 2 + 1 + 3 + 4 + D +
                      2 * (4 * D + (2 * D + 6) * K + 3) + 2 + D * (40 + 16 * K);
    long long rings = 25;
    long long disp = 2 * rings + (4 * D * mult + 2) + 2 + 1 + 8 + 3 + 2 * divi +
                     2 * (2 * mult + 1) + 2 + 4 * mult + D * (4 * mult + 26) +
                     (D + D * (D - 1) + 2) + 2 + (D * (2 * mult + 4) + 2);
    long long average = 2 * D * (2 * K + 2);
    long long total = equi + K * (decode + polar + disp) + average + 2 * D;
    CHECK(bundle.total_gates == total);

    // every per-sample symbol is present exactly once
    std::map<std::string, int> seen;
    for (auto& [name, node] : bundle.symbols) ++seen[name];
    for (int l = 0; l < K; ++l) {
        std::string tag = "s" + std::to_string(l);
        for (const char* base : {".rin", ".rout", ".Tin", ".Tout", ".corner"})
            CHECK(seen[tag + base] == 1);
        for (int i = 0; i < D; ++i) {
            for (const char* base : {".b", ".sh", ".ph", ".bin+", ".bin-", ".bout+", ".bout-",
                                     ".zin", ".zout", ".pin+", ".pin-", ".pout+", ".pout-",
                                     ".g+", ".g-"})
                CHECK(seen[tag + base + std::to_string(i)] == 1);
        }
    }
    for (int i = 0; i < D; ++i) {
        CHECK(seen["y" + std::to_string(i)] == 1);
        CHECK(seen["g+" + std::to_string(i)] == 1);
        CHECK(seen["g-" + std::to_string(i)] == 1);
    }

    // pinning y at a non-fixed point violates exactly the loop gates
    std::vector<double> off{7.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0};
    auto x = run_pinned(bundle.circuit, bundle.y_nodes, off);
    auto bad = gc::check_assignment(bundle.circuit, x, kE);
    CHECK(!bad.empty());
    for (int gi : bad) {
        const auto& g = bundle.circuit.gates()[gi];
        bool is_loop = false;
        for (int yn : bundle.y_nodes) is_loop |= g.out == yn;
        CHECK(is_loop);
    }

    // forward fidelity against the direct evaluator (the frozen constant
    // 0.35 was calibrated on the n=1 instance)
    gc::ForwardPlan plan(bundle.circuit, bundle.y_nodes);
    gc::Assignment vals(bundle.circuit.n_nodes(), std::numeric_limits<double>::quiet_NaN());
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 400; ++t) {
        std::vector<double> y(D);
        for (int i = 0; i < D - 1; ++i) y[i] = 2.0 / 6.0 + u(rng) / 3.0;
        y[D - 1] = 2.0 / 6.0 + u(rng) / 6.0;
        for (int i = 0; i < D; ++i) vals[bundle.y_nodes[i]] = y[i];
        plan.run(bundle.circuit, vals);
        std::vector<double> gt(D);
        brouwer::displacement(binst, y.data(), gt.data());
        for (int i = 0; i < D; ++i)
            worst = std::max(worst,
                             std::abs(vals[bundle.g_pos[i]] - vals[bundle.g_neg[i]] - gt[i]));
    }
    CHECK(worst <= 0.35 * kQE);
}

TEST_CASE("corner dominance holds for both forced detector values") {
    auto inst = inst_n1();
    CompiledBundle bundle = compile(inst, kEps);
    std::vector<int> corner_nodes;
    for (auto& [name, node] : bundle.symbols)
        if (name.find(".corner") != std::string::npos) corner_nodes.push_back(node);
    REQUIRE(corner_nodes.size() == 64);

    std::vector<int> pins = bundle.y_nodes;
    pins.insert(pins.end(), corner_nodes.begin(), corner_nodes.end());
    gc::ForwardPlan plan(bundle.circuit, pins);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0 / 10.0, 1.0 / 10.0);
    const double d = 1.0 / 44.0;
    for (double forced : {0.0, 1.0}) {
        for (int t = 0; t < 40; ++t) {
            // corner points: at least two coordinates close to 1/2
            std::vector<double> y{0.5 + u(rng) / 10, 0.5 + u(rng) / 10, 0.42 + u(rng) / 4,
                                  0.42 + u(rng) / 20};
            gc::Assignment vals(bundle.circuit.n_nodes(),
                                std::numeric_limits<double>::quiet_NaN());
            for (int i = 0; i < 4; ++i) vals[bundle.y_nodes[i]] = y[i];
            for (int cn : corner_nodes) vals[cn] = forced;
            plan.run(bundle.circuit, vals);
            std::vector<double> want{0, 0, 0, d};
            for (int i = 0; i < 4; ++i) {
                double est = vals[bundle.g_pos[i]] - vals[bundle.g_neg[i]];
                CHECK(std::abs(est - want[i]) <= 10 * kSE);
            }
        }
    }
}

TEST_CASE("decoding a solved bundle reaches the planted solution") {
    auto inst = inst_n1();
    brouwer::BrouwerInstance binst(inst);
    CompiledBundle bundle = compile(inst, kEps);

    brouwer::Point y0 = subcube_center(binst, end_vertex(binst));
    std::unordered_map<int, double> pins;
    for (int i = 0; i < binst.dim; ++i) pins[bundle.y_nodes[i]] = y0[i];
    gc::SolveOptions opts;
    opts.initial = gc::ideal_forward(bundle.circuit, pins);
    opts.soft_width = kE / 4.0;
    opts.restarts = 1;
    auto sol = gc::solve_tiny(bundle.circuit, kE, 2000, opts);
    REQUIRE(sol.has_value());
    CHECK(gc::check_assignment(bundle.circuit, *sol, kE).empty());

    // the certificate's y sits in the end subcube; the cloud-centroid
    // compensation plus flow refinement lands on the planted fixed point
    auto y = extract_point(bundle, *sol);
    double shift = 3.0 * (64 - 1) * kE;
    for (int i = 0; i < binst.dim - 1; ++i) y[i] = std::min(y[i] + shift, 1.0);
    auto refined = brouwer::iterate_to_fixed_point(binst, y, binst.delta / 4);
    auto dec = brouwer::decode_fixed_point(binst, refined, binst.delta / 2);
    REQUIRE(dec.has_value());
    CHECK(bits_to_uint(*dec) == 1);
    CHECK(verify_eol_solution(inst, *dec));
}

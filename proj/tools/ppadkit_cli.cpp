// Command-line front end for the reduction pipeline: instance generation,
// stage compilation, verification, desk-scale solving and backward decoding.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"

#include "ppadkit/brouwer.hpp"
#include "ppadkit/brouwer2circuit.hpp"
#include "ppadkit/endofline.hpp"
#include "ppadkit/fanout2.hpp"
#include "ppadkit/games.hpp"
#include "ppadkit/gcircuit.hpp"
#include "ppadkit/pipeline.hpp"

using namespace ppadkit;

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_point(const std::string& csv) {
    std::vector<double> pt;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) pt.push_back(std::stod(tok));
    return pt;
}

BitVec parse_bits(const std::string& s) {
    BitVec b;
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("bit string expects 0/1");
        b.push_back(c == '1');
    }
    return b;
}

eol::EndOfLineInstance load_eol(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open " + path);
    return eol::parse_instance(f);
}

gc::GeneralizedCircuit load_circuit(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open " + path);
    return gc::parse(f);
}

games::PolymatrixGame load_game(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open " + path);
    return games::parse_game(f);
}

char fmt_buf[64];
const char* fmt17(double v) {
    std::snprintf(fmt_buf, sizeof fmt_buf, "%.17g", v);
    return fmt_buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reduction pipeline toolkit"};
    app.require_subcommand(1);

    std::string in_file, out_file, aux_file, sym_file;
    std::string point_csv, bits_arg, edges_str, axes_str;
    std::string eps_str = "1/4096", eps_prime_str, delta_str = "1/44";
    double eps_d = 0.01, tol = 1.0 / 88.0;
    int n_bits = 1, resolution = 96;
    long long budget = 400000;
    bool use_ane = false, refine = false;
    double shift = 0.0;

    auto* gen = app.add_subcommand("gen-eol", "emit a truth-table instance from an edge list");
    gen->add_option("--n", n_bits, "bit width")->required();
    gen->add_option("--edges", edges_str, "comma list of a>b edges, e.g. 0>1,1>3")->required();
    gen->add_option("out", out_file, "output instance file")->required();

    auto* walk = app.add_subcommand("embed-walk", "walk the embedded hypercube path");
    walk->add_option("instance", in_file)->required();
    walk->add_option("--state", bits_arg, "start state as 2n+1 bits (u, v, phase)")->required();

    auto* ev = app.add_subcommand("eval", "evaluate the displacement and map at a point");
    ev->add_option("instance", in_file)->required();
    ev->add_option("--point", point_csv, "comma-separated coordinates")->required();
    ev->add_option("--delta", delta_str, "displacement magnitude (rational)");

    auto* plot = app.add_subcommand("slice-plot", "CSV field over a 2-D slice");
    plot->add_option("instance", in_file)->required();
    plot->add_option("--axes", axes_str, "two axes, e.g. 0,3")->required();
    plot->add_option("--base", point_csv, "base point coordinates")->required();
    plot->add_option("--resolution", resolution);
    plot->add_option("-o,--out", out_file)->required();

    auto* cc = app.add_subcommand("compile-circuit", "compile the fixed-point circuit");
    cc->add_option("instance", in_file)->required();
    cc->add_option("out", out_file)->required();
    cc->add_option("--eps", eps_str, "gate tolerance (rational, 1/sqrt integral)");
    cc->add_option("--symbols", sym_file, "symbol table output");

    auto* fo = app.add_subcommand("fanout2", "cap circuit fan-out at two");
    fo->add_option("in", in_file)->required();
    fo->add_option("out", out_file)->required();
    fo->add_option("--eps-prime", eps_prime_str, "unary bus tolerance (rational)")->required();

    auto* cg = app.add_subcommand("compile-game", "compile a circuit into a polymatrix game");
    cg->add_option("in", in_file)->required();
    cg->add_option("out", out_file)->required();
    cg->add_option("--eps", eps_d, "target equilibrium tolerance");

    auto* verify = app.add_subcommand("verify", "verify a stage certificate");
    verify->require_subcommand(1);
    auto* veol = verify->add_subcommand("eol", "candidate against the instance");
    veol->add_option("instance", in_file)->required();
    veol->add_option("--candidate", bits_arg)->required();
    auto* vcirc = verify->add_subcommand("circuit", "assignment against a circuit");
    vcirc->add_option("circuit", in_file)->required();
    vcirc->add_option("assignment", aux_file)->required();
    vcirc->add_option("--eps", eps_d)->required();
    auto* vgame = verify->add_subcommand("game", "profile against a game");
    vgame->add_option("game", in_file)->required();
    vgame->add_option("profile", aux_file)->required();
    vgame->add_option("--eps", eps_d)->required();
    vgame->add_flag("--ane", use_ane, "check the mixed-response notion instead");
    auto* vpoint = verify->add_subcommand("point", "approximate fixed point");
    vpoint->add_option("instance", in_file)->required();
    vpoint->add_option("--point", point_csv)->required();
    vpoint->add_option("--tol", tol);

    auto* solve = app.add_subcommand("solve", "desk-scale certificate search");
    solve->require_subcommand(1);
    auto* scirc = solve->add_subcommand("circuit", "damped sweeps over gate functions");
    scirc->add_option("circuit", in_file)->required();
    scirc->add_option("-o,--out", out_file)->required();
    scirc->add_option("--eps", eps_d)->required();
    scirc->add_option("--budget", budget);
    scirc->add_option("--seed-assignment", aux_file);
    auto* sgame = solve->add_subcommand("game", "damped response dynamics");
    sgame->add_option("game", in_file)->required();
    sgame->add_option("-o,--out", out_file)->required();
    sgame->add_option("--eps", eps_d)->required();
    sgame->add_option("--budget", budget);
    sgame->add_option("--seed-profile", aux_file);
    sgame->add_flag("--ane", use_ane);

    auto* dec = app.add_subcommand("decode", "map a certificate one stage back");
    dec->require_subcommand(1);
    auto* dgame = dec->add_subcommand("game", "profile to circuit assignment");
    dgame->add_option("circuit", in_file)->required();
    dgame->add_option("profile", aux_file)->required();
    dgame->add_option("-o,--out", out_file)->required();
    auto* dcirc = dec->add_subcommand("circuit", "assignment to input point");
    dcirc->add_option("circuit", in_file)->required();
    dcirc->add_option("assignment", aux_file)->required();
    auto* dpoint = dec->add_subcommand("point", "fixed point to an EOL candidate");
    dpoint->add_option("instance", in_file)->required();
    dpoint->add_option("--point", point_csv)->required();
    dpoint->add_option("--tol", tol);
    dpoint->add_option("--shift", shift, "equiangle centroid compensation");
    dpoint->add_flag("--refine", refine, "follow the flow before decoding");

    auto* pipe = app.add_subcommand("pipeline", "build every stage artifact");
    pipe->add_option("instance", in_file)->required();
    pipe->add_option("--out", out_file, "output directory")->required();
    pipe->add_option("--eps", eps_str);
    pipe->add_option("--eps-prime", eps_prime_str);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen) {
            std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
            std::stringstream ss(edges_str);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                auto gt = tok.find('>');
                if (gt == std::string::npos)
                    throw std::invalid_argument("edges expect the a>b form");
                edges.push_back({std::stoull(tok.substr(0, gt)), std::stoull(tok.substr(gt + 1))});
            }
            auto inst = eol::make_line_instance(n_bits, edges);
            std::ofstream f(out_file);
            eol::write_instance(f, inst);
        } else if (*walk) {
            auto inst = load_eol(in_file);
            eol::EmbeddedState s = eol::state_from_bits(parse_bits(bits_arg), inst.n);
            std::set<std::string> seen;
            while (true) {
                std::string cur = bits_str(eol::state_to_bits(s));
                auto info = eol::h_info(inst, eol::state_to_bits(s));
                const char* label[] = {"off-path", "home", "start", "end", "mid"};
                std::cout << cur << "  " << label[static_cast<int>(info.status)] << "\n";
                if (!seen.insert(cur).second) {
                    std::cout << "(cycle closed)\n";
                    break;
                }
                eol::EmbeddedState nxt = eol::h_successor(inst, s);
                if (nxt == s) break;
                s = nxt;
            }
        } else if (*ev) {
            auto inst = load_eol(in_file);
            Rational delta = Rational::parse(delta_str);
            brouwer::BrouwerInstance binst(std::move(inst), delta.to_double());
            auto pt = parse_point(point_csv);
            auto g = brouwer::displacement(binst, pt);
            auto f = brouwer::brouwer_f(binst, pt);
            std::cout << "g:";
            for (double v : g) std::cout << ' ' << fmt17(v);
            std::cout << "\nf:";
            for (double v : f) std::cout << ' ' << fmt17(v);
            std::cout << "\n";
        } else if (*plot) {
            auto inst = load_eol(in_file);
            brouwer::BrouwerInstance binst(std::move(inst));
            auto axes = parse_point(axes_str);
            if (axes.size() != 2) throw std::invalid_argument("--axes wants two indices");
            std::ofstream f(out_file);
            pipeline::slice_plot(f, binst, static_cast<int>(axes[0]), static_cast<int>(axes[1]),
                                 parse_point(point_csv), resolution);
        } else if (*cc) {
            auto inst = load_eol(in_file);
            auto bundle = b2c::compile(inst, Rational::parse(eps_str));
            std::ofstream f(out_file);
            gc::serialize(f, bundle.circuit);
            if (!sym_file.empty()) {
                std::ofstream sf(sym_file);
                b2c::write_symbols(sf, bundle);
            }
        } else if (*fo) {
            auto circuit = load_circuit(in_file);
            auto bounded = fanout2::transform_fanout2(circuit, Rational::parse(eps_prime_str));
            std::ofstream f(out_file);
            gc::serialize(f, bounded);
        } else if (*cg) {
            auto circuit = load_circuit(in_file);
            auto compiled = games::compile_circuit_to_game(circuit, eps_d);
            std::ofstream f(out_file);
            games::write_game(f, compiled.game);
        } else if (*verify) {
            if (*veol) {
                auto inst = load_eol(in_file);
                bool ok = eol::verify_eol_solution(inst, parse_bits(bits_arg));
                std::cout << (ok ? "valid solution\n" : "not a solution\n");
                return ok ? 0 : kExitVerifyFailed;
            }
            if (*vcirc) {
                auto circuit = load_circuit(in_file);
                std::ifstream af(aux_file);
                auto x = gc::parse_assignment(af, circuit);
                auto bad = gc::check_assignment(circuit, x, eps_d);
                std::cout << bad.size() << " violated gates\n";
                for (std::size_t i = 0; i < bad.size() && i < 32; ++i) {
                    const auto& g = circuit.gates()[bad[i]];
                    std::cout << "  gate " << bad[i] << " -> " << circuit.name_of(g.out) << "\n";
                }
                return bad.empty() ? 0 : kExitVerifyFailed;
            }
            if (*vgame) {
                auto game = load_game(in_file);
                std::ifstream pf(aux_file);
                auto x = games::parse_profile(pf, game);
                if (use_ane) {
                    auto bad = games::verify_ane(game, x, eps_d);
                    std::cout << bad.size() << " players off their mixed best response\n";
                    return bad.empty() ? 0 : kExitVerifyFailed;
                }
                auto bad = games::verify_wsne(game, x, eps_d);
                std::cout << bad.size() << " supported suboptimal actions\n";
                for (std::size_t i = 0; i < bad.size() && i < 32; ++i)
                    std::cout << "  player " << bad[i].player << " action " << bad[i].action
                              << "\n";
                return bad.empty() ? 0 : kExitVerifyFailed;
            }
            if (*vpoint) {
                auto inst = load_eol(in_file);
                brouwer::BrouwerInstance binst(std::move(inst));
                auto pt = parse_point(point_csv);
                auto g = brouwer::displacement(binst, pt);
                double norm = 0.0;
                for (double v : g) norm = std::max(norm, std::abs(v));
                std::cout << "|g|_inf = " << fmt17(norm) << "\n";
                return norm <= tol ? 0 : kExitVerifyFailed;
            }
        } else if (*solve) {
            if (*scirc) {
                auto circuit = load_circuit(in_file);
                gc::SolveOptions opts;
                opts.soft_width = eps_d / 4.0;
                if (!aux_file.empty()) {
                    std::ifstream af(aux_file);
                    opts.initial = gc::parse_assignment(af, circuit);
                    opts.restarts = 1;
                }
                auto sol = gc::solve_tiny(circuit, eps_d, budget, opts);
                if (!sol) {
                    std::cerr << "no satisfying assignment found within budget\n";
                    return kExitVerifyFailed;
                }
                std::ofstream f(out_file);
                gc::write_assignment(f, circuit, *sol);
            } else if (*sgame) {
                auto game = load_game(in_file);
                games::GameSolveOptions opts;
                opts.target_ane = use_ane;
                if (!aux_file.empty()) {
                    std::ifstream pf(aux_file);
                    opts.initial = games::parse_profile(pf, game);
                    opts.restarts = 1;
                }
                auto sol = games::solve_game_small(game, eps_d, budget, opts);
                if (!sol) {
                    std::cerr << "no equilibrium found within budget\n";
                    return kExitVerifyFailed;
                }
                std::ofstream f(out_file);
                games::write_profile(f, *sol);
            }
        } else if (*dec) {
            if (*dgame) {
                auto circuit = load_circuit(in_file);
                gc::Assignment x(circuit.n_nodes());
                std::ifstream pf(aux_file);
                std::string line;
                // profile rows: value players share ids with circuit nodes
                while (std::getline(pf, line)) {
                    if (line.empty()) continue;
                    std::istringstream ls(line);
                    long long p;
                    double p0, p1;
                    if (!(ls >> p >> p0 >> p1)) continue;
                    if (p < circuit.n_nodes()) x[p] = p1;
                }
                std::ofstream f(out_file);
                gc::write_assignment(f, circuit, x);
            } else if (*dcirc) {
                auto circuit = load_circuit(in_file);
                std::ifstream af(aux_file);
                auto x = gc::parse_assignment(af, circuit);
                std::string csv;
                for (int i = 0;; ++i) {
                    int node = circuit.node_by_name("y" + std::to_string(i));
                    if (node < 0) break;
                    if (i) csv += ",";
                    csv += fmt17(x[node]);
                }
                if (csv.empty()) throw std::invalid_argument("circuit carries no y nodes");
                std::cout << csv << "\n";
            } else if (*dpoint) {
                auto inst = load_eol(in_file);
                brouwer::BrouwerInstance binst(std::move(inst));
                auto pt = parse_point(point_csv);
                for (int i = 0; i < binst.dim - 1; ++i) pt[i] = std::min(pt[i] + shift, 1.0);
                if (refine) pt = brouwer::iterate_to_fixed_point(binst, pt, tol / 2.0);
                auto x = brouwer::decode_fixed_point(binst, pt, tol);
                if (!x) {
                    std::cerr << "point does not decode to a path terminal\n";
                    return kExitVerifyFailed;
                }
                std::cout << bits_str(*x) << "\n";
                return eol::verify_eol_solution(binst.eol_inst, *x) ? 0 : kExitVerifyFailed;
            }
        } else if (*pipe) {
            auto inst = load_eol(in_file);
            pipeline::Params params;
            params.eps = Rational::parse(eps_str);
            if (!eps_prime_str.empty()) params.eps_prime = Rational::parse(eps_prime_str);
            auto bundle = pipeline::run_pipeline(inst, params, out_file);
            std::cout << "wrote " << bundle.manifest_file.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}

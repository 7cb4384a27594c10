#include "ppadkit/games.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ppadkit::games {

int PolymatrixGame::add_player(int n_actions, char side_label) {
    if (n_actions < 1) throw std::invalid_argument("player needs at least one action");
    actions.push_back(n_actions);
    side.push_back(side_label);
    return n_players() - 1;
}

void PolymatrixGame::add_block(int from, int to, const std::vector<double>& payoffs) {
    if (from < 0 || from >= n_players() || to < 0 || to >= n_players() || from == to)
        throw std::invalid_argument("bad block endpoints");
    if (payoffs.size() != static_cast<std::size_t>(actions[from]) * actions[to])
        throw std::invalid_argument("payoff matrix shape mismatch");
    for (double v : payoffs)
        if (v < 0.0) throw std::invalid_argument("negative payoff");
    Block b;
    b.from = from;
    b.to = to;
    b.offset = pool.size();
    pool.insert(pool.end(), payoffs.begin(), payoffs.end());
    blocks.push_back(b);
}

int PolymatrixGame::max_degree() const {
    std::vector<std::set<int>> nb(n_players());
    for (const auto& b : blocks) {
        nb[b.from].insert(b.to);
        nb[b.to].insert(b.from);
    }
    int d = 0;
    for (const auto& s : nb) d = std::max(d, static_cast<int>(s.size()));
    return d;
}

bool PolymatrixGame::is_bipartite_by_side() const {
    for (const auto& b : blocks)
        if (side[b.from] == side[b.to]) return false;
    return true;
}

MixedProfile uniform_profile(const PolymatrixGame& g) {
    MixedProfile x(g.n_players());
    for (int p = 0; p < g.n_players(); ++p)
        x[p].assign(g.actions[p], 1.0 / g.actions[p]);
    return x;
}

void validate_profile(const PolymatrixGame& g, const MixedProfile& x) {
    if (static_cast<int>(x.size()) != g.n_players())
        throw std::invalid_argument("profile size mismatch");
    for (int p = 0; p < g.n_players(); ++p) {
        if (static_cast<int>(x[p].size()) != g.actions[p])
            throw std::invalid_argument("action count mismatch");
        double s = 0.0;
        for (double v : x[p]) {
            if (v < -1e-15) throw std::invalid_argument("negative probability");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument("probabilities must sum to 1");
    }
}

std::vector<std::vector<double>> action_utilities(const PolymatrixGame& g,
                                                  const MixedProfile& x) {
    std::vector<std::vector<double>> u(g.n_players());
    for (int p = 0; p < g.n_players(); ++p) u[p].assign(g.actions[p], 0.0);
    for (const auto& b : g.blocks) {
        const auto& xf = x[b.from];
        auto& ut = u[b.to];
        const int kf = g.actions[b.from], kt = g.actions[b.to];
        for (int af = 0; af < kf; ++af) {
            double w = xf[af];
            if (w == 0.0) continue;
            const double* row = g.pool.data() + b.offset + static_cast<std::size_t>(af) * kt;
            for (int at = 0; at < kt; ++at) ut[at] += w * row[at];
        }
    }
    return u;
}

double expected_payoff(const PolymatrixGame& g, const MixedProfile& x, int player, int action) {
    double u = 0.0;
    for (const auto& b : g.blocks) {
        if (b.to != player) continue;
        for (int af = 0; af < g.actions[b.from]; ++af)
            u += x[b.from][af] * g.pay(b, af, action);
    }
    return u;
}

std::vector<WsneViolation> verify_wsne(const PolymatrixGame& g, const MixedProfile& x,
                                       double eps) {
    validate_profile(g, x);
    auto u = action_utilities(g, x);
    std::vector<WsneViolation> bad;
    for (int p = 0; p < g.n_players(); ++p) {
        double mx = *std::max_element(u[p].begin(), u[p].end());
        for (int a = 0; a < g.actions[p]; ++a)
            if (x[p][a] > kSupportEps && u[p][a] < mx - eps) bad.push_back({p, a});
    }
    return bad;
}

std::vector<int> verify_ane(const PolymatrixGame& g, const MixedProfile& x, double eps) {
    validate_profile(g, x);
    auto u = action_utilities(g, x);
    std::vector<int> bad;
    for (int p = 0; p < g.n_players(); ++p) {
        double mx = *std::max_element(u[p].begin(), u[p].end());
        double mixed = 0.0;
        for (int a = 0; a < g.actions[p]; ++a) mixed += x[p][a] * u[p][a];
        if (mixed < mx - eps) bad.push_back(p);
    }
    return bad;
}

namespace {

// out anti-imitates w: she earns 1 exactly when their actions differ
const std::vector<double> kAntiImitation = {0.0, 1.0, 1.0, 0.0};

std::vector<double> mat2(double m00, double m01, double m10, double m11) {
    return {m00, m01, m10, m11};
}

} // namespace

GateGadget gadget_for_gate(gc::GateType type, const Rational& zeta) {
    GateGadget gg;
    gg.type = type;
    gg.zeta = zeta;
    gg.n_inputs = gc::gate_arity(type);
    PolymatrixGame& g = gg.game;
    for (int i = 0; i < gg.n_inputs; ++i) g.add_player(2, 'v');
    gg.w_player = g.add_player(2, 'g');
    gg.out_player = g.add_player(2, 'v');
    const int w = gg.w_player, out = gg.out_player;
    const double z = zeta.to_double();

    // matrices are row-major over [a_from][a_to]; blocks into w carry w's
    // payoffs, the block out of w carries out's anti-imitation payoffs
    switch (type) {
        case gc::GateType::Const:
            g.add_block(out, w, mat2(z, 0, z, 1));
            break;
        case gc::GateType::Scale:
            g.add_block(0, w, mat2(0, 0, z, 0));
            g.add_block(out, w, mat2(0, 0, 0, 1));
            break;
        case gc::GateType::Copy:
            g.add_block(0, w, mat2(0, 0, 1, 0));
            g.add_block(out, w, mat2(0, 0, 0, 1));
            break;
        case gc::GateType::Add:
            g.add_block(0, w, mat2(0, 0, 1, 0));
            g.add_block(1, w, mat2(0, 0, 1, 0));
            g.add_block(out, w, mat2(0, 0, 0, 1));
            break;
        case gc::GateType::Sub:
            g.add_block(0, w, mat2(0, 0, 1, 0));
            g.add_block(1, w, mat2(0, 0, 0, 1));
            g.add_block(out, w, mat2(0, 0, 0, 1));
            break;
        case gc::GateType::Less:
            g.add_block(0, w, mat2(0, 0, 0, 1));
            g.add_block(1, w, mat2(0, 0, 1, 0));
            break;
        case gc::GateType::Or:
            g.add_block(0, w, mat2(0, 0, 0.5, 0));
            g.add_block(1, w, mat2(0, 0, 0.5, 0));
            g.add_block(out, w, mat2(0, 0.25, 0, 0.25));
            break;
        case gc::GateType::And:
            g.add_block(0, w, mat2(0, 0, 0.5, 0));
            g.add_block(1, w, mat2(0, 0, 0.5, 0));
            g.add_block(out, w, mat2(0, 0.75, 0, 0.75));
            break;
        case gc::GateType::Not:
            g.add_block(0, w, mat2(0, 0, 0, 1));
            g.add_block(out, w, mat2(0.5, 0, 0.5, 0));
            break;
    }
    g.add_block(w, out, kAntiImitation);
    return gg;
}

bool certify_gadget(const GateGadget& gadget, double eps, double grid_step) {
    if (grid_step > eps / 4.0 + 1e-15)
        throw std::invalid_argument("grid step must be at most eps/4");
    const PolymatrixGame& g = gadget.game;
    const int n = g.n_players();
    const int steps = static_cast<int>(std::lround(1.0 / grid_step));
    std::vector<double> levels(steps + 1);
    for (int t = 0; t <= steps; ++t) levels[t] = static_cast<double>(t) / steps;

    // probability of action 1 per player
    std::vector<int> idx(n, 0);
    std::vector<double> p(n, 0.0);
    const double slack = eps + 2.0 * grid_step;

    gc::Gate gate;
    gate.type = gadget.type;
    gate.zeta = gadget.zeta;
    gate.out = gadget.n_inputs + 1;
    if (gadget.n_inputs >= 1) gate.in1 = 0;
    if (gadget.n_inputs == 2) gate.in2 = 1;
    gc::Assignment val(n + 2, 0.0);

    while (true) {
        for (int i = 0; i < n; ++i) p[i] = levels[idx[i]];
        // is this profile an eps-NE?
        bool ne = true;
        double u0[8] = {0}, u1[8] = {0};
        for (const auto& b : g.blocks) {
            double pf = p[b.from];
            u0[b.to] += (1.0 - pf) * g.pay(b, 0, 0) + pf * g.pay(b, 1, 0);
            u1[b.to] += (1.0 - pf) * g.pay(b, 0, 1) + pf * g.pay(b, 1, 1);
        }
        for (int q = 0; q < n && ne; ++q) {
            double mx = std::max(u0[q], u1[q]);
            if (1.0 - p[q] > kSupportEps && u0[q] < mx - eps) ne = false;
            if (p[q] > kSupportEps && u1[q] < mx - eps) ne = false;
        }
        if (ne) {
            if (gadget.n_inputs >= 1) val[0] = p[0];
            if (gadget.n_inputs == 2) val[1] = p[1];
            val[gate.out] = p[gadget.out_player];
            if (!gc::check_gate(gate, val, slack)) return false;
        }
        int d = 0;
        while (d < n && ++idx[d] > steps) idx[d++] = 0;
        if (d == n) break;
    }
    return true;
}

CompiledGame compile_circuit_to_game(const gc::GeneralizedCircuit& c, double eps) {
    (void)eps;
    if (c.max_fanout() > 2)
        throw std::invalid_argument("circuit must have fan-out at most 2");
    CompiledGame cg;
    cg.n_value_players = c.n_nodes();
    for (int v = 0; v < c.n_nodes(); ++v) cg.game.add_player(2, 'v');
    for (const auto& gate : c.gates()) {
        if (gc::gate_has_zeta(gate.type) && Rational(1) < gate.zeta &&
            gate.type == gc::GateType::Scale)
            throw std::invalid_argument("compiled games need scale parameters at most 1");
        GateGadget gg = gadget_for_gate(gate.type, gate.zeta);
        int w = cg.game.add_player(2, 'g');
        cg.gate_player.push_back(w);
        auto map_player = [&](int abstract) {
            if (abstract == gg.w_player) return w;
            if (abstract == gg.out_player) return gate.out;
            return abstract == 0 ? gate.in1 : gate.in2;
        };
        for (const auto& b : gg.game.blocks) {
            std::vector<double> payoffs(
                gg.game.pool.begin() + b.offset,
                gg.game.pool.begin() + b.offset + 4);
            cg.game.add_block(map_player(b.from), map_player(b.to), payoffs);
        }
    }
    return cg;
}

gc::Assignment assignment_from_profile(const CompiledGame& cg, const MixedProfile& x) {
    gc::Assignment out(cg.n_value_players);
    for (int v = 0; v < cg.n_value_players; ++v) out[v] = x[v][1];
    return out;
}

MixedProfile profile_from_assignment(const CompiledGame& cg, const gc::Assignment& x,
                                     double eps_ne) {
    const PolymatrixGame& g = cg.game;
    MixedProfile prof(g.n_players());
    for (int v = 0; v < cg.n_value_players; ++v) {
        double p = std::clamp(x[v], 0.0, 1.0);
        // solver residue near the clamps would otherwise leave dust support
        // on the dominated action
        if (p < 1e-6) p = 0.0;
        if (p > 1.0 - 1e-6) p = 1.0;
        prof[v] = {1.0 - p, p};
    }
    for (int w = cg.n_value_players; w < g.n_players(); ++w) prof[w] = {0.5, 0.5};
    // gate players see only value players, whose strategies are final
    std::vector<double> u0(g.n_players(), 0.0), u1(g.n_players(), 0.0);
    for (const auto& b : g.blocks) {
        if (b.to < cg.n_value_players) continue;
        double pf = prof[b.from][1];
        u0[b.to] += (1.0 - pf) * g.pay(b, 0, 0) + pf * g.pay(b, 1, 0);
        u1[b.to] += (1.0 - pf) * g.pay(b, 0, 1) + pf * g.pay(b, 1, 1);
    }
    for (int w = cg.n_value_players; w < g.n_players(); ++w) {
        double gap = u1[w] - u0[w];
        if (std::abs(gap) > 0.75 * eps_ne) prof[w] = gap > 0 ? MixedProfile::value_type{0.0, 1.0}
                                                             : MixedProfile::value_type{1.0, 0.0};
    }
    return prof;
}

MixedProfile ane_to_wsne(const PolymatrixGame& g, const MixedProfile& x, double eps) {
    if (!verify_ane(g, x, eps).empty())
        throw std::invalid_argument("input profile is not an eps-ANE");
    const double k = 1.0 + 1.0 / std::sqrt(eps);
    auto u = action_utilities(g, x);
    MixedProfile out(g.n_players());
    for (int p = 0; p < g.n_players(); ++p) {
        double mx = *std::max_element(u[p].begin(), u[p].end());
        out[p].assign(g.actions[p], 0.0);
        double kept = 0.0;
        for (int a = 0; a < g.actions[p]; ++a)
            if (u[p][a] >= mx - eps * k) {
                out[p][a] = x[p][a];
                kept += x[p][a];
            }
        if (kept <= 0.0) { // can only happen when all mass sat on cut actions
            int best = static_cast<int>(std::max_element(u[p].begin(), u[p].end()) -
                                        u[p].begin());
            out[p][best] = 1.0;
            continue;
        }
        for (auto& v : out[p]) v /= kept;
    }
    return out;
}

std::optional<MixedProfile> solve_game_small(const PolymatrixGame& g, double eps,
                                             long long budget, const GameSolveOptions& opts) {
    std::mt19937_64 rng(opts.rng_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double width = eps / 2.0;

    auto passes = [&](const MixedProfile& x) {
        return opts.target_ane ? verify_ane(g, x, eps).empty()
                               : verify_wsne(g, x, eps).empty();
    };

    long long left = budget;
    for (int restart = 0; restart < opts.restarts && left > 0; ++restart) {
        MixedProfile x;
        if (restart == 0 && opts.initial) {
            x = *opts.initial;
        } else {
            x = uniform_profile(g);
            if (restart > 0)
                for (auto& xi : x) {
                    double s = 0.0;
                    for (auto& v : xi) s += (v = unif(rng) + 1e-3);
                    for (auto& v : xi) v /= s;
                }
        }
        int sweeps = static_cast<int>(std::min<long long>(opts.sweeps, left));
        MixedProfile avg = x;
        for (int t = 0; t < sweeps; ++t) {
            --left;
            auto u = action_utilities(g, x);
            // decaying steps toward a response proportional to the clipped
            // advantage; the running average washes out comparator orbits
            double step = std::max(40.0 / (40.0 + t), 5e-4) * opts.damping;
            for (int p = 0; p < g.n_players(); ++p) {
                double mx = *std::max_element(u[p].begin(), u[p].end());
                double total = 0.0;
                for (int a = 0; a < g.actions[p]; ++a)
                    total += std::max(u[p][a] - mx + width, 0.0);
                for (int a = 0; a < g.actions[p]; ++a) {
                    double target = std::max(u[p][a] - mx + width, 0.0) / total;
                    x[p][a] += step * (target - x[p][a]);
                    avg[p][a] += (x[p][a] - avg[p][a]) / (t / 8 + 2);
                }
            }
            if ((t & 3) == 3 && (passes(avg) || passes(x))) {
                if (passes(avg)) return avg;
                return x;
            }
        }
        if (passes(avg)) return avg;
        if (passes(x)) return x;
    }
    return std::nullopt;
}

void write_game(std::ostream& os, const PolymatrixGame& g) {
    char buf[64];
    for (int p = 0; p < g.n_players(); ++p)
        os << "PLAYER " << p << ' ' << g.side[p] << ' ' << g.actions[p] << '\n';
    // pair blocks up: an EDGE line carries payoffs for j, then for i
    std::map<std::pair<int, int>, std::pair<const PolymatrixGame::Block*,
                                            const PolymatrixGame::Block*>> edges;
    for (const auto& b : g.blocks) {
        int i = std::min(b.from, b.to), j = std::max(b.from, b.to);
        auto& e = edges[{i, j}];
        if (b.from == i) e.first = &b;   // i -> j : j's payoffs
        else e.second = &b;              // j -> i : i's payoffs
    }
    for (auto& [key, e] : edges) {
        auto [i, j] = key;
        os << "EDGE " << i << ' ' << j << '\n';
        auto dump = [&](const PolymatrixGame::Block* b, int rows, int cols, bool transpose) {
            for (int r = 0; r < rows; ++r) {
                for (int col = 0; col < cols; ++col) {
                    double v = 0.0;
                    if (b) v = transpose ? g.pay(*b, col, r) : g.pay(*b, r, col);
                    std::snprintf(buf, sizeof buf, "%.17g", v);
                    os << buf << (col + 1 < cols ? " " : "");
                }
                os << '\n';
            }
        };
        // j's payoffs as an actions[i] x actions[j] matrix
        dump(e.first, g.actions[i], g.actions[j], false);
        // i's payoffs as an actions[j] x actions[i] matrix
        dump(e.second, g.actions[j], g.actions[i], false);
    }
}

PolymatrixGame parse_game(std::istream& is) {
    PolymatrixGame g;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& m) {
        throw std::invalid_argument("line " + std::to_string(lineno) + ": " + m);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "PLAYER") {
            int id, k;
            char side;
            if (!(ls >> id >> side >> k)) fail("malformed PLAYER line");
            if (id != g.n_players()) fail("players must be declared in order");
            g.add_player(k, side);
        } else if (tok == "EDGE") {
            int i, j;
            if (!(ls >> i >> j)) fail("malformed EDGE line");
            if (i < 0 || j < 0 || i >= g.n_players() || j >= g.n_players())
                fail("edge endpoint out of range");
            auto read_matrix = [&](int rows, int cols) {
                std::vector<double> m(static_cast<std::size_t>(rows) * cols);
                for (auto& v : m) {
                    if (!(is >> v)) fail("truncated payoff matrix");
                }
                std::getline(is, line); // consume the trailing newline
                lineno += rows;
                return m;
            };
            g.add_block(i, j, read_matrix(g.actions[i], g.actions[j]));
            g.add_block(j, i, read_matrix(g.actions[j], g.actions[i]));
        } else {
            fail("unknown directive '" + tok + "'");
        }
    }
    return g;
}

void write_profile(std::ostream& os, const MixedProfile& x) {
    char buf[64];
    for (std::size_t p = 0; p < x.size(); ++p) {
        os << p;
        for (double v : x[p]) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << ' ' << buf;
        }
        os << '\n';
    }
}

MixedProfile parse_profile(std::istream& is, const PolymatrixGame& g) {
    MixedProfile x(g.n_players());
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int p;
        ls >> p;
        if (p < 0 || p >= g.n_players()) throw std::invalid_argument("bad player id in profile");
        x[p].assign(g.actions[p], 0.0);
        for (auto& v : x[p])
            if (!(ls >> v)) throw std::invalid_argument("truncated profile row");
    }
    validate_profile(g, x);
    return x;
}

} // namespace ppadkit::games

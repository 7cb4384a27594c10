#include "ppadkit/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ppadkit::ext {

Coloring square_and_color(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    for (const auto& nb : adj)
        if (nb.size() > 3) throw std::invalid_argument("degree above 3");
    Coloring col;
    col.color.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        std::set<int> used;
        for (int w : adj[v])
            for (int z : adj[w])
                if (z != v && col.color[z] >= 0) used.insert(col.color[z]);
        int c = 0;
        while (used.count(c)) ++c;
        col.color[v] = c;
        col.n_colors = std::max(col.n_colors, c + 1);
    }
    return col;
}

namespace {

struct Bipartition {
    std::vector<int> side1, side2; // vertex ids
    std::vector<int> type_of;      // vertex -> type index on its side
    std::vector<int> which;        // vertex -> 1 or 2
};

Bipartition split_sides(const games::PolymatrixGame& g) {
    if (g.n_players() == 0) throw std::invalid_argument("empty game");
    if (!g.is_bipartite_by_side())
        throw std::invalid_argument("game is not bipartite by its side labels");
    Bipartition bp;
    bp.type_of.assign(g.n_players(), -1);
    bp.which.assign(g.n_players(), 0);
    char first = g.side[0];
    for (int v = 0; v < g.n_players(); ++v) {
        if (g.actions[v] != 2) throw std::invalid_argument("construction needs 2-action players");
        if (g.side[v] == first) {
            bp.type_of[v] = static_cast<int>(bp.side1.size());
            bp.which[v] = 1;
            bp.side1.push_back(v);
        } else {
            bp.type_of[v] = static_cast<int>(bp.side2.size());
            bp.which[v] = 2;
            bp.side2.push_back(v);
        }
    }
    return bp;
}

// undirected adjacency and the per-pair payoff blocks
struct EdgeView {
    std::vector<std::vector<int>> adj;
    // payoff of `vertex` in the edge game with `other`, at (own, other) actions
    std::map<std::pair<int, int>, std::array<std::array<double, 2>, 2>> pay;
};

EdgeView edge_view(const games::PolymatrixGame& g, bool rescale) {
    EdgeView ev;
    ev.adj.resize(g.n_players());
    std::set<std::pair<int, int>> seen;
    for (const auto& b : g.blocks) {
        auto key = std::minmax(b.from, b.to);
        if (!seen.count(key)) {
            seen.insert(key);
            ev.adj[b.from].push_back(b.to);
            ev.adj[b.to].push_back(b.from);
        }
        // block stores `to`'s payoffs at [a_from][a_to]
        auto& table = ev.pay[{b.to, b.from}];
        for (int own = 0; own < 2; ++own)
            for (int other = 0; other < 2; ++other) {
                double v = g.pay(b, other, own);
                if (v < 0.0 || v > 1.0)
                    throw std::invalid_argument("payoffs must lie in [0,1]");
                table[own][other] = rescale ? 0.5 + 0.5 * v : v;
            }
    }
    return ev;
}

} // namespace

std::vector<BayesViolation> verify_bayes_ane(const BayesianGame& bg, const BayesStrategy& s,
                                             double eps) {
    std::vector<BayesViolation> bad;
    auto check_player = [&](int player) {
        int types = player == 1 ? bg.types1 : bg.types2;
        int acts = player == 1 ? bg.actions1 : bg.actions2;
        for (int t = 0; t < types; ++t) {
            double marginal = 0.0;
            std::vector<double> u(acts, 0.0);
            for (const auto& [t1, t2, pr] : bg.dist) {
                int own = player == 1 ? t1 : t2;
                if (own != t) continue;
                double p = pr.to_double();
                marginal += p;
                int opp_type = player == 1 ? t2 : t1;
                const auto& opp_mix = player == 1 ? s.x2[opp_type] : s.x1[opp_type];
                const auto& table = player == 1 ? bg.u1[t1] : bg.u2[t2];
                for (int a = 0; a < acts; ++a) {
                    double e = 0.0;
                    for (std::size_t o = 0; o < opp_mix.size(); ++o)
                        e += opp_mix[o] * (player == 1 ? table[a][o] : table[o][a]);
                    u[a] += p * e;
                }
            }
            if (marginal <= 0.0) continue; // interim expectation undefined
            const auto& own_mix = player == 1 ? s.x1[t] : s.x2[t];
            double mixed = 0.0, mx = 0.0;
            for (int a = 0; a < acts; ++a) {
                double ua = u[a] / marginal;
                mixed += own_mix[a] * ua;
                mx = std::max(mx, ua);
            }
            if (mixed < mx - eps) bad.push_back({player, t, mx - mixed});
        }
    };
    check_player(1);
    check_player(2);
    return bad;
}

BayesianBundle build_bayesian(const games::PolymatrixGame& game, bool compact) {
    BayesianBundle bundle;
    Bipartition bp = split_sides(game);
    EdgeView ev = edge_view(game, /*rescale=*/true);
    bundle.side1 = bp.side1;
    bundle.side2 = bp.side2;
    bundle.compact = compact;

    // the rescaled polymatrix game, kept for decode verification
    for (int v = 0; v < game.n_players(); ++v)
        bundle.rescaled.add_player(2, game.side[v]);
    for (const auto& b : game.blocks) {
        std::vector<double> m(4);
        for (int af = 0; af < 2; ++af)
            for (int at = 0; at < 2; ++at) m[af * 2 + at] = 0.5 + 0.5 * game.pay(b, af, at);
        bundle.rescaled.add_block(b.from, b.to, m);
    }

    BayesianGame& bg = bundle.bg;
    bg.types1 = static_cast<int>(bp.side1.size());
    bg.types2 = static_cast<int>(bp.side2.size());

    std::set<std::pair<int, int>> edges;
    for (int v = 0; v < game.n_players(); ++v)
        for (int w : ev.adj[v])
            if (v < w) edges.insert({v, w});
    if (edges.empty()) throw std::invalid_argument("game has no edges");
    const int ecount = static_cast<int>(edges.size());
    for (auto [a, b] : edges) {
        int v1 = bp.which[a] == 1 ? a : b;
        int v2 = bp.which[a] == 1 ? b : a;
        bg.dist.emplace_back(bp.type_of[v1], bp.type_of[v2], Rational(1, ecount));
    }

    if (compact) {
        for (const auto& nb : ev.adj)
            if (nb.size() > 3) throw std::invalid_argument("compact mode needs degree <= 3");
        bundle.coloring = square_and_color(ev.adj);
        if (bundle.coloring.n_colors > 7) throw std::logic_error("coloring exceeded 7 colors");
        bg.actions1 = bg.actions2 = 14; // (color, action) pairs
    } else {
        bg.actions1 = 2 * bg.types1;
        bg.actions2 = 2 * bg.types2;
    }

    // action decoding: non-compact (vertex index, strategy); compact
    // (color, strategy)
    auto action_parts = [&](int player, int a) {
        if (compact) return std::pair<int, int>{a / 2, a % 2};
        (void)player;
        return std::pair<int, int>{a / 2, a % 2};
    };

    auto matches_own = [&](int player, int t, int a) {
        auto [key, s] = action_parts(player, a);
        (void)s;
        int vertex = player == 1 ? bundle.side1[t] : bundle.side2[t];
        if (compact) return key == bundle.coloring.color[vertex];
        return key == t;
    };

    // opponent's action identifies a neighbor of the typed vertex (or not)
    auto opp_vertex = [&](int player, int t, int a_opp) -> int {
        auto [key, s] = action_parts(player == 1 ? 2 : 1, a_opp);
        (void)s;
        int vertex = player == 1 ? bundle.side1[t] : bundle.side2[t];
        if (compact) {
            int found = -1;
            for (int w : ev.adj[vertex])
                if (bundle.coloring.color[w] == key) {
                    if (found >= 0) throw std::logic_error("coloring not proper on the square");
                    found = w;
                }
            return found;
        }
        int w = player == 1 ? (key < static_cast<int>(bundle.side2.size()) ? bundle.side2[key] : -1)
                            : (key < static_cast<int>(bundle.side1.size()) ? bundle.side1[key] : -1);
        if (w < 0) return -1;
        bool adjacent = false;
        for (int z : ev.adj[vertex]) adjacent |= (z == w);
        return adjacent ? w : -1;
    };

    auto fill = [&](int player) {
        int types = player == 1 ? bg.types1 : bg.types2;
        auto& tables = player == 1 ? bg.u1 : bg.u2;
        tables.assign(types, {});
        for (int t = 0; t < types; ++t) {
            tables[t].assign(bg.actions1, std::vector<double>(bg.actions2, 0.0));
            int vertex = player == 1 ? bundle.side1[t] : bundle.side2[t];
            for (int a1 = 0; a1 < bg.actions1; ++a1)
                for (int a2 = 0; a2 < bg.actions2; ++a2) {
                    int own_action = player == 1 ? a1 : a2;
                    int opp_action = player == 1 ? a2 : a1;
                    if (!matches_own(player, t, own_action)) continue;
                    int w = opp_vertex(player, t, opp_action);
                    if (w < 0) continue;
                    auto it = ev.pay.find({vertex, w});
                    if (it == ev.pay.end()) continue;
                    int own_s = own_action % 2, opp_s = opp_action % 2;
                    tables[t][a1][a2] = it->second[own_s][opp_s];
                }
        }
    };
    fill(1);
    fill(2);
    return bundle;
}

games::MixedProfile decode_bayesian(const BayesianBundle& bundle, const BayesStrategy& s,
                                    double eps) {
    if (!verify_bayes_ane(bundle.bg, s, eps).empty())
        throw std::invalid_argument("strategy is not an eps-approximate Bayesian equilibrium");
    games::MixedProfile out(bundle.rescaled.n_players());
    auto read_side = [&](int player, const std::vector<int>& side,
                         const std::vector<std::vector<double>>& x) {
        for (std::size_t t = 0; t < side.size(); ++t) {
            int vertex = side[t];
            int key = bundle.compact ? bundle.coloring.color[vertex] : static_cast<int>(t);
            double m0 = x[t][2 * key], m1 = x[t][2 * key + 1];
            double total = m0 + m1;
            if (total <= 0.0)
                throw std::invalid_argument("no mass on matching actions; cannot decode");
            out[vertex] = {m0 / total, m1 / total};
        }
        (void)player;
    };
    read_side(1, bundle.side1, s.x1);
    read_side(2, bundle.side2, s.x2);
    return out;
}

RelativeBundle build_relative_bimatrix(const games::PolymatrixGame& game, double eta) {
    RelativeBundle bundle;
    bundle.eta = eta;
    Bipartition bp = split_sides(game);
    EdgeView ev = edge_view(game, /*rescale=*/false);
    if (bp.side1.size() != bp.side2.size())
        throw std::invalid_argument("sides must have equal size (pad with dummy nodes)");
    for (int v = 0; v < game.n_players(); ++v)
        if (ev.adj[v].size() != 3) throw std::invalid_argument("construction expects 3-regular games");
    bundle.side1 = bp.side1;
    bundle.side2 = bp.side2;
    bundle.n = static_cast<int>(bp.side1.size());
    const int n = bundle.n;

    BimatrixGame& bm = bundle.bm;
    bm.rows = bm.cols = 2 * n;
    bm.R.assign(static_cast<std::size_t>(bm.rows) * bm.cols, 0.0);
    bm.C.assign(static_cast<std::size_t>(bm.rows) * bm.cols, 0.0);
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < 2; ++s)
            for (int j = 0; j < n; ++j)
                for (int t = 0; t < 2; ++t) {
                    int row = 2 * i + s, col = 2 * j + t;
                    double r = (i == j) ? 1.0 : 0.0;           // row imitates column
                    double c = (j == (i + 1) % n) ? 1.0 : 0.0; // column shifts by one
                    int a = bundle.side1[i], b = bundle.side2[j];
                    auto it = ev.pay.find({a, b});
                    if (it != ev.pay.end()) r += eta * it->second[s][t];
                    auto jt = ev.pay.find({b, a});
                    if (jt != ev.pay.end()) c += eta * jt->second[t][s];
                    bm.R[static_cast<std::size_t>(row) * bm.cols + col] = r;
                    bm.C[static_cast<std::size_t>(row) * bm.cols + col] = c;
                }
    return bundle;
}

std::vector<RelativeViolation> verify_relative_wsne(const BimatrixGame& bm,
                                                    const std::vector<double>& x,
                                                    const std::vector<double>& y, double eps) {
    if (static_cast<int>(x.size()) != bm.rows || static_cast<int>(y.size()) != bm.cols)
        throw std::invalid_argument("profile shape mismatch");
    std::vector<RelativeViolation> bad;
    std::vector<double> ur(bm.rows, 0.0), uc(bm.cols, 0.0);
    for (int i = 0; i < bm.rows; ++i)
        for (int j = 0; j < bm.cols; ++j) {
            ur[i] += y[j] * bm.r(i, j);
            uc[j] += x[i] * bm.c(i, j);
        }
    double mr = *std::max_element(ur.begin(), ur.end());
    double mc = *std::max_element(uc.begin(), uc.end());
    for (int i = 0; i < bm.rows; ++i)
        if (x[i] > games::kSupportEps && ur[i] < (1.0 - eps) * mr) bad.push_back({true, i});
    for (int j = 0; j < bm.cols; ++j)
        if (y[j] > games::kSupportEps && uc[j] < (1.0 - eps) * mc) bad.push_back({false, j});
    return bad;
}

RelativeDecode decode_relative(const RelativeBundle& bundle,
                               const games::PolymatrixGame& original,
                               const std::vector<double>& x, const std::vector<double>& y) {
    const int n = bundle.n;
    RelativeDecode out;
    out.profile.assign(original.n_players(), {});

    const double lo = (1.0 - 4.0 * bundle.eta) / n;
    const double hi = (1.0 + 5.0 * bundle.eta) / n;
    auto box_err = [&](double m) { return std::max(lo - m, m - hi); };

    for (int i = 0; i < n; ++i) {
        double mx = x[2 * i] + x[2 * i + 1];
        double my = y[2 * i] + y[2 * i + 1];
        if (mx <= 0.0 || my <= 0.0)
            throw std::invalid_argument("zero node marginal contradicts the uniformity lemma");
        out.worst_row_marginal_err = std::max(out.worst_row_marginal_err, box_err(mx));
        out.worst_col_marginal_err = std::max(out.worst_col_marginal_err, box_err(my));
        out.profile[bundle.side1[i]] = {x[2 * i] / mx, x[2 * i + 1] / mx};
        out.profile[bundle.side2[i]] = {y[2 * i] / my, y[2 * i + 1] / my};
    }

    // Corollary-6 style utility band over every pure strategy
    const double blo = (1.0 - 4.0 * bundle.eta) / n;
    const double bhi = (1.0 + 9.0 * bundle.eta) / n;
    for (int i = 0; i < bundle.bm.rows; ++i) {
        double u = 0.0;
        for (int j = 0; j < bundle.bm.cols; ++j) u += y[j] * bundle.bm.r(i, j);
        out.utility_band_err = std::max(out.utility_band_err, std::max(blo - u, u - bhi));
    }
    for (int j = 0; j < bundle.bm.cols; ++j) {
        double u = 0.0;
        for (int i = 0; i < bundle.bm.rows; ++i) u += x[i] * bundle.bm.c(i, j);
        out.utility_band_err = std::max(out.utility_band_err, std::max(blo - u, u - bhi));
    }

    // measured polymatrix quality of the decoded profile
    auto util = games::action_utilities(original, out.profile);
    for (int p = 0; p < original.n_players(); ++p) {
        double mx = *std::max_element(util[p].begin(), util[p].end());
        for (int a = 0; a < 2; ++a)
            if (out.profile[p][a] > games::kSupportEps)
                out.measured_eps = std::max(out.measured_eps, mx - util[p][a]);
    }
    return out;
}

void write_bayesian(std::ostream& os, const BayesianGame& bg) {
    char buf[64];
    os << "TYPES " << bg.types1 << ' ' << bg.types2 << '\n';
    os << "ACTIONS " << bg.actions1 << ' ' << bg.actions2 << '\n';
    for (const auto& [t1, t2, p] : bg.dist)
        os << "DIST " << t1 << ' ' << t2 << ' ' << p.str() << '\n';
    auto dump = [&](int player, const auto& tables) {
        for (std::size_t t = 0; t < tables.size(); ++t)
            for (std::size_t a1 = 0; a1 < tables[t].size(); ++a1)
                for (std::size_t a2 = 0; a2 < tables[t][a1].size(); ++a2) {
                    if (tables[t][a1][a2] == 0.0) continue;
                    std::snprintf(buf, sizeof buf, "%.17g", tables[t][a1][a2]);
                    os << "U " << player << ' ' << t << ' ' << a1 << ' ' << a2 << ' ' << buf
                       << '\n';
                }
    };
    dump(1, bg.u1);
    dump(2, bg.u2);
}

BayesianGame parse_bayesian(std::istream& is) {
    BayesianGame bg;
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
        if (tok == "TYPES") {
            if (!(ls >> bg.types1 >> bg.types2)) fail("malformed TYPES");
        } else if (tok == "ACTIONS") {
            if (!(ls >> bg.actions1 >> bg.actions2)) fail("malformed ACTIONS");
            bg.u1.assign(bg.types1, std::vector<std::vector<double>>(
                                        bg.actions1, std::vector<double>(bg.actions2, 0.0)));
            bg.u2.assign(bg.types2, std::vector<std::vector<double>>(
                                        bg.actions1, std::vector<double>(bg.actions2, 0.0)));
        } else if (tok == "DIST") {
            int t1, t2;
            std::string pr;
            if (!(ls >> t1 >> t2 >> pr)) fail("malformed DIST");
            bg.dist.emplace_back(t1, t2, Rational::parse(pr));
        } else if (tok == "U") {
            int player, t, a1, a2;
            double v;
            if (!(ls >> player >> t >> a1 >> a2 >> v)) fail("malformed U");
            auto& tab = player == 1 ? bg.u1 : bg.u2;
            if (t < 0 || t >= static_cast<int>(tab.size())) fail("type out of range");
            tab[t][a1][a2] = v;
        } else {
            fail("unknown directive '" + tok + "'");
        }
    }
    return bg;
}

void write_bimatrix(std::ostream& os, const BimatrixGame& bm) {
    char buf[64];
    os << bm.rows << ' ' << bm.cols << '\n';
    auto dump = [&](const std::vector<double>& m) {
        for (int i = 0; i < bm.rows; ++i) {
            for (int j = 0; j < bm.cols; ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", m[static_cast<std::size_t>(i) * bm.cols + j]);
                os << buf << (j + 1 < bm.cols ? " " : "");
            }
            os << '\n';
        }
    };
    dump(bm.R);
    dump(bm.C);
}

BimatrixGame parse_bimatrix(std::istream& is) {
    BimatrixGame bm;
    if (!(is >> bm.rows >> bm.cols)) throw std::invalid_argument("missing bimatrix header");
    bm.R.resize(static_cast<std::size_t>(bm.rows) * bm.cols);
    bm.C.resize(bm.R.size());
    for (auto& v : bm.R)
        if (!(is >> v)) throw std::invalid_argument("truncated row matrix");
    for (auto& v : bm.C)
        if (!(is >> v)) throw std::invalid_argument("truncated column matrix");
    return bm;
}

} // namespace ppadkit::ext

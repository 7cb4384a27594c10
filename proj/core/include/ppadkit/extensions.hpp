#pragma once

#include <iosfwd>
#include <vector>

#include "ppadkit/games.hpp"
#include "ppadkit/rational.hpp"

namespace ppadkit::ext {

struct Coloring {
    std::vector<int> color;
    int n_colors = 0;
};

// Greedy proper coloring of the distance-exactly-2 graph; at most 7 colors
// when the input degree is at most 3.
Coloring square_and_color(const std::vector<std::vector<int>>& adj);

// Two-player incomplete-information game; u1[t1][a1][a2] and u2[t2][a1][a2]
// are the type-dependent payoff tables.
struct BayesianGame {
    int types1 = 0, types2 = 0;
    int actions1 = 0, actions2 = 0;
    std::vector<std::tuple<int, int, Rational>> dist;
    std::vector<std::vector<std::vector<double>>> u1, u2;
};

// Per-player, per-type mixed actions.
struct BayesStrategy {
    std::vector<std::vector<double>> x1; // [t1][a1]
    std::vector<std::vector<double>> x2; // [t2][a2]
};

struct BayesViolation {
    int player;
    int type;
    double gap;
};
std::vector<BayesViolation> verify_bayes_ane(const BayesianGame& bg, const BayesStrategy& s,
                                             double eps);

// The vertex-controller construction over a bipartite polymatrix game.
struct BayesianBundle {
    BayesianGame bg;
    std::vector<int> side1, side2; // vertex ids per type index
    bool compact = false;
    Coloring coloring;                  // over all vertices (compact mode)
    games::PolymatrixGame rescaled;     // payoffs moved to [1/2, 1]
};

BayesianBundle build_bayesian(const games::PolymatrixGame& game, bool compact);

// Reads the per-vertex conditional strategies back out of a Bayesian
// strategy (mass on mismatched vertices is renormalized away).
games::MixedProfile decode_bayesian(const BayesianBundle& bundle, const BayesStrategy& s,
                                    double eps);

struct BimatrixGame {
    int rows = 0, cols = 0;
    std::vector<double> R, C; // row-major
    double r(int i, int j) const { return R[static_cast<std::size_t>(i) * cols + j]; }
    double c(int i, int j) const { return C[static_cast<std::size_t>(i) * cols + j]; }
};

struct RelativeBundle {
    BimatrixGame bm;
    std::vector<int> side1, side2;
    int n = 0; // nodes per side
    double eta = 0.01;
};

// Main game scaled into [0, eta] plus the hide-and-seek imitation game.
RelativeBundle build_relative_bimatrix(const games::PolymatrixGame& game, double eta = 0.01);

struct RelativeViolation {
    bool row_player;
    int action;
};
std::vector<RelativeViolation> verify_relative_wsne(const BimatrixGame& bm,
                                                    const std::vector<double>& x,
                                                    const std::vector<double>& y, double eps);

struct RelativeDecode {
    games::MixedProfile profile;
    double worst_row_marginal_err = 0.0; // distance outside the Lemma-6 box
    double worst_col_marginal_err = 0.0;
    double utility_band_err = 0.0;       // distance outside the Corollary-6 band
    double measured_eps = 0.0;           // worst polymatrix best-response gap
};
RelativeDecode decode_relative(const RelativeBundle& bundle,
                               const games::PolymatrixGame& original,
                               const std::vector<double>& x, const std::vector<double>& y);

void write_bayesian(std::ostream& os, const BayesianGame& bg);
BayesianGame parse_bayesian(std::istream& is);
void write_bimatrix(std::ostream& os, const BimatrixGame& bm);
BimatrixGame parse_bimatrix(std::istream& is);

} // namespace ppadkit::ext

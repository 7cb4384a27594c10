#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "ppadkit/gcircuit.hpp"

namespace ppadkit::games {

// Graphical game of pairwise bimatrix blocks; a player's utility is the sum
// over incident blocks. Block (from, to) stores `to`'s payoffs.
struct PolymatrixGame {
    struct Block {
        int from = -1, to = -1;
        std::size_t offset = 0;
    };

    std::vector<int> actions;
    std::vector<char> side; // bipartition label ('v' value / 'g' gate for compiled games)
    std::vector<Block> blocks;
    std::vector<double> pool;

    int add_player(int n_actions, char side_label);
    // payoffs row-major over [a_from][a_to]
    void add_block(int from, int to, const std::vector<double>& payoffs);
    double pay(const Block& b, int a_from, int a_to) const {
        return pool[b.offset + static_cast<std::size_t>(a_from) * actions[b.to] + a_to];
    }
    int n_players() const { return static_cast<int>(actions.size()); }
    int max_degree() const;   // neighbor count, both directions pooled
    bool is_bipartite_by_side() const;
};

using MixedProfile = std::vector<std::vector<double>>;

inline constexpr double kSupportEps = 1e-12;

MixedProfile uniform_profile(const PolymatrixGame& g);
void validate_profile(const PolymatrixGame& g, const MixedProfile& x);

// all players' action utilities under the profile
std::vector<std::vector<double>> action_utilities(const PolymatrixGame& g, const MixedProfile& x);

double expected_payoff(const PolymatrixGame& g, const MixedProfile& x, int player, int action);

struct WsneViolation {
    int player;
    int action; // supported but more than eps below the best response
};
std::vector<WsneViolation> verify_wsne(const PolymatrixGame& g, const MixedProfile& x,
                                       double eps);

// players whose mixed strategy trails the best pure response by more than eps
std::vector<int> verify_ane(const PolymatrixGame& g, const MixedProfile& x, double eps);

// One gate's enforcement gadget: input value players, a comparator player w,
// and the output value player that anti-imitates w.
struct GateGadget {
    gc::GateType type;
    Rational zeta;
    int n_inputs = 0;
    PolymatrixGame game; // players: inputs..., w, out
    int w_player = -1;
    int out_player = -1;
};

GateGadget gadget_for_gate(gc::GateType type, const Rational& zeta);

// Enumerates all grid profiles of the gadget game; true iff every eps-NE
// satisfies the gate's Def-3 constraint with slack eps + 2*grid_step.
bool certify_gadget(const GateGadget& gadget, double eps, double grid_step);

struct CompiledGame {
    PolymatrixGame game;
    int n_value_players = 0; // value player id == circuit node id
    std::vector<int> gate_player;
};

// One value player per node, one gate player per gate; bipartite, degree <= 3
// when the circuit has fan-out <= 2.
CompiledGame compile_circuit_to_game(const gc::GeneralizedCircuit& c, double eps);

gc::Assignment assignment_from_profile(const CompiledGame& cg, const MixedProfile& x);

// Builds an equilibrium candidate from a circuit assignment: value players
// play their node values, gate players sit at 1/2 when indifferent and
// otherwise commit to their better action.
MixedProfile profile_from_assignment(const CompiledGame& cg, const gc::Assignment& x,
                                     double eps_ne);

// Lemma-4 style support trimming: keeps actions within eps*k of optimal for
// k = 1 + 1/sqrt(eps) and renormalizes. Input must be an eps-ANE.
MixedProfile ane_to_wsne(const PolymatrixGame& g, const MixedProfile& x, double eps);

struct GameSolveOptions {
    double damping = 0.35;
    int sweeps = 120000;
    int restarts = 4;
    std::uint64_t rng_seed = 7;
    std::optional<MixedProfile> initial;
    bool target_ane = false; // stop on verify_ane instead of verify_wsne
};

std::optional<MixedProfile> solve_game_small(const PolymatrixGame& g, double eps,
                                             long long budget,
                                             const GameSolveOptions& opts = {});

void write_game(std::ostream& os, const PolymatrixGame& g);
PolymatrixGame parse_game(std::istream& is);
void write_profile(std::ostream& os, const MixedProfile& x);
MixedProfile parse_profile(std::istream& is, const PolymatrixGame& g);

} // namespace ppadkit::games

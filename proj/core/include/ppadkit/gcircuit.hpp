#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppadkit/rational.hpp"

namespace ppadkit::gc {

// The nine gate types. Const carries zeta in [0,1]; Scale multiplies by a
// positive rational zeta with the output clamped into [0,1].
enum class GateType : std::uint8_t { Const, Scale, Copy, Add, Sub, Less, Or, And, Not };

int gate_arity(GateType t);
bool gate_has_zeta(GateType t);
const char* gate_token(GateType t);

struct Gate {
    GateType type;
    Rational zeta;
    int in1 = -1;
    int in2 = -1;
    int out = -1;
};

// Cyclic circuit over [0,1]-valued nodes. Every node is written by at most
// one gate (enforced), which is what lets assignments act as certificates.
class GeneralizedCircuit {
  public:
    int add_node();
    int add_node(const std::string& name);
    int node_by_name(const std::string& name) const; // -1 if absent
    std::string name_of(int node) const;             // "n<id>" fallback
    bool has_name(int node) const { return !names_[node].empty(); }
    int n_nodes() const { return n_nodes_; }

    void add_gate(Gate g);
    const std::vector<Gate>& gates() const { return gates_; }
    int writer_of(int node) const { return writer_[node]; }

    std::vector<int> fanout_counts() const;
    int max_fanout() const;

  private:
    int n_nodes_ = 0;
    std::vector<Gate> gates_;
    std::vector<int> writer_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> by_name_;
};

// Assignment maps node ids to values in [0,1]; NaN marks "missing".
using Assignment = std::vector<double>;

// Def-3 row for one gate. Conditional gates are satisfied whenever their
// guard fails (brittle semantics).
bool check_gate(const Gate& g, const Assignment& x, double eps);

// Indices of violated gates; empty iff x eps-approximately satisfies c.
std::vector<int> check_assignment(const GeneralizedCircuit& c, const Assignment& x, double eps);

// Precomputed evaluation order for repeated forward passes with the same
// pinned-node set. Throws on residual cycles or underdetermined nodes.
class ForwardPlan {
  public:
    ForwardPlan(const GeneralizedCircuit& c, const std::vector<int>& pinned);
    // values must be sized n_nodes with pinned entries already set
    void run(const GeneralizedCircuit& c, Assignment& values) const;
    const std::vector<int>& gate_order() const { return order_; }

  private:
    struct Op {
        std::uint8_t type;
        int in1, in2, out;
        double zeta;
    };
    std::vector<int> order_;
    std::vector<Op> ops_;
};

// Zero-error reference semantics: evaluates every unpinned gate exactly.
Assignment ideal_forward(const GeneralizedCircuit& c,
                         const std::unordered_map<int, double>& pinned);

struct SolveOptions {
    double damping = 0.5;     // applied to feedback gates; forward gates settle exactly
    double soft_width = 0.0;  // softening of the brittle gates; 0 means eps/2
    int sweeps_per_restart = 4000;
    int restarts = 8;
    std::uint64_t rng_seed = 1;
    bool require_converged = false; // accept only once the sweeps settle
    std::optional<Assignment> initial; // else all-1/2 start
};

// Damped sweep iteration of (softened) ideal gate functions; no guarantee,
// absence is a valid outcome. The result always passes check_assignment.
std::optional<Assignment> solve_tiny(const GeneralizedCircuit& c, double eps, long long budget,
                                     const SolveOptions& opts = {});

void serialize(std::ostream& os, const GeneralizedCircuit& c);
GeneralizedCircuit parse(std::istream& is);

void write_assignment(std::ostream& os, const GeneralizedCircuit& c, const Assignment& x);
Assignment parse_assignment(std::istream& is, const GeneralizedCircuit& c);

} // namespace ppadkit::gc

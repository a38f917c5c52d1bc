/* flownet.hh -- flow network and LP encodings for weak combined transitions */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpa/lp.hh"
#include "cpa/model.hh"
#include "cpa/relations.hh"

namespace cpa {

/// Vertex families of the network N(t, a, μ, R).  External labels use
/// all seven; internal ones only Source, Sink, State, TransState,
/// RelState.
enum class VertexTag {
  Source,          // ▲
  Sink,            // ▼
  State,           // v      (pre-action stage)
  TransState,      // v^tr
  PostState,       // v_a    (post-action stage)
  PostTransState,  // v^tr_a
  RelState,        // v_R    (boundary toward ▼)
};

struct Vertex {
  VertexTag tag;
  int state = -1;  // for all families except Source/Sink
  int tr = -1;     // for TransState/PostTransState
};

/// Edge kinds; the three starred kinds carry the transition's cost in
/// the min-cost objective.
enum class EdgeKind {
  SourceArc,    // (▲, t)
  PreTau,       // (v, v^tr)        tr internal            [*]
  PreTauOut,    // (v^tr, v')
  PostTau,      // (v_a, v^tr_a)    tr internal            [*]
  AStep,        // (v, v^tr_a)      tr labelled a          [*]
  PostOut,      // (v^tr_a, v'_a)
  RelArc,       // (v or v_a, u_R)  iff (u, v) ∈ R
  SinkArc,      // (u_R, ▼)
};

struct Edge {
  int from = -1, to = -1;  // vertex indices
  EdgeKind kind;
  int tr = -1;  // transition index for transition-derived edges
};

/// The network N(t, a, μ, R) over `autom` (usually a disjoint union).
/// R is a square relation over the automaton's states whose LEFT
/// universe carries μ (the challenger side); flow runs on the right
/// (defender) side.  `autom` must outlive the network.
struct FlowNetwork {
  int t = -1;
  int action = kTau;  // external action id, or kTau
  Distribution mu;
  BinaryRelation rel{0, 0};
  const Cpa* autom = nullptr;

  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<std::string> vnames;

  int source = -1, sink = -1;
  // Vertex index per family (-1 when absent).
  std::vector<int> state_vx, post_vx, rel_vx;      // by state
  std::vector<int> trans_vx, post_trans_vx;        // by transition
};

/// One LP over the edge-flow variables of a network (or the §6.3.3
/// combination variables).  Rows are equalities or ≤-inequalities.
enum class RowRel { Eq, Le };
enum class ObjSense { Feasibility, Minimize };

struct LPRow {
  std::vector<std::pair<int, Rat>> coef;  // sparse (variable, coefficient)
  RowRel rel = RowRel::Eq;
  Rat rhs;
  std::string name;
};

struct LPProblem {
  int nvars = 0;
  std::vector<std::string> var_names;
  std::vector<LPRow> rows;
  std::vector<Rat> obj;  // length nvars; cost coefficients c_f
  ObjSense sense = ObjSense::Feasibility;
};

/// Build N(t, a, μ, R).  `a` must be an external action id or kTau;
/// every internally labelled transition contributes τ-edges (trace
/// erasure).  Throws UnknownState/UnknownAction on bad anchors.
FlowNetwork build_network(int t, int a, const Distribution& mu,
                          const BinaryRelation& r, const Cpa& autom);

/// The feasibility LP L(t,a,μ,R): one flow variable per edge,
/// constraints f(▲,t) = 1, boundary f(u_R,▼) = μ(u) for every state u,
/// conservation at every interior vertex, and the balancing rows
/// f(v^tr,v') = ρ(v')·f(v,v^tr) (with post/a-step analogues).
LPProblem build_feasibility_lp(const FlowNetwork& n);

/// Same constraints, objective min Σ c_f·f with c_f the transition
/// cost on (v,v^tr), (v_a,v^tr_a) and (v,v^tr_a) edges, 0 elsewhere.
LPProblem build_mincost_lp(const FlowNetwork& n, const Cpa& autom);

enum class BoundMode { Equal, AtMost };

/// Append Σ c_f·f {=,≤} bound, taking c_f from lp's objective vector.
LPProblem add_cost_constraint(const LPProblem& lp, const Rat& bound,
                              BoundMode mode);

/// Enrich `autom` with a fresh state h and a zero-cost internal
/// transition h → mu_from, reducing hyper-transition questions to
/// state questions.  Returns the enlarged automaton and h's id.
std::pair<Cpa, int> build_hyper_instance(const Distribution& mu_from,
                                         const Cpa& autom);

/// The §6.3.3 LP deciding t =a⇒_C with target in the lifting of w:
/// variables p_1..p_k (one per a-transition of t) and f_{u,v} for
/// (u,v) ∈ w with u in supp(mu); constraints Σp = 1, 0 ≤ p,f ≤ 1,
/// row sums μ(u), column sums Σ p_i·μ_i(v).  Throws NoSuchTransitions
/// when t enables no a-transition.  A cost row Σ p_i·c(tr_i) {=,≤} c
/// can be appended with add_strongprob_cost.
LPProblem build_strongprob_lp(int t, int a, const Distribution& mu,
                              const BinaryRelation& w, const Cpa& autom);
LPProblem add_strongprob_cost(const LPProblem& lp, int t, int a,
                              const Cpa& autom, const Rat& bound,
                              BoundMode mode);

/// Exact substitution check of an assignment (length nvars) against
/// every row; used to validate externally supplied solutions.
bool lp_check_assignment(const LPProblem& lp, const std::vector<Rat>& x);

/// Solve an LPProblem (slack-converting ≤ rows) with the lp module.
LpResult solve_lp_problem(const LPProblem& p);

/// Solve the (feasibility or min-cost) LP of a network after pruning
/// vertices that no feasible flow can touch (not reachable from ▲, or
/// unable to deliver all their mass toward ▼).  The optional cost row
/// is applied after the objective is formed.  Optimal assignments are
/// reported over the full edge set (pruned edges at zero), so
/// extract_scheduler can consume them directly.
LpResult solve_network(const FlowNetwork& n, ObjSense sense,
                       const std::optional<std::pair<Rat, BoundMode>>& bound);

/// Plain-text dump, one constraint per line, for external checking.
std::string dump_lp(const LPProblem& lp);

}  // namespace cpa

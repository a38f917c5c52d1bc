/* sched.hh -- determinate schedulers: extraction, induced target, costs */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpa/flownet.hh"
#include "cpa/model.hh"
#include "cpa/relations.hh"

namespace cpa {

/// Trace stage of a weak transition labelled a: before the a-step
/// (trace still empty) or after it.  For a = tau only PreAction is
/// used — the trace never changes.
enum class Stage { PreAction, PostAction };

/// Choice at one (state, stage) key: a sub-distribution over enabled
/// transitions plus the residual stop mass.  Invariant: fire masses
/// are positive and sum with stop to exactly 1.
struct SchedChoice {
  std::vector<std::pair<int, Rat>> fire;  // (transition index, probability)
  Rat stop = 1;
};

/// Scheduler whose choice depends only on the last state and the
/// trace stage.  PreAction entries may fire internal and (for an
/// external label) a-labelled transitions; PostAction entries only
/// internal ones.  Keys absent from `choice` stop with mass 1.
struct DeterminateScheduler {
  int action = kTau;  // the weak label a (external id or kTau)
  std::map<std::pair<int, Stage>, SchedChoice> choice;

  const SchedChoice& at(int state, Stage stage) const;
};

/// Read the scheduler off an optimal network flow: at each vertex the
/// firing probability of a transition is its edge flow divided by the
/// vertex inflow, the stop mass is the flow leaving toward the
/// boundary; vertices without inflow stop with mass 1.  Throws
/// NotOptimal unless `sol` is an Optimal assignment over net's full
/// edge list.
DeterminateScheduler extract_scheduler(const LpResult& sol,
                                       const FlowNetwork& net);

/// The distribution over stopping states induced from `start`,
/// computed by solving the exact linear systems of the absorbing
/// two-stage chain.  Throws NonTerminating when the mass stopping
/// with the required trace is below 1 (internal cycling, or stopping
/// before an external label fires), WeightError/ValidationError on a
/// malformed scheduler.
Distribution scheduler_target(const DeterminateScheduler& s, int start,
                              const Cpa& autom);

/// Expected total cost of the induced weak transition (ball form):
/// cost of each fired transition weighted by the expected number of
/// visits of its (state, stage) key.  Same errors as scheduler_target.
Rat scheduler_cost(const DeterminateScheduler& s, int start,
                   const Cpa& autom);

/// Ray form of the cost: enumerate every finite execution fragment,
/// weight its normalised per-step costs by the probability that the
/// run is exactly that fragment, and sum.  Requires the automaton's
/// internal/a-step graph to be acyclic (CyclicModel otherwise); equal
/// to scheduler_cost whenever both are defined.
Rat ray_cost_acyclic(const DeterminateScheduler& s, int start,
                     const Cpa& autom);

/// Brute-force oracle: enumerate deterministic determinate schedulers
/// (each reached key fires one transition or stops), keep those whose
/// induced transition from `start` has a target ν with target L(r) ν,
/// and return the minimum cost, or absent when no candidate within
/// reach qualifies.  Keys farther than `depth` steps from start are
/// forced to stop.  Intended for small (≤ 6 state) instances.
std::optional<Rat> enumerate_min_cost(int start, int a,
                                      const Distribution& target,
                                      const BinaryRelation& r,
                                      const Cpa& autom, int depth);

/// One key per line: `(state, stage) -> [tr#:prob ...] stop:prob`.
std::string serialize_scheduler(const DeterminateScheduler& s,
                                const Cpa& autom);

}  // namespace cpa

/* bisim.hh -- decision procedures for the six bisimulation relations */
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpa/model.hh"
#include "cpa/relations.hh"

namespace cpa {

/// How costs enter a check: ignored, matched exactly, or bounded from
/// above by the challenger (the minor-cost preorders).
enum class CostMode { Plain, Preserving, Minor };

/// A fully qualified relation query, as exposed on the command line.
struct RelationQuery {
  enum class Rel { Strong, StrongProb, WeakProb } rel = Rel::WeakProb;
  CostMode cost = CostMode::Plain;
};

/// Decision outcome.  `w` is the witness partition over the disjoint
/// union's states (ordered: first automaton's states, then the
/// second's); `rc` is the directed cost relation of the minor-cost
/// relations, with the challenger (second/expensive) side on the
/// left.  `removed_pairs` lists the (s2, s1) union-state pairs
/// discarded by a directed fixpoint, in removal order.
struct Verdict {
  bool holds = false;
  std::optional<Partition> w;
  std::optional<BinaryRelation> rc;
  std::vector<std::string> diagnostics;
  std::vector<std::pair<int, int>> removed_pairs;
};

/// States enabling an external transition or an internal transition
/// leaving their class; ascending.
std::vector<int> border_states(const Cpa& autom, const Partition& w);

/// A failed defender check: the challenger's class, its label, and
/// its target distribution (plus the cost bound when the loop matches
/// costs exactly).
struct Split {
  int cls = -1;
  int action = kTau;
  Distribution mu;
  std::optional<Rat> cost;
};

/// First challenger (transition declaration order, class-mates
/// ascending) whose weak-transition feasibility LP fails, or absent
/// once `w` is a weak probabilistic bisimulation.
std::optional<Split> find_split(const Cpa& u, const Partition& w);

/// Replace the split class by the subset of states passing the failed
/// check and its complement.  Throws DegenerateSplit when either side
/// would be empty.
Partition refine(const Partition& w, const Split& split, const Cpa& u);

/// Coarsest weak probabilistic bisimulation over `u`'s states
/// (FindSplit/Refine to a fixpoint).
Partition quotient(const Cpa& u);

/// a1 ≈p a2: weak probabilistic bisimilarity.
Verdict decide_weak_prob(const Cpa& a1, const Cpa& a2);

/// Strong bisimilarity (single-transition defender), with the cost
/// mode's condition attached.  Minor answers a1 ⪅ a2 with defender
/// transitions drawn from a1.
Verdict decide_strong(const Cpa& a1, const Cpa& a2, CostMode mode);

/// Strong probabilistic bisimilarity (combined-transition defender via
/// the combination LP); cost modes as for decide_strong.
Verdict decide_strong_prob(const Cpa& a1, const Cpa& a2, CostMode mode);

/// Weak probabilistic cost-preserving bisimilarity: the quotient loop
/// with the min-cost system constrained to the challenger's exact
/// cost.
Verdict decide_cost_preserving_weak(const Cpa& a1, const Cpa& a2);

/// Minor-cost weak probabilistic bisimilarity cheap ⪅ expensive:
/// quotient, then the directed fixpoint over candidate pairs
/// (s2, s1) ∈ W ∩ (S2 × S1) with the border-state conditions; holds
/// iff the start pair survives and every s2 keeps a partner.
Verdict decide_minor_weak(const Cpa& cheap, const Cpa& expensive);

/// Re-validate a holding verdict's witness directly against the
/// definition of the queried relation (every pair, every challenger),
/// independently of the decision loop's refinement order.
bool verify_witness(const Verdict& v, const Cpa& a1, const Cpa& a2,
                    const RelationQuery& q);

}  // namespace cpa

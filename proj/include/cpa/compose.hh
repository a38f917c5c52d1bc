/* compose.hh -- parallel composition with cost-preserving generators */
#pragma once

#include <string>

#include "cpa/model.hh"
#include "cpa/rational.hh"

namespace cpa {

/// Catalog of generator functions combining the two component costs
/// of a composed transition.  Every entry is symmetric, zero
/// preserving, distributive over convex combinations, and monotone
/// increasing; extend the enum (and apply/name/parse) to add one.
struct GeneratorFunction {
  enum class Kind { Sum, ScaledSum } kind = Kind::Sum;
  Rat k = 1;  // scale for ScaledSum, must be > 0

  Rat apply(const Rat& x, const Rat& y) const;
  std::string name() const;
};

/// `sum` or `scaled-sum:<rat>` (k > 0); ValidationError otherwise.
GeneratorFunction parse_generator(const std::string& text);

/// Σ1 ∩ H2 = ∅ = H1 ∩ Σ2: no action of one automaton may be internal
/// to the other.
bool check_compatible(const Cpa& a1, const Cpa& a2);

/// Parallel composition: pair states `(<left>,<right>)`, shared
/// actions synchronise with cost g(c1,c2), one-sided transitions
/// interleave against an apparent (cost-0) Dirac step of the partner
/// with cost g(c,0).  Only pairs reachable from the joint start state
/// are kept.  Throws Incompatible when check_compatible fails.
Cpa compose_cpa(const Cpa& a1, const Cpa& a2, const GeneratorFunction& g);

}  // namespace cpa

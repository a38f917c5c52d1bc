/* rand.hh -- seeded generators of exact random test instances */
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cpa/model.hh"
#include "cpa/relations.hh"
#include "cpa/sched.hh"

namespace testrand {

/// Deterministic randomness for property tests.  All draws go through
/// modulo reduction of the raw engine output so instances are stable
/// across standard libraries.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  int below(int k);  // uniform-ish over 0..k-1, k >= 1
  /// Rational in (0, 1] whose denominator is at most maxden.
  cpa::Rat prob(int maxden);
  /// Nonnegative rational cost with numerator <= maxnum, denominator
  /// <= maxden.
  cpa::Rat cost(int maxnum, int maxden);
  /// Full distribution over up to three of the given states; every
  /// weight has denominator at most maxden.
  cpa::Distribution dist(const std::vector<int>& candidates, int maxden);
};

/// Random reachable model over <= n_states states: two external
/// actions, one internal, sources drawn from the already reachable
/// set, unreachable leftovers dropped.
cpa::Cpa cpa_model(Rng& rng, int n_states, int n_trans, int maxden);

/// As cpa_model, but every transition target lies strictly above its
/// source, so the reachable graph is acyclic with no self-loops.
cpa::Cpa acyclic_model(Rng& rng, int n_states, int n_trans, int maxden);

/// Random MDP: at most one transition per (state, action), every state
/// enables at least one action.
cpa::Cpa mdp_model(Rng& rng, int n_states, int maxden);

/// Stationary policy choosing among the enabled actions of every state
/// of `m`, with the given horizon.
cpa::MdpPolicy stationary_policy(Rng& rng, const cpa::Cpa& m, int horizon,
                                 int maxden);

/// Random equivalence over {0..n-1}.
cpa::Partition partition(Rng& rng, int n);

/// Random internal-only determinate scheduler (challenge label tau):
/// each (state, stage) either stops or fires internal transitions with
/// total mass at most one.  On acyclic models it terminates surely.
cpa::DeterminateScheduler scheduler(Rng& rng, const cpa::Cpa& a);

/// As scheduler, but deterministic: every visited state either stops
/// or fires exactly one internal transition with probability one.
cpa::DeterminateScheduler det_scheduler(Rng& rng, const cpa::Cpa& a);

}  // namespace testrand

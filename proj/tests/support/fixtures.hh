/* fixtures.hh -- deterministic example models shared by the test suite */
#pragma once

#include <string>

#include "cpa/model.hh"
#include "cpa/rational.hh"

namespace fixtures {

/// Lossy channel with retransmission: sbar --send(1)--> h0, each hop
/// attempt h_i --hop(r*r)--> {h_{i+1}: p, h_i: 1-p}, hn --recv(1)--> sbar.
/// Construction-identical to `cpa-gen wcc`.
cpa::Cpa wcc(int n = 2, const cpa::Rat& r = 5,
             const cpa::Rat& p = cpa::Rat(3, 4));

/// Ideal channel: sbar --send(1)--> h --recv(1)--> sbar.
cpa::Cpa icc();

/// Direct-vs-detour: s --a(1)--> t directly, or s --step(1)--> v --a(1)--> t.
cpa::Cpa detour();

/// One state, no actions, no transitions.
cpa::Cpa unit();

/// s --go(cost)--> t with `go` external; the minimal cost-asymmetric pair
/// is one_shot("m1", 2) against one_shot("m2", 3).
cpa::Cpa one_shot(const std::string& name, const cpa::Rat& cost);

/// Behaviourally identical branches with different costs:
/// s --u(0)--> {x: 1/2, y: 1/2}, x --a(5)--> t, y --a(3)--> t.
/// Useful because x and y are bisimilar but not cost-interchangeable.
cpa::Cpa mixed_cost_twins();

/// Compatible composition pair sharing the external action `sync`;
/// the left side adds a private external `ping`, the right side a
/// private internal `work` and a probabilistic sync outcome.
cpa::Cpa pair_left();
cpa::Cpa pair_right();

/// parse_model shorthand dropping the warnings.
cpa::Cpa parse(const std::string& text);

}  // namespace fixtures

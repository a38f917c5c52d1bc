/* test_compose.cc -- cost-aware parallel composition */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>
#include <string>

#include "cpa/compose.hh"
#include "cpa/errors.hh"
#include "cpa/model.hh"
#include "doctest.h"
#include "support/fixtures.hh"
#include "support/rand.hh"

using cpa::Cpa;
using cpa::GeneratorFunction;
using cpa::Rat;

TEST_CASE("parse_generator reads the catalog") {
  GeneratorFunction s = cpa::parse_generator("sum");
  CHECK(s.kind == GeneratorFunction::Kind::Sum);
  CHECK(s.apply(2, 3) == 5);
  CHECK(s.name() == "sum");

  GeneratorFunction sc = cpa::parse_generator("scaled-sum:3/2");
  CHECK(sc.kind == GeneratorFunction::Kind::ScaledSum);
  CHECK(sc.apply(2, 3) == Rat(15, 2));
  CHECK(sc.name() == "scaled-sum:3/2");

  CHECK_THROWS_AS(cpa::parse_generator("min"), cpa::ValidationError);
  CHECK_THROWS_AS(cpa::parse_generator("scaled-sum:0"), cpa::ValidationError);
  CHECK_THROWS_AS(cpa::parse_generator("scaled-sum:-1"), cpa::ValidationError);
  CHECK_THROWS_AS(cpa::parse_generator("scaled-sum:x"), cpa::ValidationError);
}

TEST_CASE("generator properties on random rationals") {
  testrand::Rng rng(909);
  for (int i = 0; i < 500; ++i) {
    GeneratorFunction g;
    if (rng.below(2) == 0) {
      g.kind = GeneratorFunction::Kind::ScaledSum;
      g.k = rng.cost(5, 4) + Rat(1, 7);  // keep strictly positive
    }
    Rat x = rng.cost(9, 6), y = rng.cost(9, 6), z = rng.cost(9, 6);
    CHECK(g.apply(x, y) == g.apply(y, x));             // symmetry
    CHECK(g.apply(x, 0) + g.apply(0, y) == g.apply(x, y));
    CHECK(g.apply(0, 0) == 0);                         // zero preserving
    CHECK(g.apply(x, y) >= 0);  // nonnegative on nonnegative input
    // distributivity over convex combination in one argument
    Rat lam(1 + rng.below(4), 5);
    lam.canonicalize();
    CHECK(g.apply(lam * x + (1 - lam) * z, y * Rat(1)) ==
          lam * g.apply(x, y) + (1 - lam) * g.apply(z, y));
    // monotonicity
    if (x <= z) CHECK(g.apply(x, y) <= g.apply(z, y));
  }
}

TEST_CASE("compatibility forbids crossing internal actions") {
  Cpa ext = fixtures::parse(
      "automaton e\nstates: s\nstart: s\nexternal: go\ntrans: s go 1 -> s:1\n");
  Cpa in = fixtures::parse(
      "automaton i\nstates: s\nstart: s\ninternal: go\ntrans: s go 1 -> s:1\n");
  CHECK(cpa::check_compatible(ext, ext));
  CHECK(!cpa::check_compatible(ext, in));
  CHECK_THROWS_AS(cpa::compose_cpa(ext, in, GeneratorFunction{}),
                  cpa::Incompatible);
}

TEST_CASE("shared actions synchronise, private ones interleave") {
  Cpa l = fixtures::pair_left();
  Cpa r = fixtures::pair_right();
  Cpa c = cpa::compose_cpa(l, r, cpa::parse_generator("sum"));

  CHECK(c.name == "(" + l.name + "," + r.name + ")");
  CHECK(c.start == c.state_id("(l0,r0)"));

  // sync is shared: l0 -sync(1)-> l1 with r0 -sync(3)-> {r0:1/2, r1:1/2}
  bool found_sync = false;
  for (const auto& tr : c.transitions) {
    if (c.actions[tr.action] != "sync") continue;
    if (tr.src != c.start) continue;
    found_sync = true;
    CHECK(tr.cost == 4);  // 1 + 3
    CHECK(tr.target.at(c.state_id("(l1,r0)")) == Rat(1, 2));
    CHECK(tr.target.at(c.state_id("(l1,r1)")) == Rat(1, 2));
  }
  CHECK(found_sync);

  // ping is private to the left: the right component must not move
  for (const auto& tr : c.transitions) {
    if (c.actions[tr.action] != "ping") continue;
    for (const auto& [st, w] : tr.target.entries()) {
      const std::string& name = c.states[st];
      CHECK(name.substr(name.find(',')) ==
            c.states[tr.src].substr(c.states[tr.src].find(',')));
    }
  }

  // work is internal to the right and still present
  bool found_work = false;
  for (const auto& tr : c.transitions)
    found_work = found_work || c.actions[tr.action] == "work";
  CHECK(found_work);
  CHECK(c.is_internal(c.action_id("work")));
}

TEST_CASE("interleaving uses g(c, 0), synchronisation g(c1, c2)") {
  Cpa l = fixtures::pair_left();
  Cpa r = fixtures::pair_right();
  GeneratorFunction g = cpa::parse_generator("scaled-sum:2");
  Cpa c = cpa::compose_cpa(l, r, g);
  for (const auto& tr : c.transitions) {
    const std::string& act = c.actions[tr.action];
    if (act == "sync" && tr.src == c.start)
      CHECK(tr.cost == 8);  // 2·(1+3)
    if (act == "ping" && tr.src == c.start)
      CHECK(tr.cost == 4);  // 2·(2+0)
    if (act == "work") CHECK(tr.cost == 4);  // 2·(2+0)
  }
}

TEST_CASE("composition keeps only reachable pairs") {
  Cpa l = fixtures::pair_left();
  Cpa r = fixtures::pair_right();
  Cpa c = cpa::compose_cpa(l, r, GeneratorFunction{});
  CHECK(c.n_states() <= l.n_states() * r.n_states());
  std::set<std::string> names(c.states.begin(), c.states.end());
  CHECK(names.count("(l0,r0)") == 1);
  // every state is the source or in the target of some transition,
  // or the start
  for (int s = 0; s < c.n_states(); ++s) {
    bool touched = s == c.start;
    for (const auto& tr : c.transitions) {
      touched = touched || tr.src == s || !cpa::is_zero(tr.target.at(s));
    }
    CHECK(touched);
  }
}

TEST_CASE("composing with a one-state partner is an isomorphism") {
  Cpa w = fixtures::wcc();
  Cpa u = fixtures::unit();
  Cpa c = cpa::compose_cpa(w, u, cpa::parse_generator("sum"));
  REQUIRE(c.n_states() == w.n_states());
  REQUIRE(c.transitions.size() == w.transitions.size());
  for (std::size_t k = 0; k < w.transitions.size(); ++k) {
    const auto& orig = w.transitions[k];
    const auto& comp = c.transitions[k];
    CHECK(c.states[comp.src] == "(" + w.states[orig.src] + ",u0)");
    CHECK(comp.cost == orig.cost);  // g(c, 0) = c for sum
    CHECK(c.actions[comp.action] == w.actions[orig.action]);
    CHECK(comp.target.support_size() == orig.target.support_size());
  }
}

TEST_CASE("product distributions multiply pointwise") {
  // two coin flips in lockstep via a shared action
  Cpa l = fixtures::parse(
      "automaton cl\nstates: s a b\nstart: s\nexternal: flip\n"
      "trans: s flip 1 -> a:1/2 b:1/2\n");
  Cpa r = fixtures::parse(
      "automaton cr\nstates: s c d\nstart: s\nexternal: flip\n"
      "trans: s flip 1 -> c:1/3 d:2/3\n");
  Cpa com = cpa::compose_cpa(l, r, GeneratorFunction{});
  REQUIRE(com.transitions.size() == 1);
  const auto& tr = com.transitions[0];
  CHECK(tr.target.at(com.state_id("(a,c)")) == Rat(1, 6));
  CHECK(tr.target.at(com.state_id("(a,d)")) == Rat(1, 3));
  CHECK(tr.target.at(com.state_id("(b,c)")) == Rat(1, 6));
  CHECK(tr.target.at(com.state_id("(b,d)")) == Rat(1, 3));
}

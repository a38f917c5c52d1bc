/* bisim.cc -- partition refinement and the directed cost fixpoints */

#include "cpa/bisim.hh"

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cpa/errors.hh"
#include "cpa/flownet.hh"
#include "cpa/parallel.hh"
#include "cpa/sched.hh"

namespace cpa {
namespace {

/// Which defender move answers a challenger: one equally labelled
/// transition, a combined transition (the combination LP), or a weak
/// combined transition (the flow-network LP).
enum class Engine { Strong, StrongProb, Weak };

int net_label(const Cpa& u, int action) {
  return u.is_internal(action) ? kTau : action;
}

std::optional<Rat> cost_of(const Transition& tr, bool preserve) {
  if (!preserve) return std::nullopt;
  return tr.cost;
}

bool cost_fits(const Rat& c, const std::optional<Rat>& bound, BoundMode mode) {
  if (!bound) return true;
  return mode == BoundMode::Equal ? c == *bound : c <= *bound;
}

/// Defender t answers (action, mu) with a single equally labelled
/// transition whose target lifts and whose cost fits.  This is the
/// strong test, and a sound fast path for the other two engines.
bool single_step_feasible(const Cpa& u, const BinaryRelation& rel, int t,
                          int action, const Distribution& mu,
                          const std::optional<Rat>& cost, BoundMode mode) {
  for (int k : u.out[t]) {
    const Transition& tr = u.transitions[k];
    if (tr.action != action) continue;
    if (!cost_fits(tr.cost, cost, mode)) continue;
    if (lift_check(rel, mu, tr.target)) return true;
  }
  return false;
}

bool strongprob_step_feasible(const Cpa& u, const BinaryRelation& rel, int t,
                              int action, const Distribution& mu,
                              const std::optional<Rat>& cost, BoundMode mode) {
  if (single_step_feasible(u, rel, t, action, mu, cost, mode)) return true;
  bool enabled = false;
  for (int k : u.out[t])
    if (u.transitions[k].action == action) {
      enabled = true;
      break;
    }
  if (!enabled) return false;
  LPProblem lp = build_strongprob_lp(t, action, mu, rel, u);
  if (cost) lp = add_strongprob_cost(lp, t, action, u, *cost, mode);
  return solve_lp_problem(lp).status == LpStatus::Optimal;
}

bool weak_step_feasible(const Cpa& u, const BinaryRelation& rel, int t,
                        int action, const Distribution& mu,
                        const std::optional<Rat>& cost, BoundMode mode) {
  const int label = net_label(u, action);
  if (label == kTau) {
    // The empty weak transition: stay at t, cost 0.
    bool zero_ok = !cost || (mode == BoundMode::Equal ? is_zero(*cost)
                                                      : !is_negative(*cost));
    if (zero_ok && lift_check(rel, mu, dirac(t))) return true;
  }
  // One transition, then stop.
  for (int k : u.out[t]) {
    const Transition& tr = u.transitions[k];
    bool match =
        label == kTau ? u.is_internal(tr.action) : tr.action == label;
    if (!match) continue;
    if (!cost_fits(tr.cost, cost, mode)) continue;
    if (lift_check(rel, mu, tr.target)) return true;
  }
  FlowNetwork net = build_network(t, label, mu, rel, u);
  std::optional<std::pair<Rat, BoundMode>> bound;
  if (cost) bound = std::make_pair(*cost, mode);
  return solve_network(net, ObjSense::Feasibility, bound).status ==
         LpStatus::Optimal;
}

bool step_feasible(Engine eng, const Cpa& u, const BinaryRelation& rel, int t,
                   int action, const Distribution& mu,
                   const std::optional<Rat>& cost, BoundMode mode) {
  switch (eng) {
    case Engine::Strong:
      return single_step_feasible(u, rel, t, action, mu, cost, mode);
    case Engine::StrongProb:
      return strongprob_step_feasible(u, rel, t, action, mu, cost, mode);
    case Engine::Weak:
      return weak_step_feasible(u, rel, t, action, mu, cost, mode);
  }
  return false;  // unreachable
}

/// One defender obligation: challenger transition index, defender mate.
struct Challenge {
  int tr;
  int t;
};

std::vector<Challenge> class_challenges(const Cpa& u, const Partition& w) {
  std::vector<Challenge> tasks;
  for (std::size_t k = 0; k < u.transitions.size(); ++k) {
    const Transition& tr = u.transitions[k];
    for (int t : w.classes[w.cls[tr.src]])
      if (t != tr.src) tasks.push_back({static_cast<int>(k), t});
  }
  return tasks;
}

std::optional<Split> find_split_core(const Cpa& u, const Partition& w,
                                     Engine eng, bool preserve) {
  BinaryRelation rel = w.as_relation();
  std::vector<Challenge> tasks = class_challenges(u, w);
  const std::size_t chunk = 128;
  for (std::size_t base = 0; base < tasks.size(); base += chunk) {
    const std::size_t m = std::min(chunk, tasks.size() - base);
    std::vector<char> bad(m, 0);
    parallel_for(m, [&](std::size_t i) {
      const Challenge& c = tasks[base + i];
      const Transition& tr = u.transitions[c.tr];
      bad[i] = !step_feasible(eng, u, rel, c.t, tr.action, tr.target,
                              cost_of(tr, preserve), BoundMode::Equal);
    });
    for (std::size_t i = 0; i < m; ++i)
      if (bad[i]) {
        const Transition& tr = u.transitions[tasks[base + i].tr];
        return Split{w.cls[tr.src], tr.action, tr.target,
                     cost_of(tr, preserve)};
      }
  }
  return std::nullopt;
}

Partition refine_core(const Partition& w, const Split& split, const Cpa& u,
                      Engine eng) {
  if (split.cls < 0 || split.cls >= static_cast<int>(w.size()))
    throw DegenerateSplit("no such class: " + std::to_string(split.cls));
  BinaryRelation rel = w.as_relation();
  const std::vector<int>& members = w.classes[split.cls];
  std::vector<char> ok(members.size(), 0);
  parallel_for(members.size(), [&](std::size_t i) {
    ok[i] = step_feasible(eng, u, rel, members[i], split.action, split.mu,
                          split.cost, BoundMode::Equal);
  });
  std::vector<int> keep;
  for (std::size_t i = 0; i < members.size(); ++i)
    if (ok[i]) keep.push_back(members[i]);
  if (keep.empty() || keep.size() == members.size())
    throw DegenerateSplit("split would not divide the class");
  return w.split(split.cls, keep);
}

Partition quotient_core(const Cpa& u, Engine eng, bool preserve) {
  Partition w = Partition::single(u.n_states());
  while (std::optional<Split> s = find_split_core(u, w, eng, preserve))
    w = refine_core(w, *s, u, eng);
  return w;
}

Verdict decide_symmetric(const Cpa& a1, const Cpa& a2, Engine eng,
                         bool preserve) {
  DisjointUnion du = disjoint_union(a1, a2);
  Verdict v;
  Partition w = quotient_core(du.model, eng, preserve);
  v.holds = w.same(du.start1, du.start2);
  if (!v.holds)
    v.diagnostics.push_back("start states " + du.model.states[du.start1] +
                            " and " + du.model.states[du.start2] +
                            " fall into different classes");
  v.w = std::move(w);
  return v;
}

/// All pairs (s2, s1) with s2 on the challenger (second) side, s1 on
/// the defender (first) side, related by w; ascending.
std::vector<std::pair<int, int>> candidate_pairs(const DisjointUnion& du,
                                                 const Partition& w,
                                                 BinaryRelation& rc) {
  std::vector<std::pair<int, int>> pairs;
  const int n = du.model.n_states();
  for (int x = 0; x < n; ++x) {
    if (du.side[x] != 1) continue;
    for (int y = 0; y < n; ++y)
      if (du.side[y] == 0 && w.same(x, y)) {
        rc.set(x, y);
        pairs.emplace_back(x, y);
      }
  }
  return pairs;
}

void note_removal(Verdict& v, const Cpa& u, int s2, int s1,
                  const Transition& tr) {
  v.removed_pairs.emplace_back(s2, s1);
  v.diagnostics.push_back("dropped (" + u.states[s2] + ", " + u.states[s1] +
                          "): no answer to the " + u.actions[tr.action] +
                          " transition within cost " + rat_str(tr.cost));
}

/// Minor-cost strong and strong probabilistic: the plain quotient,
/// then the greatest directed relation whose pairs answer every
/// challenger with the cost bounded by the challenger's.
Verdict decide_minor_sym(const Cpa& a1, const Cpa& a2, Engine eng) {
  DisjointUnion du = disjoint_union(a1, a2);
  const Cpa& u = du.model;
  Verdict v;
  Partition w = quotient_core(u, eng, false);
  BinaryRelation rc(u.n_states(), u.n_states());
  std::vector<std::pair<int, int>> pairs = candidate_pairs(du, w, rc);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> fail(pairs.size(), -1);
    parallel_for(pairs.size(), [&](std::size_t i) {
      const auto [s2, s1] = pairs[i];
      for (int k : u.out[s2]) {
        const Transition& tr = u.transitions[k];
        if (!step_feasible(eng, u, rc, s1, tr.action, tr.target, tr.cost,
                           BoundMode::AtMost)) {
          fail[i] = k;
          return;
        }
      }
    });
    std::vector<std::pair<int, int>> live;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (fail[i] < 0) {
        live.push_back(pairs[i]);
        continue;
      }
      rc.set(pairs[i].first, pairs[i].second, false);
      note_removal(v, u, pairs[i].first, pairs[i].second,
                   u.transitions[fail[i]]);
      changed = true;
    }
    pairs.swap(live);
  }
  v.holds = rc.test(du.start2, du.start1);
  if (!v.holds)
    v.diagnostics.push_back("start pair (" + u.states[du.start2] + ", " +
                            u.states[du.start1] + ") is not in the relation");
  v.w = std::move(w);
  v.rc = std::move(rc);
  return v;
}

/// Shared machinery of the minor-cost weak check: the border sets and,
/// per challenger transition, the cheapest internal drift of its
/// target into the challenger-side border together with the reached
/// sub-border distribution.  All of it depends only on the partition.
struct MinorWeakCtx {
  std::vector<char> b1;  // defender-side border membership
  std::vector<int> b2;   // challenger-side border states, ascending
  struct BorderReach {
    bool exists = false;
    Rat cost;
    Distribution gamma2;
  };
  std::vector<BorderReach> reach;  // by transition index
};

MinorWeakCtx minor_weak_context(const DisjointUnion& du, const Partition& w) {
  const Cpa& u = du.model;
  const int n = u.n_states();
  MinorWeakCtx cx;
  cx.b1.assign(n, 0);
  for (int s : border_states(u, w)) {
    if (du.side[s] == 1)
      cx.b2.push_back(s);
    else
      cx.b1[s] = 1;
  }
  cx.reach.resize(u.transitions.size());
  if (cx.b2.empty()) return cx;

  std::vector<int> chall;
  for (std::size_t k = 0; k < u.transitions.size(); ++k)
    if (du.side[u.transitions[k].src] == 1)
      chall.push_back(static_cast<int>(k));
  // δ(b) for any border state b lifts to exactly the distributions over
  // the challenger-side border when each such state relates to all of
  // them, so one min-cost solve per challenger yields the cheapest
  // drift and (through the induced scheduler) its target.
  BinaryRelation rb(n + 1, n + 1);
  for (int x : cx.b2)
    for (int y : cx.b2) rb.set(x, y);
  const int anchor = cx.b2.front();
  parallel_for(chall.size(), [&](std::size_t i) {
    const Transition& tr = u.transitions[chall[i]];
    auto [aug, h] = build_hyper_instance(tr.target, u);
    FlowNetwork net = build_network(h, kTau, dirac(anchor), rb, aug);
    LpResult sol = solve_network(net, ObjSense::Minimize, std::nullopt);
    if (sol.status != LpStatus::Optimal) return;
    MinorWeakCtx::BorderReach& r = cx.reach[chall[i]];
    r.exists = true;
    r.cost = sol.value;
    r.gamma2 = scheduler_target(extract_scheduler(sol, net), h, aug);
  });
  return cx;
}

/// One Definition-level obligation of the minor-cost weak relation:
/// when the challenger's target can drift into the border, the
/// defender must reach the drifted distribution through defender-side
/// border states within the drift-augmented bound (condition 1);
/// otherwise it must answer the original target within the
/// challenger's own cost (condition 2).
bool minor_weak_pair_ok(const Cpa& u, const MinorWeakCtx& cx,
                        const BinaryRelation& rc, const BinaryRelation& rcb,
                        int s2, int s1, int* fail_tr) {
  for (int k : u.out[s2]) {
    const Transition& tr = u.transitions[k];
    bool ok;
    if (cx.reach[k].exists) {
      Rat bound = tr.cost + cx.reach[k].cost;
      ok = weak_step_feasible(u, rcb, s1, tr.action, cx.reach[k].gamma2,
                              bound, BoundMode::AtMost);
    } else {
      ok = weak_step_feasible(u, rc, s1, tr.action, tr.target, tr.cost,
                              BoundMode::AtMost);
    }
    if (!ok) {
      if (fail_tr) *fail_tr = k;
      return false;
    }
  }
  return true;
}

BinaryRelation border_restrict(const BinaryRelation& rc,
                               const std::vector<std::pair<int, int>>& pairs,
                               const std::vector<char>& b1) {
  BinaryRelation rcb(rc.left_size(), rc.right_size());
  for (const auto& [x, y] : pairs)
    if (b1[y] && rc.test(x, y)) rcb.set(x, y);
  return rcb;
}

Engine engine_of(RelationQuery::Rel r) {
  switch (r) {
    case RelationQuery::Rel::Strong:
      return Engine::Strong;
    case RelationQuery::Rel::StrongProb:
      return Engine::StrongProb;
    case RelationQuery::Rel::WeakProb:
      return Engine::Weak;
  }
  return Engine::Weak;  // unreachable
}

}  // namespace

std::vector<int> border_states(const Cpa& autom, const Partition& w) {
  std::vector<int> out;
  for (int s = 0; s < autom.n_states(); ++s) {
    bool border = false;
    for (int k : autom.out[s]) {
      const Transition& tr = autom.transitions[k];
      if (autom.is_external(tr.action)) {
        border = true;
        break;
      }
      for (const auto& [v, p] : tr.target.entries())
        if (!w.same(s, v)) {
          border = true;
          break;
        }
      if (border) break;
    }
    if (border) out.push_back(s);
  }
  return out;
}

std::optional<Split> find_split(const Cpa& u, const Partition& w) {
  return find_split_core(u, w, Engine::Weak, false);
}

Partition refine(const Partition& w, const Split& split, const Cpa& u) {
  return refine_core(w, split, u, Engine::Weak);
}

Partition quotient(const Cpa& u) {
  return quotient_core(u, Engine::Weak, false);
}

Verdict decide_weak_prob(const Cpa& a1, const Cpa& a2) {
  return decide_symmetric(a1, a2, Engine::Weak, false);
}

Verdict decide_strong(const Cpa& a1, const Cpa& a2, CostMode mode) {
  if (mode == CostMode::Minor) return decide_minor_sym(a1, a2, Engine::Strong);
  return decide_symmetric(a1, a2, Engine::Strong,
                          mode == CostMode::Preserving);
}

Verdict decide_strong_prob(const Cpa& a1, const Cpa& a2, CostMode mode) {
  if (mode == CostMode::Minor)
    return decide_minor_sym(a1, a2, Engine::StrongProb);
  return decide_symmetric(a1, a2, Engine::StrongProb,
                          mode == CostMode::Preserving);
}

Verdict decide_cost_preserving_weak(const Cpa& a1, const Cpa& a2) {
  return decide_symmetric(a1, a2, Engine::Weak, true);
}

Verdict decide_minor_weak(const Cpa& cheap, const Cpa& expensive) {
  DisjointUnion du = disjoint_union(cheap, expensive);
  const Cpa& u = du.model;
  const int n = u.n_states();
  Verdict v;
  Partition w = quotient_core(u, Engine::Weak, false);
  MinorWeakCtx cx = minor_weak_context(du, w);

  BinaryRelation rc(n, n);
  std::vector<std::pair<int, int>> pairs = candidate_pairs(du, w, rc);
  bool changed = true;
  while (changed) {
    changed = false;
    BinaryRelation rcb = border_restrict(rc, pairs, cx.b1);
    std::vector<int> fail(pairs.size(), -1);
    parallel_for(pairs.size(), [&](std::size_t i) {
      int bad = -1;
      if (!minor_weak_pair_ok(u, cx, rc, rcb, pairs[i].first, pairs[i].second,
                              &bad))
        fail[i] = bad;
    });
    std::vector<std::pair<int, int>> live;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (fail[i] < 0) {
        live.push_back(pairs[i]);
        continue;
      }
      rc.set(pairs[i].first, pairs[i].second, false);
      note_removal(v, u, pairs[i].first, pairs[i].second,
                   u.transitions[fail[i]]);
      changed = true;
    }
    pairs.swap(live);
  }

  bool total = true;
  for (int x = 0; x < n; ++x) {
    if (du.side[x] != 1) continue;
    bool has = false;
    for (int y = 0; y < n && !has; ++y) has = rc.test(x, y);
    if (!has) {
      total = false;
      v.diagnostics.push_back("no partner remains for " + u.states[x]);
    }
  }
  bool starts = rc.test(du.start2, du.start1);
  if (!starts)
    v.diagnostics.push_back("start pair (" + u.states[du.start2] + ", " +
                            u.states[du.start1] + ") is not in the relation");
  v.holds = starts && total;
  v.w = std::move(w);
  v.rc = std::move(rc);
  return v;
}

bool verify_witness(const Verdict& v, const Cpa& a1, const Cpa& a2,
                    const RelationQuery& q) {
  if (!v.holds || !v.w) return false;
  try {
    DisjointUnion du = disjoint_union(a1, a2);
    const Cpa& u = du.model;
    const int n = u.n_states();
    const Partition& w = *v.w;
    if (w.n != n) return false;
    const Engine eng = engine_of(q.rel);
    const bool preserve = q.cost == CostMode::Preserving;
    BinaryRelation wr = w.as_relation();

    // The partition must be a bisimulation on its own: every
    // challenger of every state answerable by every class-mate (with
    // equal cost in the preserving mode, cost ignored otherwise).
    std::vector<Challenge> tasks = class_challenges(u, w);
    std::vector<char> bad(tasks.size(), 0);
    parallel_for(tasks.size(), [&](std::size_t i) {
      const Transition& tr = u.transitions[tasks[i].tr];
      bad[i] = !step_feasible(eng, u, wr, tasks[i].t, tr.action, tr.target,
                              cost_of(tr, preserve), BoundMode::Equal);
    });
    if (std::find(bad.begin(), bad.end(), 1) != bad.end()) return false;
    if (q.cost != CostMode::Minor) return w.same(du.start1, du.start2);

    // Minor modes: the directed relation must sit inside the partition
    // across the two sides, contain the start pair, and answer every
    // challenger within the cost bound.
    if (!v.rc) return false;
    const BinaryRelation& rc = *v.rc;
    if (rc.left_size() != n || rc.right_size() != n) return false;
    std::vector<std::pair<int, int>> pairs;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (rc.test(x, y)) {
          if (du.side[x] != 1 || du.side[y] != 0 || !w.same(x, y))
            return false;
          pairs.emplace_back(x, y);
        }
    if (!rc.test(du.start2, du.start1)) return false;

    std::vector<char> pbad(pairs.size(), 0);
    if (eng != Engine::Weak) {
      parallel_for(pairs.size(), [&](std::size_t i) {
        const auto [s2, s1] = pairs[i];
        for (int k : u.out[s2]) {
          const Transition& tr = u.transitions[k];
          if (!step_feasible(eng, u, rc, s1, tr.action, tr.target, tr.cost,
                             BoundMode::AtMost)) {
            pbad[i] = 1;
            return;
          }
        }
      });
      return std::find(pbad.begin(), pbad.end(), 1) == pbad.end();
    }

    MinorWeakCtx cx = minor_weak_context(du, w);
    BinaryRelation rcb = border_restrict(rc, pairs, cx.b1);
    parallel_for(pairs.size(), [&](std::size_t i) {
      if (!minor_weak_pair_ok(u, cx, rc, rcb, pairs[i].first, pairs[i].second,
                              nullptr))
        pbad[i] = 1;
    });
    if (std::find(pbad.begin(), pbad.end(), 1) != pbad.end()) return false;
    for (int x = 0; x < n; ++x) {
      if (du.side[x] != 1) continue;
      bool has = false;
      for (int y = 0; y < n && !has; ++y) has = rc.test(x, y);
      if (!has) return false;
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace cpa

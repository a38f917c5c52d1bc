/* fixtures.cc -- deterministic example models shared by the test suite */

#include "support/fixtures.hh"

#include "cpa/errors.hh"

namespace fixtures {

using namespace cpa;

Cpa wcc(int n, const Rat& r, const Rat& p) {
  if (n < 1) throw ValidationError("wcc needs at least one hop");
  if (sgn(p) <= 0 || p > 1) throw ValidationError("wcc needs 0 < p <= 1");
  Cpa a;
  a.name = "wcc";
  a.add_state("sbar");
  for (int i = 0; i <= n; ++i) a.add_state("h" + std::to_string(i));
  a.start = 0;
  const int send = a.add_action("send", ActionKind::External);
  const int recv = a.add_action("recv", ActionKind::External);
  const int hop = a.add_action("hop", ActionKind::Internal);

  Transition t0;
  t0.src = 0;
  t0.action = send;
  t0.cost = 1;
  t0.target.add(1, 1);
  a.transitions.push_back(t0);
  for (int i = 0; i < n; ++i) {
    Transition t;
    t.src = 1 + i;
    t.action = hop;
    t.cost = r * r;
    t.target.add(2 + i, p);
    if (p < 1) t.target.add(1 + i, 1 - p);
    a.transitions.push_back(t);
  }
  Transition tn;
  tn.src = 1 + n;
  tn.action = recv;
  tn.cost = 1;
  tn.target.add(0, 1);
  a.transitions.push_back(tn);
  a.finalize();
  return a;
}

Cpa icc() {
  Cpa a;
  a.name = "icc";
  a.add_state("sbar");
  a.add_state("h");
  a.start = 0;
  const int send = a.add_action("send", ActionKind::External);
  const int recv = a.add_action("recv", ActionKind::External);
  Transition t0;
  t0.src = 0;
  t0.action = send;
  t0.cost = 1;
  t0.target.add(1, 1);
  Transition t1;
  t1.src = 1;
  t1.action = recv;
  t1.cost = 1;
  t1.target.add(0, 1);
  a.transitions.push_back(t0);
  a.transitions.push_back(t1);
  a.finalize();
  return a;
}

Cpa detour() {
  Cpa a;
  a.name = "detour";
  a.add_state("s");
  a.add_state("v");
  a.add_state("t");
  a.start = 0;
  const int act = a.add_action("a", ActionKind::External);
  const int step = a.add_action("step", ActionKind::Internal);
  Transition t1;
  t1.src = 0;
  t1.action = act;
  t1.cost = 1;
  t1.target.add(2, 1);
  Transition t2;
  t2.src = 0;
  t2.action = step;
  t2.cost = 1;
  t2.target.add(1, 1);
  Transition t3;
  t3.src = 1;
  t3.action = act;
  t3.cost = 1;
  t3.target.add(2, 1);
  a.transitions.push_back(t1);
  a.transitions.push_back(t2);
  a.transitions.push_back(t3);
  a.finalize();
  return a;
}

Cpa unit() {
  Cpa a;
  a.name = "unit";
  a.add_state("u0");
  a.start = 0;
  a.finalize();
  return a;
}

Cpa one_shot(const std::string& name, const Rat& cost) {
  Cpa a;
  a.name = name;
  a.add_state("s");
  a.add_state("t");
  a.start = 0;
  const int go = a.add_action("go", ActionKind::External);
  Transition t;
  t.src = 0;
  t.action = go;
  t.cost = cost;
  t.target.add(1, 1);
  a.transitions.push_back(t);
  a.finalize();
  return a;
}

Cpa mixed_cost_twins() {
  Cpa a;
  a.name = "twins";
  a.add_state("s");
  a.add_state("x");
  a.add_state("y");
  a.add_state("t");
  a.start = 0;
  const int u = a.add_action("u", ActionKind::Internal);
  const int act = a.add_action("a", ActionKind::External);
  Transition t0;
  t0.src = 0;
  t0.action = u;
  t0.cost = 0;
  t0.target.add(1, Rat(1, 2));
  t0.target.add(2, Rat(1, 2));
  Transition t1;
  t1.src = 1;
  t1.action = act;
  t1.cost = 5;
  t1.target.add(3, 1);
  Transition t2;
  t2.src = 2;
  t2.action = act;
  t2.cost = 3;
  t2.target.add(3, 1);
  a.transitions.push_back(t0);
  a.transitions.push_back(t1);
  a.transitions.push_back(t2);
  a.finalize();
  return a;
}

Cpa pair_left() {
  Cpa a;
  a.name = "left";
  a.add_state("l0");
  a.add_state("l1");
  a.add_state("l2");
  a.start = 0;
  const int sync = a.add_action("sync", ActionKind::External);
  const int ping = a.add_action("ping", ActionKind::External);
  Transition t0;
  t0.src = 0;
  t0.action = sync;
  t0.cost = 1;
  t0.target.add(1, 1);
  Transition t1;
  t1.src = 0;
  t1.action = ping;
  t1.cost = 2;
  t1.target.add(2, 1);
  Transition t2;
  t2.src = 1;
  t2.action = ping;
  t2.cost = 1;
  t2.target.add(0, Rat(1, 2));
  t2.target.add(2, Rat(1, 2));
  a.transitions.push_back(t0);
  a.transitions.push_back(t1);
  a.transitions.push_back(t2);
  a.finalize();
  return a;
}

Cpa pair_right() {
  Cpa a;
  a.name = "right";
  a.add_state("r0");
  a.add_state("r1");
  a.start = 0;
  const int sync = a.add_action("sync", ActionKind::External);
  const int work = a.add_action("work", ActionKind::Internal);
  Transition t0;
  t0.src = 0;
  t0.action = sync;
  t0.cost = 3;
  t0.target.add(0, Rat(1, 2));
  t0.target.add(1, Rat(1, 2));
  Transition t1;
  t1.src = 1;
  t1.action = work;
  t1.cost = 2;
  t1.target.add(0, 1);
  a.transitions.push_back(t0);
  a.transitions.push_back(t1);
  a.finalize();
  return a;
}

Cpa parse(const std::string& text) { return cpa::parse_model(text).model; }

}  // namespace fixtures

/* compose.cc -- Def.-3.2 style parallel composition */
#include "cpa/compose.hh"

#include <deque>
#include <map>

#include "cpa/errors.hh"

namespace cpa {

Rat GeneratorFunction::apply(const Rat& x, const Rat& y) const {
  switch (kind) {
    case Kind::Sum:
      return x + y;
    case Kind::ScaledSum:
      return k * (x + y);
  }
  throw Error("unknown generator kind");
}

std::string GeneratorFunction::name() const {
  switch (kind) {
    case Kind::Sum:
      return "sum";
    case Kind::ScaledSum:
      return "scaled-sum:" + rat_str(k);
  }
  throw Error("unknown generator kind");
}

GeneratorFunction parse_generator(const std::string& text) {
  GeneratorFunction g;
  if (text == "sum") return g;
  const std::string prefix = "scaled-sum:";
  if (text.rfind(prefix, 0) == 0) {
    g.kind = GeneratorFunction::Kind::ScaledSum;
    g.k = parse_rat(text.substr(prefix.size()));
    if (!(g.k > 0))
      throw ValidationError("generator scale must be positive, got " +
                            rat_str(g.k));
    return g;
  }
  throw ValidationError("unknown generator '" + text +
                        "' (expected sum or scaled-sum:<rat>)");
}

bool check_compatible(const Cpa& a1, const Cpa& a2) {
  for (const auto& name : a1.actions) {
    auto it = a2.action_index.find(name);
    if (it != a2.action_index.end() &&
        a2.kinds[it->second] == ActionKind::Internal)
      return false;
  }
  for (const auto& name : a2.actions) {
    auto it = a1.action_index.find(name);
    if (it != a1.action_index.end() &&
        a1.kinds[it->second] == ActionKind::Internal)
      return false;
  }
  return true;
}

Cpa compose_cpa(const Cpa& a1, const Cpa& a2, const GeneratorFunction& g) {
  if (!check_compatible(a1, a2))
    throw Incompatible("automata '" + a1.name + "' and '" + a2.name +
                       "' share an internal action");

  Cpa m;
  m.name = "(" + a1.name + "," + a2.name + ")";
  for (std::size_t i = 0; i < a1.actions.size(); ++i)
    m.add_action(a1.actions[i], a1.kinds[i]);
  for (std::size_t i = 0; i < a2.actions.size(); ++i)
    if (!m.action_index.count(a2.actions[i]))
      m.add_action(a2.actions[i], a2.kinds[i]);

  // Pair states are interned on first use; the product distribution
  // callback discovers the targets.
  std::map<std::pair<int, int>, int> pair_id;
  std::deque<std::pair<int, int>> queue;
  auto intern = [&](int s1, int s2) {
    auto it = pair_id.find({s1, s2});
    if (it != pair_id.end()) return it->second;
    int id = m.add_state("(" + a1.states[s1] + "," + a2.states[s2] + ")");
    pair_id.emplace(std::make_pair(s1, s2), id);
    queue.emplace_back(s1, s2);
    return id;
  };
  m.start = intern(a1.start, a2.start);

  while (!queue.empty()) {
    auto [s1, s2] = queue.front();
    queue.pop_front();
    int src = pair_id.at({s1, s2});
    for (int t1 : a1.out[s1]) {
      const Transition& tr1 = a1.transitions[t1];
      const std::string& act = a1.actions[tr1.action];
      auto shared = a2.action_index.find(act);
      if (shared != a2.action_index.end()) {
        for (int t2 : a2.out[s2]) {
          const Transition& tr2 = a2.transitions[t2];
          if (tr2.action != shared->second) continue;
          Transition tr;
          tr.src = src;
          tr.action = m.action_id(act);
          tr.cost = g.apply(tr1.cost, tr2.cost);
          tr.target = product(tr1.target, tr2.target, intern);
          m.transitions.push_back(std::move(tr));
        }
      } else {
        Transition tr;
        tr.src = src;
        tr.action = m.action_id(act);
        tr.cost = g.apply(tr1.cost, Rat(0));
        tr.target = product(tr1.target, dirac(s2), intern);
        m.transitions.push_back(std::move(tr));
      }
    }
    for (int t2 : a2.out[s2]) {
      const Transition& tr2 = a2.transitions[t2];
      const std::string& act = a2.actions[tr2.action];
      if (a1.action_index.count(act)) continue;  // handled above
      Transition tr;
      tr.src = src;
      tr.action = m.action_id(act);
      tr.cost = g.apply(Rat(0), tr2.cost);
      tr.target = product(dirac(s1), tr2.target, intern);
      m.transitions.push_back(std::move(tr));
    }
  }
  m.finalize();
  return m;
}

}  // namespace cpa

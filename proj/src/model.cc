/* model.cc -- distribution algebra, model parsing/serialization, MDP rewards */
#include "cpa/model.hh"

#include <algorithm>
#include <deque>
#include <sstream>

#include "cpa/errors.hh"

namespace cpa {

// ------------------------------------------------------------- Distribution

Distribution::Distribution(std::vector<std::pair<int, Rat>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [s, p] : entries) add(s, p);
}

void Distribution::add(int state, const Rat& weight) {
  if (is_zero(weight)) return;
  auto it = std::lower_bound(
      w_.begin(), w_.end(), state,
      [](const auto& e, int s) { return e.first < s; });
  if (it != w_.end() && it->first == state) {
    it->second += weight;
    if (is_negative(it->second))
      throw WeightError("negative weight on state " + std::to_string(state));
    if (is_zero(it->second)) w_.erase(it);
  } else {
    if (is_negative(weight))
      throw WeightError("negative weight on state " + std::to_string(state));
    w_.insert(it, {state, weight});
  }
}

Rat Distribution::at(int state) const {
  auto it = std::lower_bound(
      w_.begin(), w_.end(), state,
      [](const auto& e, int s) { return e.first < s; });
  if (it != w_.end() && it->first == state) return it->second;
  return Rat(0);
}

Rat Distribution::mass() const {
  Rat m = 0;
  for (const auto& [s, p] : w_) m += p;
  return m;
}

Distribution dirac(int state) {
  Distribution d;
  d.add(state, Rat(1));
  return d;
}

Distribution convex_combine(
    const std::vector<std::pair<Rat, Distribution>>& parts) {
  Rat total = 0;
  Distribution out;
  for (const auto& [w, d] : parts) {
    if (sgn(w) <= 0) throw WeightError("convex weight must be positive");
    total += w;
    for (const auto& [s, p] : d.entries()) out.add(s, w * p);
  }
  if (total != 1)
    throw WeightError("convex weights sum to " + rat_str(total) + ", not 1");
  return out;
}

Distribution product(const Distribution& d1, const Distribution& d2,
                     const std::function<int(int, int)>& pair_id) {
  Distribution out;
  for (const auto& [u, p] : d1.entries())
    for (const auto& [v, q] : d2.entries()) out.add(pair_id(u, v), p * q);
  return out;
}

// ---------------------------------------------------------------------- Cpa

int Cpa::add_state(const std::string& id) {
  if (state_index.count(id))
    throw ValidationError("duplicate state '" + id + "'");
  int ix = static_cast<int>(states.size());
  states.push_back(id);
  state_index.emplace(id, ix);
  return ix;
}

int Cpa::add_action(const std::string& id, ActionKind kind) {
  if (id == "tau")
    throw ValidationError("'tau' is reserved and cannot be declared");
  if (auto it = action_index.find(id); it != action_index.end()) {
    if (kinds[it->second] != kind)
      throw ValidationError("action '" + id +
                            "' declared both external and internal");
    throw ValidationError("duplicate action '" + id + "'");
  }
  int ix = static_cast<int>(actions.size());
  actions.push_back(id);
  action_index.emplace(id, ix);
  kinds.push_back(kind);
  return ix;
}

void Cpa::finalize() {
  out.assign(states.size(), {});
  for (std::size_t i = 0; i < transitions.size(); ++i)
    out[transitions[i].src].push_back(static_cast<int>(i));
}

int Cpa::state_id(const std::string& id) const {
  auto it = state_index.find(id);
  if (it == state_index.end()) throw UnknownState("unknown state '" + id + "'");
  return it->second;
}

int Cpa::action_id(const std::string& id) const {
  auto it = action_index.find(id);
  if (it == action_index.end())
    throw UnknownAction("unknown action '" + id + "'");
  return it->second;
}

// ------------------------------------------------------------------ parsing

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

void check_id(const std::string& id, int line) {
  if (id.find(':') != std::string::npos)
    throw ParseError(line, 0, "identifier '" + id + "' contains ':'");
  if (id.find('\\') != std::string::npos)
    throw ParseError(line, 0, "identifier '" + id + "' contains an escape");
  if (id == "->") throw ParseError(line, 0, "'->' is not an identifier");
}

struct RawTrans {
  int line;
  std::string src, action, cost;
  std::vector<std::pair<std::string, std::string>> targets;  // (state, rat)
};

}  // namespace

ParseResult parse_model(const std::string& text) {
  Cpa a;
  bool have_name = false, have_start = false;
  std::string start_name;
  std::vector<RawTrans> raw;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& head = toks[0];
    if (head == "automaton") {
      if (toks.size() != 2)
        throw ParseError(lineno, 0, "expected: automaton <name>");
      if (have_name) throw ValidationError("duplicate 'automaton' line");
      check_id(toks[1], lineno);
      a.name = toks[1];
      have_name = true;
    } else if (head == "states:") {
      for (std::size_t i = 1; i < toks.size(); ++i) {
        check_id(toks[i], lineno);
        a.add_state(toks[i]);
      }
    } else if (head == "start:") {
      if (toks.size() != 2) throw ParseError(lineno, 0, "expected: start <id>");
      if (have_start) throw ValidationError("duplicate 'start' line");
      start_name = toks[1];
      have_start = true;
    } else if (head == "external:" || head == "internal:") {
      ActionKind k =
          head[0] == 'e' ? ActionKind::External : ActionKind::Internal;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        check_id(toks[i], lineno);
        a.add_action(toks[i], k);
      }
    } else if (head == "trans:") {
      if (toks.size() < 6 || toks[4] != "->")
        throw ParseError(lineno, 0,
                         "expected: trans: <src> <action> <cost> -> "
                         "<state>:<rat> ...");
      RawTrans t;
      t.line = lineno;
      t.src = toks[1];
      t.action = toks[2];
      t.cost = toks[3];
      for (std::size_t i = 5; i < toks.size(); ++i) {
        auto colon = toks[i].rfind(':');
        if (colon == std::string::npos || colon == 0 ||
            colon + 1 == toks[i].size())
          throw ParseError(lineno, 0, "malformed target '" + toks[i] + "'");
        t.targets.emplace_back(toks[i].substr(0, colon),
                               toks[i].substr(colon + 1));
      }
      raw.push_back(std::move(t));
    } else {
      throw ParseError(lineno, 0, "unknown directive '" + head + "'");
    }
  }

  if (!have_name) throw ParseError(1, 0, "missing 'automaton' line");
  if (a.states.empty()) throw ValidationError("no states declared");
  if (!have_start) throw ValidationError("missing 'start' line");
  a.start = a.state_id(start_name);

  for (const auto& t : raw) {
    Transition tr;
    tr.src = a.state_id(t.src);
    if (t.action == "tau")
      throw ValidationError("transition at line " + std::to_string(t.line) +
                            " uses reserved label 'tau'");
    tr.action = a.action_id(t.action);
    tr.cost = t.cost == "_" ? Rat(0) : parse_rat(t.cost);
    if (is_negative(tr.cost))
      throw ValidationError("negative cost at line " + std::to_string(t.line));
    for (const auto& [sname, rtext] : t.targets) {
      int s = a.state_id(sname);
      if (sgn(tr.target.at(s)) != 0)
        throw ValidationError("duplicate target state '" + sname +
                              "' at line " + std::to_string(t.line));
      Rat p = parse_rat(rtext);
      if (sgn(p) <= 0)
        throw ValidationError("non-positive target weight at line " +
                              std::to_string(t.line));
      tr.target.add(s, p);
    }
    if (!tr.target.full())
      throw ValidationError("target mass " + rat_str(tr.target.mass()) +
                            " != 1 at line " + std::to_string(t.line));
    a.transitions.push_back(std::move(tr));
  }
  a.finalize();

  // Prune states unreachable from the start (the model semantics
  // assumes every state is reachable).
  std::vector<bool> reach(a.states.size(), false);
  std::deque<int> queue{a.start};
  reach[a.start] = true;
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (int ti : a.out[s])
      for (const auto& [u, p] : a.transitions[ti].target.entries())
        if (!reach[u]) {
          reach[u] = true;
          queue.push_back(u);
        }
  }
  ParseResult res;
  if (std::find(reach.begin(), reach.end(), false) == reach.end()) {
    res.model = std::move(a);
    return res;
  }
  Cpa pruned;
  pruned.name = a.name;
  pruned.actions = a.actions;
  pruned.action_index = a.action_index;
  pruned.kinds = a.kinds;
  std::vector<int> remap(a.states.size(), -1);
  for (int s = 0; s < a.n_states(); ++s) {
    if (reach[s])
      remap[s] = pruned.add_state(a.states[s]);
    else
      res.warnings.push_back("pruned unreachable state '" + a.states[s] + "'");
  }
  pruned.start = remap[a.start];
  for (const auto& tr : a.transitions) {
    if (!reach[tr.src]) continue;
    Transition nt;
    nt.src = remap[tr.src];
    nt.action = tr.action;
    nt.cost = tr.cost;
    for (const auto& [u, p] : tr.target.entries()) nt.target.add(remap[u], p);
    pruned.transitions.push_back(std::move(nt));
  }
  pruned.finalize();
  res.model = std::move(pruned);
  return res;
}

std::string serialize_model(const Cpa& a) {
  std::ostringstream out;
  out << "automaton " << a.name << "\n";
  out << "states:";
  for (const auto& s : a.states) out << ' ' << s;
  out << "\n";
  out << "start: " << a.states[a.start] << "\n";
  std::string ext, intl;
  for (std::size_t i = 0; i < a.actions.size(); ++i)
    (a.kinds[i] == ActionKind::External ? ext : intl) += " " + a.actions[i];
  if (!ext.empty()) out << "external:" << ext << "\n";
  if (!intl.empty()) out << "internal:" << intl << "\n";
  for (const auto& tr : a.transitions) {
    out << "trans: " << a.states[tr.src] << ' ' << a.actions[tr.action] << ' '
        << rat_str(tr.cost) << " ->";
    for (const auto& [u, p] : tr.target.entries())
      out << ' ' << a.states[u] << ':' << rat_str(p);
    out << "\n";
  }
  return out.str();
}

// --------------------------------------------------- combined transitions

std::pair<Distribution, Rat> strong_combined_cost(
    const std::vector<std::pair<Rat, Transition>>& components) {
  if (components.empty())
    throw MixedTransitions("empty combined transition");
  int src = components.front().second.src;
  int action = components.front().second.action;
  Rat total = 0, cost = 0;
  Distribution target;
  for (const auto& [w, tr] : components) {
    if (tr.src != src || tr.action != action)
      throw MixedTransitions(
          "combined transition mixes sources or actions");
    if (sgn(w) <= 0) throw WeightError("combination weight must be positive");
    total += w;
    cost += w * tr.cost;
    for (const auto& [u, p] : tr.target.entries()) target.add(u, w * p);
  }
  if (total != 1)
    throw WeightError("combination weights sum to " + rat_str(total) +
                      ", not 1");
  return {std::move(target), std::move(cost)};
}

// --------------------------------------------------------------- MDP reward

const std::vector<std::pair<int, Rat>>* MdpPolicy::lookup(
    const std::vector<int>& frag) const {
  if (stationary) {
    std::vector<int> key{frag.back()};
    auto it = choice.find(key);
    return it == choice.end() ? nullptr : &it->second;
  }
  auto it = choice.find(frag);
  return it == choice.end() ? nullptr : &it->second;
}

namespace {

void reward_rec(const Cpa& m, const MdpPolicy& pol, std::vector<int>& frag,
                int depth, const Rat& prob, const Rat& reward, Rat& total) {
  if (depth == pol.horizon) {
    total += reward * prob;
    return;
  }
  const auto* dist = pol.lookup(frag);
  if (!dist) return;  // no choice: no length-N extension through here
  int s = frag.back();
  Rat mass = 0;
  for (const auto& [action, q] : *dist) {
    if (sgn(q) <= 0)
      throw ValidationError("policy assigns non-positive probability");
    mass += q;
    int ti = -1;
    for (int i : m.out[s])
      if (m.transitions[i].action == action) ti = i;
    if (ti < 0)
      throw ValidationError("policy chooses action not enabled at '" +
                            m.states[s] + "'");
    const Transition& tr = m.transitions[ti];
    for (const auto& [u, p] : tr.target.entries()) {
      frag.push_back(action);
      frag.push_back(u);
      reward_rec(m, pol, frag, depth + 1, prob * q * p, reward + tr.cost,
                 total);
      frag.pop_back();
      frag.pop_back();
    }
  }
  if (mass > 1) throw ValidationError("policy choice mass exceeds 1");
}

}  // namespace

Rat mdp_expected_total_reward(const Cpa& m, const MdpPolicy& policy) {
  for (int s = 0; s < m.n_states(); ++s) {
    std::vector<bool> seen(m.actions.size(), false);
    for (int ti : m.out[s]) {
      int act = m.transitions[ti].action;
      if (seen[act])
        throw NotAnMdp("state '" + m.states[s] +
                       "' enables two transitions labelled '" +
                       m.actions[act] + "'");
      seen[act] = true;
    }
  }
  if (policy.horizon < 0) throw ValidationError("negative horizon");
  Rat total = 0;
  std::vector<int> frag{m.start};
  reward_rec(m, policy, frag, 0, Rat(1), Rat(0), total);
  return total;
}

// ------------------------------------------------------------ disjoint union

DisjointUnion disjoint_union(const Cpa& a1, const Cpa& a2) {
  DisjointUnion u;
  Cpa& m = u.model;
  std::string p1 = a1.name, p2 = a2.name;
  // '~' keeps the names safe to quote in relation files, where '#'
  // would start a comment.
  if (p1 == p2) {
    p1 += "~1";
    p2 += "~2";
  }
  m.name = a1.name + "+" + a2.name;

  for (std::size_t i = 0; i < a1.actions.size(); ++i)
    m.add_action(a1.actions[i], a1.kinds[i]);
  for (std::size_t i = 0; i < a2.actions.size(); ++i) {
    auto it = m.action_index.find(a2.actions[i]);
    if (it == m.action_index.end()) {
      m.add_action(a2.actions[i], a2.kinds[i]);
    } else if (m.kinds[it->second] != a2.kinds[i]) {
      throw AlphabetClash("action '" + a2.actions[i] +
                          "' is external on one side, internal on the other");
    }
  }

  auto add_side = [&](const Cpa& a, const std::string& prefix, int side) {
    int base = m.n_states();
    for (const auto& s : a.states) {
      m.add_state(prefix + "." + s);
      u.side.push_back(side);
      u.orig.push_back(static_cast<int>(u.orig.size()) - base);
    }
    for (const auto& tr : a.transitions) {
      Transition nt;
      nt.src = base + tr.src;
      nt.action = m.action_id(a.actions[tr.action]);
      nt.cost = tr.cost;
      for (const auto& [s, p] : tr.target.entries()) nt.target.add(base + s, p);
      m.transitions.push_back(std::move(nt));
    }
    return base;
  };
  u.start1 = add_side(a1, p1, 0) + a1.start;
  u.start2 = add_side(a2, p2, 1) + a2.start;
  m.start = u.start1;
  m.finalize();
  return u;
}

}  // namespace cpa

/* sched.cc -- determinate schedulers over the two-stage chain */
#include "cpa/sched.hh"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

#include "cpa/errors.hh"

namespace cpa {

namespace {

const SchedChoice kStopChoice{};

// Solve A x = b exactly by Gaussian elimination with partial (first
// nonzero) pivoting.  A must be square and nonsingular.
std::vector<Rat> gauss_solve(std::vector<std::vector<Rat>> a,
                             std::vector<Rat> b) {
  int m = static_cast<int>(a.size());
  for (int col = 0; col < m; ++col) {
    int piv = -1;
    for (int r = col; r < m && piv < 0; ++r)
      if (!is_zero(a[r][col])) piv = r;
    if (piv < 0) throw Error("gauss_solve: singular system");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = 0; r < m; ++r) {
      if (r == col || is_zero(a[r][col])) continue;
      Rat factor = a[r][col] / a[col][col];
      for (int c = col; c < m; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<Rat> x(m);
  for (int r = 0; r < m; ++r) x[r] = b[r] / a[r][r];
  return x;
}

// Per-key data of the absorbing chain: validated firing probabilities,
// the stop mass that counts as successful termination, and the
// one-step cost.
struct ChainNode {
  int state = -1;
  Stage stage = Stage::PreAction;
  Rat good_stop;                          // stop mass with the right trace
  Rat bad_stop;                           // stop mass before an external a
  Rat step_cost;                          // Σ fire·cost
  std::vector<std::pair<int, Rat>> move;  // (node index, probability)
};

struct Chain {
  std::vector<ChainNode> nodes;  // index 0 = start key
  std::map<std::pair<int, Stage>, int> index;
};

void validate_choice(const SchedChoice& ch, int state, Stage stage,
                     int action, const Cpa& autom) {
  Rat total = ch.stop;
  if (is_negative(ch.stop))
    throw WeightError("scheduler: negative stop mass");
  for (const auto& [tr, p] : ch.fire) {
    if (tr < 0 || tr >= static_cast<int>(autom.transitions.size()))
      throw ValidationError("scheduler: unknown transition index");
    const Transition& t = autom.transitions[tr];
    if (t.src != state)
      throw ValidationError("scheduler: transition " + std::to_string(tr) +
                            " does not leave state '" + autom.states[state] +
                            "'");
    bool internal = autom.is_internal(t.action);
    if (!internal && (t.action != action || stage != Stage::PreAction))
      throw ValidationError(
          "scheduler: external transition fired outside the single a-step");
    if (!(p > 0)) throw WeightError("scheduler: non-positive firing mass");
    total += p;
  }
  if (total != 1)
    throw WeightError("scheduler: firing and stop masses do not sum to 1");
}

// Build the reachable part of the chain, start key first.
Chain build_chain(const DeterminateScheduler& s, int start,
                  const Cpa& autom) {
  if (start < 0 || start >= autom.n_states())
    throw UnknownState("scheduler: unknown start state");
  bool external = s.action != kTau;
  Chain chain;
  std::deque<std::pair<int, Stage>> queue;
  auto visit = [&](int state, Stage stage) {
    auto key = std::make_pair(state, stage);
    auto it = chain.index.find(key);
    if (it != chain.index.end()) return it->second;
    int id = static_cast<int>(chain.nodes.size());
    chain.index.emplace(key, id);
    chain.nodes.push_back({state, stage, Rat(0), Rat(0), Rat(0), {}});
    queue.push_back(key);
    return id;
  };
  visit(start, Stage::PreAction);
  while (!queue.empty()) {
    auto [state, stage] = queue.front();
    queue.pop_front();
    const SchedChoice& ch = s.at(state, stage);
    validate_choice(ch, state, stage, s.action, autom);
    int id = chain.index.at({state, stage});
    bool good = !external || stage == Stage::PostAction;
    std::map<int, Rat> probs;
    Rat cost = 0;
    for (const auto& [tr, p] : ch.fire) {
      const Transition& t = autom.transitions[tr];
      Stage next =
          autom.is_internal(t.action) ? stage : Stage::PostAction;
      cost += p * t.cost;
      for (const auto& [u, q] : t.target.entries())
        probs[visit(u, next)] += p * q;
    }
    ChainNode& node = chain.nodes[id];
    (good ? node.good_stop : node.bad_stop) = ch.stop;
    node.step_cost = cost;
    node.move.assign(probs.begin(), probs.end());
  }
  return chain;
}

struct Induced {
  Distribution target;
  Rat cost;
};

// Exact termination check plus forward visit counts; the single
// source of both the target distribution and the ball cost.
Induced solve_chain(const DeterminateScheduler& s, int start,
                    const Cpa& autom) {
  Chain chain = build_chain(s, start, autom);
  int m = static_cast<int>(chain.nodes.size());

  // Keys that can reach successful stop mass.
  std::vector<std::vector<int>> preds(m);
  for (int v = 0; v < m; ++v)
    for (const auto& [u, p] : chain.nodes[v].move) preds[u].push_back(v);
  std::vector<char> can_stop(m, 0);
  std::deque<int> queue;
  for (int v = 0; v < m; ++v)
    if (chain.nodes[v].good_stop > 0) {
      can_stop[v] = 1;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : preds[v])
      if (!can_stop[u]) {
        can_stop[u] = 1;
        queue.push_back(u);
      }
  }

  // Termination-probability system over the keys that can stop at
  // all; everywhere else the probability is 0.  The restricted matrix
  // is nonsingular because every such key keeps a positive escape.
  std::vector<int> sys(m, -1);
  std::vector<int> members;
  for (int v = 0; v < m; ++v)
    if (can_stop[v]) {
      sys[v] = static_cast<int>(members.size());
      members.push_back(v);
    }
  Rat reach_mass = 0;
  if (sys[0] >= 0) {
    int k = static_cast<int>(members.size());
    std::vector<std::vector<Rat>> a(k, std::vector<Rat>(k, Rat(0)));
    std::vector<Rat> b(k);
    for (int i = 0; i < k; ++i) {
      const ChainNode& node = chain.nodes[members[i]];
      a[i][i] = 1;
      for (const auto& [u, p] : node.move)
        if (sys[u] >= 0) a[i][sys[u]] -= p;
      b[i] = node.good_stop;
    }
    reach_mass = gauss_solve(std::move(a), std::move(b))[sys[0]];
  }
  if (reach_mass != 1)
    throw NonTerminating(
        "scheduler stops with the required trace only with probability " +
        rat_str(reach_mass));

  // Expected visits y = e_start + Mᵀ·y, solvable since every key now
  // terminates almost surely.
  std::vector<std::vector<Rat>> a(m, std::vector<Rat>(m, Rat(0)));
  std::vector<Rat> b(m, Rat(0));
  for (int v = 0; v < m; ++v) a[v][v] = 1;
  for (int v = 0; v < m; ++v)
    for (const auto& [u, p] : chain.nodes[v].move) a[u][v] -= p;
  b[0] = 1;
  std::vector<Rat> visits = gauss_solve(std::move(a), std::move(b));

  Induced out;
  out.cost = 0;
  for (int v = 0; v < m; ++v) {
    const ChainNode& node = chain.nodes[v];
    if (node.good_stop > 0)
      out.target.add(node.state, visits[v] * node.good_stop);
    out.cost += visits[v] * node.step_cost;
  }
  if (!out.target.full())
    throw Error("solve_chain: induced target mass is not 1");
  return out;
}

}  // namespace

const SchedChoice& DeterminateScheduler::at(int state, Stage stage) const {
  auto it = choice.find({state, stage});
  return it == choice.end() ? kStopChoice : it->second;
}

// ------------------------------------------------------------ extraction

DeterminateScheduler extract_scheduler(const LpResult& sol,
                                       const FlowNetwork& net) {
  if (sol.status != LpStatus::Optimal)
    throw NotOptimal("extract_scheduler: solution is not optimal");
  if (sol.assignment.size() != net.edges.size())
    throw DimensionMismatch(
        "extract_scheduler: assignment does not cover the edge list");
  DeterminateScheduler sched;
  sched.action = net.action;
  // Inflow per vertex, and the outgoing choice flows.
  std::vector<Rat> inflow(net.vertices.size(), Rat(0));
  for (std::size_t e = 0; e < net.edges.size(); ++e)
    inflow[net.edges[e].to] += sol.assignment[e];

  auto key_of = [&](int vx) -> std::optional<std::pair<int, Stage>> {
    const Vertex& v = net.vertices[vx];
    if (v.tag == VertexTag::State)
      return std::make_pair(v.state, Stage::PreAction);
    if (v.tag == VertexTag::PostState)
      return std::make_pair(v.state, Stage::PostAction);
    return std::nullopt;
  };

  std::map<std::pair<int, Stage>, SchedChoice> raw;
  std::map<std::pair<int, Stage>, Rat> in;
  for (std::size_t vx = 0; vx < net.vertices.size(); ++vx) {
    auto key = key_of(static_cast<int>(vx));
    if (key) in[*key] = inflow[vx];
  }
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const Edge& edge = net.edges[e];
    auto key = key_of(edge.from);
    if (!key || is_zero(sol.assignment[e])) continue;
    if (edge.kind == EdgeKind::PreTau || edge.kind == EdgeKind::PostTau ||
        edge.kind == EdgeKind::AStep)
      raw[*key].fire.emplace_back(edge.tr, sol.assignment[e]);
  }
  for (auto& [key, ch] : raw) {
    Rat flow = in.at(key);
    Rat fired = 0;
    for (auto& [tr, f] : ch.fire) {
      f /= flow;
      fired += f;
    }
    ch.stop = 1 - fired;
    sched.choice[key] = ch;
  }
  // Keys with inflow but no fired transition stop explicitly; keys
  // without inflow are left to the default stop-1 rule.
  for (const auto& [key, flow] : in)
    if (!is_zero(flow) && !sched.choice.count(key))
      sched.choice[key] = kStopChoice;
  return sched;
}

// ------------------------------------------------------- induced values

Distribution scheduler_target(const DeterminateScheduler& s, int start,
                              const Cpa& autom) {
  return solve_chain(s, start, autom).target;
}

Rat scheduler_cost(const DeterminateScheduler& s, int start,
                   const Cpa& autom) {
  return solve_chain(s, start, autom).cost;
}

// ------------------------------------------------------------ ray form

Rat ray_cost_acyclic(const DeterminateScheduler& s, int start,
                     const Cpa& autom) {
  if (start < 0 || start >= autom.n_states())
    throw UnknownState("ray_cost_acyclic: unknown start state");
  // The fragment set is finite only when the internal/a-step graph is
  // acyclic; check it up front.
  int n = autom.n_states();
  std::vector<int> color(n, 0);
  std::function<void(int)> dfs = [&](int v) {
    color[v] = 1;
    for (int ti : autom.out[v]) {
      const Transition& t = autom.transitions[ti];
      if (!autom.is_internal(t.action) && t.action != s.action) continue;
      for (const auto& [u, q] : t.target.entries()) {
        if (color[u] == 1)
          throw CyclicModel("ray_cost_acyclic: internal/a-step cycle through '" +
                            autom.states[u] + "'");
        if (color[u] == 0) dfs(u);
      }
    }
    color[v] = 2;
  };
  for (int v = 0; v < n; ++v)
    if (color[v] == 0) dfs(v);

  Rat total = 0;
  // Depth-first over fragments; cone = probability of reaching exactly
  // this fragment's history, cost = c_σ of the fragment so far.
  std::function<void(int, Stage, Rat, Rat)> walk = [&](int state, Stage stage,
                                                       Rat cone, Rat cost) {
    const SchedChoice& ch = s.at(state, stage);
    validate_choice(ch, state, stage, s.action, autom);
    if (ch.stop > 0) total += cost * cone * ch.stop;
    // Group the fired transitions by label: one fragment step per
    // (label, successor) with the σ̂-normalised cost increment.
    std::map<int, std::vector<std::pair<int, Rat>>> by_label;
    for (const auto& [tr, p] : ch.fire)
      by_label[autom.transitions[tr].action].emplace_back(tr, p);
    for (const auto& [label, fired] : by_label) {
      Stage next = autom.is_internal(label) ? stage : Stage::PostAction;
      std::map<int, Rat> q;  // successor -> step probability
      for (const auto& [tr, p] : fired)
        for (const auto& [u, rho] : autom.transitions[tr].target.entries())
          q[u] += p * rho;
      for (const auto& [u, qu] : q) {
        if (is_zero(qu)) continue;
        Rat inc = 0;
        for (const auto& [tr, p] : fired) {
          Rat rho = autom.transitions[tr].target.at(u);
          if (!is_zero(rho))
            inc += autom.transitions[tr].cost * (p * rho / qu);
        }
        walk(u, next, cone * qu, cost + inc);
      }
    }
  };
  walk(start, Stage::PreAction, Rat(1), Rat(0));
  return total;
}

// ------------------------------------------------------------ the oracle

namespace {

struct Enumerator {
  const Cpa& autom;
  int action;
  const Distribution& challenger;
  const BinaryRelation& rel;
  std::vector<int> dist_pre, dist_post;  // BFS depth per state, -1 = far
  int depth;
  std::map<std::pair<int, Stage>, int> chosen;  // -1 = stop
  std::optional<Rat> best;

  // Options at a key, stop encoded as -1.  Stop is omitted at
  // PreAction keys of an external label: reaching one and stopping can
  // never induce a weak transition with the right trace.
  std::vector<int> options(int state, Stage stage) const {
    bool external = action != kTau;
    std::vector<int> opts;
    int d = stage == Stage::PreAction ? dist_pre[state] : dist_post[state];
    bool capped = d < 0 || d > depth;
    if (!(external && stage == Stage::PreAction) || capped) opts.push_back(-1);
    if (capped) return opts;
    for (int ti : autom.out[state]) {
      const Transition& t = autom.transitions[ti];
      if (autom.is_internal(t.action))
        opts.push_back(ti);
      else if (external && t.action == action && stage == Stage::PreAction)
        opts.push_back(ti);
    }
    return opts;
  }

  // First key reachable under the current partial assignment that has
  // no choice yet (deterministic order: BFS from the start key).
  std::optional<std::pair<int, Stage>> frontier(int start) {
    std::deque<std::pair<int, Stage>> queue{{start, Stage::PreAction}};
    std::set<std::pair<int, Stage>> seen{{start, Stage::PreAction}};
    while (!queue.empty()) {
      auto key = queue.front();
      queue.pop_front();
      auto it = chosen.find(key);
      if (it == chosen.end()) return key;
      if (it->second < 0) continue;
      const Transition& t = autom.transitions[it->second];
      Stage next =
          autom.is_internal(t.action) ? key.second : Stage::PostAction;
      for (const auto& [u, q] : t.target.entries())
        if (seen.insert({u, next}).second) queue.push_back({u, next});
    }
    return std::nullopt;
  }

  void evaluate(int start) {
    DeterminateScheduler s;
    s.action = action;
    for (const auto& [key, tr] : chosen) {
      if (tr < 0) continue;
      SchedChoice ch;
      ch.fire = {{tr, Rat(1)}};
      ch.stop = 0;
      s.choice[key] = ch;
    }
    Induced got;
    try {
      got = solve_chain(s, start, autom);
    } catch (const NonTerminating&) {
      return;
    }
    if (!lift_check(rel, challenger, got.target)) return;
    if (!best || got.cost < *best) best = got.cost;
  }

  void run(int start) {
    auto key = frontier(start);
    if (!key) {
      evaluate(start);
      return;
    }
    for (int opt : options(key->first, key->second)) {
      chosen[*key] = opt;
      run(start);
    }
    chosen.erase(*key);
  }
};

}  // namespace

std::optional<Rat> enumerate_min_cost(int start, int a,
                                      const Distribution& target,
                                      const BinaryRelation& r,
                                      const Cpa& autom, int depth) {
  if (start < 0 || start >= autom.n_states())
    throw UnknownState("enumerate_min_cost: unknown start state");
  int n = autom.n_states();
  // Static BFS depths over the two-stage step graph bound the keys a
  // candidate may commit to.
  std::vector<int> dist_pre(n, -1), dist_post(n, -1);
  std::deque<std::pair<int, Stage>> queue{{start, Stage::PreAction}};
  dist_pre[start] = 0;
  auto dist_of = [&](int v, Stage st) -> int& {
    return st == Stage::PreAction ? dist_pre[v] : dist_post[v];
  };
  while (!queue.empty()) {
    auto [v, st] = queue.front();
    queue.pop_front();
    for (int ti : autom.out[v]) {
      const Transition& t = autom.transitions[ti];
      Stage next;
      if (autom.is_internal(t.action))
        next = st;
      else if (a != kTau && t.action == a && st == Stage::PreAction)
        next = Stage::PostAction;
      else
        continue;
      for (const auto& [u, q] : t.target.entries())
        if (dist_of(u, next) < 0) {
          dist_of(u, next) = dist_of(v, st) + 1;
          queue.push_back({u, next});
        }
    }
  }
  Enumerator en{autom, a, target, r, std::move(dist_pre),
                std::move(dist_post), depth, {}, std::nullopt};
  en.run(start);
  return en.best;
}

// ------------------------------------------------------------ printing

std::string serialize_scheduler(const DeterminateScheduler& s,
                                const Cpa& autom) {
  std::ostringstream out;
  for (const auto& [key, ch] : s.choice) {
    out << "(" << autom.states[key.first] << ", "
        << (key.second == Stage::PreAction ? "pre" : "post") << ") -> [";
    bool first = true;
    for (const auto& [tr, p] : ch.fire) {
      if (!first) out << ' ';
      first = false;
      out << "tr" << tr << ":" << rat_str(p);
    }
    out << "] stop:" << rat_str(ch.stop) << "\n";
  }
  return out.str();
}

}  // namespace cpa

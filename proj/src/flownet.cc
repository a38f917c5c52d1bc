/* flownet.cc -- building and solving the network LPs */
#include "cpa/flownet.hh"

#include <algorithm>
#include <deque>
#include <sstream>

#include "cpa/errors.hh"

namespace cpa {

namespace {

bool uses_tau_edges(const Cpa& a, int tr) {
  return a.is_internal(a.transitions[tr].action);
}

}  // namespace

// ------------------------------------------------------------ the network

FlowNetwork build_network(int t, int a, const Distribution& mu,
                          const BinaryRelation& r, const Cpa& autom) {
  int n = autom.n_states();
  if (t < 0 || t >= n) throw UnknownState("build_network: bad anchor state");
  if (a != kTau) {
    if (a < 0 || a >= static_cast<int>(autom.actions.size()))
      throw UnknownAction("build_network: bad action id");
    if (autom.is_internal(a))
      throw UnknownAction(
          "build_network: expected an external action or tau");
  }
  if (r.left_size() != n || r.right_size() != n)
    throw UniverseMismatch("build_network: relation universe mismatch");
  for (const auto& [u, p] : mu.entries())
    if (u < 0 || u >= n)
      throw UnknownState("build_network: target support outside automaton");

  FlowNetwork net;
  net.t = t;
  net.action = a;
  net.mu = mu;
  net.rel = r;
  net.autom = &autom;
  bool external = a != kTau;

  auto add_vertex = [&](VertexTag tag, int state, int tr, std::string name) {
    net.vertices.push_back({tag, state, tr});
    net.vnames.push_back(std::move(name));
    return static_cast<int>(net.vertices.size()) - 1;
  };

  net.source = add_vertex(VertexTag::Source, -1, -1, "src");
  net.sink = add_vertex(VertexTag::Sink, -1, -1, "snk");
  net.state_vx.assign(n, -1);
  net.post_vx.assign(n, -1);
  net.rel_vx.assign(n, -1);
  net.trans_vx.assign(autom.transitions.size(), -1);
  net.post_trans_vx.assign(autom.transitions.size(), -1);

  for (int v = 0; v < n; ++v)
    net.state_vx[v] = add_vertex(VertexTag::State, v, -1, autom.states[v]);
  for (std::size_t ti = 0; ti < autom.transitions.size(); ++ti) {
    const Transition& tr = autom.transitions[ti];
    bool relevant = uses_tau_edges(autom, static_cast<int>(ti)) ||
                    (external && tr.action == a);
    if (!relevant) continue;
    net.trans_vx[ti] =
        add_vertex(VertexTag::TransState, tr.src, static_cast<int>(ti),
                   autom.states[tr.src] + "^tr" + std::to_string(ti));
  }
  if (external) {
    const std::string& aname = autom.actions[a];
    for (int v = 0; v < n; ++v)
      net.post_vx[v] = add_vertex(VertexTag::PostState, v, -1,
                                  autom.states[v] + "_" + aname);
    for (std::size_t ti = 0; ti < autom.transitions.size(); ++ti) {
      if (net.trans_vx[ti] < 0) continue;
      const Transition& tr = autom.transitions[ti];
      net.post_trans_vx[ti] = add_vertex(
          VertexTag::PostTransState, tr.src, static_cast<int>(ti),
          autom.states[tr.src] + "^tr" + std::to_string(ti) + "_" + aname);
    }
  }
  for (int v = 0; v < n; ++v)
    net.rel_vx[v] =
        add_vertex(VertexTag::RelState, v, -1, autom.states[v] + "_R");

  auto add_edge = [&](int from, int to, EdgeKind kind, int tr) {
    net.edges.push_back({from, to, kind, tr});
  };

  add_edge(net.source, net.state_vx[t], EdgeKind::SourceArc, -1);
  for (std::size_t ti = 0; ti < autom.transitions.size(); ++ti) {
    const Transition& tr = autom.transitions[ti];
    int k = static_cast<int>(ti);
    if (uses_tau_edges(autom, k)) {
      add_edge(net.state_vx[tr.src], net.trans_vx[ti], EdgeKind::PreTau, k);
      for (const auto& [u, p] : tr.target.entries())
        add_edge(net.trans_vx[ti], net.state_vx[u], EdgeKind::PreTauOut, k);
      if (external) {
        add_edge(net.post_vx[tr.src], net.post_trans_vx[ti], EdgeKind::PostTau,
                 k);
        for (const auto& [u, p] : tr.target.entries())
          add_edge(net.post_trans_vx[ti], net.post_vx[u], EdgeKind::PostOut,
                   k);
      }
    } else if (external && tr.action == a) {
      add_edge(net.state_vx[tr.src], net.post_trans_vx[ti], EdgeKind::AStep,
               k);
      for (const auto& [u, p] : tr.target.entries())
        add_edge(net.post_trans_vx[ti], net.post_vx[u], EdgeKind::PostOut, k);
    }
  }
  // (v or v_a, u_R) iff (u, v) ∈ R: defender mass at v may cover the
  // challenger's mass at u.
  for (int v = 0; v < n; ++v) {
    int from = external ? net.post_vx[v] : net.state_vx[v];
    for (int u = 0; u < n; ++u)
      if (r.test(u, v)) add_edge(from, net.rel_vx[u], EdgeKind::RelArc, -1);
  }
  for (int u = 0; u < n; ++u) {
    bool related = false;
    for (int v = 0; v < n && !related; ++v) related = r.test(u, v);
    if (related) add_edge(net.rel_vx[u], net.sink, EdgeKind::SinkArc, -1);
  }
  return net;
}

// ------------------------------------------------------------ the LPs

namespace {

// Build the LP over a subset of edges (mask empty = all).  Rows: source,
// boundary for every state, conservation at live interior vertices,
// balancing per transition-vertex out-edge.
LPProblem build_lp(const FlowNetwork& net, bool mincost,
                   const std::vector<bool>& keep) {
  const Cpa& a = *net.autom;
  LPProblem lp;
  std::vector<int> var_of(net.edges.size(), -1);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    if (!keep.empty() && !keep[e]) continue;
    var_of[e] = lp.nvars++;
    lp.var_names.push_back("f(" + net.vnames[net.edges[e].from] + "," +
                           net.vnames[net.edges[e].to] + ")");
  }
  lp.obj.assign(lp.nvars, Rat(0));
  if (mincost) {
    lp.sense = ObjSense::Minimize;
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
      if (var_of[e] < 0 || net.edges[e].tr < 0) continue;
      EdgeKind k = net.edges[e].kind;
      if (k == EdgeKind::PreTau || k == EdgeKind::PostTau ||
          k == EdgeKind::AStep)
        lp.obj[var_of[e]] = a.transitions[net.edges[e].tr].cost;
    }
  }

  // Source row.
  {
    LPRow row;
    row.name = "src";
    row.rhs = 1;
    for (std::size_t e = 0; e < net.edges.size(); ++e)
      if (net.edges[e].kind == EdgeKind::SourceArc && var_of[e] >= 0)
        row.coef.emplace_back(var_of[e], Rat(1));
    lp.rows.push_back(std::move(row));
  }
  // Boundary rows, one per state of the automaton.
  for (int u = 0; u < a.n_states(); ++u) {
    LPRow row;
    row.name = "bnd(" + a.states[u] + ")";
    row.rhs = net.mu.at(u);
    for (std::size_t e = 0; e < net.edges.size(); ++e)
      if (net.edges[e].kind == EdgeKind::SinkArc && var_of[e] >= 0 &&
          net.vertices[net.edges[e].from].state == u)
        row.coef.emplace_back(var_of[e], Rat(1));
    if (!row.coef.empty() || !is_zero(row.rhs)) lp.rows.push_back(row);
  }
  // Conservation rows.
  std::vector<std::vector<std::pair<int, Rat>>> cons(net.vertices.size());
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    if (var_of[e] < 0) continue;
    cons[net.edges[e].to].emplace_back(var_of[e], Rat(1));
    cons[net.edges[e].from].emplace_back(var_of[e], Rat(-1));
  }
  for (std::size_t v = 0; v < net.vertices.size(); ++v) {
    if (static_cast<int>(v) == net.source || static_cast<int>(v) == net.sink)
      continue;
    if (cons[v].empty()) continue;
    LPRow row;
    row.name = "cons(" + net.vnames[v] + ")";
    row.rhs = 0;
    row.coef = std::move(cons[v]);
    lp.rows.push_back(std::move(row));
  }
  // Balancing rows: each out-edge of a transition vertex carries the
  // in-flow scaled by the branch probability.
  std::vector<int> in_edge(net.vertices.size(), -1);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    EdgeKind k = net.edges[e].kind;
    if (k == EdgeKind::PreTau || k == EdgeKind::PostTau ||
        k == EdgeKind::AStep)
      in_edge[net.edges[e].to] = static_cast<int>(e);
  }
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    EdgeKind k = net.edges[e].kind;
    if (k != EdgeKind::PreTauOut && k != EdgeKind::PostOut) continue;
    int vin = in_edge[net.edges[e].from];
    bool live = var_of[e] >= 0 || (vin >= 0 && var_of[vin] >= 0);
    if (!live) continue;
    const Transition& tr = a.transitions[net.edges[e].tr];
    int succ = net.vertices[net.edges[e].to].state;
    LPRow row;
    row.name = "bal(" + net.vnames[net.edges[e].from] + "," +
               net.vnames[net.edges[e].to] + ")";
    row.rhs = 0;
    if (var_of[e] >= 0) row.coef.emplace_back(var_of[e], Rat(1));
    if (vin >= 0 && var_of[vin] >= 0)
      row.coef.emplace_back(var_of[vin], -tr.target.at(succ));
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

}  // namespace

LPProblem build_feasibility_lp(const FlowNetwork& n) {
  return build_lp(n, false, {});
}

LPProblem build_mincost_lp(const FlowNetwork& n, const Cpa& autom) {
  if (autom.n_states() != n.autom->n_states() ||
      autom.transitions.size() != n.autom->transitions.size())
    throw UniverseMismatch("build_mincost_lp: automaton mismatch");
  return build_lp(n, true, {});
}

LPProblem add_cost_constraint(const LPProblem& lp, const Rat& bound,
                              BoundMode mode) {
  LPProblem out = lp;
  LPRow row;
  row.name = "cost";
  row.rhs = bound;
  row.rel = mode == BoundMode::Equal ? RowRel::Eq : RowRel::Le;
  for (int j = 0; j < lp.nvars; ++j)
    if (!is_zero(lp.obj[j])) row.coef.emplace_back(j, lp.obj[j]);
  out.rows.push_back(std::move(row));
  return out;
}

std::pair<Cpa, int> build_hyper_instance(const Distribution& mu_from,
                                         const Cpa& autom) {
  for (const auto& [s, p] : mu_from.entries())
    if (s < 0 || s >= autom.n_states())
      throw UnknownState("build_hyper_instance: support outside automaton");
  if (!mu_from.full())
    throw WeightError("build_hyper_instance: distribution not full");
  Cpa copy = autom;
  std::string fresh = "__hyper";
  while (copy.state_index.count(fresh)) fresh += "'";
  int h = copy.add_state(fresh);
  std::string act = "__step";
  while (copy.action_index.count(act)) act += "'";
  int aid = copy.add_action(act, ActionKind::Internal);
  Transition tr;
  tr.src = h;
  tr.action = aid;
  tr.cost = 0;
  tr.target = mu_from;
  copy.transitions.push_back(std::move(tr));
  copy.finalize();
  return {std::move(copy), h};
}

// ------------------------------------------------------- §6.3.3 LP

LPProblem build_strongprob_lp(int t, int a, const Distribution& mu,
                              const BinaryRelation& w, const Cpa& autom) {
  int n = autom.n_states();
  if (w.left_size() != n || w.right_size() != n)
    throw UniverseMismatch("build_strongprob_lp: relation universe mismatch");
  std::vector<int> trs;
  for (int ti : autom.out[t])
    if (autom.transitions[ti].action == a) trs.push_back(ti);
  if (trs.empty())
    throw NoSuchTransitions("state '" + autom.states[t] +
                            "' enables no transition labelled '" +
                            autom.actions[a] + "'");

  LPProblem lp;
  lp.sense = ObjSense::Feasibility;
  int k = static_cast<int>(trs.size());
  for (int i = 0; i < k; ++i)
    lp.var_names.push_back("p" + std::to_string(i + 1));
  lp.nvars = k;
  // Weighting variables for (u, v) ∈ w with u in supp(mu).
  std::vector<std::vector<int>> var_uv;  // per support index, per state v
  for (std::size_t ui = 0; ui < mu.support_size(); ++ui) {
    int u = mu.entries()[ui].first;
    var_uv.emplace_back(n, -1);
    for (int v = 0; v < n; ++v) {
      if (!w.test(u, v)) continue;
      var_uv[ui][v] = lp.nvars++;
      lp.var_names.push_back("f(" + autom.states[u] + "," + autom.states[v] +
                             ")");
    }
  }
  lp.obj.assign(lp.nvars, Rat(0));

  {
    LPRow row;
    row.name = "sum_p";
    row.rhs = 1;
    for (int i = 0; i < k; ++i) row.coef.emplace_back(i, Rat(1));
    lp.rows.push_back(std::move(row));
  }
  for (int j = 0; j < lp.nvars; ++j) {
    LPRow row;  // printed form: every variable bounded by 1
    row.name = "ub(" + lp.var_names[j] + ")";
    row.rel = RowRel::Le;
    row.rhs = 1;
    row.coef.emplace_back(j, Rat(1));
    lp.rows.push_back(std::move(row));
  }
  // Row sums: μ(u) = Σ_v f_{u,v}.
  for (std::size_t ui = 0; ui < mu.support_size(); ++ui) {
    LPRow row;
    row.name = "row(" + autom.states[mu.entries()[ui].first] + ")";
    row.rhs = mu.entries()[ui].second;
    for (int v = 0; v < n; ++v)
      if (var_uv[ui][v] >= 0) row.coef.emplace_back(var_uv[ui][v], Rat(1));
    lp.rows.push_back(std::move(row));
  }
  // Column sums: Σ_u f_{u,v} = Σ_i p_i·μ_i(v), for every v touched by
  // a weighting variable or by some μ_i.
  std::vector<bool> touched(n, false);
  for (std::size_t ui = 0; ui < mu.support_size(); ++ui)
    for (int v = 0; v < n; ++v)
      if (var_uv[ui][v] >= 0) touched[v] = true;
  for (int i = 0; i < k; ++i)
    for (const auto& [v, p] : autom.transitions[trs[i]].target.entries())
      touched[v] = true;
  for (int v = 0; v < n; ++v) {
    if (!touched[v]) continue;
    LPRow row;
    row.name = "col(" + autom.states[v] + ")";
    row.rhs = 0;
    for (std::size_t ui = 0; ui < mu.support_size(); ++ui)
      if (var_uv[ui][v] >= 0) row.coef.emplace_back(var_uv[ui][v], Rat(1));
    for (int i = 0; i < k; ++i) {
      Rat q = autom.transitions[trs[i]].target.at(v);
      if (!is_zero(q)) row.coef.emplace_back(i, -q);
    }
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

LPProblem add_strongprob_cost(const LPProblem& lp, int t, int a,
                              const Cpa& autom, const Rat& bound,
                              BoundMode mode) {
  LPProblem out = lp;
  LPRow row;
  row.name = "cost";
  row.rhs = bound;
  row.rel = mode == BoundMode::Equal ? RowRel::Eq : RowRel::Le;
  int i = 0;
  for (int ti : autom.out[t])
    if (autom.transitions[ti].action == a)
      row.coef.emplace_back(i++, autom.transitions[ti].cost);
  out.rows.push_back(std::move(row));
  return out;
}

// ------------------------------------------------------------ solving

bool lp_check_assignment(const LPProblem& lp, const std::vector<Rat>& x) {
  if (static_cast<int>(x.size()) != lp.nvars) return false;
  for (const Rat& v : x)
    if (is_negative(v)) return false;
  for (const auto& row : lp.rows) {
    Rat lhs = 0;
    for (const auto& [j, c] : row.coef) lhs += c * x[j];
    if (row.rel == RowRel::Eq ? lhs != row.rhs : lhs > row.rhs) return false;
  }
  return true;
}

LpResult solve_lp_problem(const LPProblem& p) {
  int slacks = 0;
  for (const auto& row : p.rows)
    if (row.rel == RowRel::Le) ++slacks;
  StandardFormLP std_lp;
  std_lp.n = p.nvars + slacks;
  std_lp.obj.assign(std_lp.n, Rat(0));
  for (int j = 0; j < p.nvars; ++j)
    if (p.sense == ObjSense::Minimize) std_lp.obj[j] = p.obj[j];
  int next_slack = p.nvars;
  for (const auto& row : p.rows) {
    std::vector<Rat> r(std_lp.n, Rat(0));
    for (const auto& [j, c] : row.coef) r[j] += c;
    if (row.rel == RowRel::Le) r[next_slack++] = 1;
    std_lp.rows.push_back(std::move(r));
    std_lp.rhs.push_back(row.rhs);
  }
  LpResult res = solve(std_lp);
  if (res.status == LpStatus::Optimal)
    res.assignment.resize(p.nvars);  // drop slacks
  return res;
}

// Prune the network before solving.  Dead ends are deleted to a fixed
// point: a transition vertex dies when any branch is dead (balancing
// forces flow down every branch), any other vertex when all successors
// are dead.  Deletion — not backward reachability — is required
// because feasible flows may circulate through τ-cycles with no
// forward progress per lap; such vertices keep each other alive.  In
// any feasible flow the positive-throughput vertices survive every
// deletion round, so nothing needed is lost; what the reach pass then
// drops are source-disconnected circulations, which never touch a
// boundary arc and can be stripped from any solution at no extra cost.
LpResult solve_network(const FlowNetwork& net, ObjSense sense,
                       const std::optional<std::pair<Rat, BoundMode>>& bound) {
  std::size_t nv = net.vertices.size();
  std::vector<std::vector<int>> out_edges(nv), in_edges(nv);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    out_edges[net.edges[e].from].push_back(static_cast<int>(e));
    in_edges[net.edges[e].to].push_back(static_cast<int>(e));
  }
  std::vector<char> usable(nv, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < nv; ++v) {
      if (!usable[v] || static_cast<int>(v) == net.sink) continue;
      VertexTag tag = net.vertices[v].tag;
      bool and_node = tag == VertexTag::TransState ||
                      tag == VertexTag::PostTransState;
      bool ok;
      if (and_node) {
        ok = !out_edges[v].empty();
        for (int e : out_edges[v]) ok = ok && usable[net.edges[e].to];
      } else {
        ok = false;
        for (int e : out_edges[v]) ok = ok || usable[net.edges[e].to];
      }
      if (!ok) {
        usable[v] = 0;
        changed = true;
      }
    }
  }
  // Forward reachability through usable vertices.
  std::vector<char> reach(nv, 0);
  std::deque<int> queue{net.source};
  reach[net.source] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (!usable[v]) continue;
    for (int e : out_edges[v]) {
      int u = net.edges[e].to;
      if (!reach[u] && usable[u]) {
        reach[u] = 1;
        queue.push_back(u);
      }
    }
  }
  std::vector<bool> keep(net.edges.size(), false);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    int f = net.edges[e].from, to = net.edges[e].to;
    keep[e] = usable[f] && usable[to] && reach[f] && reach[to];
  }

  LPProblem lp =
      build_lp(net, sense == ObjSense::Minimize || bound.has_value(), keep);
  if (bound) lp = add_cost_constraint(lp, bound->first, bound->second);
  lp.sense = sense;
  LpResult res = solve_lp_problem(lp);
  if (res.status != LpStatus::Optimal) return res;

  // Report flows over the full edge list.
  std::vector<Rat> full(net.edges.size(), Rat(0));
  int var = 0;
  for (std::size_t e = 0; e < net.edges.size(); ++e)
    if (keep[e]) full[e] = res.assignment[var++];
  res.assignment = std::move(full);
  if (sense != ObjSense::Minimize) res.value = 0;
  return res;
}

std::string dump_lp(const LPProblem& lp) {
  std::ostringstream out;
  auto term = [&](std::ostringstream& os, bool& first, const Rat& c, int j) {
    if (is_zero(c)) return;
    if (!first) os << " + ";
    first = false;
    if (c != 1) os << rat_str(c) << "*";
    os << lp.var_names[j];
  };
  if (lp.sense == ObjSense::Minimize) {
    out << "min:";
    bool first = true;
    std::ostringstream os;
    for (int j = 0; j < lp.nvars; ++j) term(os, first, lp.obj[j], j);
    out << ' ' << (first ? "0" : os.str()) << "\n";
  } else {
    out << "feasibility\n";
  }
  for (const auto& row : lp.rows) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [j, c] : row.coef) term(os, first, c, j);
    out << row.name << ": " << (first ? "0" : os.str())
        << (row.rel == RowRel::Eq ? " = " : " <= ") << rat_str(row.rhs)
        << "\n";
  }
  out << "vars >= 0:";
  for (const auto& name : lp.var_names) out << ' ' << name;
  out << "\n";
  return out.str();
}

}  // namespace cpa

/* main.cc -- the `cpa` command-line tool */

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cpa/bisim.hh"
#include "cpa/compose.hh"
#include "cpa/errors.hh"
#include "cpa/flownet.hh"
#include "cpa/lp.hh"
#include "cpa/model.hh"
#include "cpa/relations.hh"
#include "cpa/sched.hh"

namespace {

using json = nlohmann::json;
using namespace cpa;

// Exit codes are a contract: 0 holds / success, 1 does not hold (or
// infeasible / incompatible), 2 usage or input error, 3 internal error.
constexpr int kExitHolds = 0;
constexpr int kExitNotHolds = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

/// Collects the machine-readable report: command echo, per-command
/// result payload, LP work counters, wall time, and warnings.
struct Report {
  std::string command;
  json result = json::object();
  std::vector<std::string> warnings;
  LpStats before = lp_stats_snapshot();
  std::chrono::steady_clock::time_point t0 =
      std::chrono::steady_clock::now();

  explicit Report(std::string cmd) : command(std::move(cmd)) {}

  void warn_all(const std::vector<std::string>& ws) {
    warnings.insert(warnings.end(), ws.begin(), ws.end());
  }

  json finish() const {
    LpStats after = lp_stats_snapshot();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    return json{{"command", command},
                {"result", result},
                {"stats",
                 {{"lp_solved", after.solves - before.solves},
                  {"pivots", after.pivots - before.pivots},
                  {"wall_ms", ms}}},
                {"warnings", warnings}};
  }
};

void emit(const Report& rep, bool as_json, const std::string& plain) {
  if (as_json) {
    std::cout << rep.finish().dump(2) << "\n";
  } else {
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    if (!plain.empty()) std::cout << plain << "\n";
  }
}

ParseResult load_model(const std::string& path) {
  return parse_model(read_file(path));
}

json classes_json(const Partition& w, const std::vector<std::string>& names) {
  json out = json::array();
  for (const auto& cls : w.classes) {
    json c = json::array();
    for (int s : cls) c.push_back(names[s]);
    out.push_back(c);
  }
  return out;
}

json pairs_json(const BinaryRelation& r, const std::vector<std::string>& names) {
  json out = json::array();
  for (int x = 0; x < r.left_size(); ++x)
    for (int y = 0; y < r.right_size(); ++y)
      if (r.test(x, y)) out.push_back(json::array({names[x], names[y]}));
  return out;
}

RelationQuery parse_query(const std::string& rel, const std::string& cost) {
  RelationQuery q;
  if (rel == "strong")
    q.rel = RelationQuery::Rel::Strong;
  else if (rel == "strong-prob")
    q.rel = RelationQuery::Rel::StrongProb;
  else
    q.rel = RelationQuery::Rel::WeakProb;
  if (cost == "preserving")
    q.cost = CostMode::Preserving;
  else if (cost == "minor")
    q.cost = CostMode::Minor;
  else
    q.cost = CostMode::Plain;
  return q;
}

Verdict run_query(const RelationQuery& q, const Cpa& a1, const Cpa& a2) {
  switch (q.rel) {
    case RelationQuery::Rel::Strong:
      return decide_strong(a1, a2, q.cost);
    case RelationQuery::Rel::StrongProb:
      return decide_strong_prob(a1, a2, q.cost);
    case RelationQuery::Rel::WeakProb:
      break;
  }
  switch (q.cost) {
    case CostMode::Plain:
      return decide_weak_prob(a1, a2);
    case CostMode::Preserving:
      return decide_cost_preserving_weak(a1, a2);
    case CostMode::Minor:
      return decide_minor_weak(a1, a2);
  }
  return {};  // unreachable
}

/// Parse "<state>:<rational>,...".  Commas inside parenthesized state
/// names (as produced by composition) do not split entries; the last
/// colon of an entry separates the weight.
Distribution parse_target(const std::string& text, const Cpa& m) {
  Distribution d;
  auto flush = [&](std::string seg) {
    const auto a = seg.find_first_not_of(" \t");
    const auto b = seg.find_last_not_of(" \t");
    if (a == std::string::npos)
      throw ValidationError("empty target entry");
    seg = seg.substr(a, b - a + 1);
    const auto colon = seg.rfind(':');
    if (colon == std::string::npos)
      throw ValidationError("target entry '" + seg +
                            "' is not <state>:<rational>");
    d.add(m.state_id(seg.substr(0, colon)), parse_rat(seg.substr(colon + 1)));
  };
  int depth = 0;
  std::string cur;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      flush(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  flush(cur);
  if (!d.full())
    throw ValidationError("target mass must be exactly 1, got " +
                          rat_str(d.mass()));
  return d;
}

// ------------------------------------------------------------- check / verify

struct CheckArgs {
  std::string rel, cost = "none", a, b, witness;
  bool as_json = false;
};

void write_witness(const std::string& path, const Verdict& v,
                   const std::vector<std::string>& names) {
  if (v.w) write_file(path, serialize_partition(*v.w, names));
  if (v.rc) write_file(path + ".costrel", serialize_pairs(*v.rc, names));
}

int cmd_check(const CheckArgs& args, const std::string& echo) {
  Report rep(echo);
  ParseResult p1 = load_model(args.a);
  ParseResult p2 = load_model(args.b);
  rep.warn_all(p1.warnings);
  rep.warn_all(p2.warnings);
  const RelationQuery q = parse_query(args.rel, args.cost);
  const Verdict v = run_query(q, p1.model, p2.model);

  const DisjointUnion du = disjoint_union(p1.model, p2.model);
  if (!args.witness.empty()) write_witness(args.witness, v, du.model.states);

  rep.result = {{"holds", v.holds},
                {"relation", args.rel},
                {"cost", args.cost},
                {"classes", v.w ? classes_json(*v.w, du.model.states)
                                : json(nullptr)},
                {"cost_relation",
                 v.rc ? pairs_json(*v.rc, du.model.states) : json(nullptr)},
                {"removed_pairs", [&] {
                   json out = json::array();
                   for (const auto& [x, y] : v.removed_pairs)
                     out.push_back(json::array(
                         {du.model.states[x], du.model.states[y]}));
                   return out;
                 }()},
                {"diagnostics", v.diagnostics}};
  if (!args.as_json)
    for (const auto& d : v.diagnostics) std::cerr << d << "\n";
  emit(rep, args.as_json, v.holds ? "holds" : "does not hold");
  return v.holds ? kExitHolds : kExitNotHolds;
}

int cmd_verify(const CheckArgs& args, const std::string& witness,
               const std::string& echo) {
  Report rep(echo);
  ParseResult p1 = load_model(args.a);
  ParseResult p2 = load_model(args.b);
  rep.warn_all(p1.warnings);
  rep.warn_all(p2.warnings);
  const RelationQuery q = parse_query(args.rel, args.cost);
  const DisjointUnion du = disjoint_union(p1.model, p2.model);

  Verdict v;
  v.holds = true;
  v.w = resolve_classes(parse_relation_text(read_file(witness)), du.model);
  if (q.cost == CostMode::Minor) {
    RelationFile rf = parse_relation_text(read_file(witness + ".costrel"));
    if (rf.classes_kind)
      throw ValidationError("cost relation witness must use pair records");
    v.rc = resolve_relation(rf, du.model);
  }
  const bool ok = verify_witness(v, p1.model, p2.model, q);
  rep.result = {{"valid", ok}, {"relation", args.rel}, {"cost", args.cost}};
  emit(rep, args.as_json, ok ? "witness valid" : "witness invalid");
  return ok ? kExitHolds : kExitNotHolds;
}

// ------------------------------------------------------------------- compose

int cmd_compose(const std::string& gen, const std::string& a,
                const std::string& b, const std::string& out, bool as_json,
                const std::string& echo) {
  Report rep(echo);
  ParseResult p1 = load_model(a);
  ParseResult p2 = load_model(b);
  rep.warn_all(p1.warnings);
  rep.warn_all(p2.warnings);
  const GeneratorFunction g = parse_generator(gen);
  Cpa m;
  try {
    m = compose_cpa(p1.model, p2.model, g);
  } catch (const Incompatible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotHolds;
  }
  write_file(out, serialize_model(m));
  rep.result = {{"output", out},
                {"generator", g.name()},
                {"states", m.n_states()},
                {"transitions", m.transitions.size()}};
  emit(rep, as_json, "");
  return kExitHolds;
}

// ------------------------------------------------------------------- mincost

struct MincostArgs {
  std::string model, from, action, target, rel_file, scheduler, dump_lp_path;
  bool rel_identity = false;
  bool as_json = false;
};

int cmd_mincost(const MincostArgs& args, const std::string& echo) {
  Report rep(echo);
  ParseResult p = load_model(args.model);
  rep.warn_all(p.warnings);
  const Cpa& m = p.model;

  const int from = m.state_id(args.from);
  int label = kTau;
  if (args.action != "tau") {
    const int a = m.action_id(args.action);
    label = m.is_internal(a) ? kTau : a;
  }
  const Distribution mu = parse_target(args.target, m);
  const BinaryRelation r =
      args.rel_file.empty()
          ? BinaryRelation::identity(m.n_states())
          : resolve_relation(parse_relation_text(read_file(args.rel_file)), m);

  const FlowNetwork net = build_network(from, label, mu, r, m);
  if (!args.dump_lp_path.empty())
    write_file(args.dump_lp_path, dump_lp(build_mincost_lp(net, m)));
  const LpResult sol = solve_network(net, ObjSense::Minimize, std::nullopt);

  const bool feasible = sol.status == LpStatus::Optimal;
  rep.result = {{"feasible", feasible},
                {"value", feasible ? json(rat_str(sol.value)) : json(nullptr)}};
  if (feasible && !args.scheduler.empty())
    write_file(args.scheduler,
               serialize_scheduler(extract_scheduler(sol, net), m));
  emit(rep, args.as_json, feasible ? rat_str(sol.value) : "infeasible");
  return feasible ? kExitHolds : kExitNotHolds;
}

// ------------------------------------------------------------------ quotient

int cmd_quotient(const std::string& a, const std::string& b, bool as_json,
                 const std::string& echo) {
  Report rep(echo);
  ParseResult p1 = load_model(a);
  rep.warn_all(p1.warnings);
  Partition w;
  std::vector<std::string> names;
  if (b.empty()) {
    w = quotient(p1.model);
    names = p1.model.states;
  } else {
    ParseResult p2 = load_model(b);
    rep.warn_all(p2.warnings);
    DisjointUnion du = disjoint_union(p1.model, p2.model);
    w = quotient(du.model);
    names = du.model.states;
  }
  rep.result = {{"classes", classes_json(w, names)}};
  std::string text = serialize_partition(w, names);
  if (!text.empty() && text.back() == '\n') text.pop_back();  // emit adds one
  emit(rep, as_json, text);
  return kExitHolds;
}

}  // namespace

int main(int argc, char** argv) {
  std::string echo;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) echo += " ";
    echo += argv[i];
  }

  CLI::App app{"cpa -- cost probabilistic automata: composition, min-cost "
               "weak transitions, and bisimulation checks"};
  app.require_subcommand(1);

  CheckArgs ck;
  CLI::App* check = app.add_subcommand(
      "check", "decide a bisimulation relation between two models");
  check->add_option("--rel", ck.rel, "relation kind")
      ->required()
      ->check(CLI::IsMember({"strong", "strong-prob", "weak-prob"}));
  check->add_option("--cost", ck.cost, "cost mode (default none)")
      ->check(CLI::IsMember({"none", "preserving", "minor"}));
  check->add_option("a", ck.a, "first model (cheap/defender side for minor)")
      ->required();
  check->add_option("b", ck.b, "second model")->required();
  check->add_flag("--json", ck.as_json, "machine-readable report");
  check->add_option("--witness", ck.witness,
                    "write the witness partition here (plus .costrel for "
                    "minor mode)");

  CheckArgs vf;
  std::string vf_witness;
  CLI::App* verify = app.add_subcommand(
      "verify", "re-validate a witness produced by check --witness");
  verify->add_option("--rel", vf.rel, "relation kind")
      ->required()
      ->check(CLI::IsMember({"strong", "strong-prob", "weak-prob"}));
  verify->add_option("--cost", vf.cost, "cost mode (default none)")
      ->check(CLI::IsMember({"none", "preserving", "minor"}));
  verify->add_option("a", vf.a, "first model")->required();
  verify->add_option("b", vf.b, "second model")->required();
  verify->add_option("witness", vf_witness, "witness file from check")
      ->required();
  verify->add_flag("--json", vf.as_json, "machine-readable report");

  std::string co_gen = "sum", co_a, co_b, co_out;
  bool co_json = false;
  CLI::App* compose = app.add_subcommand(
      "compose", "cost-aware parallel composition of two compatible models");
  compose->add_option("--gen", co_gen,
                      "generator function: sum | scaled-sum:<rat>");
  compose->add_option("a", co_a, "left model")->required();
  compose->add_option("b", co_b, "right model")->required();
  compose->add_option("-o,--output", co_out, "output model file")->required();
  compose->add_flag("--json", co_json, "machine-readable report");

  MincostArgs mc;
  CLI::App* mincost = app.add_subcommand(
      "mincost", "exact minimum cost of a weak combined transition");
  mincost->add_option("model", mc.model, "model file")->required();
  mincost->add_option("--from", mc.from, "source state")->required();
  mincost->add_option("--action", mc.action, "action name or 'tau'")
      ->required();
  mincost
      ->add_option("--target", mc.target,
                   "challenger distribution \"<state>:<rat>,...\"")
      ->required();
  CLI::Option* relf = mincost->add_option(
      "--rel", mc.rel_file, "relation file (pair or class records)");
  mincost
      ->add_flag("--rel-identity", mc.rel_identity,
                 "use the identity relation (default)")
      ->excludes(relf);
  mincost->add_option("--scheduler", mc.scheduler,
                      "write the optimal scheduler here");
  mincost->add_option("--dump-lp", mc.dump_lp_path,
                      "write the min-cost LP (one constraint per line) here");
  mincost->add_flag("--json", mc.as_json, "machine-readable report");

  std::string qa, qb;
  bool q_json = false;
  CLI::App* quot = app.add_subcommand(
      "quotient", "coarsest weak probabilistic bisimulation classes");
  quot->add_option("a", qa, "model file")->required();
  quot->add_option("b", qb, "optional second model (quotient of the union)");
  quot->add_flag("--json", q_json, "machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(ck, echo);
    if (verify->parsed()) return cmd_verify(vf, vf_witness, echo);
    if (compose->parsed())
      return cmd_compose(co_gen, co_a, co_b, co_out, co_json, echo);
    if (mincost->parsed()) return cmd_mincost(mc, echo);
    if (quot->parsed()) return cmd_quotient(qa, qb, q_json, echo);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;  // no subcommand (unreachable with require_subcommand)
}

/* cpa-gen.cc -- emit example and random models in the cpa model format */

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cpa/errors.hh"
#include "cpa/model.hh"
#include "cpa/rational.hh"

namespace {

using namespace cpa;

/// Lossy channel with retransmission: sending costs 1, each hop
/// attempt costs r² and advances with probability p, receiving costs 1.
Cpa make_wcc(int n, const Rat& r, const Rat& p) {
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

/// Ideal channel: delivery is immediate and certain.
Cpa make_icc() {
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

/// Direct-vs-detour example: from s the external action a costs 1
/// directly, or 2 through the internal detour via v.
Cpa make_detour() {
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

/// Seeded random model: uniform sources and actions, target supports of
/// size 1-3 with weights w_i/Σw normalized exactly, costs small
/// rationals.  States unreachable from the start are dropped so the
/// output parses without warnings.
Cpa make_random(std::uint64_t seed, int n_states, int n_trans, int maxden) {
  if (n_states < 1 || n_trans < 0 || maxden < 1)
    throw ValidationError("random needs states >= 1, trans >= 0, maxden >= 1");
  std::mt19937_64 rng(seed);
  auto pick = [&](int k) { return static_cast<int>(rng() % k); };

  Cpa a;
  a.name = "random" + std::to_string(seed);
  for (int i = 0; i < n_states; ++i) a.add_state("q" + std::to_string(i));
  a.start = 0;
  std::vector<int> acts;
  acts.push_back(a.add_action("a", ActionKind::External));
  acts.push_back(a.add_action("b", ActionKind::External));
  acts.push_back(a.add_action("u", ActionKind::Internal));
  for (int k = 0; k < n_trans; ++k) {
    Transition t;
    t.src = pick(n_states);
    t.action = acts[pick(static_cast<int>(acts.size()))];
    t.cost = Rat(pick(maxden + 1), 1 + pick(maxden));
    t.cost.canonicalize();
    const int support = 1 + pick(3);
    std::vector<int> w(support);
    int total = 0;
    for (int& x : w) {
      x = 1 + pick(maxden);
      total += x;
    }
    for (int j = 0; j < support; ++j) {
      Rat share(w[j], total);
      share.canonicalize();
      t.target.add(pick(n_states), share);
    }
    a.transitions.push_back(std::move(t));
  }
  a.finalize();

  // Keep only states reachable from the start.
  std::vector<bool> reach(a.states.size(), false);
  std::vector<int> queue{a.start};
  reach[a.start] = true;
  while (!queue.empty()) {
    const int s = queue.back();
    queue.pop_back();
    for (int ti : a.out[s])
      for (const auto& [u, p] : a.transitions[ti].target.entries())
        if (!reach[u]) {
          reach[u] = true;
          queue.push_back(u);
        }
  }
  Cpa b;
  b.name = a.name;
  std::vector<int> remap(a.states.size(), -1);
  for (int s = 0; s < a.n_states(); ++s)
    if (reach[s]) remap[s] = b.add_state(a.states[s]);
  b.start = remap[a.start];
  for (std::size_t i = 0; i < a.actions.size(); ++i)
    b.add_action(a.actions[i], a.kinds[i]);
  for (const Transition& t : a.transitions) {
    if (!reach[t.src]) continue;
    Transition nt;
    nt.src = remap[t.src];
    nt.action = t.action;
    nt.cost = t.cost;
    for (const auto& [u, p] : t.target.entries()) nt.target.add(remap[u], p);
    b.transitions.push_back(std::move(nt));
  }
  b.finalize();
  return b;
}

int write_out(const Cpa& a, const std::string& path) {
  const std::string text = serialize_model(a);
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    return 3;
  }
  out << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpa-gen -- emit example and random cpa models"};
  app.require_subcommand(1);

  int wn = 2;
  std::string wr = "5", wp = "3/4", out;
  CLI::App* wcc = app.add_subcommand(
      "wcc", "lossy channel with retransmission (hop cost r*r)");
  wcc->add_option("--n", wn, "number of hops");
  wcc->add_option("--r", wr, "rate (hop cost is r*r)");
  wcc->add_option("--p", wp, "per-attempt success probability");
  wcc->add_option("-o,--output", out, "output file (default stdout)");

  CLI::App* icc = app.add_subcommand("icc", "ideal channel");
  icc->add_option("-o,--output", out, "output file (default stdout)");

  CLI::App* detour =
      app.add_subcommand("detour", "direct-vs-detour cost example");
  detour->add_option("-o,--output", out, "output file (default stdout)");

  std::uint64_t seed = 0;
  int rs = 4, rt = 6, rd = 8;
  CLI::App* rnd = app.add_subcommand("random", "seeded random model");
  rnd->add_option("--seed", seed, "random seed")->required();
  rnd->add_option("--states", rs, "state count before pruning");
  rnd->add_option("--trans", rt, "transition count before pruning");
  rnd->add_option("--maxden", rd, "largest weight/cost building block");
  rnd->add_option("-o,--output", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (wcc->parsed())
      return write_out(make_wcc(wn, parse_rat(wr), parse_rat(wp)), out);
    if (icc->parsed()) return write_out(make_icc(), out);
    if (detour->parsed()) return write_out(make_detour(), out);
    if (rnd->parsed()) return write_out(make_random(seed, rs, rt, rd), out);
  } catch (const cpa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

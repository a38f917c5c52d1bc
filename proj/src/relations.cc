/* relations.cc -- lifting via exact max-flow, relation algebra, files */
#include "cpa/relations.hh"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "cpa/errors.hh"

namespace cpa {

// ------------------------------------------------------------- relations

BinaryRelation BinaryRelation::identity(int n) {
  BinaryRelation r(n, n);
  for (int i = 0; i < n; ++i) r.set(i, i);
  return r;
}

BinaryRelation BinaryRelation::full(int left_n, int right_n) {
  BinaryRelation r(left_n, right_n);
  for (int x = 0; x < left_n; ++x)
    for (int y = 0; y < right_n; ++y) r.set(x, y);
  return r;
}

std::size_t BinaryRelation::pair_count() const {
  return static_cast<std::size_t>(
      std::count(bits_.begin(), bits_.end(), true));
}

// ------------------------------------------------------------- partitions

namespace {

Partition canonicalize(int n, std::vector<std::vector<int>> classes) {
  for (auto& c : classes) std::sort(c.begin(), c.end());
  std::sort(classes.begin(), classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  Partition p;
  p.n = n;
  p.classes = std::move(classes);
  p.cls.assign(n, -1);
  for (std::size_t c = 0; c < p.classes.size(); ++c)
    for (int s : p.classes[c]) {
      if (s < 0 || s >= n || p.cls[s] != -1)
        throw ValidationError("classes do not partition the universe");
      p.cls[s] = static_cast<int>(c);
    }
  for (int s = 0; s < n; ++s)
    if (p.cls[s] == -1)
      throw ValidationError("classes do not cover the universe");
  return p;
}

}  // namespace

Partition Partition::single(int n) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  return canonicalize(n, {all});
}

Partition Partition::discrete(int n) {
  std::vector<std::vector<int>> classes;
  for (int i = 0; i < n; ++i) classes.push_back({i});
  return canonicalize(n, std::move(classes));
}

Partition Partition::from_classes(int n,
                                  const std::vector<std::vector<int>>& cs) {
  return canonicalize(n, cs);
}

Partition Partition::split(int c, const std::vector<int>& keep) const {
  std::vector<bool> in_keep(n, false);
  for (int s : keep) in_keep[s] = true;
  std::vector<int> rest;
  for (int s : classes[c])
    if (!in_keep[s]) rest.push_back(s);
  if (keep.empty() || rest.empty())
    throw DegenerateSplit("split leaves an empty class");
  auto cs = classes;
  cs[c] = keep;
  cs.push_back(rest);
  return canonicalize(n, std::move(cs));
}

BinaryRelation Partition::as_relation() const {
  BinaryRelation r(n, n);
  for (const auto& c : classes)
    for (int x : c)
      for (int y : c) r.set(x, y);
  return r;
}

// ------------------------------------------------------------ lift_check
//
// μ L(R) ν holds iff the bipartite network
//   source --μ(x)--> x --(R-edges, unbounded)--> y --ν(y)--> sink
// has maximum flow 1.  Probabilities are scaled by the least common
// denominator so the flow computation runs on exact integers
// (Edmonds-Karp, deterministic adjacency order).

std::optional<WeightingFunction> lift_check(const BinaryRelation& r,
                                            const Distribution& mu,
                                            const Distribution& nu) {
  for (const auto& [x, p] : mu.entries())
    if (x < 0 || x >= r.left_size())
      throw UniverseMismatch("lift_check: state outside left universe");
  for (const auto& [y, p] : nu.entries())
    if (y < 0 || y >= r.right_size())
      throw UniverseMismatch("lift_check: state outside right universe");
  if (!mu.full() || !nu.full())
    throw WeightError("lift_check requires full distributions");

  std::vector<Rat> all;
  for (const auto& [x, p] : mu.entries()) all.push_back(p);
  for (const auto& [y, p] : nu.entries()) all.push_back(p);
  mpz_class scale = common_denominator(all);

  int nl = static_cast<int>(mu.support_size());
  int nr = static_cast<int>(nu.support_size());
  int n = 2 + nl + nr;  // 0 = source, 1 = sink
  auto left = [&](int i) { return 2 + i; };
  auto right = [&](int j) { return 2 + nl + j; };

  // Dense capacity/flow matrices; n is small (supports only).
  std::vector<std::vector<mpz_class>> cap(n, std::vector<mpz_class>(n, 0));
  for (int i = 0; i < nl; ++i) {
    Rat scaled = mu.entries()[i].second * Rat(scale);
    cap[0][left(i)] = scaled.get_num();  // denominator is 1 by construction
  }
  for (int j = 0; j < nr; ++j) {
    Rat scaled = nu.entries()[j].second * Rat(scale);
    cap[right(j)][1] = scaled.get_num();
  }
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nr; ++j)
      if (r.test(mu.entries()[i].first, nu.entries()[j].first))
        cap[left(i)][right(j)] = scale;  // effectively unbounded

  std::vector<std::vector<mpz_class>> flow(n, std::vector<mpz_class>(n, 0));
  mpz_class total = 0;
  for (;;) {
    // BFS for the shortest augmenting path, lowest node index first.
    std::vector<int> prev(n, -1);
    std::deque<int> queue{0};
    prev[0] = 0;
    while (!queue.empty() && prev[1] < 0) {
      int v = queue.front();
      queue.pop_front();
      for (int u = 0; u < n; ++u)
        if (prev[u] < 0 && cap[v][u] - flow[v][u] > 0) {
          prev[u] = v;
          queue.push_back(u);
        }
    }
    if (prev[1] < 0) break;
    mpz_class aug = -1;
    for (int v = 1; v != 0; v = prev[v]) {
      mpz_class residual = cap[prev[v]][v] - flow[prev[v]][v];
      if (aug < 0 || residual < aug) aug = residual;
    }
    for (int v = 1; v != 0; v = prev[v]) {
      flow[prev[v]][v] += aug;
      flow[v][prev[v]] -= aug;
    }
    total += aug;
  }
  if (total != scale) return std::nullopt;

  WeightingFunction w;
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nr; ++j)
      if (flow[left(i)][right(j)] > 0)
        w.entries.emplace_back(mu.entries()[i].first, nu.entries()[j].first,
                               Rat(flow[left(i)][right(j)], scale));
  for (auto& [x, y, q] : w.entries) q.canonicalize();
  return w;
}

// -------------------------------------------------------------- algebra

BinaryRelation relation_compose(const BinaryRelation& r1,
                                const BinaryRelation& r2) {
  if (r1.right_size() != r2.left_size())
    throw UniverseMismatch("relation_compose: universes do not chain");
  BinaryRelation out(r1.left_size(), r2.right_size());
  for (int x = 0; x < r1.left_size(); ++x)
    for (int y = 0; y < r1.right_size(); ++y) {
      if (!r1.test(x, y)) continue;
      for (int z = 0; z < r2.right_size(); ++z)
        if (r2.test(y, z)) out.set(x, z);
    }
  return out;
}

Partition equivalence_compose(const Partition& p1, const Partition& p2) {
  if (p1.n != p2.n)
    throw UniverseMismatch("equivalence_compose: different universes");
  std::vector<int> parent(p1.n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int x, int y) { parent[find(x)] = find(y); };
  for (const Partition* p : {&p1, &p2})
    for (const auto& c : p->classes)
      for (std::size_t i = 1; i < c.size(); ++i) unite(c[0], c[i]);
  std::vector<std::vector<int>> groups(p1.n);
  for (int s = 0; s < p1.n; ++s) groups[find(s)].push_back(s);
  std::vector<std::vector<int>> classes;
  for (auto& g : groups)
    if (!g.empty()) classes.push_back(std::move(g));
  return Partition::from_classes(p1.n, classes);
}

BinaryRelation cross_identity(const BinaryRelation& r, int third_n) {
  BinaryRelation out(r.left_size() * third_n, r.right_size() * third_n);
  for (int w = 0; w < r.left_size(); ++w)
    for (int x = 0; x < r.right_size(); ++x) {
      if (!r.test(w, x)) continue;
      for (int y = 0; y < third_n; ++y)
        out.set(w * third_n + y, x * third_n + y);
    }
  return out;
}

// --------------------------------------------------------- relation files

RelationFile parse_relation_text(const std::string& text) {
  RelationFile f;
  bool saw_pair = false, saw_class = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks[0] == "pair") {
      if (toks.size() != 3)
        throw ParseError(lineno, 0, "expected: pair <s> <t>");
      saw_pair = true;
      f.pairs.emplace_back(toks[1], toks[2]);
    } else if (toks[0] == "class" || toks[0] == "class:") {
      if (toks.size() < 2)
        throw ParseError(lineno, 0, "expected: class <s> ...");
      saw_class = true;
      f.classes.emplace_back(toks.begin() + 1, toks.end());
    } else {
      throw ParseError(lineno, 0, "unknown record '" + toks[0] + "'");
    }
    if (saw_pair && saw_class)
      throw MixedRelationKinds(
          "relation file mixes 'pair' and 'class' records");
  }
  f.classes_kind = saw_class;
  return f;
}

Partition resolve_classes(const RelationFile& f, const Cpa& a) {
  if (!f.classes_kind)
    throw ValidationError("expected a class-style relation file");
  std::vector<int> owner(a.n_states(), -1);
  std::vector<std::vector<int>> classes;
  for (const auto& c : f.classes) {
    std::vector<int> ids;
    for (const auto& name : c) {
      int s = a.state_id(name);
      if (owner[s] != -1)
        throw ValidationError("state '" + name + "' listed in two classes");
      owner[s] = static_cast<int>(classes.size());
      ids.push_back(s);
    }
    classes.push_back(std::move(ids));
  }
  for (int s = 0; s < a.n_states(); ++s)
    if (owner[s] == -1) classes.push_back({s});
  return Partition::from_classes(a.n_states(), classes);
}

BinaryRelation resolve_relation(const RelationFile& f, const Cpa& a) {
  if (f.classes_kind) return resolve_classes(f, a).as_relation();
  BinaryRelation r(a.n_states(), a.n_states());
  for (const auto& [s, t] : f.pairs) r.set(a.state_id(s), a.state_id(t));
  return r;
}

std::string serialize_partition(const Partition& p,
                                const std::vector<std::string>& names) {
  std::ostringstream out;
  for (const auto& c : p.classes) {
    out << "class";
    for (int s : c) out << ' ' << names[s];
    out << "\n";
  }
  return out.str();
}

std::string serialize_pairs(const BinaryRelation& r,
                            const std::vector<std::string>& names) {
  std::ostringstream out;
  for (int x = 0; x < r.left_size(); ++x)
    for (int y = 0; y < r.right_size(); ++y)
      if (r.test(x, y)) out << "pair " << names[x] << ' ' << names[y] << "\n";
  return out.str();
}

}  // namespace cpa

/* lp.cc -- presolve + exact two-phase simplex over mpq */
#include "cpa/lp.hh"

#include <atomic>

#include "cpa/errors.hh"

namespace cpa {

namespace {

std::atomic<std::int64_t> g_solves{0};
std::atomic<std::int64_t> g_pivots{0};

struct Presolved {
  bool infeasible = false;
  // Variable values fixed by presolve; -1 entries stay free and map to
  // a column of the reduced problem.
  std::vector<bool> fixed;
  std::vector<Rat> value;
  std::vector<std::vector<Rat>> rows;
  std::vector<Rat> rhs;
  std::vector<int> col_of;  // original var -> reduced column (-1 if fixed)
  int ncols = 0;
};

// Cheap exact presolve: empty rows, singleton rows, and same-sign
// zero-rhs rows fix variables outright; iterate to a fixpoint.  This
// removes the bulk of a flow LP whose network has disconnected or
// forced-zero parts before the tableau is built.
Presolved presolve(const StandardFormLP& p) {
  Presolved out;
  out.fixed.assign(p.n, false);
  out.value.assign(p.n, Rat(0));
  std::vector<std::vector<Rat>> rows = p.rows;
  std::vector<Rat> rhs = p.rhs;
  std::vector<bool> dead_row(rows.size(), false);

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (dead_row[r]) continue;
      int nz = 0, last = -1;
      bool pos = false, neg = false;
      for (int j = 0; j < p.n; ++j) {
        if (out.fixed[j] || is_zero(rows[r][j])) continue;
        ++nz;
        last = j;
        (sgn(rows[r][j]) > 0 ? pos : neg) = true;
      }
      if (nz == 0) {
        if (!is_zero(rhs[r])) {
          out.infeasible = true;
          return out;
        }
        dead_row[r] = true;
        changed = true;
      } else if (nz == 1) {
        Rat v = rhs[r] / rows[r][last];
        if (is_negative(v)) {
          out.infeasible = true;
          return out;
        }
        out.fixed[last] = true;
        out.value[last] = v;
        dead_row[r] = true;
        changed = true;
        if (!is_zero(v))
          for (std::size_t r2 = 0; r2 < rows.size(); ++r2)
            if (!dead_row[r2] && !is_zero(rows[r2][last]))
              rhs[r2] -= rows[r2][last] * v;
      } else if (is_zero(rhs[r]) && pos != neg) {
        // All same sign with zero right-hand side: every variable in
        // the row must be zero.
        for (int j = 0; j < p.n; ++j)
          if (!out.fixed[j] && !is_zero(rows[r][j])) {
            out.fixed[j] = true;
            out.value[j] = 0;
          }
        dead_row[r] = true;
        changed = true;
      }
    }
  }

  out.col_of.assign(p.n, -1);
  for (int j = 0; j < p.n; ++j)
    if (!out.fixed[j]) out.col_of[j] = out.ncols++;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (dead_row[r]) continue;
    std::vector<Rat> row(out.ncols, Rat(0));
    for (int j = 0; j < p.n; ++j)
      if (out.col_of[j] >= 0) row[out.col_of[j]] = rows[r][j];
    out.rows.push_back(std::move(row));
    out.rhs.push_back(rhs[r]);
  }
  return out;
}

// Dense tableau simplex, minimizing, Bland's rule.  Columns 0..n-1 are
// the decision variables; the caller appends artificials.  `basis[r]`
// holds the basic column of row r.  Returns false when the phase's
// objective is unbounded below.
struct Tableau {
  int n = 0;  // total columns
  std::vector<std::vector<Rat>> a;
  std::vector<Rat> b;
  std::vector<int> basis;

  void pivot(int r, int c) {
    Rat inv = 1 / a[r][c];
    for (int j = 0; j < n; ++j)
      if (!is_zero(a[r][j])) a[r][j] *= inv;
    b[r] *= inv;
    a[r][c] = 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (static_cast<int>(i) == r || is_zero(a[i][c])) continue;
      Rat f = a[i][c];
      for (int j = 0; j < n; ++j)
        if (!is_zero(a[r][j])) a[i][j] -= f * a[r][j];
      b[i] -= f * b[r];
      a[i][c] = 0;
    }
    basis[r] = c;
    g_pivots.fetch_add(1, std::memory_order_relaxed);
  }

  // Minimize cost·x over the tableau with Bland's anti-cycling rule:
  // entering column = lowest index with negative reduced cost, leaving
  // row = lexicographic (min ratio, then lowest basic index).
  bool minimize(const std::vector<Rat>& cost, int allowed_cols) {
    for (;;) {
      // Reduced costs: cost_j - cost_B · column_j.
      std::vector<Rat> y(a.size());
      for (std::size_t r = 0; r < a.size(); ++r) y[r] = cost[basis[r]];
      int enter = -1;
      for (int j = 0; j < allowed_cols && enter < 0; ++j) {
        Rat red = cost[j];
        for (std::size_t r = 0; r < a.size(); ++r)
          if (!is_zero(a[r][j])) red -= y[r] * a[r][j];
        if (is_negative(red)) enter = j;
      }
      if (enter < 0) return true;
      int leave = -1;
      Rat best;
      for (std::size_t r = 0; r < a.size(); ++r) {
        if (sgn(a[r][enter]) <= 0) continue;
        Rat ratio = b[r] / a[r][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis[r] < basis[leave]))
          leave = static_cast<int>(r), best = ratio;
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult solve(const StandardFormLP& p) {
  g_solves.fetch_add(1, std::memory_order_relaxed);
  if (p.rhs.size() != p.rows.size() ||
      (!p.obj.empty() && static_cast<int>(p.obj.size()) != p.n))
    throw DimensionMismatch("LP row/rhs/objective sizes disagree");
  for (const auto& row : p.rows)
    if (static_cast<int>(row.size()) != p.n)
      throw DimensionMismatch("ragged LP row");

  std::vector<Rat> obj = p.obj;
  if (obj.empty()) obj.assign(p.n, Rat(0));

  Presolved pre = presolve(p);
  LpResult res;
  if (pre.infeasible) return res;

  std::vector<Rat> x(p.n, Rat(0));
  for (int j = 0; j < p.n; ++j)
    if (pre.fixed[j]) x[j] = pre.value[j];

  if (pre.ncols > 0) {
    int m = static_cast<int>(pre.rows.size());
    // Columns with a negative objective and no remaining row make the
    // problem unbounded; zero is optimal for the rest.
    for (int c = 0; c < pre.ncols; ++c) {
      bool used = false;
      for (int r = 0; r < m && !used; ++r) used = !is_zero(pre.rows[r][c]);
      if (used) continue;
      Rat oc = 0;
      for (int j = 0; j < p.n; ++j)
        if (pre.col_of[j] == c) oc = obj[j];
      if (is_negative(oc)) {
        res.status = LpStatus::Unbounded;
        return res;
      }
    }

    Tableau t;
    t.n = pre.ncols + m;  // phase-1 artificials appended
    t.b = pre.rhs;
    t.a.assign(m, std::vector<Rat>(t.n, Rat(0)));
    t.basis.resize(m);
    for (int r = 0; r < m; ++r) {
      int dir = is_negative(pre.rhs[r]) ? -1 : 1;
      for (int c = 0; c < pre.ncols; ++c) t.a[r][c] = dir * pre.rows[r][c];
      if (dir < 0) t.b[r] = -t.b[r];
      t.a[r][pre.ncols + r] = 1;
      t.basis[r] = pre.ncols + r;
    }

    std::vector<Rat> phase1(t.n, Rat(0));
    for (int r = 0; r < m; ++r) phase1[pre.ncols + r] = 1;
    t.minimize(phase1, t.n);  // bounded below by zero
    Rat p1 = 0;
    for (int r = 0; r < m; ++r) p1 += phase1[t.basis[r]] * t.b[r];
    if (!is_zero(p1)) return res;  // Infeasible

    // Drive leftover artificials out of the basis or drop their
    // (redundant) rows.
    for (int r = m - 1; r >= 0; --r) {
      if (t.basis[r] < pre.ncols) continue;
      int c = -1;
      for (int j = 0; j < pre.ncols && c < 0; ++j)
        if (!is_zero(t.a[r][j])) c = j;
      if (c >= 0) {
        t.pivot(r, c);
      } else {
        t.a.erase(t.a.begin() + r);
        t.b.erase(t.b.begin() + r);
        t.basis.erase(t.basis.begin() + r);
      }
    }

    std::vector<Rat> phase2(t.n, Rat(0));
    for (int j = 0; j < p.n; ++j)
      if (pre.col_of[j] >= 0) phase2[pre.col_of[j]] = obj[j];
    if (!t.minimize(phase2, pre.ncols)) {
      res.status = LpStatus::Unbounded;
      return res;
    }
    for (std::size_t r = 0; r < t.a.size(); ++r)
      for (int j = 0; j < p.n; ++j)
        if (pre.col_of[j] == t.basis[r]) x[j] = t.b[r];
  }

  // Exact self-check against the original input.
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    Rat lhs = 0;
    for (int j = 0; j < p.n; ++j)
      if (!is_zero(p.rows[r][j])) lhs += p.rows[r][j] * x[j];
    if (lhs != p.rhs[r])
      throw NotOptimal("simplex self-check failed on row " +
                       std::to_string(r));
  }
  for (const Rat& v : x)
    if (is_negative(v)) throw NotOptimal("simplex produced a negative value");

  res.status = LpStatus::Optimal;
  res.assignment = std::move(x);
  res.value = 0;
  for (int j = 0; j < p.n; ++j)
    if (!is_zero(obj[j])) res.value += obj[j] * res.assignment[j];
  return res;
}

LpStats lp_stats_snapshot() {
  return {g_solves.load(std::memory_order_relaxed),
          g_pivots.load(std::memory_order_relaxed)};
}

void lp_stats_reset() {
  g_solves.store(0, std::memory_order_relaxed);
  g_pivots.store(0, std::memory_order_relaxed);
}

}  // namespace cpa

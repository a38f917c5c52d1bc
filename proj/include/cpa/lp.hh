/* lp.hh -- exact rational linear programming (two-phase primal simplex) */
#pragma once

#include <cstdint>
#include <vector>

#include "cpa/rational.hh"

namespace cpa {

/// minimize obj·x  subject to  rows·x = rhs, x >= 0.
/// Inequalities must be slack-converted by the caller.
struct StandardFormLP {
  int n = 0;                           // variable count
  std::vector<std::vector<Rat>> rows;  // each of length n
  std::vector<Rat> rhs;
  std::vector<Rat> obj;                // length n (empty = feasibility)
};

enum class LpStatus { Infeasible, Optimal, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rat value;                    // objective, when Optimal
  std::vector<Rat> assignment;  // length n, when Optimal
};

/// Exact optimum via presolve + two-phase dense simplex with Bland's
/// pivoting rule (termination guaranteed).  Optimal assignments are
/// re-verified against every input constraint by substitution before
/// returning (NotOptimal on any violation — an internal invariant).
/// Throws DimensionMismatch on ragged input.
LpResult solve(const StandardFormLP& p);

/// Global exact-arithmetic work counters (for reports).
struct LpStats {
  std::int64_t solves = 0;
  std::int64_t pivots = 0;
};
LpStats lp_stats_snapshot();
void lp_stats_reset();

}  // namespace cpa

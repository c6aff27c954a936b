#pragma once

// Dense two-phase simplex over exact rationals with Bland's rule.
//
//   minimise  c . x   subject to  A x = b,  x >= 0
//
// Rows may be linearly dependent; phase one uses one artificial variable per
// row and drops rows whose artificial cannot be pivoted out.

#include <cstddef>
#include <vector>

#include "unitsel/rational.hpp"

namespace unitsel {

struct StandardFormLP {
  std::size_t variables = 0;
  std::vector<std::vector<Rational>> rows;  // each of length `variables`
  std::vector<Rational> rhs;
  std::vector<Rational> cost;
};

enum class SimplexStatus { optimal, infeasible, unbounded };

struct SimplexResult {
  SimplexStatus status = SimplexStatus::infeasible;
  Rational objective;
  std::vector<Rational> point;  // basic feasible solution when optimal
  std::size_t pivots = 0;
};

SimplexResult minimize(const StandardFormLP& lp);

// Exact residual check of A x = b and x >= 0.
bool satisfies(const StandardFormLP& lp, const std::vector<Rational>& point);

}  // namespace unitsel

#include "unitsel/lp_oracle.hpp"

#include "unitsel/errors.hpp"

namespace unitsel {
namespace {

void check_shapes(int m, int n, const ExperimentalDistribution& experimental,
                  const ObservationalDistribution& observational) {
  if (experimental.treatments() != m || experimental.outcomes() != n || observational.treatments() != m ||
      observational.outcomes() != n) {
    throw ArityMismatch("LP inputs do not share (m, n)");
  }
}

// Constraint rows shared by every canonical LP; the objective is left zero.
StandardFormLP constraints(int m, int n, const ExperimentalDistribution& experimental,
                           const ObservationalDistribution& observational, const LPLimits& limits) {
  const std::size_t types = response_type_count(m, n, SizeGuard{limits.max_variables});
  const std::size_t variables = types * static_cast<std::size_t>(m);
  if (variables > limits.max_variables) {
    throw SizeLimitExceeded("canonical LP would need " + std::to_string(variables) + " variables");
  }
  auto var = [m](std::size_t r, int x) { return r * static_cast<std::size_t>(m) + static_cast<std::size_t>(x); };

  std::vector<ResponseAssignment> assignments;
  assignments.reserve(types);
  for (std::size_t r = 0; r < types; ++r) assignments.push_back(assignment_at(r + 1, m, n));

  StandardFormLP lp;
  lp.variables = variables;
  lp.cost.assign(variables, Rational(0));

  std::vector<Rational> total(variables, Rational(1));
  lp.rows.push_back(std::move(total));
  lp.rhs.emplace_back(1);

  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      std::vector<Rational> row(variables);
      for (std::size_t r = 0; r < types; ++r) {
        if (assignments[r].outcome(j) != i) continue;
        for (int x = 0; x < m; ++x) row[var(r, x)] = 1;
      }
      lp.rows.push_back(std::move(row));
      lp.rhs.push_back(experimental.effect(j, i));
    }
  }
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      std::vector<Rational> row(variables);
      for (std::size_t r = 0; r < types; ++r) {
        if (assignments[r].outcome(j) == i) row[var(r, j)] = 1;
      }
      lp.rows.push_back(std::move(row));
      lp.rhs.push_back(observational.joint(j, i));
    }
  }
  return lp;
}

}  // namespace

CanonicalLP build_lp(const BenefitFunction& f, const ExperimentalDistribution& experimental,
                     const ObservationalDistribution& observational, const LPLimits& limits) {
  const int m = f.treatments();
  const int n = f.outcomes();
  check_shapes(m, n, experimental, observational);
  CanonicalLP lp;
  lp.m_ = m;
  lp.n_ = n;
  lp.program_ = constraints(m, n, experimental, observational, limits);
  for (const auto& term : f.terms()) {
    const std::size_t r = ordinal(term.assignment, n);
    for (int x = 0; x < m; ++x) lp.program_.cost[lp.variable(r, x)] = term.coefficient;
  }
  return lp;
}

CanonicalLP build_query_lp(const CounterfactualQuery& query, const ExperimentalDistribution& experimental,
                           const ObservationalDistribution& observational, const LPLimits& limits) {
  const int m = experimental.treatments();
  const int n = experimental.outcomes();
  check_shapes(m, n, experimental, observational);
  query.check_arity(m, n);
  CanonicalLP lp;
  lp.m_ = m;
  lp.n_ = n;
  lp.program_ = constraints(m, n, experimental, observational, limits);

  const std::size_t types = lp.program_.variables / static_cast<std::size_t>(m);
  for (std::size_t r = 0; r < types; ++r) {
    const auto assignment = assignment_at(r + 1, m, n);
    bool matches = true;
    for (const auto& pair : query.pairs()) {
      if (assignment.outcome(pair.treatment) != pair.outcome) matches = false;
    }
    if (!matches) continue;
    for (int x = 0; x < m; ++x) {
      if (query.observed_treatment() && *query.observed_treatment() != x) continue;
      // Under X = x the factual outcome is the response type's outcome at x.
      if (query.observed_outcome() && assignment.outcome(x) != *query.observed_outcome()) continue;
      lp.program_.cost[lp.variable(r, x)] = 1;
    }
  }
  return lp;
}

LPRange solve_minmax(const CanonicalLP& lp) {
  const auto& program = lp.program();
  SimplexResult low = minimize(program);
  if (low.status == SimplexStatus::infeasible) {
    throw Infeasible("no response-type distribution is consistent with both data tables");
  }

  StandardFormLP negated = program;
  for (auto& c : negated.cost) c = -c;
  SimplexResult high = minimize(negated);
  // The feasible region is a subset of the probability simplex, so it is
  // bounded and both solves are optimal once phase one succeeds.
  if (low.status != SimplexStatus::optimal || high.status != SimplexStatus::optimal) {
    throw Infeasible("canonical LP did not reach an optimum");
  }
  LPRange range;
  range.minimum = {low.objective, std::move(low.point)};
  range.maximum = {-high.objective, std::move(high.point)};
  range.interval = {range.minimum.objective, range.maximum.objective};
  return range;
}

Interval oracle_bounds(const BenefitFunction& f, const ExperimentalDistribution& experimental,
                       const ObservationalDistribution& observational, const LPLimits& limits) {
  return solve_minmax(build_lp(f, experimental, observational, limits)).interval;
}

Interval oracle_query_bounds(const CounterfactualQuery& query, const ExperimentalDistribution& experimental,
                             const ObservationalDistribution& observational, const LPLimits& limits) {
  return solve_minmax(build_query_lp(query, experimental, observational, limits)).interval;
}

}  // namespace unitsel

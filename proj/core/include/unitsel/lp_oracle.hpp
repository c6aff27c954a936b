#pragma once

// Canonical response-type linear program.
//
// Variables q(r, x) >= 0 give the joint probability of response type r and
// natural treatment choice x. Every model consistent with both data tables
// is a feasible point, so minimising and maximising a linear objective over
// the polytope yields the tight range of that objective. This is the
// independent reference the closed-form bounds are checked against.

#include <cstddef>

#include "unitsel/model.hpp"
#include "unitsel/pc_bounds.hpp"
#include "unitsel/simplex.hpp"

namespace unitsel {

struct LPLimits {
  std::size_t max_variables = 4096;
};

class CanonicalLP {
 public:
  int treatments() const { return m_; }
  int outcomes() const { return n_; }
  std::size_t variables() const { return program_.variables; }
  std::size_t equality_rows() const { return program_.rows.size(); }
  // Variable order: ordinal(r)-major, then treatment.
  std::size_t variable(std::size_t response_ordinal, int treatment) const {
    return response_ordinal * static_cast<std::size_t>(m_) + static_cast<std::size_t>(treatment);
  }
  const StandardFormLP& program() const { return program_; }
  const std::vector<Rational>& objective() const { return program_.cost; }

 private:
  friend CanonicalLP build_lp(const BenefitFunction&, const ExperimentalDistribution&,
                              const ObservationalDistribution&, const LPLimits&);
  friend CanonicalLP build_query_lp(const CounterfactualQuery&, const ExperimentalDistribution&,
                                    const ObservationalDistribution&, const LPLimits&);

  int m_ = 0;
  int n_ = 0;
  StandardFormLP program_;
};

// Objective: sum_r alpha_r * sum_x q(r, x). Throws ArityMismatch,
// SizeLimitExceeded.
CanonicalLP build_lp(const BenefitFunction& f, const ExperimentalDistribution& experimental,
                     const ObservationalDistribution& observational, const LPLimits& limits = {});

// Objective: indicator of the queried event. Counterfactual pairs restrict
// r, an observed treatment restricts the x slice, and an observed outcome
// requires r[x] = y on each slice.
CanonicalLP build_query_lp(const CounterfactualQuery& query, const ExperimentalDistribution& experimental,
                           const ObservationalDistribution& observational, const LPLimits& limits = {});

struct LPSolution {
  Rational objective;
  std::vector<Rational> certificate;  // basic feasible point attaining the objective
};

struct LPRange {
  Interval interval;
  LPSolution minimum;
  LPSolution maximum;
};

// Throws Infeasible when no model matches both tables.
LPRange solve_minmax(const CanonicalLP& lp);

Interval oracle_bounds(const BenefitFunction& f, const ExperimentalDistribution& experimental,
                       const ObservationalDistribution& observational, const LPLimits& limits = {});
Interval oracle_query_bounds(const CounterfactualQuery& query, const ExperimentalDistribution& experimental,
                             const ObservationalDistribution& observational, const LPLimits& limits = {});

}  // namespace unitsel

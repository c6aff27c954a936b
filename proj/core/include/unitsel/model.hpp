#pragma once

// Domain types shared by every module.
//
// Index convention: the C++ API is 0-based throughout (treatment j in
// [0, m), outcome i in [0, n)). Everything that crosses a process boundary
// (dataset files, CLI flags, reports, traces) is 1-based; term_index() is
// the one API function that returns a 1-based value, because the benefit
// vector is addressed that way in files.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unitsel/rational.hpp"

namespace unitsel {

// Algorithms over response types are exponential in m; the guard caps n^m.
struct SizeGuard {
  std::size_t max_response_types = 4096;
};

// n^m, or SizeLimitExceeded when it exceeds the guard. Requires m, n >= 2.
std::size_t response_type_count(int m, int n, const SizeGuard& guard = {});

// One response type: outcomes()[t] is the outcome under treatment t.
class ResponseAssignment {
 public:
  ResponseAssignment() = default;
  explicit ResponseAssignment(std::vector<int> outcomes) : outcomes_(std::move(outcomes)) {}

  int treatments() const { return static_cast<int>(outcomes_.size()); }
  int outcome(int treatment) const { return outcomes_[static_cast<std::size_t>(treatment)]; }
  const std::vector<int>& outcomes() const { return outcomes_; }

  bool valid_for(int m, int n) const;
  // "(1,3)" in 1-based notation.
  std::string to_string() const;

  friend bool operator==(const ResponseAssignment&, const ResponseAssignment&) = default;
  friend auto operator<=>(const ResponseAssignment&, const ResponseAssignment&) = default;

 private:
  std::vector<int> outcomes_;
};

// 1 + sum_t outcome_t * n^(m-1-t): the last treatment varies fastest.
std::size_t term_index(const ResponseAssignment& assignment, int n);
// Inverse of term_index for index in [1, n^m].
ResponseAssignment assignment_at(std::size_t index, int m, int n);
// 0-based position in canonical order (term_index - 1).
std::size_t ordinal(const ResponseAssignment& assignment, int n);

// Dense m x n grid of rationals, row = treatment, column = outcome.
class ProbabilityTable {
 public:
  ProbabilityTable() = default;
  ProbabilityTable(int m, int n);
  ProbabilityTable(int m, int n, std::vector<Rational> cells);

  int treatments() const { return m_; }
  int outcomes() const { return n_; }
  const Rational& at(int treatment, int outcome) const { return cells_[index(treatment, outcome)]; }
  Rational& at(int treatment, int outcome) { return cells_[index(treatment, outcome)]; }
  const std::vector<Rational>& cells() const { return cells_; }

  Rational row_sum(int treatment) const;
  Rational column_sum(int outcome) const;
  Rational total() const;

  friend bool operator==(const ProbabilityTable&, const ProbabilityTable&) = default;

 private:
  std::size_t index(int treatment, int outcome) const {
    return static_cast<std::size_t>(treatment) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(outcome);
  }

  int m_ = 0;
  int n_ = 0;
  std::vector<Rational> cells_;
};

// P(y_i | do(x_j)). Every row is a probability distribution.
class ExperimentalDistribution {
 public:
  // Throws InvalidData unless every entry is in [0,1] and each row sums to 1.
  explicit ExperimentalDistribution(ProbabilityTable table);

  int treatments() const { return table_.treatments(); }
  int outcomes() const { return table_.outcomes(); }
  const Rational& effect(int treatment, int outcome) const { return table_.at(treatment, outcome); }
  const ProbabilityTable& table() const { return table_; }

 private:
  ProbabilityTable table_;
};

// P(x_j, y_i) under natural treatment choice, with cached marginals.
class ObservationalDistribution {
 public:
  // Throws InvalidData unless every entry is in [0,1] and the grid sums to 1.
  explicit ObservationalDistribution(ProbabilityTable table);

  int treatments() const { return table_.treatments(); }
  int outcomes() const { return table_.outcomes(); }
  const Rational& joint(int treatment, int outcome) const { return table_.at(treatment, outcome); }
  const Rational& treatment_marginal(int treatment) const {
    return px_[static_cast<std::size_t>(treatment)];
  }
  const Rational& outcome_marginal(int outcome) const {
    return py_[static_cast<std::size_t>(outcome)];
  }
  const ProbabilityTable& table() const { return table_; }

 private:
  ProbabilityTable table_;
  std::vector<Rational> px_;
  std::vector<Rational> py_;
};

struct BenefitTerm {
  Rational coefficient;
  ResponseAssignment assignment;
};

class BenefitFunction {
 public:
  // Terms must have distinct assignments valid for (m, n).
  BenefitFunction(int m, int n, std::vector<BenefitTerm> terms);

  // Exactly n^m coefficients in term_index order.
  static BenefitFunction from_vector(int m, int n, std::span<const Rational> vector,
                                     const SizeGuard& guard = {});

  int treatments() const { return m_; }
  int outcomes() const { return n_; }
  const std::vector<BenefitTerm>& terms() const { return terms_; }

  // Coefficients in term_index order, zero where a term is absent.
  std::vector<Rational> dense_coefficients() const;

 private:
  int m_;
  int n_;
  std::vector<BenefitTerm> terms_;
};

struct Interval {
  Rational lower;
  Rational upper;

  Rational width() const { return upper - lower; }
  Rational midpoint() const { return (lower + upper) / 2; }
  bool contains(const Rational& value) const { return lower <= value && value <= upper; }
  bool contains(const Interval& inner) const {
    return lower <= inner.lower && inner.upper <= upper;
  }
  static Interval point(const Rational& value) { return {value, value}; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Violation {
  std::string constraint;
  std::optional<int> treatment;  // 0-based
  std::optional<int> outcome;    // 0-based
  Rational slack;                // amount by which the constraint is missed, > 0
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

using CountTable = std::vector<std::vector<std::uint64_t>>;

// Experimental rows are normalised by their row totals, the observational
// grid by its grand total. Throws ZeroTotal / ArityMismatch.
ProbabilityTable experimental_from_counts(const CountTable& counts);
ProbabilityTable observational_from_counts(const CountTable& counts);
std::pair<ExperimentalDistribution, ObservationalDistribution> from_counts(
    const CountTable& experimental, const CountTable& observational);

// Checks entry ranges, the row/grand-sum invariants and, for every (j,i),
// P(x_j,y_i) <= P(y_i|do(x_j)) <= P(x_j,y_i) + 1 - P(x_j).
// Throws ArityMismatch when the shapes differ.
ValidationReport validate(const ProbabilityTable& experimental, const ProbabilityTable& observational);
ValidationReport validate(const ExperimentalDistribution& experimental,
                          const ObservationalDistribution& observational);

// Throws InvalidData listing the first violation when validation fails.
void require_valid(const ExperimentalDistribution& experimental,
                   const ObservationalDistribution& observational);

}  // namespace unitsel

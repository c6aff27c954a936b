#pragma once

// Identifiability and bounds of a benefit function.
//
// The n^{m-1} response types sharing outcome y_i at treatment x_r sum to the
// experimental probability P(y_i | do(x_r)). Picking one such group and one
// member ("keep") rewrites the function into an equivalent one: the kept
// term disappears, its coefficient is subtracted from the other members, and
// coefficient * P(y_i | do(x_r)) moves into an additive adjustment. The
// engine explores every reachable rewriting.
//
// Which rewritings are reachable depends only on the coefficients, never on
// the data, so the search is run once per benefit function (ReductionSpace)
// and the adjustment is carried symbolically as a linear combination of
// experimental cells (EffectCombination).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "unitsel/model.hpp"

namespace unitsel {

struct EngineConfig {
  bool memoize = true;
  std::size_t max_states = 10'000'000;
  SizeGuard guard{};
};

// sum_{j,i} coefficient(j,i) * P(y_i | do(x_j)).
class EffectCombination {
 public:
  EffectCombination() = default;
  EffectCombination(int m, int n);

  int treatments() const { return m_; }
  int outcomes() const { return n_; }
  const Rational& coefficient(int treatment, int outcome) const { return coeff_[index(treatment, outcome)]; }
  void add(int treatment, int outcome, const Rational& amount) { coeff_[index(treatment, outcome)] += amount; }

  Rational evaluate(const ExperimentalDistribution& experimental) const;

  // Rows of an experimental table sum to one, so P(y_n|do(x_j)) can be
  // eliminated. Two combinations are equal on every valid table iff their
  // reduced forms match: (constant, coefficients with the last outcome zero).
  std::pair<Rational, EffectCombination> reduced() const;
  bool equivalent_to(const EffectCombination& other) const;

  // "2*P(y1_x1) + P(y2_x1) - 2*P(y1_x2) - P(y2_x2)", 1-based.
  std::string to_string() const;

 private:
  std::size_t index(int treatment, int outcome) const {
    return static_cast<std::size_t>(treatment) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(outcome);
  }

  int m_ = 0;
  int n_ = 0;
  std::vector<Rational> coeff_;
};

struct ReductionGroup {
  int position;                      // treatment r, 0-based
  int outcome;                       // outcome i, 0-based
  std::vector<std::size_t> members;  // positions in the term list
};

// One group per (position, outcome) whose n^{m-1} members are all present
// (zero coefficients count as present), in (position, outcome) order.
std::vector<ReductionGroup> find_groups(std::span<const BenefitTerm> terms, int m, int n);

struct Reduction {
  std::vector<BenefitTerm> terms;
  Rational adjustment;
};

// Removes terms[keep], subtracts its coefficient from the other members and
// returns coefficient * P(y_outcome | do(x_position)) as the adjustment.
// Throws InvalidQuery when keep is not a member of the group.
Reduction reduce(std::span<const BenefitTerm> terms, const ReductionGroup& group, std::size_t keep,
                 const ExperimentalDistribution& experimental);

// A reachable rewriting: coefficients indexed by ordinal(), nullopt where
// the term has been removed.
struct ReducedForm {
  std::vector<std::optional<Rational>> coefficients;
  EffectCombination adjustment;

  bool all_zero() const;
};

struct TraceStep {
  std::size_t depth;
  int position;
  int outcome;
  ResponseAssignment kept;
  Rational kept_coefficient;
  bool revisit;  // the resulting form was already explored
};
using TraceSink = std::function<void(const TraceStep&)>;

struct ReductionSpace {
  int m = 0;
  int n = 0;
  std::vector<ReducedForm> forms;        // in discovery order, root first
  std::optional<std::size_t> zero_form;  // first all-zero form, if any
  bool complete = true;                  // false when the state budget ran out
  std::size_t expansions = 0;
};

// Depth-first over reductions. With stop_at_zero the walk ends at the first
// all-zero form. With memoize off, forms reached along different paths are
// explored (and listed) again.
ReductionSpace explore_reductions(const BenefitFunction& f, const EngineConfig& config = {},
                                  bool stop_at_zero = false, const TraceSink& trace = {});

struct IdentifiabilityResult {
  bool identifiable = false;
  Rational value;                                 // meaningful only when identifiable
  std::optional<EffectCombination> closed_form;   // the adjustment of the zero form
  std::size_t expansions = 0;
};

// Throws ArityMismatch, BudgetExceeded.
IdentifiabilityResult identify(const BenefitFunction& f, const ExperimentalDistribution& experimental,
                               const EngineConfig& config = {}, const TraceSink& trace = {});

struct BenefitBounds {
  Interval interval;
  bool partial = false;  // state budget exhausted; still a valid, possibly loose, bound
  std::size_t forms = 0;
  std::size_t expansions = 0;
};

// Candidate interval of one form: terms with a negative coefficient take the
// upper response-type bound for the lower end and vice versa.
Interval form_interval(const ReducedForm& form, const ExperimentalDistribution& experimental,
                       std::span<const Interval> type_bounds);

// Max of candidate lowers and min of candidate uppers over the space.
Interval evaluate_space(const ReductionSpace& space, const ExperimentalDistribution& experimental,
                        std::span<const Interval> type_bounds);

// Throws InvalidData when validation fails, ArityMismatch on shape mismatch.
BenefitBounds bound_benefit(const BenefitFunction& f, const ExperimentalDistribution& experimental,
                            const ObservationalDistribution& observational, const EngineConfig& config = {},
                            const TraceSink& trace = {});

}  // namespace unitsel

#pragma once

// Bounds on probabilities of causation with nonbinary treatment and outcome.
//
// A query is a conjunction of counterfactual events Y_{x_j} = y_i (at most
// one per treatment), optionally joined with the observed events X = x_p
// and/or Y = y_q. The evaluator combines closed-form candidates with
// recursive sub-bounds on queries with one fewer counterfactual pair; every
// recursive call strictly shrinks the pair set, so evaluation terminates.

#include <map>
#include <optional>
#include <vector>

#include "unitsel/model.hpp"

namespace unitsel {

struct CounterfactualPair {
  int treatment;  // j, 0-based
  int outcome;    // i, 0-based

  friend bool operator==(const CounterfactualPair&, const CounterfactualPair&) = default;
  friend auto operator<=>(const CounterfactualPair&, const CounterfactualPair&) = default;
};

class CounterfactualQuery {
 public:
  // Pairs are sorted by treatment. Throws InvalidQuery on an empty pair set,
  // a repeated treatment, or an observed treatment that is also intervened on.
  CounterfactualQuery(std::vector<CounterfactualPair> pairs, std::optional<int> observed_treatment = {},
                      std::optional<int> observed_outcome = {});

  const std::vector<CounterfactualPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  const std::optional<int>& observed_treatment() const { return observed_x_; }
  const std::optional<int>& observed_outcome() const { return observed_y_; }

  // Throws InvalidQuery when an index is out of range for (m, n).
  void check_arity(int m, int n) const;
  bool involves_treatment(int treatment) const;

  // Same query with the pair at `position` dropped.
  CounterfactualQuery without(std::size_t position) const;
  CounterfactualQuery with_observed(std::optional<int> treatment, std::optional<int> outcome) const;

  // "P(y2_x1, y1_x2, x3, y2)" in 1-based notation.
  std::string to_string() const;

  friend bool operator==(const CounterfactualQuery&, const CounterfactualQuery&) = default;
  friend auto operator<=>(const CounterfactualQuery&, const CounterfactualQuery&) = default;

 private:
  std::vector<CounterfactualPair> pairs_;
  std::optional<int> observed_x_;
  std::optional<int> observed_y_;
};

// Memoising evaluator bound to one (experimental, observational) dataset.
// Not thread-safe: the cache is mutated by const-looking queries. Use one
// evaluator per thread.
class BoundsEvaluator {
 public:
  // Throws InvalidData unless validate(experimental, observational).ok().
  BoundsEvaluator(const ExperimentalDistribution& experimental,
                  const ObservationalDistribution& observational, bool memoize = true);

  int treatments() const { return exp_.treatments(); }
  int outcomes() const { return exp_.outcomes(); }

  // Dispatches on the query shape. A single pair with no observed event is
  // the exact experimental value.
  Interval bound(const CounterfactualQuery& query);

  // P(Y_{x_j}=y_i, Y=y_i)
  Interval effect_with_same_outcome(int outcome, int treatment);
  // P(Y_{x_j}=y_i, Y=y_k), i != k
  Interval effect_with_other_outcome(int outcome, int observed_outcome, int treatment);
  // P(Y_{x_j}=y_i, X=x_k), j != k
  Interval effect_with_treatment(int outcome, int treatment, int observed_treatment);
  // P(Y_{x_j}=y_i, Y=y_k, X=x_p), j != p
  Interval effect_with_treatment_outcome(int outcome, int observed_outcome, int treatment,
                                         int observed_treatment);
  // P(conjunction of k >= 1 counterfactual pairs)
  Interval joint_effects(const std::vector<CounterfactualPair>& pairs);
  // ... and X = x_p
  Interval joint_effects_with_treatment(const std::vector<CounterfactualPair>& pairs,
                                        int observed_treatment);
  // ... and Y = y_q
  Interval joint_effects_with_outcome(const std::vector<CounterfactualPair>& pairs, int observed_outcome);
  // ... and X = x_p and Y = y_q
  Interval joint_effects_with_treatment_outcome(const std::vector<CounterfactualPair>& pairs,
                                                int observed_treatment, int observed_outcome);

  // Bounds on every full response type P(Y_{x_1}=y_{i_1}, ..., Y_{x_m}=y_{i_m}),
  // indexed by ordinal(). Throws SizeLimitExceeded past the guard.
  std::vector<Interval> response_type_bounds(const SizeGuard& guard = {});

  std::size_t cache_size() const { return cache_.size(); }
  std::size_t evaluations() const { return evaluations_; }

 private:
  Interval evaluate(const CounterfactualQuery& query);
  Interval compute(const CounterfactualQuery& query);

  Interval single_with_outcome(const CounterfactualPair& pair, int q);
  Interval single_with_treatment(const CounterfactualPair& pair, int p);
  Interval single_with_treatment_outcome(const CounterfactualPair& pair, int p, int q);
  Interval joint(const CounterfactualQuery& query);
  Interval joint_with_treatment(const CounterfactualQuery& query);
  Interval joint_with_outcome(const CounterfactualQuery& query);
  Interval joint_with_treatment_outcome(const CounterfactualQuery& query);

  Rational effect_sum(const CounterfactualQuery& query) const;
  Rational effect_min(const CounterfactualQuery& query) const;
  const Rational& effect(const CounterfactualPair& pair) const {
    return exp_.effect(pair.treatment, pair.outcome);
  }

  ExperimentalDistribution exp_;
  ObservationalDistribution obs_;
  bool memoize_;
  std::map<CounterfactualQuery, Interval> cache_;
  std::size_t evaluations_ = 0;
};

}  // namespace unitsel

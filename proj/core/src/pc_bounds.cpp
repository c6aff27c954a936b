#include "unitsel/pc_bounds.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "unitsel/errors.hpp"

namespace unitsel {

CounterfactualQuery::CounterfactualQuery(std::vector<CounterfactualPair> pairs,
                                         std::optional<int> observed_treatment,
                                         std::optional<int> observed_outcome)
    : pairs_(std::move(pairs)), observed_x_(observed_treatment), observed_y_(observed_outcome) {
  if (pairs_.empty()) throw InvalidQuery("a query needs at least one counterfactual pair");
  std::sort(pairs_.begin(), pairs_.end());
  for (std::size_t t = 1; t < pairs_.size(); ++t) {
    if (pairs_[t].treatment == pairs_[t - 1].treatment) {
      throw InvalidQuery("treatment x" + std::to_string(pairs_[t].treatment + 1) +
                         " appears in more than one counterfactual pair");
    }
  }
  if (observed_x_ && involves_treatment(*observed_x_)) {
    throw InvalidQuery("observed treatment x" + std::to_string(*observed_x_ + 1) +
                       " is also intervened on");
  }
}

void CounterfactualQuery::check_arity(int m, int n) const {
  auto bad_treatment = [m](int j) { return j < 0 || j >= m; };
  auto bad_outcome = [n](int i) { return i < 0 || i >= n; };
  for (const auto& p : pairs_) {
    if (bad_treatment(p.treatment) || bad_outcome(p.outcome)) {
      throw InvalidQuery("pair (x" + std::to_string(p.treatment + 1) + ", y" +
                         std::to_string(p.outcome + 1) + ") out of range for m=" + std::to_string(m) +
                         ", n=" + std::to_string(n));
    }
  }
  if (observed_x_ && bad_treatment(*observed_x_)) throw InvalidQuery("observed treatment out of range");
  if (observed_y_ && bad_outcome(*observed_y_)) throw InvalidQuery("observed outcome out of range");
}

bool CounterfactualQuery::involves_treatment(int treatment) const {
  return std::any_of(pairs_.begin(), pairs_.end(),
                     [treatment](const CounterfactualPair& p) { return p.treatment == treatment; });
}

CounterfactualQuery CounterfactualQuery::without(std::size_t position) const {
  std::vector<CounterfactualPair> rest;
  rest.reserve(pairs_.size() - 1);
  for (std::size_t t = 0; t < pairs_.size(); ++t) {
    if (t != position) rest.push_back(pairs_[t]);
  }
  return CounterfactualQuery(std::move(rest), observed_x_, observed_y_);
}

CounterfactualQuery CounterfactualQuery::with_observed(std::optional<int> treatment,
                                                       std::optional<int> outcome) const {
  return CounterfactualQuery(pairs_, treatment, outcome);
}

std::string CounterfactualQuery::to_string() const {
  std::ostringstream out;
  out << "P(";
  for (std::size_t t = 0; t < pairs_.size(); ++t) {
    if (t) out << ", ";
    out << 'y' << pairs_[t].outcome + 1 << "_x" << pairs_[t].treatment + 1;
  }
  if (observed_x_) out << ", x" << *observed_x_ + 1;
  if (observed_y_) out << ", y" << *observed_y_ + 1;
  out << ')';
  return out.str();
}

BoundsEvaluator::BoundsEvaluator(const ExperimentalDistribution& experimental,
                                 const ObservationalDistribution& observational, bool memoize)
    : exp_(experimental), obs_(observational), memoize_(memoize) {
  require_valid(exp_, obs_);
}

namespace {

Rational max_of(Rational a, const Rational& b) { return a < b ? b : a; }
Rational min_of(Rational a, const Rational& b) { return b < a ? b : a; }

CounterfactualQuery pairs_only(const CounterfactualQuery& q, std::size_t drop) {
  auto sub = q.without(drop);
  return sub.with_observed(std::nullopt, std::nullopt);
}

}  // namespace

Interval BoundsEvaluator::bound(const CounterfactualQuery& query) {
  query.check_arity(treatments(), outcomes());
  return evaluate(query);
}

Interval BoundsEvaluator::evaluate(const CounterfactualQuery& query) {
  if (memoize_) {
    if (auto it = cache_.find(query); it != cache_.end()) return it->second;
  }
  Interval result = compute(query);
  ++evaluations_;
  result.lower = max_of(result.lower, Rational(0));
  result.upper = min_of(result.upper, Rational(1));
  if (result.lower > result.upper) {
    throw InvalidData("bounds cross on " + query.to_string() + "; the tables admit no joint model");
  }
  if (memoize_) cache_.emplace(query, result);
  return result;
}

Interval BoundsEvaluator::compute(const CounterfactualQuery& query) {
  const auto& x = query.observed_treatment();
  const auto& y = query.observed_outcome();
  if (query.size() == 1) {
    const auto& pair = query.pairs().front();
    if (x && y) return single_with_treatment_outcome(pair, *x, *y);
    if (x) return single_with_treatment(pair, *x);
    if (y) return single_with_outcome(pair, *y);
    return Interval::point(effect(pair));
  }
  if (x && y) return joint_with_treatment_outcome(query);
  if (x) return joint_with_treatment(query);
  if (y) return joint_with_outcome(query);
  return joint(query);
}

Rational BoundsEvaluator::effect_sum(const CounterfactualQuery& query) const {
  Rational sum = 0;
  for (const auto& p : query.pairs()) sum += effect(p);
  return sum;
}

Rational BoundsEvaluator::effect_min(const CounterfactualQuery& query) const {
  Rational best = 1;
  for (const auto& p : query.pairs()) best = min_of(best, effect(p));
  return best;
}

Interval BoundsEvaluator::single_with_outcome(const CounterfactualPair& pair, int q) {
  const int j = pair.treatment;
  const int i = pair.outcome;
  const Rational& p_effect = effect(pair);
  if (q == i) {
    Rational lower = max_of(obs_.joint(j, i), p_effect + obs_.outcome_marginal(i) - 1);
    Rational upper = min_of(p_effect, obs_.outcome_marginal(i));
    return {lower, upper};
  }
  Rational lower = max_of(Rational(0), p_effect + obs_.outcome_marginal(q) - 1);
  // Split on the natural treatment: with X = x_j consistency forces Y = y_i,
  // so only the other treatments contribute.
  Rational split = 0;
  for (int p = 0; p < treatments(); ++p) {
    if (p != j) split += single_with_treatment_outcome(pair, p, q).lower;
  }
  lower = max_of(lower, split);
  Rational upper = min_of(p_effect - obs_.joint(j, i), obs_.outcome_marginal(q) - obs_.joint(j, q));
  return {lower, upper};
}

Interval BoundsEvaluator::single_with_treatment(const CounterfactualPair& pair, int p) {
  const int j = pair.treatment;
  const int i = pair.outcome;
  const Rational unobserved = effect(pair) - obs_.joint(j, i);
  Rational lower = max_of(Rational(0), unobserved - 1 + obs_.treatment_marginal(j) + obs_.treatment_marginal(p));
  Rational upper = min_of(unobserved, obs_.treatment_marginal(p));
  return {lower, upper};
}

Interval BoundsEvaluator::single_with_treatment_outcome(const CounterfactualPair& pair, int p, int q) {
  const int j = pair.treatment;
  const int i = pair.outcome;
  const Rational unobserved = effect(pair) - obs_.joint(j, i);
  Rational lower = max_of(Rational(0), effect(pair) + obs_.joint(p, q) - 1 + obs_.treatment_marginal(j) -
                                           obs_.joint(j, i));
  Rational upper = min_of(unobserved, obs_.joint(p, q));
  return {lower, upper};
}

Interval BoundsEvaluator::joint(const CounterfactualQuery& query) {
  const auto k = static_cast<long>(query.size());
  const auto& pairs = query.pairs();

  Rational lower = max_of(Rational(0), effect_sum(query) - k + 1);
  Rational upper = effect_min(query);

  for (std::size_t t = 0; t < pairs.size(); ++t) {
    Interval rest = evaluate(pairs_only(query, t));
    lower = max_of(lower, rest.lower + effect(pairs[t]) - 1);
    upper = min_of(upper, rest.upper);
  }

  // Partition on the natural treatment X. Where X = x_{j_r}, consistency
  // turns the r-th counterfactual into the observed Y = y_{i_r}.
  Rational split_lower = 0;
  Rational split_upper = 0;
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    Interval part = evaluate(pairs_only(query, r).with_observed(pairs[r].treatment, pairs[r].outcome));
    split_lower += part.lower;
    split_upper += part.upper;
  }
  for (int p = 0; p < treatments(); ++p) {
    if (query.involves_treatment(p)) continue;
    Interval part = evaluate(query.with_observed(p, std::nullopt));
    split_lower += part.lower;
    split_upper += part.upper;
  }
  return {max_of(lower, split_lower), min_of(upper, split_upper)};
}

Interval BoundsEvaluator::joint_with_treatment(const CounterfactualQuery& query) {
  const auto k = static_cast<long>(query.size());
  const int p = *query.observed_treatment();
  const auto& pairs = query.pairs();
  const Rational& px = obs_.treatment_marginal(p);

  Rational lower = max_of(Rational(0), effect_sum(query) + px - k);
  Rational upper = min_of(effect_min(query), px);
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    Interval rest = evaluate(pairs_only(query, t));
    Interval single = evaluate(CounterfactualQuery({pairs[t]}, p));
    lower = max_of(lower, rest.lower + single.lower - 1);
    upper = min_of(upper, min_of(rest.upper, single.upper));
  }
  return {lower, upper};
}

Interval BoundsEvaluator::joint_with_outcome(const CounterfactualQuery& query) {
  const auto k = static_cast<long>(query.size());
  const int q = *query.observed_outcome();
  const auto& pairs = query.pairs();
  const Rational& py = obs_.outcome_marginal(q);

  Rational lower = max_of(Rational(0), effect_sum(query) + py - k);
  Rational upper = min_of(effect_min(query), py);
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    Interval rest = evaluate(pairs_only(query, t));
    Interval single = evaluate(CounterfactualQuery({pairs[t]}, std::nullopt, q));
    lower = max_of(lower, rest.lower + single.lower - 1);
    upper = min_of(upper, min_of(rest.upper, single.upper));
  }

  // Partition on X. At X = x_{j_r} the observed outcome must equal i_r, so
  // positions with i_r != q contribute nothing.
  Rational split_lower = 0;
  Rational split_upper = 0;
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    if (pairs[r].outcome != q) continue;
    Interval part = evaluate(pairs_only(query, r).with_observed(pairs[r].treatment, q));
    split_lower += part.lower;
    split_upper += part.upper;
  }
  for (int p = 0; p < treatments(); ++p) {
    if (query.involves_treatment(p)) continue;
    Interval part = evaluate(query.with_observed(p, q));
    split_lower += part.lower;
    split_upper += part.upper;
  }
  return {max_of(lower, split_lower), min_of(upper, split_upper)};
}

Interval BoundsEvaluator::joint_with_treatment_outcome(const CounterfactualQuery& query) {
  const auto k = static_cast<long>(query.size());
  const int p = *query.observed_treatment();
  const int q = *query.observed_outcome();
  const auto& pairs = query.pairs();
  const Rational& pxy = obs_.joint(p, q);

  Rational lower = max_of(Rational(0), effect_sum(query) + pxy - k);
  Rational upper = min_of(effect_min(query), pxy);
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    Interval rest = evaluate(pairs_only(query, t));
    Interval single = evaluate(CounterfactualQuery({pairs[t]}, p, q));
    lower = max_of(lower, rest.lower + single.lower - 1);
    upper = min_of(upper, min_of(rest.upper, single.upper));
  }
  return {lower, upper};
}

Interval BoundsEvaluator::effect_with_same_outcome(int outcome, int treatment) {
  return bound(CounterfactualQuery({{treatment, outcome}}, std::nullopt, outcome));
}

Interval BoundsEvaluator::effect_with_other_outcome(int outcome, int observed_outcome, int treatment) {
  if (outcome == observed_outcome) {
    throw InvalidQuery("observed outcome equals the counterfactual outcome; use effect_with_same_outcome");
  }
  return bound(CounterfactualQuery({{treatment, outcome}}, std::nullopt, observed_outcome));
}

Interval BoundsEvaluator::effect_with_treatment(int outcome, int treatment, int observed_treatment) {
  return bound(CounterfactualQuery({{treatment, outcome}}, observed_treatment));
}

Interval BoundsEvaluator::effect_with_treatment_outcome(int outcome, int observed_outcome, int treatment,
                                                        int observed_treatment) {
  return bound(CounterfactualQuery({{treatment, outcome}}, observed_treatment, observed_outcome));
}

Interval BoundsEvaluator::joint_effects(const std::vector<CounterfactualPair>& pairs) {
  return bound(CounterfactualQuery(pairs));
}

Interval BoundsEvaluator::joint_effects_with_treatment(const std::vector<CounterfactualPair>& pairs,
                                                       int observed_treatment) {
  return bound(CounterfactualQuery(pairs, observed_treatment));
}

Interval BoundsEvaluator::joint_effects_with_outcome(const std::vector<CounterfactualPair>& pairs,
                                                     int observed_outcome) {
  return bound(CounterfactualQuery(pairs, std::nullopt, observed_outcome));
}

Interval BoundsEvaluator::joint_effects_with_treatment_outcome(const std::vector<CounterfactualPair>& pairs,
                                                               int observed_treatment, int observed_outcome) {
  return bound(CounterfactualQuery(pairs, observed_treatment, observed_outcome));
}

std::vector<Interval> BoundsEvaluator::response_type_bounds(const SizeGuard& guard) {
  const int m = treatments();
  const int n = outcomes();
  const std::size_t count = response_type_count(m, n, guard);
  std::vector<Interval> bounds;
  bounds.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto assignment = assignment_at(k + 1, m, n);
    std::vector<CounterfactualPair> pairs;
    for (int t = 0; t < m; ++t) pairs.push_back({t, assignment.outcome(t)});
    bounds.push_back(evaluate(CounterfactualQuery(std::move(pairs))));
  }
  return bounds;
}

}  // namespace unitsel

#include "unitsel/benefit.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "unitsel/errors.hpp"
#include "unitsel/pc_bounds.hpp"

namespace unitsel {

EffectCombination::EffectCombination(int m, int n)
    : m_(m), n_(n), coeff_(static_cast<std::size_t>(m) * static_cast<std::size_t>(n)) {}

Rational EffectCombination::evaluate(const ExperimentalDistribution& experimental) const {
  if (experimental.treatments() != m_ || experimental.outcomes() != n_) {
    throw ArityMismatch("adjustment and experimental table differ in shape");
  }
  Rational sum = 0;
  for (int j = 0; j < m_; ++j) {
    for (int i = 0; i < n_; ++i) {
      if (coefficient(j, i) != 0) sum += coefficient(j, i) * experimental.effect(j, i);
    }
  }
  return sum;
}

std::pair<Rational, EffectCombination> EffectCombination::reduced() const {
  EffectCombination out = *this;
  Rational constant = 0;
  for (int j = 0; j < m_; ++j) {
    const Rational last = coefficient(j, n_ - 1);
    if (last == 0) continue;
    constant += last;
    for (int i = 0; i < n_; ++i) out.coeff_[index(j, i)] -= last;
  }
  return {constant, out};
}

bool EffectCombination::equivalent_to(const EffectCombination& other) const {
  if (m_ != other.m_ || n_ != other.n_) return false;
  auto [c1, r1] = reduced();
  auto [c2, r2] = other.reduced();
  return c1 == c2 && r1.coeff_ == r2.coeff_;
}

std::string EffectCombination::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (int j = 0; j < m_; ++j) {
    for (int i = 0; i < n_; ++i) {
      const Rational& c = coefficient(j, i);
      if (c == 0) continue;
      Rational magnitude = abs(c);
      if (first) {
        if (c < 0) out << '-';
      } else {
        out << (c < 0 ? " - " : " + ");
      }
      if (magnitude != 1) out << to_fraction_string(magnitude) << '*';
      out << "P(y" << i + 1 << "_x" << j + 1 << ')';
      first = false;
    }
  }
  if (first) out << '0';
  return out.str();
}

bool ReducedForm::all_zero() const {
  return std::all_of(coefficients.begin(), coefficients.end(),
                     [](const std::optional<Rational>& c) { return !c || *c == 0; });
}

namespace {

// Ordinals of the response types with `outcome` at treatment `position`,
// ascending. Indexed by position * n + outcome.
std::vector<std::vector<std::size_t>> group_layout(int m, int n) {
  std::size_t count = 1;
  for (int t = 0; t < m; ++t) count *= static_cast<std::size_t>(n);
  std::vector<std::vector<std::size_t>> layout(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rest = k;
    for (int t = m - 1; t >= 0; --t) {
      const auto outcome = rest % static_cast<std::size_t>(n);
      rest /= static_cast<std::size_t>(n);
      layout[static_cast<std::size_t>(t) * static_cast<std::size_t>(n) + outcome].push_back(k);
    }
  }
  return layout;
}

class Explorer {
 public:
  Explorer(int m, int n, const EngineConfig& config, bool stop_at_zero, const TraceSink& trace)
      : m_(m), n_(n), config_(config), stop_at_zero_(stop_at_zero), trace_(trace), layout_(group_layout(m, n)) {
    space_.m = m;
    space_.n = n;
  }

  ReductionSpace run(ReducedForm root) {
    visit(std::move(root), 0);
    return std::move(space_);
  }

 private:
  // Returns true when the walk must stop.
  bool visit(ReducedForm form, std::size_t depth) {
    if (++space_.expansions > config_.max_states) {
      space_.complete = false;
      return true;
    }
    auto [it, inserted] = seen_.try_emplace(form.coefficients, space_.forms.size());
    if (inserted) {
      space_.forms.push_back(form);
      if (!space_.zero_form && form.all_zero()) {
        space_.zero_form = it->second;
        if (stop_at_zero_) return true;
      }
    } else if (!form.adjustment.equivalent_to(space_.forms[it->second].adjustment)) {
      throw std::logic_error("equal reduced forms with non-equivalent adjustments");
    }

    for (int r = 0; r < m_; ++r) {
      for (int i = 0; i < n_; ++i) {
        const auto& members = layout_[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) +
                                      static_cast<std::size_t>(i)];
        const bool complete_group = std::all_of(members.begin(), members.end(), [&](std::size_t k) {
          return form.coefficients[k].has_value();
        });
        if (!complete_group) continue;

        for (std::size_t keep : members) {
          const Rational alpha = *form.coefficients[keep];
          ReducedForm child = form;
          child.coefficients[keep].reset();
          if (alpha != 0) {
            for (std::size_t other : members) {
              if (other != keep) *child.coefficients[other] -= alpha;
            }
            child.adjustment.add(r, i, alpha);
          }
          const bool revisit = config_.memoize && seen_.contains(child.coefficients);
          if (trace_) {
            trace_({depth, r, i, assignment_at(keep + 1, m_, n_), alpha, revisit});
          }
          if (revisit) continue;
          if (visit(std::move(child), depth + 1)) return true;
        }
      }
    }
    return false;
  }

  int m_;
  int n_;
  const EngineConfig& config_;
  bool stop_at_zero_;
  const TraceSink& trace_;
  std::vector<std::vector<std::size_t>> layout_;
  std::map<std::vector<std::optional<Rational>>, std::size_t> seen_;
  ReductionSpace space_;
};

void check_shape(const BenefitFunction& f, int m, int n) {
  if (f.treatments() != m || f.outcomes() != n) {
    throw ArityMismatch("benefit function is for m=" + std::to_string(f.treatments()) + ", n=" +
                        std::to_string(f.outcomes()) + " but data are " + std::to_string(m) + "x" +
                        std::to_string(n));
  }
}

}  // namespace

std::vector<ReductionGroup> find_groups(std::span<const BenefitTerm> terms, int m, int n) {
  std::vector<ReductionGroup> groups;
  std::size_t per_group = 1;
  for (int t = 1; t < m; ++t) per_group *= static_cast<std::size_t>(n);
  for (int r = 0; r < m; ++r) {
    for (int i = 0; i < n; ++i) {
      ReductionGroup group{r, i, {}};
      for (std::size_t pos = 0; pos < terms.size(); ++pos) {
        if (terms[pos].assignment.outcome(r) == i) group.members.push_back(pos);
      }
      // Assignments are distinct, so a full count means every member is present.
      if (group.members.size() == per_group) groups.push_back(std::move(group));
    }
  }
  return groups;
}

Reduction reduce(std::span<const BenefitTerm> terms, const ReductionGroup& group, std::size_t keep,
                 const ExperimentalDistribution& experimental) {
  if (std::find(group.members.begin(), group.members.end(), keep) == group.members.end()) {
    throw InvalidQuery("term " + std::to_string(keep) + " is not a member of the reduction group");
  }
  const Rational alpha = terms[keep].coefficient;
  Reduction out;
  out.adjustment = alpha * experimental.effect(group.position, group.outcome);
  out.terms.reserve(terms.size() - 1);
  for (std::size_t pos = 0; pos < terms.size(); ++pos) {
    if (pos == keep) continue;
    BenefitTerm term = terms[pos];
    if (std::find(group.members.begin(), group.members.end(), pos) != group.members.end()) {
      term.coefficient -= alpha;
    }
    out.terms.push_back(std::move(term));
  }
  return out;
}

ReductionSpace explore_reductions(const BenefitFunction& f, const EngineConfig& config, bool stop_at_zero,
                                  const TraceSink& trace) {
  const int m = f.treatments();
  const int n = f.outcomes();
  const std::size_t count = response_type_count(m, n, config.guard);

  ReducedForm root;
  root.coefficients.resize(count);
  for (const auto& term : f.terms()) root.coefficients[ordinal(term.assignment, n)] = term.coefficient;
  root.adjustment = EffectCombination(m, n);

  return Explorer(m, n, config, stop_at_zero, trace).run(std::move(root));
}

IdentifiabilityResult identify(const BenefitFunction& f, const ExperimentalDistribution& experimental,
                               const EngineConfig& config, const TraceSink& trace) {
  check_shape(f, experimental.treatments(), experimental.outcomes());
  ReductionSpace space = explore_reductions(f, config, true, trace);
  IdentifiabilityResult result;
  result.expansions = space.expansions;
  if (space.zero_form) {
    const auto& adjustment = space.forms[*space.zero_form].adjustment;
    result.identifiable = true;
    result.value = adjustment.evaluate(experimental);
    result.closed_form = adjustment;
    return result;
  }
  if (!space.complete) {
    throw BudgetExceeded("identifiability search exceeded " + std::to_string(config.max_states) + " states");
  }
  return result;
}

Interval form_interval(const ReducedForm& form, const ExperimentalDistribution& experimental,
                       std::span<const Interval> type_bounds) {
  const Rational base = form.adjustment.evaluate(experimental);
  Interval out{base, base};
  for (std::size_t k = 0; k < form.coefficients.size(); ++k) {
    const auto& c = form.coefficients[k];
    if (!c || *c == 0) continue;
    if (*c < 0) {
      out.lower += *c * type_bounds[k].upper;
      out.upper += *c * type_bounds[k].lower;
    } else {
      out.lower += *c * type_bounds[k].lower;
      out.upper += *c * type_bounds[k].upper;
    }
  }
  return out;
}

Interval evaluate_space(const ReductionSpace& space, const ExperimentalDistribution& experimental,
                        std::span<const Interval> type_bounds) {
  if (space.forms.empty()) throw std::logic_error("empty reduction space");
  Interval best = form_interval(space.forms.front(), experimental, type_bounds);
  for (std::size_t k = 1; k < space.forms.size(); ++k) {
    Interval candidate = form_interval(space.forms[k], experimental, type_bounds);
    if (candidate.lower > best.lower) best.lower = candidate.lower;
    if (candidate.upper < best.upper) best.upper = candidate.upper;
  }
  if (best.lower > best.upper) throw InvalidData("benefit bounds cross; the tables admit no joint model");
  return best;
}

BenefitBounds bound_benefit(const BenefitFunction& f, const ExperimentalDistribution& experimental,
                            const ObservationalDistribution& observational, const EngineConfig& config,
                            const TraceSink& trace) {
  check_shape(f, experimental.treatments(), experimental.outcomes());
  check_shape(f, observational.treatments(), observational.outcomes());
  BoundsEvaluator evaluator(experimental, observational);
  const auto type_bounds = evaluator.response_type_bounds(config.guard);

  ReductionSpace space = explore_reductions(f, config, false, trace);
  BenefitBounds out;
  out.interval = evaluate_space(space, experimental, type_bounds);
  out.partial = !space.complete;
  out.forms = space.forms.size();
  out.expansions = space.expansions;
  return out;
}

}  // namespace unitsel

#include "unitsel/model.hpp"

#include <numeric>
#include <set>
#include <sstream>

#include "unitsel/errors.hpp"

namespace unitsel {

std::size_t response_type_count(int m, int n, const SizeGuard& guard) {
  if (m < 2 || n < 2) {
    throw InvalidData("treatment and outcome arities must both be >= 2 (got m=" +
                      std::to_string(m) + ", n=" + std::to_string(n) + ")");
  }
  std::size_t count = 1;
  for (int t = 0; t < m; ++t) {
    count *= static_cast<std::size_t>(n);
    if (count > guard.max_response_types) {
      throw SizeLimitExceeded("n^m exceeds the response-type limit of " +
                              std::to_string(guard.max_response_types));
    }
  }
  return count;
}

bool ResponseAssignment::valid_for(int m, int n) const {
  if (treatments() != m) return false;
  for (int o : outcomes_) {
    if (o < 0 || o >= n) return false;
  }
  return true;
}

std::string ResponseAssignment::to_string() const {
  std::ostringstream out;
  out << '(';
  for (std::size_t t = 0; t < outcomes_.size(); ++t) {
    if (t) out << ',';
    out << outcomes_[t] + 1;
  }
  out << ')';
  return out.str();
}

std::size_t ordinal(const ResponseAssignment& assignment, int n) {
  std::size_t index = 0;
  for (int o : assignment.outcomes()) {
    index = index * static_cast<std::size_t>(n) + static_cast<std::size_t>(o);
  }
  return index;
}

std::size_t term_index(const ResponseAssignment& assignment, int n) {
  return ordinal(assignment, n) + 1;
}

ResponseAssignment assignment_at(std::size_t index, int m, int n) {
  std::size_t total = 1;
  for (int t = 0; t < m; ++t) total *= static_cast<std::size_t>(n);
  if (index < 1 || index > total) {
    throw InvalidQuery("term index " + std::to_string(index) + " outside [1, " +
                       std::to_string(total) + "]");
  }
  std::vector<int> outcomes(static_cast<std::size_t>(m));
  std::size_t rest = index - 1;
  for (int t = m - 1; t >= 0; --t) {
    outcomes[static_cast<std::size_t>(t)] = static_cast<int>(rest % static_cast<std::size_t>(n));
    rest /= static_cast<std::size_t>(n);
  }
  return ResponseAssignment(std::move(outcomes));
}

ProbabilityTable::ProbabilityTable(int m, int n)
    : m_(m), n_(n), cells_(static_cast<std::size_t>(m) * static_cast<std::size_t>(n)) {}

ProbabilityTable::ProbabilityTable(int m, int n, std::vector<Rational> cells)
    : m_(m), n_(n), cells_(std::move(cells)) {
  if (cells_.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(n)) {
    throw ArityMismatch("table has " + std::to_string(cells_.size()) + " cells, expected " +
                        std::to_string(m) + "x" + std::to_string(n));
  }
}

Rational ProbabilityTable::row_sum(int treatment) const {
  Rational sum = 0;
  for (int i = 0; i < n_; ++i) sum += at(treatment, i);
  return sum;
}

Rational ProbabilityTable::column_sum(int outcome) const {
  Rational sum = 0;
  for (int j = 0; j < m_; ++j) sum += at(j, outcome);
  return sum;
}

Rational ProbabilityTable::total() const {
  return std::accumulate(cells_.begin(), cells_.end(), Rational(0));
}

namespace {

void check_range(const ProbabilityTable& table, const std::string& name,
                 std::vector<Violation>& out) {
  for (int j = 0; j < table.treatments(); ++j) {
    for (int i = 0; i < table.outcomes(); ++i) {
      const Rational& p = table.at(j, i);
      if (p < 0) out.push_back({name + "_range", j, i, -p});
      if (p > 1) out.push_back({name + "_range", j, i, p - 1});
    }
  }
}

void check_shape(const ProbabilityTable& a, const ProbabilityTable& b) {
  if (a.treatments() != b.treatments() || a.outcomes() != b.outcomes()) {
    throw ArityMismatch("experimental table is " + std::to_string(a.treatments()) + "x" +
                        std::to_string(a.outcomes()) + " but observational is " +
                        std::to_string(b.treatments()) + "x" + std::to_string(b.outcomes()));
  }
}

std::string describe(const Violation& v) {
  std::ostringstream out;
  out << v.constraint;
  if (v.treatment) out << " x" << *v.treatment + 1;
  if (v.outcome) out << " y" << *v.outcome + 1;
  out << " (slack " << to_fraction_string(v.slack) << ")";
  return out.str();
}

}  // namespace

ExperimentalDistribution::ExperimentalDistribution(ProbabilityTable table) : table_(std::move(table)) {
  std::vector<Violation> issues;
  check_range(table_, "experimental", issues);
  for (int j = 0; j < table_.treatments(); ++j) {
    Rational diff = table_.row_sum(j) - 1;
    if (diff != 0) issues.push_back({"experimental_row_sum", j, std::nullopt, abs(diff)});
  }
  if (!issues.empty()) throw InvalidData("invalid experimental table: " + describe(issues.front()));
}

ObservationalDistribution::ObservationalDistribution(ProbabilityTable table) : table_(std::move(table)) {
  std::vector<Violation> issues;
  check_range(table_, "observational", issues);
  Rational diff = table_.total() - 1;
  if (diff != 0) issues.push_back({"observational_total", std::nullopt, std::nullopt, abs(diff)});
  if (!issues.empty()) throw InvalidData("invalid observational table: " + describe(issues.front()));

  for (int j = 0; j < table_.treatments(); ++j) px_.push_back(table_.row_sum(j));
  for (int i = 0; i < table_.outcomes(); ++i) py_.push_back(table_.column_sum(i));
}

BenefitFunction::BenefitFunction(int m, int n, std::vector<BenefitTerm> terms)
    : m_(m), n_(n), terms_(std::move(terms)) {
  response_type_count(m, n, SizeGuard{static_cast<std::size_t>(-1)});
  std::set<ResponseAssignment> seen;
  for (const auto& term : terms_) {
    if (!term.assignment.valid_for(m, n)) {
      throw InvalidData("benefit term assignment " + term.assignment.to_string() +
                        " is not valid for m=" + std::to_string(m) + ", n=" + std::to_string(n));
    }
    if (!seen.insert(term.assignment).second) {
      throw InvalidData("duplicate benefit term for assignment " + term.assignment.to_string());
    }
  }
}

BenefitFunction BenefitFunction::from_vector(int m, int n, std::span<const Rational> vector,
                                             const SizeGuard& guard) {
  const std::size_t count = response_type_count(m, n, guard);
  if (vector.size() != count) {
    throw ArityMismatch("benefit vector has " + std::to_string(vector.size()) +
                        " entries, expected n^m = " + std::to_string(count));
  }
  std::vector<BenefitTerm> terms;
  terms.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    terms.push_back({vector[k], assignment_at(k + 1, m, n)});
  }
  return BenefitFunction(m, n, std::move(terms));
}

std::vector<Rational> BenefitFunction::dense_coefficients() const {
  std::size_t count = 1;
  for (int t = 0; t < m_; ++t) count *= static_cast<std::size_t>(n_);
  std::vector<Rational> dense(count);
  for (const auto& term : terms_) dense[ordinal(term.assignment, n_)] = term.coefficient;
  return dense;
}

namespace {

std::vector<Rational> to_row(const std::vector<std::uint64_t>& counts) {
  std::vector<Rational> row;
  row.reserve(counts.size());
  for (auto c : counts) row.emplace_back(BigInt(c));
  return row;
}

std::pair<int, int> count_shape(const CountTable& counts) {
  if (counts.empty() || counts.front().empty()) throw ArityMismatch("empty count table");
  const auto n = counts.front().size();
  for (const auto& row : counts) {
    if (row.size() != n) throw ArityMismatch("ragged count table");
  }
  return {static_cast<int>(counts.size()), static_cast<int>(n)};
}

}  // namespace

ProbabilityTable experimental_from_counts(const CountTable& counts) {
  auto [m, n] = count_shape(counts);
  ProbabilityTable table(m, n);
  for (int j = 0; j < m; ++j) {
    auto row = to_row(counts[static_cast<std::size_t>(j)]);
    Rational total = std::accumulate(row.begin(), row.end(), Rational(0));
    if (total == 0) {
      throw ZeroTotal("experimental row for treatment x" + std::to_string(j + 1) + " has zero total");
    }
    for (int i = 0; i < n; ++i) table.at(j, i) = row[static_cast<std::size_t>(i)] / total;
  }
  return table;
}

ProbabilityTable observational_from_counts(const CountTable& counts) {
  auto [m, n] = count_shape(counts);
  ProbabilityTable table(m, n);
  Rational total = 0;
  for (const auto& row : counts) {
    for (auto c : row) total += Rational(BigInt(c));
  }
  if (total == 0) throw ZeroTotal("observational table has zero grand total");
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      table.at(j, i) = Rational(BigInt(counts[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])) / total;
    }
  }
  return table;
}

std::pair<ExperimentalDistribution, ObservationalDistribution> from_counts(
    const CountTable& experimental, const CountTable& observational) {
  auto exp = experimental_from_counts(experimental);
  auto obs = observational_from_counts(observational);
  check_shape(exp, obs);
  return {ExperimentalDistribution(std::move(exp)), ObservationalDistribution(std::move(obs))};
}

ValidationReport validate(const ProbabilityTable& experimental, const ProbabilityTable& observational) {
  check_shape(experimental, observational);
  ValidationReport report;
  auto& out = report.violations;
  check_range(experimental, "experimental", out);
  check_range(observational, "observational", out);

  for (int j = 0; j < experimental.treatments(); ++j) {
    Rational diff = experimental.row_sum(j) - 1;
    if (diff != 0) out.push_back({"experimental_row_sum", j, std::nullopt, abs(diff)});
  }
  Rational diff = observational.total() - 1;
  if (diff != 0) out.push_back({"observational_total", std::nullopt, std::nullopt, abs(diff)});

  for (int j = 0; j < experimental.treatments(); ++j) {
    const Rational px = observational.row_sum(j);
    for (int i = 0; i < experimental.outcomes(); ++i) {
      const Rational& effect = experimental.at(j, i);
      const Rational& joint = observational.at(j, i);
      if (effect < joint) out.push_back({"general_relation_lower", j, i, joint - effect});
      const Rational cap = joint + 1 - px;
      if (effect > cap) out.push_back({"general_relation_upper", j, i, effect - cap});
    }
  }
  return report;
}

ValidationReport validate(const ExperimentalDistribution& experimental,
                          const ObservationalDistribution& observational) {
  return validate(experimental.table(), observational.table());
}

void require_valid(const ExperimentalDistribution& experimental,
                   const ObservationalDistribution& observational) {
  auto report = validate(experimental, observational);
  if (!report.ok()) {
    throw InvalidData("data violate the general relation: " + describe(report.violations.front()));
  }
}

}  // namespace unitsel

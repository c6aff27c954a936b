#include "unitsel/sim.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "unitsel/errors.hpp"
#include "unitsel/pc_bounds.hpp"

namespace unitsel {

PopulationStream::PopulationStream(std::uint64_t seed, std::uint64_t population, int grid_bits)
    : grid_bits_(grid_bits) {
  if (grid_bits < 1 || grid_bits > 64) throw InvalidData("grid bits must be in [1, 64]");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(population), static_cast<std::uint32_t>(population >> 32)};
  engine_.seed(seq);
  scale_ = Rational(BigInt(1) << grid_bits);
}

Rational PopulationStream::uniform() {
  const std::uint64_t raw = engine_() >> (64 - grid_bits_);
  return Rational(BigInt(raw)) / scale_;
}

Rational PopulationStream::uniform(const Rational& lo, const Rational& hi) {
  return lo + (hi - lo) * uniform();
}

PopulationFractions::PopulationFractions(int m, int n, std::vector<Rational> fractions)
    : m_(m), n_(n), fractions_(std::move(fractions)) {
  const std::size_t count = response_type_count(m, n);
  if (fractions_.size() != count) {
    throw ArityMismatch("expected " + std::to_string(count) + " response-type fractions");
  }
  Rational sum = 0;
  for (const auto& f : fractions_) {
    if (f < 0) throw InvalidData("negative response-type fraction");
    sum += f;
  }
  if (sum != 1) throw InvalidData("response-type fractions sum to " + to_fraction_string(sum) + ", not 1");
}

PopulationFractions fractions_from_cuts(int m, int n, std::vector<Rational> cuts) {
  cuts.emplace_back(1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> fractions(cuts.size());
  fractions[0] = cuts[0];
  for (std::size_t k = 1; k < cuts.size(); ++k) fractions[k] = cuts[k] - cuts[k - 1];
  return PopulationFractions(m, n, std::move(fractions));
}

PopulationFractions generate_fractions(PopulationStream& rng, int m, int n) {
  const std::size_t count = response_type_count(m, n);
  std::vector<Rational> cuts;
  cuts.reserve(count);
  for (std::size_t k = 0; k + 1 < count; ++k) cuts.push_back(rng.uniform());
  return fractions_from_cuts(m, n, std::move(cuts));
}

ExperimentalDistribution derive_experimental(const PopulationFractions& fractions) {
  const int m = fractions.treatments();
  const int n = fractions.outcomes();
  ProbabilityTable table(m, n);
  const auto& f = fractions.fractions();
  for (std::size_t r = 0; r < f.size(); ++r) {
    const auto assignment = assignment_at(r + 1, m, n);
    for (int j = 0; j < m; ++j) table.at(j, assignment.outcome(j)) += f[r];
  }
  return ExperimentalDistribution(std::move(table));
}

std::optional<ObservationalDistribution> sample_observational(const PopulationFractions& fractions,
                                                              const ExperimentalDistribution& experimental,
                                                              PopulationStream& rng) {
  if (fractions.treatments() != 2 || fractions.outcomes() != 3 || experimental.treatments() != 2 ||
      experimental.outcomes() != 3) {
    throw ArityMismatch("the observational sampler is defined for m = 2, n = 3");
  }
  auto effect = [&](int j, int i) -> const Rational& { return experimental.effect(j, i); };

  ProbabilityTable obs(2, 3);
  obs.at(0, 0) = rng.uniform(0, effect(0, 0));
  obs.at(0, 1) = rng.uniform(0, effect(0, 1));
  const Rational x1_low = obs.at(0, 0) + obs.at(0, 1);
  const Rational x1_high = std::min(obs.at(0, 0) + 1 - effect(0, 0), obs.at(0, 1) + 1 - effect(1, 0));
  if (x1_low > x1_high) return std::nullopt;
  const Rational px1 = rng.uniform(x1_low, x1_high);
  obs.at(0, 2) = px1 - obs.at(0, 0) - obs.at(0, 1);

  const Rational px2 = 1 - px1;
  obs.at(1, 0) = rng.uniform(0, std::min(effect(1, 0), px2));
  obs.at(1, 1) = rng.uniform(0, std::min(effect(1, 1), px2 - obs.at(1, 0)));
  obs.at(1, 2) = px2 - obs.at(1, 0) - obs.at(1, 1);

  if (!validate(experimental.table(), obs).ok()) return std::nullopt;
  return ObservationalDistribution(std::move(obs));
}

Rational real_benefit(const PopulationFractions& fractions, std::span<const Rational> benefit_vector) {
  const auto& f = fractions.fractions();
  if (benefit_vector.size() != f.size()) {
    throw ArityMismatch("benefit vector has " + std::to_string(benefit_vector.size()) + " entries, expected " +
                        std::to_string(f.size()));
  }
  Rational sum = 0;
  for (std::size_t r = 0; r < f.size(); ++r) sum += benefit_vector[r] * f[r];
  return sum;
}

SimStudy run_study(const SimConfig& config) {
  if (config.count < 1) throw InvalidData("population count must be >= 1");
  const auto f = BenefitFunction::from_vector(config.m, config.n, config.benefit_vector, config.engine.guard);
  const ReductionSpace space = explore_reductions(f, config.engine);

  SimStudy study;
  study.records.reserve(config.count);
  for (std::size_t id = 0; id < config.count; ++id) {
    PopulationStream rng(config.seed, id, config.grid_bits);
    for (std::size_t attempt = 1;; ++attempt) {
      if (attempt > config.rejection_cap) {
        throw RejectionCapExceeded("population " + std::to_string(id + 1) + " rejected " +
                                   std::to_string(config.rejection_cap) + " times");
      }
      auto fractions = generate_fractions(rng, config.m, config.n);
      auto experimental = derive_experimental(fractions);
      auto observational = sample_observational(fractions, experimental, rng);
      if (!observational) {
        ++study.summary.rejections;
        continue;
      }
      BoundsEvaluator evaluator(experimental, *observational);
      const auto type_bounds = evaluator.response_type_bounds(config.engine.guard);
      const Interval bounds = evaluate_space(space, experimental, type_bounds);

      SimRecord record;
      record.id = id;
      record.lower = bounds.lower;
      record.upper = bounds.upper;
      record.real = real_benefit(fractions, config.benefit_vector);
      record.attempts = attempt;
      study.records.push_back(std::move(record));
      break;
    }
  }

  auto& summary = study.summary;
  summary.benefit_vector = config.benefit_vector;
  summary.count = study.records.size();
  summary.seed = config.seed;
  summary.partial = !space.complete;
  Rational gap_total = 0;
  for (const auto& record : study.records) {
    gap_total += record.gap();
    if (!record.contains_real()) ++summary.violations;
  }
  summary.average_gap = gap_total / Rational(BigInt(summary.count));
  return study;
}

std::string records_csv(std::span<const SimRecord> records, int precision, std::size_t max_rows) {
  std::ostringstream out;
  out << "id,lower,upper,midpoint,real,gap\n";
  const std::size_t rows = max_rows == 0 ? records.size() : std::min(max_rows, records.size());
  for (std::size_t k = 0; k < rows; ++k) {
    const auto& r = records[k];
    out << r.id + 1 << ',' << to_decimal_string(r.lower, precision) << ','
        << to_decimal_string(r.upper, precision) << ',' << to_decimal_string(r.midpoint(), precision) << ','
        << to_decimal_string(r.real, precision) << ',' << to_decimal_string(r.gap(), precision) << '\n';
  }
  return out.str();
}

nlohmann::json summary_json(const SimSummary& summary, int precision) {
  nlohmann::json vector = nlohmann::json::array();
  for (const auto& v : summary.benefit_vector) vector.push_back(to_fraction_string(v));
  return {
      {"vector", vector},
      {"count", summary.count},
      {"avg_gap", to_decimal_string(summary.average_gap, precision)},
      {"avg_gap_exact", to_fraction_string(summary.average_gap)},
      {"violations", summary.violations},
      {"rejections", summary.rejections},
      {"seed", summary.seed},
      {"partial", summary.partial},
  };
}

}  // namespace unitsel

#pragma once

// Simulated study: random populations of response types, experimental and
// observational data generated from them, and the benefit bounds compared
// with the population's real benefit.
//
// Uniform draws live on the rational grid k / 2^bits so the pipeline stays
// exact; no containment check needs a tolerance.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unitsel/benefit.hpp"
#include "unitsel/model.hpp"

namespace unitsel {

// Per-population random stream. mt19937_64 and seed_seq are fully specified
// by the standard, so a (seed, population) pair reproduces bit-identically.
class PopulationStream {
 public:
  PopulationStream(std::uint64_t seed, std::uint64_t population, int grid_bits = 32);

  // Uniform on {0, 1/2^bits, ..., (2^bits - 1)/2^bits}.
  Rational uniform();
  // lo + (hi - lo) * uniform(); requires lo <= hi.
  Rational uniform(const Rational& lo, const Rational& hi);

 private:
  std::mt19937_64 engine_;
  int grid_bits_;
  Rational scale_;
};

class PopulationFractions {
 public:
  // Throws InvalidData unless every fraction is >= 0 and they sum to 1.
  PopulationFractions(int m, int n, std::vector<Rational> fractions);

  int treatments() const { return m_; }
  int outcomes() const { return n_; }
  // Indexed by ordinal().
  const std::vector<Rational>& fractions() const { return fractions_; }

 private:
  int m_;
  int n_;
  std::vector<Rational> fractions_;
};

// Sorted cuts in [0,1] (n^m - 1 of them) plus 1.0; consecutive differences.
PopulationFractions fractions_from_cuts(int m, int n, std::vector<Rational> cuts);
PopulationFractions generate_fractions(PopulationStream& rng, int m = 2, int n = 3);

// P(y_i | do(x_j)) = total fraction of response types with outcome i at j.
ExperimentalDistribution derive_experimental(const PopulationFractions& fractions);

// Sequential conditional-uniform draws for the m = 2, n = 3 study, followed
// by the general-relation check. nullopt means "reject, draw a new
// population". The x_1 marginal's upper limit uses P(y_1 | do(x_2)) in its
// second term as the generator has always done.
std::optional<ObservationalDistribution> sample_observational(const PopulationFractions& fractions,
                                                              const ExperimentalDistribution& experimental,
                                                              PopulationStream& rng);

// sum_r alpha_r * f(r). Throws ArityMismatch.
Rational real_benefit(const PopulationFractions& fractions, std::span<const Rational> benefit_vector);

struct SimRecord {
  std::size_t id = 0;
  Rational lower;
  Rational upper;
  Rational real;
  std::size_t attempts = 1;  // draws needed before acceptance

  Rational midpoint() const { return (lower + upper) / 2; }
  Rational gap() const { return upper - lower; }
  bool contains_real() const { return lower <= real && real <= upper; }
};

struct SimConfig {
  std::vector<Rational> benefit_vector;
  int m = 2;
  int n = 3;
  std::size_t count = 1000;
  std::uint64_t seed = 20230207;
  std::size_t rejection_cap = 100000;
  int grid_bits = 32;
  EngineConfig engine{};
};

struct SimSummary {
  std::vector<Rational> benefit_vector;
  std::size_t count = 0;
  Rational average_gap;
  std::size_t violations = 0;
  std::size_t rejections = 0;
  std::uint64_t seed = 0;
  bool partial = false;  // some bound came from a budget-limited search
};

struct SimStudy {
  std::vector<SimRecord> records;  // ordered by id
  SimSummary summary;
};

// Populations are drawn independently from (seed, id) streams.
// Throws RejectionCapExceeded when one population needs more than
// rejection_cap draws.
SimStudy run_study(const SimConfig& config);

// Header "id,lower,upper,midpoint,real,gap"; ids are 1-based. max_rows = 0
// writes every record.
std::string records_csv(std::span<const SimRecord> records, int precision = 6, std::size_t max_rows = 0);
nlohmann::json summary_json(const SimSummary& summary, int precision = 6);

}  // namespace unitsel

#pragma once

// JSON dataset files:
//
//   { "m": 2, "n": 3,
//     "experimental":  {"counts": [[52, 512, 36], [329, 58, 213]]},
//     "observational": {"probs":  [["14/1200", "0.7775", ...], ...]},
//     "benefit_vector": [0, 1, 1, -1, 0, 1, -1, -1, 0] }
//
// Either "counts" or "probs" per table. Rational entries may be JSON
// integers or strings in "p/q" / decimal form. The benefit vector is in
// term_index order and optional for commands that do not need it.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unitsel/model.hpp"

namespace unitsel {

struct Dataset {
  int m = 0;
  int n = 0;
  // Kept unchecked so that validation can report sum violations instead of
  // failing at load time.
  ProbabilityTable experimental;
  ProbabilityTable observational;
  std::optional<std::vector<Rational>> benefit_vector;

  // Throws InvalidData when a table breaks its own probability invariants.
  ExperimentalDistribution experimental_distribution() const;
  ObservationalDistribution observational_distribution() const;
  // Throws InvalidData when the dataset has no benefit vector.
  BenefitFunction benefit_function(const SizeGuard& guard = {}) const;
};

// Throws ParseError (malformed structure), ZeroTotal, ArityMismatch.
Dataset parse_dataset(const nlohmann::json& document);
Dataset parse_dataset_text(const std::string& text);
Dataset load_dataset(const std::filesystem::path& path);

// Probabilities are written as exact "p/q" strings.
nlohmann::json to_json(const Dataset& dataset);

// JSON integer, JSON float (via its shortest textual form), or string.
Rational rational_from_json(const nlohmann::json& value);

}  // namespace unitsel

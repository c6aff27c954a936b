#include "unitsel/dataset.hpp"

#include <fstream>
#include <sstream>

#include "unitsel/errors.hpp"

namespace unitsel {

using nlohmann::json;

Rational rational_from_json(const json& value) {
  if (value.is_number_integer()) {
    return value.is_number_unsigned() ? Rational(BigInt(value.get<std::uint64_t>()))
                                      : Rational(BigInt(value.get<std::int64_t>()));
  }
  if (value.is_number_float()) return parse_rational(value.dump());
  if (value.is_string()) return parse_rational(value.get<std::string>());
  throw ParseError("expected a rational number, got " + value.dump());
}

namespace {

const json& require(const json& object, const char* key, const std::string& where) {
  if (!object.is_object() || !object.contains(key)) {
    throw ParseError(where + ": missing \"" + key + "\"");
  }
  return object.at(key);
}

int require_arity(const json& document, const char* key) {
  const json& v = require(document, key, "dataset");
  if (!v.is_number_integer() || v.get<std::int64_t>() < 2 || v.get<std::int64_t>() > 64) {
    throw ParseError(std::string("dataset: \"") + key + "\" must be an integer in [2, 64]");
  }
  return v.get<int>();
}

void check_grid(const json& grid, int m, int n, const std::string& where) {
  if (!grid.is_array() || static_cast<int>(grid.size()) != m) {
    throw ParseError(where + ": expected " + std::to_string(m) + " rows");
  }
  for (const auto& row : grid) {
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ParseError(where + ": every row must have " + std::to_string(n) + " entries");
    }
  }
}

ProbabilityTable read_table(const json& spec, int m, int n, bool experimental, const std::string& where) {
  if (!spec.is_object()) throw ParseError(where + ": expected an object with \"counts\" or \"probs\"");
  const bool has_counts = spec.contains("counts");
  const bool has_probs = spec.contains("probs");
  if (has_counts == has_probs) {
    throw ParseError(where + ": exactly one of \"counts\" or \"probs\" is required");
  }
  if (has_counts) {
    const json& grid = spec.at("counts");
    check_grid(grid, m, n, where + ".counts");
    CountTable counts;
    for (const auto& row : grid) {
      auto& out = counts.emplace_back();
      for (const auto& c : row) {
        if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<std::int64_t>() >= 0)) {
          throw ParseError(where + ".counts: entries must be nonnegative integers, got " + c.dump());
        }
        out.push_back(c.get<std::uint64_t>());
      }
    }
    return experimental ? experimental_from_counts(counts) : observational_from_counts(counts);
  }
  const json& grid = spec.at("probs");
  check_grid(grid, m, n, where + ".probs");
  ProbabilityTable table(m, n);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      try {
        table.at(j, i) = rational_from_json(grid[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
      } catch (const ParseError& e) {
        throw ParseError(where + ".probs[" + std::to_string(j) + "][" + std::to_string(i) + "]: " + e.what());
      }
    }
  }
  return table;
}

json table_to_json(const ProbabilityTable& table) {
  json rows = json::array();
  for (int j = 0; j < table.treatments(); ++j) {
    json row = json::array();
    for (int i = 0; i < table.outcomes(); ++i) row.push_back(to_fraction_string(table.at(j, i)));
    rows.push_back(std::move(row));
  }
  return {{"probs", std::move(rows)}};
}

}  // namespace

ExperimentalDistribution Dataset::experimental_distribution() const {
  return ExperimentalDistribution(experimental);
}

ObservationalDistribution Dataset::observational_distribution() const {
  return ObservationalDistribution(observational);
}

BenefitFunction Dataset::benefit_function(const SizeGuard& guard) const {
  if (!benefit_vector) throw InvalidData("dataset has no \"benefit_vector\"");
  return BenefitFunction::from_vector(m, n, *benefit_vector, guard);
}

Dataset parse_dataset(const json& document) {
  if (!document.is_object()) throw ParseError("dataset: top level must be a JSON object");
  Dataset d;
  d.m = require_arity(document, "m");
  d.n = require_arity(document, "n");
  d.experimental = read_table(require(document, "experimental", "dataset"), d.m, d.n, true, "experimental");
  d.observational = read_table(require(document, "observational", "dataset"), d.m, d.n, false, "observational");
  if (document.contains("benefit_vector")) {
    const json& vec = document.at("benefit_vector");
    if (!vec.is_array()) throw ParseError("benefit_vector: expected an array");
    std::vector<Rational> values;
    for (std::size_t k = 0; k < vec.size(); ++k) {
      try {
        values.push_back(rational_from_json(vec[k]));
      } catch (const ParseError& e) {
        throw ParseError("benefit_vector[" + std::to_string(k) + "]: " + e.what());
      }
    }
    d.benefit_vector = std::move(values);
  }
  return d;
}

Dataset parse_dataset_text(const std::string& text) {
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "at line L, column C" in the message.
    throw ParseError(e.what());
  }
  return parse_dataset(document);
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_dataset_text(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json to_json(const Dataset& dataset) {
  json document = {
      {"m", dataset.m},
      {"n", dataset.n},
      {"experimental", table_to_json(dataset.experimental)},
      {"observational", table_to_json(dataset.observational)},
  };
  if (dataset.benefit_vector) {
    json vec = json::array();
    for (const auto& v : *dataset.benefit_vector) vec.push_back(to_fraction_string(v));
    document["benefit_vector"] = std::move(vec);
  }
  return document;
}

}  // namespace unitsel

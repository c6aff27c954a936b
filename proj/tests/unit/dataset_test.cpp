#include <gtest/gtest.h>

#include "support/vaccine.hpp"
#include "unitsel/dataset.hpp"
#include "unitsel/errors.hpp"

namespace unitsel {
namespace {

using testing::r;

const std::string data_dir = UNITSEL_TEST_DATA;

TEST(Dataset, LoadsCountsFile) {
  const Dataset d = load_dataset(data_dir + "/vaccine_task1.json");
  EXPECT_EQ(d.m, 2);
  EXPECT_EQ(d.n, 3);
  EXPECT_EQ(d.experimental.at(1, 2), r(213, 600));
  EXPECT_EQ(d.observational.at(1, 0), r(121, 1200));
  ASSERT_TRUE(d.benefit_vector);
  EXPECT_EQ(*d.benefit_vector, testing::task1_vector());
}

TEST(Dataset, ProbabilitiesAsStringsAndDecimals) {
  const Dataset d = parse_dataset_text(R"({
    "m": 2, "n": 2,
    "experimental": {"probs": [["0.6", "2/5"], [0.3, "0.7"]]},
    "observational": {"probs": [[0.25, "3/20"], ["1/5", 0.4]]}
  })");
  EXPECT_EQ(d.experimental.at(0, 0), r(3, 5));
  EXPECT_EQ(d.experimental.at(1, 0), r(3, 10));
  EXPECT_EQ(d.observational.at(0, 0), r(1, 4));
  EXPECT_FALSE(d.benefit_vector);
  EXPECT_THROW(d.benefit_function(), InvalidData);
  EXPECT_NO_THROW(d.experimental_distribution());
}

TEST(Dataset, KeepsBrokenTablesForValidation) {
  const Dataset d = load_dataset(data_dir + "/bad_total.json");
  EXPECT_FALSE(validate(d.experimental, d.observational).ok());
  EXPECT_THROW(d.observational_distribution(), InvalidData);
}

TEST(Dataset, StructuralErrors) {
  EXPECT_THROW(load_dataset(data_dir + "/malformed.json"), ParseError);
  EXPECT_THROW(load_dataset(data_dir + "/does_not_exist.json"), ParseError);
  EXPECT_THROW(parse_dataset_text(R"({"m": 2, "n": 2, "experimental": {"counts": [[1,1],[1,1]]}})"), ParseError);
  EXPECT_THROW(parse_dataset_text(R"({"m": 2, "n": 2,
      "experimental": {"counts": [[1,1],[1,1]], "probs": [[1,0],[0,1]]},
      "observational": {"counts": [[1,1],[1,1]]}})"),
               ParseError);
  EXPECT_THROW(parse_dataset_text(R"({"m": 2, "n": 2,
      "experimental": {"counts": [[1,1,1],[1,1,1]]},
      "observational": {"counts": [[1,1],[1,1]]}})"),
               ParseError);
  EXPECT_THROW(parse_dataset_text(R"({"m": 2, "n": 2,
      "experimental": {"counts": [[0,0],[1,1]]},
      "observational": {"counts": [[1,1],[1,1]]}})"),
               ZeroTotal);
  EXPECT_THROW(parse_dataset_text(R"({"m": 2, "n": 2,
      "experimental": {"probs": [["x",0],[0,1]]},
      "observational": {"counts": [[1,1],[1,1]]}})"),
               ParseError);
}

TEST(Dataset, JsonRoundTrip) {
  const Dataset d = load_dataset(data_dir + "/vaccine_task2.json");
  const Dataset again = parse_dataset(to_json(d));
  EXPECT_EQ(again.experimental, d.experimental);
  EXPECT_EQ(again.observational, d.observational);
  EXPECT_EQ(again.benefit_vector, d.benefit_vector);
}

TEST(Dataset, RationalFromJson) {
  EXPECT_EQ(rational_from_json(nlohmann::json(3)), 3);
  EXPECT_EQ(rational_from_json(nlohmann::json(0.1)), r(1, 10));
  EXPECT_EQ(rational_from_json(nlohmann::json("-7/14")), r(-1, 2));
  EXPECT_THROW(rational_from_json(nlohmann::json::array()), ParseError);
}

}  // namespace
}  // namespace unitsel

#include <gtest/gtest.h>

#include "unitsel/errors.hpp"
#include "unitsel/sim.hpp"

namespace unitsel {
namespace {

Rational q(long p, long d = 1) { return Rational(p) / d; }

TEST(PopulationStream, GridAndDeterminism) {
  PopulationStream a(42, 7);
  PopulationStream b(42, 7);
  PopulationStream c(42, 8);
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const Rational u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    if (u != c.uniform()) differs = true;
    EXPECT_GE(u, 0);
    EXPECT_LT(u, 1);
    EXPECT_EQ(denominator(u * (BigInt(1) << 32)), 1);
  }
  EXPECT_TRUE(differs);
  PopulationStream coarse(1, 1, 1);
  for (int k = 0; k < 20; ++k) {
    const Rational u = coarse.uniform(q(1), q(3));
    EXPECT_TRUE(u == 1 || u == 2);
  }
  EXPECT_THROW(PopulationStream(1, 1, 0), InvalidData);
}

TEST(Fractions, FromCuts) {
  const auto f = fractions_from_cuts(2, 3, std::vector<Rational>(8, q(1)));
  std::vector<Rational> expected(9);
  expected[0] = 1;
  EXPECT_EQ(f.fractions(), expected);

  const auto g = fractions_from_cuts(2, 2, {q(3, 4), q(1, 4), q(1, 2)});
  EXPECT_EQ(g.fractions(), (std::vector<Rational>{q(1, 4), q(1, 4), q(1, 4), q(1, 4)}));
  EXPECT_THROW(PopulationFractions(2, 2, {q(1), q(1), q(-1), q(0)}), InvalidData);
  EXPECT_THROW(PopulationFractions(2, 2, {q(1, 2), q(1, 2), q(0), q(1, 2)}), InvalidData);
  EXPECT_THROW(PopulationFractions(2, 2, {q(1)}), ArityMismatch);
}

TEST(Fractions, GeneratedSumToOne) {
  for (std::uint64_t id = 0; id < 50; ++id) {
    PopulationStream rng(9, id);
    const auto f = generate_fractions(rng);
    Rational sum = 0;
    for (const auto& x : f.fractions()) {
      EXPECT_GE(x, 0);
      sum += x;
    }
    EXPECT_EQ(sum, 1);
  }
}

TEST(DeriveExperimental, PointMassAndUniform) {
  std::vector<Rational> point(9);
  point[0] = 1;
  const auto e = derive_experimental(PopulationFractions(2, 3, point));
  EXPECT_EQ(e.table().cells(), (std::vector<Rational>{1, 0, 0, 1, 0, 0}));

  const auto u = derive_experimental(PopulationFractions(2, 3, std::vector<Rational>(9, q(1, 9))));
  for (const auto& cell : u.table().cells()) EXPECT_EQ(cell, q(1, 3));

  // Row x1 sums the first coordinate, row x2 the second.
  std::vector<Rational> f{q(1, 10), q(2, 10), q(0), q(0), q(3, 10), q(0), q(0), q(0), q(4, 10)};
  const auto d = derive_experimental(PopulationFractions(2, 3, f));
  EXPECT_EQ(d.effect(0, 0), q(3, 10));
  EXPECT_EQ(d.effect(0, 1), q(3, 10));
  EXPECT_EQ(d.effect(1, 1), q(5, 10));
  EXPECT_EQ(d.effect(1, 2), q(4, 10));
}

TEST(SampleObservational, AcceptedSamplesValidate) {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  for (std::uint64_t id = 0; id < 200; ++id) {
    PopulationStream rng(3, id);
    const auto f = generate_fractions(rng);
    const auto e = derive_experimental(f);
    const auto o = sample_observational(f, e, rng);
    if (!o) {
      ++rejected;
      continue;
    }
    ++accepted;
    EXPECT_TRUE(validate(e, *o).ok());
  }
  EXPECT_GT(accepted, 0u);
  EXPECT_GT(rejected, 0u);
}

TEST(SampleObservational, SqueezedRangeRejects) {
  // With P(y1|do(x1)) = 1 the x1 range is empty whenever P(x1,y1) > 1/2.
  std::vector<Rational> f(9);
  f[0] = q(1, 2);
  f[1] = q(1, 2);
  const PopulationFractions fractions(2, 3, f);
  const auto e = derive_experimental(fractions);
  std::size_t rejected = 0;
  for (std::uint64_t id = 0; id < 20; ++id) {
    PopulationStream rng(5, id);
    if (!sample_observational(fractions, e, rng)) ++rejected;
  }
  EXPECT_GT(rejected, 0u);
}

TEST(SampleObservational, ArityGuard) {
  PopulationStream rng(1, 1);
  const PopulationFractions f(2, 2, {q(1, 4), q(1, 4), q(1, 4), q(1, 4)});
  EXPECT_THROW(sample_observational(f, derive_experimental(f), rng), ArityMismatch);
}

TEST(RealBenefit, Examples) {
  const PopulationFractions uniform(2, 3, std::vector<Rational>(9, q(1, 9)));
  EXPECT_EQ(real_benefit(uniform, std::vector<Rational>(9)), 0);
  EXPECT_EQ(real_benefit(uniform, std::vector<Rational>(9, q(1))), 1);
  EXPECT_EQ(real_benefit(uniform, std::vector<Rational>{0, 1, 1, -1, 0, 1, -1, -1, 0}), 0);
  EXPECT_THROW(real_benefit(uniform, std::vector<Rational>(4)), ArityMismatch);
}

SimConfig small_config(std::size_t count) {
  SimConfig config;
  config.benefit_vector = {0, 1, 1, -1, 0, 1, -1, -1, 0};
  config.count = count;
  config.seed = 99;
  return config;
}

TEST(RunStudy, RecordsAndSummary) {
  const auto study = run_study(small_config(25));
  ASSERT_EQ(study.records.size(), 25u);
  Rational total = 0;
  std::size_t outside = 0;
  for (std::size_t k = 0; k < study.records.size(); ++k) {
    const auto& rec = study.records[k];
    EXPECT_EQ(rec.id, k);
    EXPECT_GE(rec.gap(), 0);
    EXPECT_LE(rec.gap(), 6);
    EXPECT_EQ(rec.midpoint(), (rec.lower + rec.upper) / 2);
    total += rec.gap();
    if (!rec.contains_real()) ++outside;
  }
  EXPECT_EQ(study.summary.average_gap, total / 25);
  EXPECT_EQ(study.summary.violations, outside);
  EXPECT_EQ(study.summary.count, 25u);
  EXPECT_FALSE(study.summary.partial);
}

TEST(RunStudy, Reproducible) {
  const auto a = run_study(small_config(10));
  const auto b = run_study(small_config(10));
  EXPECT_EQ(records_csv(a.records), records_csv(b.records));
  EXPECT_EQ(summary_json(a.summary).dump(), summary_json(b.summary).dump());
  auto other = small_config(10);
  other.seed = 100;
  EXPECT_NE(records_csv(run_study(other).records), records_csv(a.records));
}

TEST(RunStudy, PopulationStreamsAreIndependentOfCount) {
  const auto a = run_study(small_config(3));
  const auto b = run_study(small_config(6));
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a.records[k].lower, b.records[k].lower);
    EXPECT_EQ(a.records[k].real, b.records[k].real);
  }
}

TEST(RunStudy, RejectionCap) {
  auto config = small_config(50);
  config.rejection_cap = 1;
  EXPECT_THROW(run_study(config), RejectionCapExceeded);
  config.count = 0;
  EXPECT_THROW(run_study(config), InvalidData);
}

TEST(Output, CsvAndJson) {
  SimRecord rec;
  rec.id = 0;
  rec.lower = q(-1, 4);
  rec.upper = q(1, 2);
  rec.real = q(1, 3);
  const std::vector<SimRecord> records{rec, rec};
  EXPECT_EQ(records_csv(records, 3, 1), "id,lower,upper,midpoint,real,gap\n1,-0.250,0.500,0.125,0.333,0.750\n");
  SimSummary s;
  s.benefit_vector = {q(1, 2), q(-1)};
  s.count = 2;
  s.average_gap = q(3, 4);
  s.seed = 5;
  const auto j = summary_json(s, 3);
  EXPECT_EQ(j.at("avg_gap"), "0.750");
  EXPECT_EQ(j.at("avg_gap_exact"), "3/4");
  EXPECT_EQ(j.at("vector"), (nlohmann::json{"1/2", "-1"}));
  EXPECT_EQ(j.at("violations"), 0);
  EXPECT_EQ(j.at("seed"), 5);
}

}  // namespace
}  // namespace unitsel

#include <gtest/gtest.h>

#include <numeric>

#include "cogmod/error.hpp"
#include "cogmod/comparison.hpp"
#include "cogmod/random.hpp"

using namespace cogmod;

namespace {

using Named = std::vector<std::pair<std::string, std::vector<FitResult>>>;

std::vector<FitResult> fits_with_bic(const std::string& model, const std::vector<double>& bics) {
  std::vector<FitResult> out;
  for (std::size_t i = 0; i < bics.size(); ++i) {
    FitResult f;
    f.model_id = model;
    f.participant_id = "p" + std::to_string(i);
    f.bic = bics[i];
    f.aic = bics[i];
    f.converged = true;
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST(Comparison, IdenticalScoresAreSymmetric) {
  const std::vector<double> bics{100, 120, 90, 110};
  const auto r = compare(Named{{"a", fits_with_bic("a", bics)}, {"b", fits_with_bic("b", bics)}}, {Metric::BIC, 100'000, 1});
  EXPECT_DOUBLE_EQ(r.test.t_stat, 0.0);
  EXPECT_DOUBLE_EQ(r.exceedance[0], 0.5);
  EXPECT_DOUBLE_EQ(r.exceedance[1], 0.5);
}

TEST(Comparison, UniformAdvantageDominates) {
  std::vector<double> a(50), b(50);
  for (int i = 0; i < 50; ++i) {
    a[static_cast<std::size_t>(i)] = 100.0 + i;
    b[static_cast<std::size_t>(i)] = 110.0 + i;
  }
  const auto r = compare(Named{{"a", fits_with_bic("a", a)}, {"b", fits_with_bic("b", b)}}, {Metric::BIC, 200'000, 1});
  EXPECT_GE(r.exceedance[0], 0.99);
  EXPECT_EQ(r.test.better, "a");
  EXPECT_LT(r.test.p_value, 1e-6);
}

TEST(Comparison, DominatedModelsGetLittleExceedance) {
  Matrix evidence;
  for (int i = 0; i < 30; ++i) evidence.push_back({-50.0, -70.0, -72.0});
  const auto r = exceedance_probability(evidence, 3, 200'000, 2);
  EXPECT_LT(r.exceedance[1], 0.05);
  EXPECT_LT(r.exceedance[2], 0.05);
}

TEST(Exceedance, LargeEvidenceGapConcentrates) {
  Matrix evidence;
  for (int i = 0; i < 10; ++i) evidence.push_back({0.0, -1000.0});
  const auto r = exceedance_probability(evidence, 2, 100'000, 3);
  EXPECT_GT(r.exceedance[0], 0.99);
}

TEST(Exceedance, NoParticipantsGivesPriorDraw) {
  const auto r = exceedance_probability({}, 4, 400'000, 4);
  for (double e : r.exceedance) EXPECT_NEAR(e, 0.25, 0.01);
}

TEST(Exceedance, SumsToOneAndIsPermutationEquivariant) {
  Rng rng(8);
  Matrix evidence;
  for (int i = 0; i < 25; ++i) evidence.push_back({-rng.uniform(40, 60), -rng.uniform(40, 60), -rng.uniform(40, 60)});
  const auto base = exceedance_probability(evidence, 3, 100'000, 5);
  EXPECT_NEAR(std::accumulate(base.exceedance.begin(), base.exceedance.end(), 0.0), 1.0, 1e-3);
  Matrix swapped;
  for (const auto& row : evidence) swapped.push_back({row[1], row[2], row[0]});
  const auto other = exceedance_probability(swapped, 3, 100'000, 5);
  EXPECT_EQ(other.exceedance[0], base.exceedance[1]);
  EXPECT_EQ(other.exceedance[1], base.exceedance[2]);
  EXPECT_EQ(other.exceedance[2], base.exceedance[0]);
}

TEST(Comparison, MismatchedParticipantsAreRejected) {
  auto a = fits_with_bic("a", {1, 2, 3});
  auto b = fits_with_bic("b", {1, 2});
  EXPECT_THROW(compare(Named{{"a", a}, {"b", b}}), Error);
}

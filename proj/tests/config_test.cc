#include "lcgln/config.h"

#include <gtest/gtest.h>

#include <string>

#include "lcgln/errors.h"

namespace lcgln {
namespace {

std::string ValidationMessage(const ExperimentConfig& config) {
  try {
    config.Validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ConfigTest, DefaultsValidate) {
  EXPECT_NO_THROW(ExperimentConfig{}.Validate());
}

TEST(ConfigTest, SamplesOutsideGrid) {
  ExperimentConfig config;
  config.samples = {2, 3};
  EXPECT_EQ(ValidationMessage(config), "samples: 3 is not one of {2,4,8,16,32}");
  config.samples = {};
  EXPECT_EQ(ValidationMessage(config), "samples: list must not be empty");
}

TEST(ConfigTest, FakesOnlyForBudget) {
  ExperimentConfig config;
  config.fakes = {5};
  EXPECT_EQ(ValidationMessage(config),
            "fakes: fake targets only apply to the budget problem");
  config.problem = ProblemKind::kBudget;
  config.fakes = {0, 5, 50, 500};
  EXPECT_EQ(ValidationMessage(config), "");
  config.fakes = {7};
  EXPECT_EQ(ValidationMessage(config), "fakes: 7 is not one of {0,5,50,500}");
}

TEST(ConfigTest, PortfolioDflOnlyForPortfolio) {
  ExperimentConfig config;
  config.methods = {Method::kDflPortfolio};
  EXPECT_EQ(ValidationMessage(config),
            "methods: dfl_portfolio only applies to the portfolio problem");
  config.problem = ProblemKind::kPortfolio;
  EXPECT_EQ(ValidationMessage(config), "");
}

TEST(ConfigTest, NestedErrorsArePrefixed) {
  ExperimentConfig config;
  config.seeds = 0;
  EXPECT_EQ(ValidationMessage(config).rfind("seeds:", 0), 0u);
  config = {};
  config.sampler_lr = -1.0;
  EXPECT_EQ(ValidationMessage(config).rfind("sampler.lr:", 0), 0u);
}

TEST(ConfigTest, UnknownKeyAndBadValue) {
  ExperimentConfig config;
  try {
    ApplySetting(config, "nonsense", "1");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "nonsense: unknown key");
  }
  try {
    ApplySetting(config, "seeds", "many");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("seeds: invalid value 'many'", 0), 0u);
  }
  EXPECT_THROW(ParseConfig("seeds 3\n"), ConfigError);
}

TEST(ConfigTest, ParseAppliesSettings) {
  const ExperimentConfig config = ParseConfig(
      "# comment\n"
      "problem = budget\n"
      "methods = pfl, lcgln_gaussian\n"
      "samples = 4,16\n"
      "fakes = 0,500   # trailing comment\n"
      "seeds = 2\n"
      "sampler.lr = 0.5\n");
  EXPECT_EQ(config.problem, ProblemKind::kBudget);
  EXPECT_EQ(config.methods, (std::vector<Method>{Method::kPfl, Method::kLcglnGaussian}));
  EXPECT_EQ(config.samples, (std::vector<int>{4, 16}));
  EXPECT_EQ(config.fakes, (std::vector<int>{0, 500}));
  EXPECT_EQ(config.seeds, 2);
  EXPECT_EQ(config.Resolved().sampler.learning_rate, 0.5);
}

TEST(ConfigTest, EffectiveConfigRoundTrips) {
  ExperimentConfig config;
  config.problem = ProblemKind::kPortfolio;
  config.methods = {Method::kDflPortfolio, Method::kLcgln};
  config.lcgln.gaussian_sigma = 0.123456789;
  config.predictor_hidden = std::vector<int>{7, 3};
  const std::string text = EffectiveConfig(config);
  EXPECT_EQ(EffectiveConfig(ParseConfig(text)), text);
}

TEST(ConfigTest, ResolvedDefaults) {
  ExperimentConfig config;
  EXPECT_EQ(config.Resolved().predictor.hidden, (std::vector<int>{10}));
  EXPECT_EQ(config.Resolved().sampler.learning_rate,
            DefaultSamplerRate(ProblemKind::kInventory));
  config.problem = ProblemKind::kPortfolio;
  EXPECT_EQ(config.Resolved().predictor.hidden, (std::vector<int>{500}));
  EXPECT_EQ(config.Resolved().sampler.hidden, config.Resolved().predictor.hidden);
}

TEST(ConfigTest, HashIsStableHex) {
  const std::string h = Fnv1aHex("abc");
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h.find_first_not_of("0123456789abcdef"), std::string::npos);
  EXPECT_EQ(h, Fnv1aHex("abc"));
  EXPECT_NE(h, Fnv1aHex("abd"));
  // Reference value of 64-bit FNV-1a for the empty string.
  EXPECT_EQ(Fnv1aHex(""), "cbf29ce484222325");
}

}  // namespace
}  // namespace lcgln

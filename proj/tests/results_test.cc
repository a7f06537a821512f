#include "lcgln/results.h"

#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "lcgln/errors.h"

namespace lcgln {
namespace {

RunResult Row(std::string method, int samples, int seed, double regret) {
  RunResult r;
  r.config_hash = "00000000deadbeef";
  r.problem = "inventory";
  r.method = std::move(method);
  r.samples = samples;
  r.seed = seed;
  r.normalized_regret = regret;
  r.raw_regret = regret * 10.0;
  r.prediction_loss = 1.0 / 3.0;
  return r;
}

TEST(SummarizeTest, MeanAndSem) {
  const std::vector<double> v = {1.0, 2.0, 3.0};
  const MeanSem s = Summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_NEAR(s.sem, 0.5773502691896258, 1e-15);

  const std::vector<double> constant = {0.4, 0.4, 0.4, 0.4};
  EXPECT_EQ(Summarize(constant).sem, 0.0);
  const std::vector<double> single = {0.7};
  EXPECT_EQ(Summarize(single).mean, 0.7);
  EXPECT_EQ(Summarize(single).sem, 0.0);
  EXPECT_THROW(Summarize(std::vector<double>{}), ContractError);
}

TEST(ResultRowTest, RoundTripIsExact) {
  RunResult r = Row("lcgln", 8, 3, 0.123456789012345678);
  const RunResult back = ParseResultRow(FormatResultRow(r));
  EXPECT_EQ(back.config_hash, r.config_hash);
  EXPECT_EQ(back.method, r.method);
  EXPECT_EQ(back.samples, 8);
  EXPECT_EQ(back.seed, 3);
  EXPECT_TRUE(back.ok);
  EXPECT_EQ(back.normalized_regret, r.normalized_regret);
  EXPECT_EQ(back.prediction_loss, r.prediction_loss);
  EXPECT_EQ(FormatResultRow(back), FormatResultRow(r));
}

TEST(ResultRowTest, ErrorTextIsSanitized) {
  RunResult r = Row("pfl", 2, 0, 0.0);
  r.ok = false;
  r.error = "bad, very\nbad";
  const RunResult back = ParseResultRow(FormatResultRow(r));
  EXPECT_FALSE(back.ok);
  EXPECT_EQ(back.error, "bad; very;bad");
}

TEST(ResultRowTest, MalformedRowsThrow) {
  EXPECT_THROW(ParseResultRow("a,b,c"), IngestionError);
  std::string row = FormatResultRow(Row("pfl", 2, 0, 0.5));
  row.replace(row.find(",ok,"), 4, ",maybe,");
  EXPECT_THROW(ParseResultRow(row), IngestionError);
}

TEST(ReadResultsTest, TruncatedLastLineIsSkipped) {
  const std::string full = FormatResultRow(Row("pfl", 2, 0, 0.5));
  const std::string partial = FormatResultRow(Row("pfl", 2, 1, 0.25)).substr(0, 30);
  std::istringstream in(ResultsHeader() + "\n" + full + "\n" + partial);
  const auto rows = ReadResults(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].seed, 0);

  std::istringstream middle(ResultsHeader() + "\n" + partial + "\n" + full + "\n");
  EXPECT_THROW(ReadResults(middle), IngestionError);
  std::istringstream header("wrong\n");
  EXPECT_THROW(ReadResults(header), IngestionError);
}

TEST(SummarizeResultsTest, GroupsAndSorts) {
  std::vector<RunResult> rows = {
      Row("pfl", 2, 0, 0.2),   Row("lcgln", 32, 0, 0.1), Row("pfl", 2, 1, 0.4),
      Row("lcgln", 2, 0, 0.3), Row("lcgln", 32, 1, 0.3),
  };
  RunResult failed = Row("lcgln", 32, 2, 99.0);
  failed.ok = false;
  rows.push_back(failed);
  const auto s = SummarizeResults(rows);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].method, "lcgln");
  EXPECT_EQ(s[0].samples, 2);
  EXPECT_EQ(s[1].samples, 32);
  EXPECT_EQ(s[1].count, 2);
  EXPECT_DOUBLE_EQ(s[1].mean, 0.2);
  EXPECT_NEAR(s[1].sem, 0.1, 1e-15);
  EXPECT_EQ(s[2].method, "pfl");
  EXPECT_DOUBLE_EQ(s[2].mean, 0.3);
}

}  // namespace
}  // namespace lcgln

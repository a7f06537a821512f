#include "lcgln/results.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <tuple>

#include "lcgln/errors.h"

namespace lcgln {

namespace {

constexpr int kResultFields = 11;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

int ToInt(const std::string& s, const char* what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IngestionError(std::string("results row: bad ") + what + " '" + s + "'");
  }
  return v;
}

double ToDouble(const std::string& s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IngestionError(std::string("results row: bad ") + what + " '" + s + "'");
  }
  return v;
}

std::string Sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

}  // namespace

std::string ResultsHeader() {
  return "config_hash,problem,method,samples,fakes,seed,status,"
         "normalized_regret,raw_regret,prediction_loss,error";
}

std::string FormatResultRow(const RunResult& r) {
  return r.config_hash + ',' + r.problem + ',' + r.method + ',' +
         std::to_string(r.samples) + ',' + std::to_string(r.fakes) + ',' +
         std::to_string(r.seed) + ',' + (r.ok ? "ok" : "error") + ',' +
         Num(r.normalized_regret) + ',' + Num(r.raw_regret) + ',' +
         Num(r.prediction_loss) + ',' + Sanitize(r.error);
}

RunResult ParseResultRow(const std::string& line) {
  const auto f = SplitCsv(line);
  if (static_cast<int>(f.size()) != kResultFields) {
    throw IngestionError("results row: expected " + std::to_string(kResultFields) +
                         " fields, got " + std::to_string(f.size()));
  }
  RunResult r;
  r.config_hash = f[0];
  r.problem = f[1];
  r.method = f[2];
  r.samples = ToInt(f[3], "samples");
  r.fakes = ToInt(f[4], "fakes");
  r.seed = ToInt(f[5], "seed");
  if (f[6] != "ok" && f[6] != "error") {
    throw IngestionError("results row: bad status '" + f[6] + "'");
  }
  r.ok = f[6] == "ok";
  r.normalized_regret = ToDouble(f[7], "normalized_regret");
  r.raw_regret = ToDouble(f[8], "raw_regret");
  r.prediction_loss = ToDouble(f[9], "prediction_loss");
  r.error = f[10];
  return r;
}

std::vector<RunResult> ReadResults(std::istream& in) {
  std::vector<RunResult> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  if (line != ResultsHeader()) throw IngestionError("results file: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const bool last = in.eof();  // no trailing newline: possibly cut short
    try {
      out.push_back(ParseResultRow(line));
    } catch (const IngestionError&) {
      if (!last) throw;
    }
  }
  return out;
}

std::vector<RunResult> ReadResultsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open results file " + path);
  return ReadResults(in);
}

std::string TimingsHeader() {
  return "config_hash,seed,wall_seconds,sample_seconds,fit_seconds,train_seconds";
}

std::string FormatTimingsRow(const RunResult& r) {
  return r.config_hash + ',' + std::to_string(r.seed) + ',' +
         Num(r.timings.wall_seconds) + ',' + Num(r.timings.sample_seconds) + ',' +
         Num(r.timings.fit_seconds) + ',' + Num(r.timings.train_seconds);
}

MeanSem Summarize(std::span<const double> values) {
  if (values.empty()) throw ContractError("cannot summarize an empty set");
  const double n = static_cast<double>(values.size());
  MeanSem out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

std::vector<Summary> SummarizeResults(std::span<const RunResult> results) {
  using Key = std::tuple<std::string, std::string, int, int>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : results) {
    if (!r.ok) continue;
    groups[{r.problem, r.method, r.samples, r.fakes}].push_back(r.normalized_regret);
  }
  std::vector<Summary> out;
  for (const auto& [key, values] : groups) {
    const MeanSem s = Summarize(values);
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                   std::get<3>(key), static_cast<int>(values.size()), s.mean, s.sem});
  }
  return out;
}

}  // namespace lcgln

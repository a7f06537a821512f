#include "lcgln/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "lcgln/errors.h"

namespace lcgln {

namespace {

std::string Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> SplitList(std::string_view s) {
  std::vector<std::string> items;
  size_t start = 0;
  while (start <= s.size()) {
    const size_t comma = s.find(',', start);
    const size_t stop = comma == std::string_view::npos ? s.size() : comma;
    std::string item = Trim(s.substr(start, stop - start));
    if (!item.empty()) items.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

[[noreturn]] void Bad(std::string_view key, std::string_view value,
                      std::string_view expected) {
  throw ConfigError(std::string(key) + ": invalid value '" + std::string(value) +
                    "' (expected " + std::string(expected) + ")");
}

std::int64_t ParseInt(std::string_view key, std::string_view value) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) Bad(key, value, "integer");
  return out;
}

int ParseIntField(std::string_view key, std::string_view value) {
  const std::int64_t v = ParseInt(key, value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    Bad(key, value, "integer in range");
  }
  return static_cast<int>(v);
}

std::uint64_t ParseUint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    Bad(key, value, "unsigned integer");
  }
  return out;
}

double ParseDouble(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    Bad(key, value, "finite number");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true") return true;
  if (value == "false") return false;
  Bad(key, value, "true or false");
}

std::vector<int> ParseIntList(std::string_view key, std::string_view value) {
  std::vector<int> out;
  for (const auto& item : SplitList(value)) out.push_back(ParseIntField(key, item));
  if (out.empty()) Bad(key, value, "non-empty comma-separated integers");
  return out;
}

Activation ParseActivation(std::string_view key, std::string_view value) {
  for (Activation a : {Activation::kLinear, Activation::kRelu, Activation::kSoftplus}) {
    if (ActivationName(a) == value) return a;
  }
  Bad(key, value, "linear, relu or softplus");
}

OptimizerKind ParseOptimizer(std::string_view key, std::string_view value) {
  if (value == "sgd") return OptimizerKind::kSgd;
  if (value == "adam") return OptimizerKind::kAdam;
  Bad(key, value, "sgd or adam");
}

std::string_view BatchName(BatchMode mode) {
  return mode == BatchMode::kFull ? "full" : "per-instance";
}

BatchMode ParseBatch(std::string_view key, std::string_view value) {
  if (value == "full") return BatchMode::kFull;
  if (value == "per-instance") return BatchMode::kPerInstance;
  Bad(key, value, "full or per-instance");
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string JoinInts(const std::vector<int>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

struct Field {
  std::function<void(ExperimentConfig&, std::string_view key, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
  bool grid = false;  // grid axis or scheduling knob, excluded from the run hash
};

using Registry = std::map<std::string, Field, std::less<>>;

Registry BuildRegistry() {
  Registry r;
  auto add = [&r](std::string key, Field f) { r.emplace(std::move(key), std::move(f)); };
  auto int_field = [&](std::string key, auto getter) {
    add(key, {[getter](ExperimentConfig& c, std::string_view k, std::string_view v) {
                getter(c) = ParseIntField(k, v);
              },
              [getter](const ExperimentConfig& c) {
                return std::to_string(getter(const_cast<ExperimentConfig&>(c)));
              }});
  };
  auto double_field = [&](std::string key, auto getter) {
    add(key, {[getter](ExperimentConfig& c, std::string_view k, std::string_view v) {
                getter(c) = ParseDouble(k, v);
              },
              [getter](const ExperimentConfig& c) {
                return Num(getter(const_cast<ExperimentConfig&>(c)));
              }});
  };
  auto train_fields = [&](const std::string& prefix, auto getter) {
    double_field(prefix + ".lr", [getter](ExperimentConfig& c) -> double& {
      return getter(c).learning_rate;
    });
    int_field(prefix + ".epochs",
              [getter](ExperimentConfig& c) -> int& { return getter(c).epochs; });
    add(prefix + ".optimizer",
        {[getter](ExperimentConfig& c, std::string_view k, std::string_view v) {
           getter(c).optimizer = ParseOptimizer(k, v);
         },
         [getter](const ExperimentConfig& c) {
           return std::string(
               OptimizerName(getter(const_cast<ExperimentConfig&>(c)).optimizer));
         }});
    add(prefix + ".batch",
        {[getter](ExperimentConfig& c, std::string_view k, std::string_view v) {
           getter(c).batch = ParseBatch(k, v);
         },
         [getter](const ExperimentConfig& c) {
           return std::string(BatchName(getter(const_cast<ExperimentConfig&>(c)).batch));
         }});
    double_field(prefix + ".beta1",
                 [getter](ExperimentConfig& c) -> double& { return getter(c).beta1; });
    double_field(prefix + ".beta2",
                 [getter](ExperimentConfig& c) -> double& { return getter(c).beta2; });
    double_field(prefix + ".epsilon",
                 [getter](ExperimentConfig& c) -> double& { return getter(c).epsilon; });
  };

  add("problem", {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
                    const auto p = ParseProblem(v);
                    if (!p) Bad(k, v, "inventory, budget or portfolio");
                    c.problem = *p;
                  },
                  [](const ExperimentConfig& c) { return std::string(ProblemName(c.problem)); }});
  add("methods",
      {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
         std::vector<Method> methods;
         for (const auto& item : SplitList(v)) {
           const auto m = ParseMethod(item);
           if (!m) Bad(k, item, "pfl, dfl_portfolio, lcgln or lcgln_gaussian");
           methods.push_back(*m);
         }
         if (methods.empty()) Bad(k, v, "at least one method");
         c.methods = std::move(methods);
       },
       [](const ExperimentConfig& c) {
         std::string out;
         for (size_t i = 0; i < c.methods.size(); ++i) {
           if (i > 0) out += ',';
           out += MethodName(c.methods[i]);
         }
         return out;
       },
       true});
  add("samples", {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
                    c.samples = ParseIntList(k, v);
                  },
                  [](const ExperimentConfig& c) { return JoinInts(c.samples); }, true});
  add("fakes", {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
                  c.fakes = ParseIntList(k, v);
                },
                [](const ExperimentConfig& c) { return JoinInts(c.fakes); }, true});
  add("seeds", {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
                  c.seeds = ParseIntField(k, v);
                },
                [](const ExperimentConfig& c) { return std::to_string(c.seeds); }, true});
  add("workers", {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
                    c.workers = ParseIntField(k, v);
                  },
                  [](const ExperimentConfig& c) { return std::to_string(c.workers); },
                  true});
  add("out", {[](ExperimentConfig& c, std::string_view, std::string_view v) {
                c.out_dir = std::string(v);
              },
              [](const ExperimentConfig& c) { return c.out_dir; }, true});
  add("base_seed", {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
                      c.base_seed = ParseUint(k, v);
                    },
                    [](const ExperimentConfig& c) { return std::to_string(c.base_seed); }});
  add("reseed", {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
                   if (v == "data+model") {
                     c.reseed = ReseedMode::kDataAndModel;
                   } else if (v == "model-only") {
                     c.reseed = ReseedMode::kModelOnly;
                   } else {
                     Bad(k, v, "data+model or model-only");
                   }
                 },
                 [](const ExperimentConfig& c) { return std::string(ReseedName(c.reseed)); }});

  int_field("inventory.feature_dim",
            [](ExperimentConfig& c) -> int& { return c.inventory.feature_dim; });
  double_field("inventory.theta_scale",
               [](ExperimentConfig& c) -> double& { return c.inventory.theta_scale; });
  int_field("inventory.train",
            [](ExperimentConfig& c) -> int& { return c.inventory.sizes.train; });
  int_field("inventory.validation",
            [](ExperimentConfig& c) -> int& { return c.inventory.sizes.validation; });
  int_field("inventory.test",
            [](ExperimentConfig& c) -> int& { return c.inventory.sizes.test; });

  int_field("budget.users", [](ExperimentConfig& c) -> int& { return c.budget.users; });
  int_field("budget.websites",
            [](ExperimentConfig& c) -> int& { return c.budget.websites; });
  int_field("budget.budget", [](ExperimentConfig& c) -> int& { return c.budget.budget; });
  int_field("budget.train", [](ExperimentConfig& c) -> int& { return c.budget.sizes.train; });
  int_field("budget.validation",
            [](ExperimentConfig& c) -> int& { return c.budget.sizes.validation; });
  int_field("budget.test", [](ExperimentConfig& c) -> int& { return c.budget.sizes.test; });

  int_field("portfolio.assets",
            [](ExperimentConfig& c) -> int& { return c.portfolio.assets; });
  double_field("portfolio.risk_aversion",
               [](ExperimentConfig& c) -> double& { return c.portfolio.risk_aversion; });
  int_field("portfolio.lookback",
            [](ExperimentConfig& c) -> int& { return c.portfolio.lookback; });
  int_field("portfolio.periods",
            [](ExperimentConfig& c) -> int& { return c.portfolio.periods; });
  int_field("portfolio.factors",
            [](ExperimentConfig& c) -> int& { return c.portfolio.factor.factors; });
  double_field("portfolio.factor_persistence", [](ExperimentConfig& c) -> double& {
    return c.portfolio.factor.factor_persistence;
  });
  double_field("portfolio.idio_persistence", [](ExperimentConfig& c) -> double& {
    return c.portfolio.factor.idio_persistence;
  });
  double_field("portfolio.factor_vol",
               [](ExperimentConfig& c) -> double& { return c.portfolio.factor.factor_vol; });
  double_field("portfolio.idio_vol",
               [](ExperimentConfig& c) -> double& { return c.portfolio.factor.idio_vol; });
  double_field("portfolio.train_fraction",
               [](ExperimentConfig& c) -> double& { return c.portfolio.train_fraction; });
  double_field("portfolio.validation_fraction", [](ExperimentConfig& c) -> double& {
    return c.portfolio.validation_fraction;
  });
  add("portfolio.returns_csv",
      {[](ExperimentConfig& c, std::string_view, std::string_view v) {
         c.portfolio.returns_path = std::string(v);
         c.portfolio.source = v.empty() ? ReturnsSource::kSynthetic : ReturnsSource::kFile;
       },
       [](const ExperimentConfig& c) { return c.portfolio.returns_path; }});

  add("predictor.hidden",
      {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
         if (v == "default") {
           c.predictor_hidden.reset();
         } else {
           c.predictor_hidden = ParseIntList(k, v);
         }
       },
       [](const ExperimentConfig& c) {
         return c.predictor_hidden ? JoinInts(*c.predictor_hidden) : std::string("default");
       }});
  add("predictor.activation",
      {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.lcgln.predictor.hidden_activation = ParseActivation(k, v);
         c.lcgln.sampler.hidden_activation = c.lcgln.predictor.hidden_activation;
       },
       [](const ExperimentConfig& c) {
         return std::string(ActivationName(c.lcgln.predictor.hidden_activation));
       }});
  int_field("predictor.patience",
            [](ExperimentConfig& c) -> int& { return c.lcgln.predictor.patience; });
  train_fields("predictor",
               [](ExperimentConfig& c) -> TrainConfig& { return c.lcgln.predictor.train; });

  add("surrogate.hidden", {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
                             c.lcgln.surrogate.hidden = ParseIntList(k, v);
                           },
                           [](const ExperimentConfig& c) {
                             return JoinInts(c.lcgln.surrogate.hidden);
                           }});
  int_field("surrogate.context_width",
            [](ExperimentConfig& c) -> int& { return c.lcgln.surrogate.context_width; });
  add("surrogate.normalize_regret",
      {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.lcgln.surrogate.normalize_regret = ParseBool(k, v);
       },
       [](const ExperimentConfig& c) {
         return std::string(c.lcgln.surrogate.normalize_regret ? "true" : "false");
       }});
  train_fields("surrogate",
               [](ExperimentConfig& c) -> TrainConfig& { return c.lcgln.surrogate.train; });

  add("sampler.lr", {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
                       if (v == "default") {
                         c.sampler_lr.reset();
                       } else {
                         c.sampler_lr = ParseDouble(k, v);
                       }
                     },
                     [](const ExperimentConfig& c) {
                       return c.sampler_lr ? Num(*c.sampler_lr) : std::string("default");
                     }});
  add("sampler.optimizer",
      {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.lcgln.sampler.optimizer = ParseOptimizer(k, v);
       },
       [](const ExperimentConfig& c) {
         return std::string(OptimizerName(c.lcgln.sampler.optimizer));
       }});
  double_field("gaussian.sigma",
               [](ExperimentConfig& c) -> double& { return c.lcgln.gaussian_sigma; });
  return r;
}

const Registry& Fields() {
  static const Registry registry = BuildRegistry();
  return registry;
}

void RequireSubset(std::string_view key, const std::vector<int>& values,
                   std::span<const int> allowed) {
  if (values.empty()) throw ConfigError(std::string(key) + ": list must not be empty");
  for (int v : values) {
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string msg = std::string(key) + ": " + std::to_string(v) + " is not one of {";
      for (size_t i = 0; i < allowed.size(); ++i) {
        msg += (i > 0 ? "," : "") + std::to_string(allowed[i]);
      }
      throw ConfigError(msg + "}");
    }
  }
}

template <typename F>
void Prefixed(std::string_view key, F&& check) {
  try {
    check();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

}  // namespace

std::string_view ProblemName(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kInventory:
      return "inventory";
    case ProblemKind::kBudget:
      return "budget";
    case ProblemKind::kPortfolio:
      return "portfolio";
  }
  return "unknown";
}

std::optional<ProblemKind> ParseProblem(std::string_view name) {
  for (ProblemKind p : AllProblems()) {
    if (ProblemName(p) == name) return p;
  }
  return std::nullopt;
}

std::vector<ProblemKind> AllProblems() {
  return {ProblemKind::kInventory, ProblemKind::kBudget, ProblemKind::kPortfolio};
}

std::string_view ReseedName(ReseedMode mode) {
  return mode == ReseedMode::kDataAndModel ? "data+model" : "model-only";
}

void ExperimentConfig::Validate() const {
  RequireSubset("samples", samples, kAllowedSamples);
  RequireSubset("fakes", fakes, kAllowedFakes);
  if (problem != ProblemKind::kBudget && (fakes.size() != 1 || fakes[0] != 0)) {
    throw ConfigError("fakes: fake targets only apply to the budget problem");
  }
  if (methods.empty()) throw ConfigError("methods: list must not be empty");
  for (Method m : methods) {
    if (m == Method::kDflPortfolio && problem != ProblemKind::kPortfolio) {
      throw ConfigError("methods: dfl_portfolio only applies to the portfolio problem");
    }
  }
  if (seeds < 1) throw ConfigError("seeds: must be >= 1");
  if (workers < 0) throw ConfigError("workers: must be >= 0");
  Prefixed("inventory", [&] { inventory.Validate(); });
  Prefixed("budget", [&] { budget.Validate(); });
  Prefixed("portfolio", [&] { portfolio.Validate(); });
  auto check_widths = [](std::string_view key, const std::vector<int>& widths) {
    for (int w : widths) {
      if (w < 1) throw ConfigError(std::string(key) + ": widths must be >= 1");
    }
  };
  if (predictor_hidden) check_widths("predictor.hidden", *predictor_hidden);
  check_widths("surrogate.hidden", lcgln.surrogate.hidden);
  if (lcgln.surrogate.context_width < 1) {
    throw ConfigError("surrogate.context_width: must be >= 1");
  }
  if (lcgln.predictor.patience < 0) throw ConfigError("predictor.patience: must be >= 0");
  Prefixed("predictor", [&] { lcgln.predictor.train.Validate(); });
  Prefixed("surrogate", [&] { lcgln.surrogate.train.Validate(); });
  if (sampler_lr && !(*sampler_lr > 0.0)) throw ConfigError("sampler.lr: must be > 0");
  if (!(lcgln.gaussian_sigma > 0.0)) throw ConfigError("gaussian.sigma: must be > 0");
}

LcglnConfig ExperimentConfig::Resolved() const {
  LcglnConfig out = lcgln;
  if (predictor_hidden) {
    out.predictor.hidden = *predictor_hidden;
  } else {
    out.predictor.hidden = problem == ProblemKind::kPortfolio ? std::vector<int>{500}
                                                              : std::vector<int>{10};
  }
  out.sampler.learning_rate = sampler_lr.value_or(DefaultSamplerRate(problem));
  out.sampler.hidden = out.predictor.hidden;
  out.sampler.hidden_activation = out.predictor.hidden_activation;
  return out;
}

double DefaultSamplerRate(ProblemKind problem) {
  switch (problem) {
    case ProblemKind::kInventory:
      return 0.05;
    case ProblemKind::kBudget:
      return 0.01;
    case ProblemKind::kPortfolio:
      return 0.001;
  }
  return 0.05;
}

void ApplySetting(ExperimentConfig& config, std::string_view key,
                  std::string_view value) {
  const auto& fields = Fields();
  const auto it = fields.find(key);
  if (it == fields.end()) throw ConfigError(std::string(key) + ": unknown key");
  it->second.set(config, key, value);
}

ExperimentConfig ParseConfig(std::string_view text) {
  ExperimentConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    }
    ApplySetting(config, Trim(std::string_view(trimmed).substr(0, eq)),
                 Trim(std::string_view(trimmed).substr(eq + 1)));
  }
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

std::string EffectiveConfig(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, field] : Fields()) {
    out += key + " = " + field.get(config) + "\n";
  }
  return out;
}

std::string SharedSettings(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, field] : Fields()) {
    if (field.grid) continue;
    out += key + "=" + field.get(config) + "\n";
  }
  return out;
}

std::string Fnv1aHex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lcgln

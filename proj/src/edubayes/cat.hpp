#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "edubayes/irt.hpp"
#include "edubayes/rng.hpp"

namespace edubayes {

struct CatConfig {
  double stop_sd = 0.35;
  int max_items = 30;
  enum class Selector { Adaptive, Random } selector = Selector::Adaptive;
  // Empty predicate admits every item.
  std::function<bool(const RaschItem&)> constraint;

  void validate() const;
};

// Eligible pool index minimizing expected posterior variance; exact ties go
// to the lowest item id. Errors when nothing is eligible.
int select_next(const ThetaGrid& grid, const std::vector<RaschItem>& pool,
                const CatConfig& config, const std::vector<char>& administered);

struct CatStep {
  std::string item;
  double beta = 0.0;
  int response = 0;
  double post_mean = 0.0;
  double post_sd = 0.0;
};

struct CatSession {
  ThetaGrid grid;  // final posterior
  std::vector<CatStep> steps;
};

using Responder = std::function<int(const RaschItem&)>;

// Select, administer, update until posterior SD <= stop_sd or max_items.
// `rng` drives random selection only; adaptive sessions may pass null.
CatSession run_cat(const Responder& responder, const std::vector<RaschItem>& pool,
                   const ThetaGrid& prior, const CatConfig& config, Rng* rng = nullptr);

struct CatSimConfig {
  int sessions = 500;
  // True proficiencies: normal(mean, sd), or every session at `fixed` when
  // fixed_theta is set.
  double theta_mean = 0.0;
  double theta_sd = 1.0;
  bool fixed_theta = false;
  double theta_fixed = 0.0;
  CatConfig cat;
  std::uint64_t seed = 0;
};

struct CatSimSession {
  double theta_true = 0.0;
  std::vector<CatStep> steps;
  double final_mean = 0.0;
  double final_sd = 0.0;
};

struct CatSimResult {
  std::vector<CatSimSession> sessions;
};

// Simulates Rasch responders against the pool. Each session's true theta and
// full response table depend only on (seed, session index), so two calls with
// different selectors face identical responders.
CatSimResult simulate_cat(const std::vector<RaschItem>& pool, const ThetaGrid& prior,
                          const CatSimConfig& config);

struct CatRunStats {
  double mean_items = 0.0;
  double mean_abs_error = 0.0;
  double coverage_3sd = 0.0;  // |final mean - true theta| within 3 posterior SDs
  double stop_rate = 0.0;     // sessions that reached the stop SD
};
CatRunStats cat_stats(const CatSimResult& result, const CatConfig& config);

}  // namespace edubayes

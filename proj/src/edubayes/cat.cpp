#include "edubayes/cat.hpp"

#include <cmath>

#include "edubayes/errors.hpp"

namespace edubayes {

void CatConfig::validate() const {
  require(stop_sd > 0.0, "stop threshold must be positive");
  require(max_items >= 1, "must allow at least one item");
}

int select_next(const ThetaGrid& grid, const std::vector<RaschItem>& pool,
                const CatConfig& config, const std::vector<char>& administered) {
  require(administered.size() == pool.size(), "administered flags must match the pool");
  int best = -1;
  double best_epv = 0.0;
  for (int j = 0; j < static_cast<int>(pool.size()); ++j) {
    if (administered[static_cast<std::size_t>(j)]) continue;
    const auto& item = pool[static_cast<std::size_t>(j)];
    if (config.constraint && !config.constraint(item)) continue;
    const double epv = expected_posterior_variance(grid, item);
    if (best < 0 || epv < best_epv ||
        (epv == best_epv && item.id < pool[static_cast<std::size_t>(best)].id)) {
      best = j;
      best_epv = epv;
    }
  }
  require(best >= 0, "no eligible items remain");
  return best;
}

CatSession run_cat(const Responder& responder, const std::vector<RaschItem>& pool,
                   const ThetaGrid& prior, const CatConfig& config, Rng* rng) {
  require(!pool.empty(), "empty item pool");
  require(static_cast<bool>(responder), "no responder supplied");
  config.validate();
  prior.validate();
  if (config.selector == CatConfig::Selector::Random)
    require(rng != nullptr, "random selection needs a random source");

  CatSession session;
  session.grid = prior;
  std::vector<char> administered(pool.size(), 0);

  while (static_cast<int>(session.steps.size()) < config.max_items) {
    std::vector<double> eligible(pool.size(), 0.0);
    bool any = false;
    for (std::size_t q = 0; q < pool.size(); ++q) {
      if (administered[q]) continue;
      if (config.constraint && !config.constraint(pool[q])) continue;
      eligible[q] = 1.0;
      any = true;
    }
    if (!any) break;  // pool exhausted; the session ends short of the target
    int j = -1;
    if (config.selector == CatConfig::Selector::Adaptive) {
      j = select_next(session.grid, pool, config, administered);
    } else {
      j = static_cast<int>(rng->categorical(eligible));
    }
    const auto& item = pool[static_cast<std::size_t>(j)];
    const int x = responder(item);
    require(x == 0 || x == 1, "responder returned a value other than 0 or 1");
    administered[static_cast<std::size_t>(j)] = 1;
    session.grid = update_theta(session.grid, item, x);
    const auto m = posterior_moments(session.grid);
    session.steps.push_back({item.id, item.beta, x, m.mean, std::sqrt(m.variance)});
    if (std::sqrt(m.variance) <= config.stop_sd) break;
  }
  return session;
}

CatSimResult simulate_cat(const std::vector<RaschItem>& pool, const ThetaGrid& prior,
                          const CatSimConfig& config) {
  require(config.sessions >= 1, "need at least one session");
  require(!config.fixed_theta || std::isfinite(config.theta_fixed),
          "fixed proficiency must be finite");
  require(config.theta_sd >= 0.0, "proficiency spread must be nonnegative");
  config.cat.validate();

  CatSimResult result;
  result.sessions.reserve(static_cast<std::size_t>(config.sessions));
  for (int k = 0; k < config.sessions; ++k) {
    Rng responder_rng(config.seed, static_cast<std::uint64_t>(k));
    CatSimSession sim;
    sim.theta_true = config.fixed_theta
                         ? config.theta_fixed
                         : responder_rng.normal(config.theta_mean, config.theta_sd);
    // The full response table is drawn up front so that selector choice
    // cannot change what any examinee would have answered.
    std::vector<int> table(pool.size());
    for (std::size_t j = 0; j < pool.size(); ++j)
      table[j] = responder_rng.bernoulli(rasch_prob(sim.theta_true, pool[j].beta)) ? 1 : 0;

    const Responder responder = [&](const RaschItem& item) {
      for (std::size_t j = 0; j < pool.size(); ++j)
        if (pool[j].id == item.id) return table[j];
      throw_invalid("responder asked about an item outside the pool");
    };

    Rng selector_rng(config.seed, (1ull << 32) + static_cast<std::uint64_t>(k));
    auto session = run_cat(responder, pool, prior, config.cat, &selector_rng);
    sim.steps = std::move(session.steps);
    const auto m = posterior_moments(session.grid);
    sim.final_mean = m.mean;
    sim.final_sd = std::sqrt(m.variance);
    result.sessions.push_back(std::move(sim));
  }
  return result;
}

}  // namespace edubayes

namespace edubayes {

CatRunStats cat_stats(const CatSimResult& result, const CatConfig& config) {
  CatRunStats stats;
  if (result.sessions.empty()) return stats;
  for (const auto& s : result.sessions) {
    stats.mean_items += static_cast<double>(s.steps.size());
    stats.mean_abs_error += std::abs(s.final_mean - s.theta_true);
    if (std::abs(s.final_mean - s.theta_true) <= 3.0 * s.final_sd) stats.coverage_3sd += 1.0;
    if (s.final_sd <= config.stop_sd) stats.stop_rate += 1.0;
  }
  const double n = static_cast<double>(result.sessions.size());
  stats.mean_items /= n;
  stats.mean_abs_error /= n;
  stats.coverage_3sd /= n;
  stats.stop_rate /= n;
  return stats;
}

}  // namespace edubayes

#include "edubayes/rasch_calibrate.hpp"

#include <cmath>

#include "edubayes/errors.hpp"
#include "edubayes/rng.hpp"
#include "edubayes/stats.hpp"

namespace edubayes {

void RaschCalibConfig::validate() const {
  require(burn_in >= 0, "burn-in must be nonnegative");
  require(retained >= 2, "must retain at least two draws");
  require(thin >= 1, "thinning interval must be at least 1");
  require(proposal_sd > 0.0, "proposal spread must be positive");
  grid.validate();
}

RaschCalibResult calibrate_rasch_online(const ResponseMatrix& data,
                                        const std::vector<RaschItem>& old_items,
                                        const std::vector<BetaPrior>& new_priors,
                                        const RaschCalibConfig& config) {
  config.validate();
  const std::size_t n = data.num_examinees();
  const std::size_t num_cols = data.num_tasks();
  require(n >= 1, "no examinees");

  std::vector<int> old_col(num_cols, -1);
  for (std::size_t m = 0; m < old_items.size(); ++m) {
    require(std::isfinite(old_items[m].beta),
            "old item '" + old_items[m].id + "' must have a finite difficulty");
    bool found = false;
    for (std::size_t c = 0; c < num_cols; ++c) {
      if (data.tasks()[c] == old_items[m].id) {
        require(old_col[c] < 0, "old item '" + old_items[m].id + "' listed twice");
        old_col[c] = static_cast<int>(m);
        found = true;
        break;
      }
    }
    require(found, "old item '" + old_items[m].id + "' has no response column");
  }

  std::vector<std::size_t> new_cols;
  for (std::size_t c = 0; c < num_cols; ++c)
    if (old_col[c] < 0) new_cols.push_back(c);
  require(!new_cols.empty(), "every column is already calibrated");

  std::vector<BetaPrior> priors = new_priors;
  if (priors.empty()) priors.assign(new_cols.size(), BetaPrior{0.0, 4.0});
  require(priors.size() == new_cols.size(), "one prior per new item required");
  for (const auto& p : priors)
    require(std::isfinite(p.mean) && p.variance > 0.0, "new-item priors must be proper");

  const std::size_t num_points = config.grid.points.size();

  // Old-item likelihood never changes; fold it into per-examinee grid weights.
  std::vector<double> base(n * num_points);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t g = 0; g < num_points; ++g)
      base[i * num_points + g] = config.grid.weights[g];
    bool any_old = false;
    for (std::size_t c = 0; c < num_cols; ++c) {
      if (old_col[c] < 0) continue;
      const auto x = data.cell(i, c);
      if (x == ResponseMatrix::kMissing) continue;
      any_old = true;
      const double beta = old_items[static_cast<std::size_t>(old_col[c])].beta;
      for (std::size_t g = 0; g < num_points; ++g) {
        const double p = rasch_prob(config.grid.points[g], beta);
        base[i * num_points + g] *= x == 1 ? p : 1.0 - p;
      }
    }
    require(old_items.empty() || any_old,
            "examinee '" + data.examinees()[i] + "' answered no calibrated item");
  }

  const std::size_t num_new = new_cols.size();
  Rng rng(config.seed, 0);
  std::vector<double> beta(num_new);
  for (std::size_t m = 0; m < num_new; ++m) beta[m] = priors[m].mean;

  std::vector<std::vector<double>> draws(num_new);
  for (auto& d : draws) d.reserve(static_cast<std::size_t>(config.retained));
  std::vector<double> accepted(num_new, 0.0);

  // Per-sweep scratch.
  std::vector<double> like1(num_new * num_points);  // P(correct | point, beta_m)
  std::vector<double> w(num_points);
  std::vector<std::size_t> theta_idx(n);
  std::vector<double> cnt1(num_points), cnt0(num_points);

  const int total_iters = config.burn_in + config.retained * config.thin;
  for (int iter = 0; iter < total_iters; ++iter) {
    for (std::size_t m = 0; m < num_new; ++m)
      for (std::size_t g = 0; g < num_points; ++g)
        like1[m * num_points + g] = rasch_prob(config.grid.points[g], beta[m]);

    // Exact proficiency draw per examinee on the grid.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t g = 0; g < num_points; ++g) w[g] = base[i * num_points + g];
      for (std::size_t m = 0; m < num_new; ++m) {
        const auto x = data.cell(i, new_cols[m]);
        if (x == ResponseMatrix::kMissing) continue;
        const double* lk = &like1[m * num_points];
        if (x == 1)
          for (std::size_t g = 0; g < num_points; ++g) w[g] *= lk[g];
        else
          for (std::size_t g = 0; g < num_points; ++g) w[g] *= 1.0 - lk[g];
      }
      theta_idx[i] = rng.categorical(w);
    }

    // Random-walk Metropolis per new item, given the imputed proficiencies.
    for (std::size_t m = 0; m < num_new; ++m) {
      std::fill(cnt1.begin(), cnt1.end(), 0.0);
      std::fill(cnt0.begin(), cnt0.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto x = data.cell(i, new_cols[m]);
        if (x == ResponseMatrix::kMissing) continue;
        (x == 1 ? cnt1 : cnt0)[theta_idx[i]] += 1.0;
      }
      const double proposal = beta[m] + rng.normal(0.0, config.proposal_sd);
      const auto log_target = [&](double b) {
        double ll = 0.0;
        for (std::size_t g = 0; g < num_points; ++g) {
          if (cnt1[g] == 0.0 && cnt0[g] == 0.0) continue;
          const double p = rasch_prob(config.grid.points[g], b);
          if (cnt1[g] > 0.0) ll += cnt1[g] * std::log(p);
          if (cnt0[g] > 0.0) ll += cnt0[g] * std::log(1.0 - p);
        }
        const double d = b - priors[m].mean;
        return ll - 0.5 * d * d / priors[m].variance;
      };
      const double log_ratio = log_target(proposal) - log_target(beta[m]);
      if (std::isnan(log_ratio))
        throw_numeric("non-finite likelihood for item '" + data.tasks()[new_cols[m]] + "'");
      if (std::log(rng.uniform_open()) < log_ratio) {
        beta[m] = proposal;
        accepted[m] += 1.0;
      }
    }

    if (iter >= config.burn_in && (iter - config.burn_in) % config.thin == 0)
      for (std::size_t m = 0; m < num_new; ++m) draws[m].push_back(beta[m]);
  }

  RaschCalibResult result;
  result.items.reserve(num_new);
  for (std::size_t m = 0; m < num_new; ++m) {
    BetaSummary s;
    s.id = data.tasks()[new_cols[m]];
    s.mean = mean(draws[m]);
    s.sd = sample_sd(draws[m]);
    s.acceptance = accepted[m] / static_cast<double>(total_iters);
    s.acceptance_warning = s.acceptance <= 0.05 || s.acceptance >= 0.95;
    result.items.push_back(std::move(s));
  }
  return result;
}

}  // namespace edubayes

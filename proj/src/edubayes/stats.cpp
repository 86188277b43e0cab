#include "edubayes/stats.hpp"

#include <algorithm>
#include <cmath>

#include "edubayes/errors.hpp"

namespace edubayes {

double mean(std::span<const double> xs) {
  require(!xs.empty(), "mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  require(xs.size() >= 2, "sample sd needs at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double quantile(std::vector<double> xs, double p) {
  require(!xs.empty(), "quantile of empty sample");
  require(p >= 0.0 && p <= 1.0, "quantile level outside [0,1]");
  std::sort(xs.begin(), xs.end());
  const double pos = p * static_cast<double>(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= xs.size()) return xs.back();
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - frac) + xs[lo + 1] * frac;
}

BetaPair moment_match_beta(double m, double s) {
  require(m > 0.0 && m < 1.0, "moment match needs mean in (0,1)");
  const double var = s * s;
  if (!(var > 0.0) || var >= m * (1.0 - m))
    throw_numeric("moment match infeasible: need 0 < sd^2 < m(1-m)");
  const double nu = m * (1.0 - m) / var - 1.0;
  return {m * nu, (1.0 - m) * nu};
}

std::vector<double> moment_match_dirichlet(std::span<const double> means,
                                           std::span<const double> sds) {
  require(means.size() == sds.size() && means.size() >= 2,
          "dirichlet moment match needs matching means/sds, >= 2 components");
  double sum_means = 0.0;
  for (double m : means) sum_means += m;
  require(std::abs(sum_means - 1.0) < 1e-9, "dirichlet means must form a simplex");

  double nu_total = 0.0;
  for (std::size_t k = 0; k < means.size(); ++k) {
    const BetaPair mm = moment_match_beta(means[k], sds[k]);
    nu_total += mm.alpha + mm.beta;
  }
  const double total = nu_total / static_cast<double>(means.size()) + 1.0;
  std::vector<double> out(means.size());
  for (std::size_t k = 0; k < means.size(); ++k) out[k] = means[k] * total;
  return out;
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  require(chains.size() >= 2, "gelman_rubin needs at least two chains");
  const std::size_t n = chains.front().size();
  require(n >= 10, "gelman_rubin needs chains of length >= 10");
  for (const auto& c : chains)
    require(c.size() == n, "gelman_rubin needs equal-length chains");

  const double m = static_cast<double>(chains.size());
  const double dn = static_cast<double>(n);

  std::vector<double> chain_means(chains.size());
  double w = 0.0;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    chain_means[c] = mean(chains[c]);
    double ss = 0.0;
    for (double x : chains[c]) ss += (x - chain_means[c]) * (x - chain_means[c]);
    w += ss / (dn - 1.0);
  }
  w /= m;

  const double grand = mean(chain_means);
  double b = 0.0;
  for (double cm : chain_means) b += (cm - grand) * (cm - grand);
  b *= dn / (m - 1.0);

  if (b == 0.0) return 1.0;
  if (w <= 0.0) throw_numeric("gelman_rubin: zero within-chain variance");
  const double vhat = (dn - 1.0) / dn * w + b / dn;
  return std::sqrt(vhat / w);
}

ParameterSummary summarize(const std::string& name, std::span<const double> draws,
                           double prior_alpha, double prior_beta) {
  require(draws.size() >= 2, "summarize needs at least two retained draws");
  ParameterSummary s;
  s.name = name;
  s.mean = mean(draws);
  s.sd = sample_sd(draws);
  if (s.sd == 0.0) throw_numeric("summarize: degenerate chain (sd = 0), moment match undefined");
  const BetaPair mm = moment_match_beta(s.mean, s.sd);
  s.alpha_hat = mm.alpha;
  s.beta_hat = mm.beta;
  s.n_hat = s.alpha_hat + s.beta_hat - (prior_alpha + prior_beta);
  return s;
}

}  // namespace edubayes

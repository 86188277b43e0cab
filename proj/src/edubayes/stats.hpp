#pragma once

#include <span>
#include <string>
#include <vector>

namespace edubayes {

double mean(std::span<const double> xs);
// Sample standard deviation (n-1 denominator).
double sample_sd(std::span<const double> xs);
// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> xs, double p);

// Moment-matched Beta(alpha, beta) with the given mean and standard deviation.
// Requires 0 < m < 1 and 0 < s^2 < m(1-m).
struct BetaPair {
  double alpha = 0.0;
  double beta = 0.0;
};
BetaPair moment_match_beta(double mean, double sd);

// Dirichlet concentrations approximating the given per-component means and
// standard deviations. Each component contributes a Beta moment-match estimate
// of the total concentration; the estimates are averaged (plus one) and the
// components are the means scaled by that total. An approximation: the
// per-component marginals of the result need not reproduce the inputs exactly.
std::vector<double> moment_match_dirichlet(std::span<const double> means,
                                           std::span<const double> sds);

// Potential scale reduction factor over chains of equal length (>= 10 each,
// >= 2 chains). Returns exactly 1 when the between-chain variance is zero;
// zero within-chain variance with nonzero between-chain variance is an error.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

// Posterior summary for one scalar parameter in [0,1]: posterior mean and SD,
// the Beta(alpha_hat, beta_hat) matched to those moments, and the effective
// observation count n_hat = alpha_hat + beta_hat - (prior_alpha + prior_beta).
struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double n_hat = 0.0;
  double rhat = 0.0;  // 0 when not computed
};

ParameterSummary summarize(const std::string& name, std::span<const double> draws,
                           double prior_alpha, double prior_beta);

}  // namespace edubayes

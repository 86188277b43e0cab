#pragma once

#include <string>
#include <vector>

namespace edubayes {

struct RaschItem {
  std::string id;
  double beta = 0.0;
  std::vector<double> features;  // optional, for difficulty modeling
};

// Discrete posterior over a unidimensional proficiency.
struct ThetaGrid {
  std::vector<double> points;   // strictly increasing
  std::vector<double> weights;  // nonnegative, sum to 1

  // Standard-normal prior discretized on `n` equally spaced points.
  static ThetaGrid standard_normal(int n = 61, double lo = -4.0, double hi = 4.0);
  void validate() const;
};

// exp(theta - beta) / (1 + exp(theta - beta)), stable for |theta - beta| up
// to at least 50.
double rasch_prob(double theta, double beta);

ThetaGrid update_theta(const ThetaGrid& grid, const RaschItem& item, int x);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments posterior_moments(const ThetaGrid& grid);

// Predictive mixture of the two posterior variances the response could leave.
double expected_posterior_variance(const ThetaGrid& grid, const RaschItem& item);

// Linear difficulty model: beta_j = sum_k Y_jk eta_k + eps_j.
struct FeatureEffects {
  std::vector<double> eta;
  double sigma2 = 0.0;
};

// Least squares over items with known beta and features. Needs more items
// than features and a full-rank feature matrix.
FeatureEffects lltm_fit(const std::vector<RaschItem>& items);

struct BetaPrior {
  double mean = 0.0;
  double variance = 0.0;
};
BetaPrior lltm_predict(const std::vector<double>& features, const FeatureEffects& effects);

}  // namespace edubayes

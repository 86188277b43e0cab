#include "edubayes/irt.hpp"

#include <cmath>

#include "edubayes/errors.hpp"

namespace edubayes {

ThetaGrid ThetaGrid::standard_normal(int n, double lo, double hi) {
  require(n >= 2, "grid needs at least 2 points");
  require(lo < hi, "grid bounds out of order");
  ThetaGrid g;
  g.points.reserve(static_cast<std::size_t>(n));
  g.weights.reserve(static_cast<std::size_t>(n));
  const double step = (hi - lo) / (n - 1);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + step * i;
    const double w = std::exp(-0.5 * x * x);
    g.points.push_back(x);
    g.weights.push_back(w);
    total += w;
  }
  for (double& w : g.weights) w /= total;
  return g;
}

void ThetaGrid::validate() const {
  require(points.size() >= 2 && points.size() == weights.size(), "malformed grid");
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(std::isfinite(points[i]), "grid points must be finite");
    if (i > 0) require(points[i] > points[i - 1], "grid points must increase strictly");
    require(weights[i] >= 0.0, "grid weights must be nonnegative");
    total += weights[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, "grid weights must sum to 1");
}

double rasch_prob(double theta, double beta) {
  require(std::isfinite(theta) && std::isfinite(beta), "rasch_prob needs finite inputs");
  const double z = theta - beta;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

ThetaGrid update_theta(const ThetaGrid& grid, const RaschItem& item, int x) {
  grid.validate();
  require(x == 0 || x == 1, "response must be 0 or 1");
  require(std::isfinite(item.beta), "item difficulty must be finite");
  ThetaGrid out;
  out.points = grid.points;
  out.weights.resize(grid.weights.size());
  double total = 0.0;
  for (std::size_t g = 0; g < grid.points.size(); ++g) {
    const double p = rasch_prob(grid.points[g], item.beta);
    out.weights[g] = grid.weights[g] * (x == 1 ? p : 1.0 - p);
    total += out.weights[g];
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw_numeric("zero posterior mass updating the proficiency grid");
  for (double& w : out.weights) w /= total;
  return out;
}

Moments posterior_moments(const ThetaGrid& grid) {
  Moments m;
  for (std::size_t g = 0; g < grid.points.size(); ++g) m.mean += grid.weights[g] * grid.points[g];
  for (std::size_t g = 0; g < grid.points.size(); ++g) {
    const double d = grid.points[g] - m.mean;
    m.variance += grid.weights[g] * d * d;
  }
  return m;
}

double expected_posterior_variance(const ThetaGrid& grid, const RaschItem& item) {
  grid.validate();
  const std::size_t n = grid.points.size();
  double p1 = 0.0;
  std::vector<double> like(n);
  for (std::size_t g = 0; g < n; ++g) {
    like[g] = rasch_prob(grid.points[g], item.beta);
    p1 += grid.weights[g] * like[g];
  }

  const auto conditional_variance = [&](int x) {
    double total = 0.0, mean = 0.0;
    std::vector<double> w(n);
    for (std::size_t g = 0; g < n; ++g) {
      w[g] = grid.weights[g] * (x == 1 ? like[g] : 1.0 - like[g]);
      total += w[g];
      mean += w[g] * grid.points[g];
    }
    if (!(total > 0.0)) return 0.0;  // impossible outcome contributes no mass
    mean /= total;
    double var = 0.0;
    for (std::size_t g = 0; g < n; ++g) {
      const double d = grid.points[g] - mean;
      var += w[g] * d * d;
    }
    return var / total;
  };

  return p1 * conditional_variance(1) + (1.0 - p1) * conditional_variance(0);
}

FeatureEffects lltm_fit(const std::vector<RaschItem>& items) {
  require(!items.empty(), "no items to fit");
  const std::size_t k = items.front().features.size();
  require(k >= 1, "items carry no features");
  require(items.size() > k, "need more items than features");
  for (const auto& item : items) {
    require(item.features.size() == k, "item '" + item.id + "': inconsistent feature length");
    require(std::isfinite(item.beta), "item '" + item.id + "': difficulty must be finite");
  }

  // Normal equations (X'X) eta = X'b, solved by Gaussian elimination with
  // partial pivoting; k stays small.
  std::vector<double> xtx(k * k, 0.0), xtb(k, 0.0);
  for (const auto& item : items) {
    for (std::size_t r = 0; r < k; ++r) {
      xtb[r] += item.features[r] * item.beta;
      for (std::size_t c = 0; c < k; ++c) xtx[r * k + c] += item.features[r] * item.features[c];
    }
  }

  std::vector<double> a = xtx, b = xtb;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(a[r * k + col]) > std::abs(a[pivot * k + col])) pivot = r;
    if (std::abs(a[pivot * k + col]) < 1e-10)
      throw_numeric("feature matrix is rank deficient");
    if (pivot != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(a[col * k + c], a[pivot * k + c]);
      std::swap(b[col], b[pivot]);
    }
    const double d = a[col * k + col];
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = a[r * k + col] / d;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < k; ++c) a[r * k + c] -= f * a[col * k + c];
      b[r] -= f * b[col];
    }
  }
  FeatureEffects fx;
  fx.eta.assign(k, 0.0);
  for (std::size_t r = k; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < k; ++c) s -= a[r * k + c] * fx.eta[c];
    fx.eta[r] = s / a[r * k + r];
  }

  double rss = 0.0;
  for (const auto& item : items) {
    double fit = 0.0;
    for (std::size_t c = 0; c < k; ++c) fit += item.features[c] * fx.eta[c];
    const double e = item.beta - fit;
    rss += e * e;
  }
  fx.sigma2 = rss / static_cast<double>(items.size() - k);
  return fx;
}

BetaPrior lltm_predict(const std::vector<double>& features, const FeatureEffects& effects) {
  require(features.size() == effects.eta.size(), "feature vector length mismatch");
  BetaPrior p;
  for (std::size_t c = 0; c < features.size(); ++c) p.mean += features[c] * effects.eta[c];
  p.variance = effects.sigma2;
  return p;
}

}  // namespace edubayes

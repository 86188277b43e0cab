#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "edubayes/errors.hpp"
#include "edubayes/irt.hpp"
#include "edubayes/rasch_calibrate.hpp"
#include "edubayes/response_matrix.hpp"
#include "edubayes/rng.hpp"
#include "helpers.hpp"

using namespace edubayes;

namespace {

const std::vector<double> kTrueBetas = {-2.0, -1.2, -0.5, 0.0, 0.4, 1.0, 1.7, 2.3};

ResponseMatrix rasch_data(int n, const std::vector<double>& betas, std::uint64_t seed) {
  std::vector<std::string> ids, cols;
  for (int i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "e%04d", i + 1);
    ids.push_back(buf);
  }
  for (std::size_t j = 0; j < betas.size(); ++j) cols.push_back("q" + std::to_string(j + 1));
  ResponseMatrix m(ids, cols);
  Rng rng(seed, 0);
  for (int i = 0; i < n; ++i) {
    const double theta = rng.normal(0.0, 1.0);
    for (std::size_t j = 0; j < betas.size(); ++j)
      m.set(static_cast<std::size_t>(i), j, rng.bernoulli(rasch_prob(theta, betas[j])) ? 1 : 0);
  }
  return m;
}

}  // namespace

TEST_SUITE("rasch_online") {
  TEST_CASE("startup fit recovers the generating difficulties") {
    const auto data = rasch_data(400, kTrueBetas, 91);
    RaschCalibConfig cfg;
    cfg.burn_in = 300;
    cfg.retained = 1200;
    cfg.seed = 17;
    const auto result = calibrate_rasch_online(data, {}, {}, cfg);

    REQUIRE(result.items.size() == kTrueBetas.size());
    for (std::size_t j = 0; j < kTrueBetas.size(); ++j) {
      CHECK(result.items[j].id == "q" + std::to_string(j + 1));
      CHECK(std::abs(result.items[j].mean - kTrueBetas[j]) < 0.4);
      CHECK(result.items[j].sd > 0.0);
      CHECK(result.items[j].sd < 0.5);
      CHECK(result.items[j].acceptance > 0.2);
      CHECK(result.items[j].acceptance < 0.95);
      CHECK_FALSE(result.items[j].acceptance_warning);
    }
  }

  TEST_CASE("anchored mode calibrates only the uncovered columns") {
    const auto data = rasch_data(400, kTrueBetas, 92);
    std::vector<RaschItem> old_items;
    for (std::size_t j = 0; j < 6; ++j)
      old_items.push_back({"q" + std::to_string(j + 1), kTrueBetas[j], {}});
    RaschCalibConfig cfg;
    cfg.burn_in = 300;
    cfg.retained = 1200;
    cfg.seed = 18;
    const auto result = calibrate_rasch_online(data, old_items, {}, cfg);

    REQUIRE(result.items.size() == 2);
    CHECK(result.items[0].id == "q7");
    CHECK(result.items[1].id == "q8");
    CHECK(std::abs(result.items[0].mean - 1.7) < 0.4);
    CHECK(std::abs(result.items[1].mean - 2.3) < 0.4);
  }

  TEST_CASE("an examinee who skipped every anchored item is rejected") {
    ResponseMatrix m({"a", "b", "c"}, {"o1", "n1"});
    m.set(0, 0, 1);
    m.set(0, 1, 0);
    m.set(1, 0, ResponseMatrix::kMissing);  // no anchored answer
    m.set(1, 1, 1);
    m.set(2, 0, 0);
    m.set(2, 1, 1);
    const std::vector<RaschItem> old_items = {{"o1", 0.0, {}}};
    RaschCalibConfig cfg;
    cfg.retained = 10;
    CHECK_ERROR(calibrate_rasch_online(m, old_items, {}, cfg), ErrorCode::InvalidArgument);
  }

  TEST_CASE("a tight prior dominates weak data") {
    // Twelve examinees, one item, responses split evenly.
    std::vector<std::string> ids;
    for (int i = 0; i < 12; ++i) ids.push_back("x" + std::to_string(i));
    ResponseMatrix m(ids, {"new1"});
    for (int i = 0; i < 12; ++i) m.set(static_cast<std::size_t>(i), 0, i % 2);

    RaschCalibConfig cfg;
    cfg.burn_in = 200;
    cfg.retained = 1500;
    cfg.seed = 4;
    const auto diffuse = calibrate_rasch_online(m, {}, {}, cfg);
    const auto tight = calibrate_rasch_online(m, {}, {BetaPrior{2.0, 0.01}}, cfg);

    CHECK(tight.items[0].mean > diffuse.items[0].mean + 1.0);
    CHECK(std::abs(tight.items[0].mean - 2.0) < 0.5);
    CHECK(std::abs(diffuse.items[0].mean) < 1.0);
  }

  TEST_CASE("extreme proposal spreads trigger the acceptance warning") {
    const auto data = rasch_data(120, {-0.5, 0.5}, 93);
    RaschCalibConfig cfg;
    cfg.burn_in = 100;
    cfg.retained = 400;
    cfg.seed = 6;

    cfg.proposal_sd = 80.0;
    const auto frozen = calibrate_rasch_online(data, {}, {}, cfg);
    for (const auto& item : frozen.items) {
      CHECK(item.acceptance < 0.1);
      CHECK(item.acceptance_warning);
    }

    cfg.proposal_sd = 1e-4;
    const auto drifting = calibrate_rasch_online(data, {}, {}, cfg);
    for (const auto& item : drifting.items) {
      CHECK(item.acceptance > 0.9);
      CHECK(item.acceptance_warning);
    }
  }

  TEST_CASE("results are deterministic in the seed") {
    const auto data = rasch_data(60, {-1.0, 0.0, 1.0}, 94);
    RaschCalibConfig cfg;
    cfg.burn_in = 50;
    cfg.retained = 200;
    cfg.seed = 21;
    const auto a = calibrate_rasch_online(data, {}, {}, cfg);
    const auto b = calibrate_rasch_online(data, {}, {}, cfg);
    cfg.seed = 22;
    const auto c = calibrate_rasch_online(data, {}, {}, cfg);
    REQUIRE(a.items.size() == b.items.size());
    bool differs = false;
    for (std::size_t j = 0; j < a.items.size(); ++j) {
      CHECK(a.items[j].mean == b.items[j].mean);
      CHECK(a.items[j].sd == b.items[j].sd);
      CHECK(a.items[j].acceptance == b.items[j].acceptance);
      if (a.items[j].mean != c.items[j].mean) differs = true;
    }
    CHECK(differs);
  }

  TEST_CASE("input validation") {
    const auto data = rasch_data(10, {0.0, 1.0}, 95);
    RaschCalibConfig cfg;
    cfg.retained = 10;

    RaschCalibConfig bad = cfg;
    bad.burn_in = -1;
    CHECK_ERROR(calibrate_rasch_online(data, {}, {}, bad), ErrorCode::InvalidArgument);
    bad = cfg;
    bad.retained = 1;
    CHECK_ERROR(calibrate_rasch_online(data, {}, {}, bad), ErrorCode::InvalidArgument);
    bad = cfg;
    bad.thin = 0;
    CHECK_ERROR(calibrate_rasch_online(data, {}, {}, bad), ErrorCode::InvalidArgument);
    bad = cfg;
    bad.proposal_sd = 0.0;
    CHECK_ERROR(calibrate_rasch_online(data, {}, {}, bad), ErrorCode::InvalidArgument);

    // Old item ids must name real columns, exactly once, with finite betas.
    CHECK_ERROR(calibrate_rasch_online(data, {{"ghost", 0.0, {}}}, {}, cfg),
                ErrorCode::InvalidArgument);
    CHECK_ERROR(calibrate_rasch_online(data, {{"q1", 0.0, {}}, {"q1", 0.5, {}}}, {}, cfg),
                ErrorCode::InvalidArgument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_ERROR(calibrate_rasch_online(data, {{"q1", inf, {}}}, {}, cfg),
                ErrorCode::InvalidArgument);

    // Nothing left to calibrate.
    CHECK_ERROR(calibrate_rasch_online(data, {{"q1", 0.0, {}}, {"q2", 1.0, {}}}, {}, cfg),
                ErrorCode::InvalidArgument);

    // Priors must be one per new column and proper.
    CHECK_ERROR(calibrate_rasch_online(data, {}, {BetaPrior{0.0, 1.0}}, cfg),
                ErrorCode::InvalidArgument);
    CHECK_ERROR(
        calibrate_rasch_online(data, {}, {BetaPrior{0.0, 0.0}, BetaPrior{0.0, 1.0}}, cfg),
        ErrorCode::InvalidArgument);

    CHECK_ERROR(calibrate_rasch_online(ResponseMatrix{}, {}, {}, cfg),
                ErrorCode::InvalidArgument);
  }
}

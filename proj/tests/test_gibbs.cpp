#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "edubayes/belief.hpp"
#include "edubayes/errors.hpp"
#include "edubayes/gibbs.hpp"
#include "edubayes/synthetic.hpp"
#include "helpers.hpp"

using namespace edubayes;

namespace {

ResponseMatrix random_responses(const AssessmentModel& m, int n, Rng& rng, double miss = 0.2) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i + 1));
  std::vector<std::string> tasks;
  for (const auto& t : m.tasks) tasks.push_back(t.id);
  ResponseMatrix data(std::move(ids), std::move(tasks));
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
    for (std::size_t j = 0; j < m.tasks.size(); ++j)
      if (rng.uniform01() >= miss) data.set(i, j, rng.bernoulli(0.5) ? 1 : 0);
  return data;
}

// Parent-sum statistic of stochastic variable v in configuration c, walked
// independently of the workspace tables.
int parent_sum(const SkillGraph& g, const JointTable& configs, std::size_t c, int v) {
  int z = 0;
  for (const auto& p : g.variables()[static_cast<std::size_t>(v)].parents)
    z += configs.state(c, g.var_index(p));
  return z;
}

ResponseMatrix synthesize(const AssessmentModel& m, int n, std::uint64_t seed,
                          SyntheticTruth* truth_out = nullptr) {
  Rng rng(seed, 0);
  const auto truth = sample_truth(m, rng);
  auto [data, full_truth] = generate_synthetic(m, truth.lambda_true, truth.pi_true, n, seed + 1);
  if (truth_out) *truth_out = full_truth;
  return std::move(data);
}

}  // namespace

TEST_SUITE("gibbs") {
  TEST_CASE("workspace binds tasks and groups equivalent configurations") {
    const auto m = builtin_fraction_assessment();
    Rng rng(21, 0);
    const auto data = random_responses(m, 20, rng);
    const auto ws = GibbsWorkspace::build(m, data);

    REQUIRE(ws.tasks.size() == 15);
    for (std::size_t t = 0; t < ws.tasks.size(); ++t) {
      CHECK(ws.tasks[t].model_task == static_cast<int>(t));
      CHECK(data.tasks()[static_cast<std::size_t>(ws.tasks[t].data_col)] == m.tasks[t].id);
      CHECK(m.tasks[t].evidence_model == m.evidence_models[static_cast<std::size_t>(ws.tasks[t].em)].id);
    }

    REQUIRE(ws.delta_em.size() == 6);
    const auto configs = enumerate_configs(m.graph);
    for (std::size_t e = 0; e < 6; ++e) {
      const auto expect = delta_table(m.graph, configs, m.evidence_models[e].skills_required);
      CHECK(ws.delta_em[e] == expect);
    }

    // The 24 configurations collapse to 9 delta signatures.
    CHECK(ws.group_members.size() == 9);
    CHECK(ws.group_delta.size() == 9);
    std::set<std::uint32_t> seen;
    for (std::size_t gidx = 0; gidx < ws.group_members.size(); ++gidx) {
      for (const auto c : ws.group_members[gidx]) {
        CHECK(seen.insert(c).second);
        for (std::size_t e = 0; e < 6; ++e)
          CHECK(ws.delta_em[e][c] == ws.group_delta[gidx][e]);
      }
    }
    CHECK(seen.size() == 24);

    // Slot/state table agrees with an independent walk of the graph.
    CHECK(ws.num_stochastic == 4);
    int sv = 0;
    for (int v = 0; v < m.graph.num_vars(); ++v) {
      if (m.graph.variables()[static_cast<std::size_t>(v)].kind != VariableKind::Stochastic)
        continue;
      for (std::size_t c = 0; c < configs.num_configs; ++c) {
        const auto& entry = ws.config_slots[c * static_cast<std::size_t>(ws.num_stochastic) +
                                            static_cast<std::size_t>(sv)];
        const int z = parent_sum(m.graph, configs, c, v);
        CHECK(entry.slot == m.graph.slot_index(
                                m.graph.variables()[static_cast<std::size_t>(v)].slot, z));
        CHECK(entry.state == configs.state(c, v));
      }
      ++sv;
    }
  }

  TEST_CASE("conditional hyperparameters equal brute-force counts") {
    const auto m = builtin_fraction_assessment();
    const auto priors = PriorSet::from_model(m);
    Rng rng(22, 0);
    const int n = 40;
    const auto data = random_responses(m, n, rng);
    const auto ws = GibbsWorkspace::build(m, data);
    const auto configs = enumerate_configs(m.graph);

    std::vector<std::size_t> theta(static_cast<std::size_t>(n));
    for (int trial = 0; trial < 300; ++trial) {
      for (auto& t : theta) t = rng.next_u64() % configs.num_configs;

      // Independent slot counts.
      auto expect_lambda = priors.lambda;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        for (int v = 0; v < m.graph.num_vars(); ++v) {
          const auto& var = m.graph.variables()[static_cast<std::size_t>(v)];
          if (var.kind != VariableKind::Stochastic) continue;
          const int z = parent_sum(m.graph, configs, theta[i], v);
          const int slot = m.graph.slot_index(var.slot, z);
          const int state = configs.state(theta[i], v);
          auto& post = expect_lambda[static_cast<std::size_t>(slot)];
          if (m.graph.slots()[static_cast<std::size_t>(slot)].kind == SlotKind::Bernoulli)
            post[state == 1 ? 0 : 1] += 1.0;
          else
            post[static_cast<std::size_t>(state)] += 1.0;
        }
      }
      const auto got_lambda = lambda_conditional(ws, theta, priors);
      REQUIRE(got_lambda.size() == expect_lambda.size());
      for (std::size_t s = 0; s < got_lambda.size(); ++s) CHECK(got_lambda[s] == expect_lambda[s]);

      // Independent misclassification counts.
      auto expect_fp = priors.task_fp;
      auto expect_tp = priors.task_tp;
      for (std::size_t t = 0; t < ws.tasks.size(); ++t) {
        const auto dt = delta_table(m.graph, configs,
                                    m.em_for_task(static_cast<std::size_t>(ws.tasks[t].model_task))
                                        .skills_required);
        for (std::size_t i = 0; i < theta.size(); ++i) {
          const auto x = data.cell(i, static_cast<std::size_t>(ws.tasks[t].data_col));
          if (x == ResponseMatrix::kMissing) continue;
          auto& pair = dt[theta[i]] ? expect_tp[t] : expect_fp[t];
          if (x == 1)
            pair.alpha += 1.0;
          else
            pair.beta += 1.0;
        }
      }
      std::vector<BetaPair> got_fp, got_tp;
      pi_conditional(ws, theta, priors, got_fp, got_tp);
      REQUIRE(got_fp.size() == expect_fp.size());
      for (std::size_t t = 0; t < got_fp.size(); ++t) {
        CHECK(got_fp[t].alpha == expect_fp[t].alpha);
        CHECK(got_fp[t].beta == expect_fp[t].beta);
        CHECK(got_tp[t].alpha == expect_tp[t].alpha);
        CHECK(got_tp[t].beta == expect_tp[t].beta);
      }
    }
  }

  TEST_CASE("theta draws follow the exact conditional") {
    auto m = testfix::one_skill_model();
    m.tasks[0].pi = PiPair{0.2, 0.8};
    ResponseMatrix data({"e1"}, {"t1", "t2", "t3"});
    data.set(0, 0, 1);
    const auto ws = GibbsWorkspace::build(m, data);
    Lambda L;
    L.values = {{0.5}};
    const std::vector<PiPair> pi = {{0.2, 0.8}, {0.5, 0.5}, {0.5, 0.5}};

    Rng rng(23, 0);
    std::vector<std::size_t> theta(1);
    int ones = 0;
    const int draws = 200000;
    for (int k = 0; k < draws; ++k) {
      draw_theta(ws, L, pi, rng, theta);
      ones += theta[0] == 1 ? 1 : 0;
    }
    // Posterior P(s1 = 1 | x = 1) = 0.8; binomial noise at 2e5 draws ~ 0.001.
    CHECK(std::abs(static_cast<double>(ones) / draws - 0.8) < 0.005);
  }

  TEST_CASE("all-missing data reproduces the priors") {
    const auto m = builtin_fraction_assessment();
    std::vector<std::string> ids;
    for (int i = 0; i < 30; ++i) ids.push_back("e" + std::to_string(i));
    std::vector<std::string> tasks;
    for (const auto& t : m.tasks) tasks.push_back(t.id);
    const ResponseMatrix data(std::move(ids), std::move(tasks));  // every cell missing

    GibbsConfig cfg;
    cfg.chains = 2;
    cfg.burn_in = 200;
    cfg.retained = 800;
    cfg.seed = 5;
    const auto run = run_gibbs(m, data, PriorSet::from_model(m), cfg);
    const auto priors = PriorSet::from_model(m);
    for (std::size_t s = 0; s < run.summaries.size(); ++s) {
      const auto& ref = run.refs[s];
      double prior_mean = 0.0;
      if (ref.kind == ScalarRef::Kind::Lambda) {
        const auto& p =
            priors.lambda[static_cast<std::size_t>(m.graph.slot_index(ref.family, ref.z))];
        double total = 0.0;
        for (const double c : p) total += c;
        const bool bern =
            m.graph.slots()[static_cast<std::size_t>(m.graph.slot_index(ref.family, ref.z))]
                .kind == SlotKind::Bernoulli;
        prior_mean = (bern ? p[0] : p[static_cast<std::size_t>(ref.component)]) / total;
      } else {
        const auto& pair = ref.kind == ScalarRef::Kind::TaskFp
                               ? priors.task_fp[static_cast<std::size_t>(
                                     m.task_index(ref.task))]
                               : priors.task_tp[static_cast<std::size_t>(
                                     m.task_index(ref.task))];
        prior_mean = pair.alpha / (pair.alpha + pair.beta);
      }
      CHECK(std::abs(run.summaries[s].mean - prior_mean) < 0.05);
      CHECK(std::abs(run.summaries[s].n_hat) < 8.0);
    }
  }

  TEST_CASE("runs are deterministic in the seed") {
    const auto m = builtin_fraction_assessment();
    const auto data = synthesize(m, 60, 100);
    GibbsConfig cfg;
    cfg.chains = 2;
    cfg.burn_in = 50;
    cfg.retained = 100;
    cfg.seed = 77;
    const auto a = run_gibbs(m, data, PriorSet::from_model(m), cfg);
    const auto b = run_gibbs(m, data, PriorSet::from_model(m), cfg);
    REQUIRE(a.draws.size() == b.draws.size());
    CHECK(a.draws == b.draws);
    for (std::size_t s = 0; s < a.summaries.size(); ++s) {
      CHECK(a.summaries[s].mean == b.summaries[s].mean);
      CHECK(a.summaries[s].rhat == b.summaries[s].rhat);
    }

    cfg.seed = 78;
    const auto c = run_gibbs(m, data, PriorSet::from_model(m), cfg);
    CHECK(a.draws != c.draws);
  }

  TEST_CASE("run bookkeeping is complete and self-consistent") {
    const auto m = builtin_fraction_assessment();
    const auto data = synthesize(m, 50, 200);
    GibbsConfig cfg;
    cfg.chains = 2;
    cfg.burn_in = 40;
    cfg.retained = 60;
    cfg.seed = 3;
    const auto run = run_gibbs(m, data, PriorSet::from_model(m), cfg);

    CHECK(run.mode == "startup");
    CHECK(run.config.chains == 2);
    REQUIRE(run.names.size() == 48);  // 18 population + 15 tasks x 2
    REQUIRE(run.refs.size() == 48);
    REQUIRE(run.base_priors.size() == 48);
    REQUIRE(run.summaries.size() == 48);
    REQUIRE(run.draws.size() == 2);
    for (const auto& chain : run.draws) {
      REQUIRE(chain.size() == 48);
      for (const auto& scalar : chain) CHECK(scalar.size() == 60);
    }

    CHECK(run.scalar_index("lambda_1[z=0]") == 0);
    CHECK(run.scalar_index("nope") == -1);
    for (std::size_t s = 0; s < run.names.size(); ++s) {
      CHECK(run.scalar_index(run.names[s]) == static_cast<int>(s));
      CHECK(run.summaries[s].name == run.names[s]);
      CHECK(run.summaries[s].rhat > 0.0);
    }

    // n_hat anchoring: every base prior carries 27 pseudo-observations.
    const int i_l1 = run.scalar_index("lambda_1[z=0]");
    CHECK(run.base_priors[static_cast<std::size_t>(i_l1)].alpha == 21.0);
    CHECK(run.base_priors[static_cast<std::size_t>(i_l1)].beta == 6.0);
    const int i_fp = run.scalar_index("pi[item04][fp]");
    REQUIRE(i_fp >= 0);
    CHECK(run.base_priors[static_cast<std::size_t>(i_fp)].alpha == 6.0);
    CHECK(run.base_priors[static_cast<std::size_t>(i_fp)].beta == 21.0);
    const int i_wn = run.scalar_index("lambda_WN[z=1][2]");
    REQUIRE(i_wn >= 0);
    CHECK(run.refs[static_cast<std::size_t>(i_wn)].family == "lambda_WN");
    CHECK(run.refs[static_cast<std::size_t>(i_wn)].z == 1);
    CHECK(run.refs[static_cast<std::size_t>(i_wn)].component == 2);
  }

  TEST_CASE("rhat is omitted for very short runs") {
    const auto m = builtin_fraction_assessment();
    const auto data = synthesize(m, 30, 300);
    GibbsConfig cfg;
    cfg.chains = 2;
    cfg.burn_in = 10;
    cfg.retained = 5;
    cfg.seed = 1;
    const auto run = run_gibbs(m, data, PriorSet::from_model(m), cfg);
    for (const auto& s : run.summaries) CHECK(s.rhat == 0.0);
  }

  TEST_CASE("config validation") {
    GibbsConfig cfg;
    cfg.chains = 1;
    CHECK_ERROR(cfg.validate(), ErrorCode::InvalidArgument);
    cfg = GibbsConfig{};
    cfg.retained = 0;
    CHECK_ERROR(cfg.validate(), ErrorCode::InvalidArgument);
    cfg = GibbsConfig{};
    cfg.burn_in = -1;
    CHECK_ERROR(cfg.validate(), ErrorCode::InvalidArgument);
    cfg = GibbsConfig{};
    cfg.thin = 0;
    CHECK_ERROR(cfg.validate(), ErrorCode::InvalidArgument);
  }

  TEST_CASE("posterior point estimates renormalize cleanly") {
    const auto m = builtin_fraction_assessment();
    const auto data = synthesize(m, 80, 400);
    GibbsConfig cfg;
    cfg.chains = 2;
    cfg.burn_in = 60;
    cfg.retained = 120;
    cfg.seed = 9;
    const auto run = run_gibbs(m, data, PriorSet::from_model(m), cfg);

    const auto L = posterior_mean_lambda(m, run);
    m.graph.validate_lambda(L);
    const int s_l1 = m.graph.slot_index("lambda_1", 0);
    CHECK(L.values[static_cast<std::size_t>(s_l1)][0] ==
          doctest::Approx(run.summaries[static_cast<std::size_t>(run.scalar_index(
                                            "lambda_1[z=0]"))]
                              .mean)
              .epsilon(1e-12));
    const int s_wn = m.graph.slot_index("lambda_WN", 2);
    const auto& wn = L.values[static_cast<std::size_t>(s_wn)];
    CHECK(wn[0] + wn[1] + wn[2] == doctest::Approx(1.0).epsilon(1e-12));
    const double m0 =
        run.summaries[static_cast<std::size_t>(run.scalar_index("lambda_WN[z=2][0]"))].mean;
    const double m1 =
        run.summaries[static_cast<std::size_t>(run.scalar_index("lambda_WN[z=2][1]"))].mean;
    CHECK(wn[0] / wn[1] == doctest::Approx(m0 / m1).epsilon(1e-12));

    const auto pi = posterior_mean_pi(m, run);
    REQUIRE(pi.size() == 15);
    for (std::size_t j = 0; j < 15; ++j) {
      REQUIRE(pi[j].has_value());
      const auto fp =
          run.summaries[static_cast<std::size_t>(run.scalar_index("pi[" + m.tasks[j].id + "][fp]"))]
              .mean;
      CHECK(pi[j]->fp == doctest::Approx(fp).epsilon(1e-12));
    }
  }

  TEST_CASE("online full: moment-matched priors, anchored n_hat") {
    const auto m = builtin_fraction_assessment();
    const auto startup_data = synthesize(m, 120, 500);
    GibbsConfig cfg;
    cfg.chains = 2;
    cfg.burn_in = 80;
    cfg.retained = 200;
    cfg.seed = 11;
    const auto startup = run_gibbs(m, startup_data, PriorSet::from_model(m), cfg);

    const auto ps = priors_from_run(m, startup);
    // A Bernoulli slot's run prior is the moment match of its startup summary.
    const auto& s_l1 =
        startup.summaries[static_cast<std::size_t>(startup.scalar_index("lambda_1[z=0]"))];
    const auto mm = moment_match_beta(s_l1.mean, s_l1.sd);
    const auto& got = ps.lambda[static_cast<std::size_t>(m.graph.slot_index("lambda_1", 0))];
    CHECK(got[0] == doctest::Approx(mm.alpha).epsilon(1e-12));
    CHECK(got[1] == doctest::Approx(mm.beta).epsilon(1e-12));
    // Same for a task's misclassification pair.
    const auto& s_fp =
        startup.summaries[static_cast<std::size_t>(startup.scalar_index("pi[item01][fp]"))];
    const auto mm_fp = moment_match_beta(s_fp.mean, s_fp.sd);
    CHECK(ps.task_fp[0].alpha == doctest::Approx(mm_fp.alpha).epsilon(1e-12));

    const auto new_data = synthesize(m, 60, 600);
    const auto full = calibrate_new_full(m, startup, new_data, cfg);
    CHECK(full.mode == "full");
    CHECK(full.names == startup.names);
    // n_hat stays anchored to the 27-observation base priors, not the
    // moment-matched run priors.
    const int i = full.scalar_index("lambda_1[z=0]");
    CHECK(full.base_priors[static_cast<std::size_t>(i)].alpha == 21.0);
    CHECK(full.base_priors[static_cast<std::size_t>(i)].beta == 6.0);
    const auto& sum = full.summaries[static_cast<std::size_t>(i)];
    CHECK(sum.n_hat ==
          doctest::Approx(sum.alpha_hat + sum.beta_hat - 27.0).epsilon(1e-9));
  }

  TEST_CASE("online eb: pinned old parameters, new tasks only") {
    const auto m = builtin_fraction_assessment();
    auto startup_data = synthesize(m, 150, 700);
    const auto startup_subset = startup_data.drop_tasks({"item05", "item10", "item14"});
    GibbsConfig cfg;
    cfg.chains = 2;
    cfg.burn_in = 80;
    cfg.retained = 200;
    cfg.seed = 13;
    const auto startup = run_gibbs(m, startup_subset, PriorSet::from_model(m), cfg);
    CHECK(startup.names.size() == 18 + 24);  // 12 bound tasks

    const auto new_data = synthesize(m, 80, 800);
    const auto eb = calibrate_new_eb(m, startup, new_data, cfg);
    CHECK(eb.mode == "eb");
    CHECK(eb.names == std::vector<std::string>{"pi[item05][fp]", "pi[item05][tp]",
                                               "pi[item10][fp]", "pi[item10][tp]",
                                               "pi[item14][fp]", "pi[item14][tp]"});
    for (std::size_t s = 0; s < eb.names.size(); ++s) {
      CHECK(eb.summaries[s].rhat > 0.0);
      // Base priors are the evidence-model priors of the new tasks.
      CHECK(eb.base_priors[s].alpha == (s % 2 == 0 ? 6.0 : 21.0));
      CHECK(eb.base_priors[s].beta == (s % 2 == 0 ? 21.0 : 6.0));
    }

    // Full-mode summaries still cover everything.
    const auto full = calibrate_new_full(m, startup, new_data, cfg);
    CHECK(full.names.size() == 48);

    // A startup covering every task leaves eb mode nothing to do.
    const auto full_startup = run_gibbs(m, startup_data, PriorSet::from_model(m), cfg);
    CHECK_ERROR(calibrate_new_eb(m, full_startup, new_data, cfg), ErrorCode::InvalidArgument);
  }

  TEST_CASE("eb accepts explicit point estimates") {
    const auto m = builtin_fraction_assessment();
    const auto L = m.prior_mean_lambda();
    std::vector<std::optional<PiPair>> pi_hat(15, PiPair{0.2, 0.8});
    pi_hat[4].reset();   // item05
    pi_hat[9].reset();   // item10
    pi_hat[13].reset();  // item14
    const auto new_data = synthesize(m, 60, 900);
    GibbsConfig cfg;
    cfg.chains = 2;
    cfg.burn_in = 50;
    cfg.retained = 100;
    cfg.seed = 15;
    const auto eb = calibrate_new_eb(m, L, pi_hat, new_data, cfg);
    CHECK(eb.names.size() == 6);
    CHECK(eb.names.front() == "pi[item05][fp]");
  }

  TEST_CASE("unknown data columns are rejected") {
    const auto m = builtin_fraction_assessment();
    ResponseMatrix data({"e1"}, {"item01", "mystery"});
    data.set(0, 0, 1);
    data.set(0, 1, 0);
    CHECK_ERROR(GibbsWorkspace::build(m, data), ErrorCode::InvalidArgument);
  }
}

#include "edubayes/gibbs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <unordered_set>

#include "edubayes/errors.hpp"

namespace edubayes {

PriorSet PriorSet::from_model(const AssessmentModel& model) {
  PriorSet p;
  p.lambda = model.lambda_priors;
  p.task_fp.reserve(model.tasks.size());
  p.task_tp.reserve(model.tasks.size());
  for (std::size_t j = 0; j < model.tasks.size(); ++j) {
    const auto& em = model.em_for_task(j);
    p.task_fp.push_back(em.prior_false_pos);
    p.task_tp.push_back(em.prior_true_pos);
  }
  return p;
}

void PriorSet::validate(const AssessmentModel& model) const {
  require(lambda.size() == model.graph.slots().size() &&
              task_fp.size() == model.tasks.size() && task_tp.size() == model.tasks.size(),
          "prior set does not match the model's slots and tasks");
  for (std::size_t s = 0; s < lambda.size(); ++s) {
    const auto& slot = model.graph.slots()[s];
    const std::size_t want =
        slot.kind == SlotKind::Bernoulli ? 2 : static_cast<std::size_t>(slot.dim);
    require(lambda[s].size() == want, "prior for slot (" + slot.family + ", z=" +
                                          std::to_string(slot.z) + ") has the wrong arity");
    for (double a : lambda[s]) require(a > 0.0, "prior hyperparameters must be positive");
  }
  for (std::size_t j = 0; j < task_fp.size(); ++j) {
    require(task_fp[j].alpha > 0 && task_fp[j].beta > 0 && task_tp[j].alpha > 0 &&
                task_tp[j].beta > 0,
            "task '" + model.tasks[j].id + "': prior hyperparameters must be positive");
  }
}

void GibbsConfig::validate() const {
  require(chains >= 2, "at least 2 chains required for convergence diagnostics");
  require(burn_in >= 0, "burn-in must be nonnegative");
  require(retained >= 1, "must retain at least one draw per chain");
  require(thin >= 1, "thinning interval must be at least 1");
}

int CalibrationRun::scalar_index(const std::string& name) const {
  for (int s = 0; s < static_cast<int>(names.size()); ++s)
    if (names[s] == name) return s;
  return -1;
}

GibbsWorkspace GibbsWorkspace::build(const AssessmentModel& model, const ResponseMatrix& data) {
  GibbsWorkspace ws;
  ws.model = &model;
  ws.data = &data;
  ws.configs = enumerate_configs(model.graph);

  ws.delta_em.reserve(model.evidence_models.size());
  for (const auto& em : model.evidence_models)
    ws.delta_em.push_back(delta_table(model.graph, ws.configs, em.skills_required));

  std::unordered_set<std::string> bound;
  for (int j = 0; j < static_cast<int>(model.tasks.size()); ++j) {
    const auto& task = model.tasks[static_cast<std::size_t>(j)];
    int col = -1;
    for (int c = 0; c < static_cast<int>(data.num_tasks()); ++c)
      if (data.tasks()[static_cast<std::size_t>(c)] == task.id) {
        col = c;
        break;
      }
    if (col < 0) continue;
    ws.tasks.push_back({j, col, model.em_index(task.evidence_model)});
    bound.insert(task.id);
  }
  for (const auto& id : data.tasks())
    require(bound.count(id) > 0, "response matrix task '" + id + "' is not in the model");

  // Group configurations by delta signature: members share every likelihood.
  const std::size_t num_ems = model.evidence_models.size();
  std::map<std::vector<std::uint8_t>, int> group_ids;
  for (std::size_t c = 0; c < ws.configs.num_configs; ++c) {
    std::vector<std::uint8_t> sig(num_ems);
    for (std::size_t s = 0; s < num_ems; ++s) sig[s] = ws.delta_em[s][c];
    auto [it, inserted] = group_ids.try_emplace(sig, static_cast<int>(ws.group_members.size()));
    if (inserted) {
      ws.group_members.emplace_back();
      ws.group_delta.push_back(sig);
    }
    ws.group_members[static_cast<std::size_t>(it->second)].push_back(
        static_cast<std::uint32_t>(c));
  }

  const auto& vars = model.graph.variables();
  std::vector<int> stochastic;
  for (int v = 0; v < model.graph.num_vars(); ++v)
    if (vars[static_cast<std::size_t>(v)].kind == VariableKind::Stochastic)
      stochastic.push_back(v);
  ws.num_stochastic = static_cast<int>(stochastic.size());
  ws.config_slots.resize(ws.configs.num_configs * stochastic.size());
  for (std::size_t c = 0; c < ws.configs.num_configs; ++c) {
    for (std::size_t k = 0; k < stochastic.size(); ++k) {
      const int v = stochastic[k];
      int z = 0;
      for (const auto& parent : vars[static_cast<std::size_t>(v)].parents)
        z += ws.configs.state(c, model.graph.var_index(parent));
      ws.config_slots[c * stochastic.size() + k] = {
          static_cast<std::int32_t>(model.graph.slot_for(v, z)),
          static_cast<std::int32_t>(ws.configs.state(c, v))};
    }
  }
  return ws;
}

std::vector<SlotPrior> lambda_conditional(const GibbsWorkspace& ws,
                                          std::span<const std::size_t> theta,
                                          const PriorSet& priors) {
  const auto& slots = ws.model->graph.slots();
  std::vector<SlotPrior> post = priors.lambda;
  const std::size_t nv = static_cast<std::size_t>(ws.num_stochastic);
  for (const std::size_t c : theta) {
    require(c < ws.configs.num_configs, "configuration index out of range");
    for (std::size_t k = 0; k < nv; ++k) {
      const auto e = ws.config_slots[c * nv + k];
      auto& p = post[static_cast<std::size_t>(e.slot)];
      if (slots[static_cast<std::size_t>(e.slot)].kind == SlotKind::Bernoulli)
        p[e.state == 1 ? 0 : 1] += 1.0;
      else
        p[static_cast<std::size_t>(e.state)] += 1.0;
    }
  }
  return post;
}

Lambda draw_lambda(const GibbsWorkspace& ws, std::span<const std::size_t> theta,
                   const PriorSet& priors, Rng& rng) {
  const auto post = lambda_conditional(ws, theta, priors);
  const auto& slots = ws.model->graph.slots();
  Lambda lambda;
  lambda.values.resize(post.size());
  for (std::size_t s = 0; s < post.size(); ++s) {
    if (slots[s].kind == SlotKind::Bernoulli)
      lambda.values[s] = {rng.beta(post[s][0], post[s][1])};
    else
      lambda.values[s] = rng.dirichlet(post[s]);
  }
  return lambda;
}

void pi_conditional(const GibbsWorkspace& ws, std::span<const std::size_t> theta,
                    const PriorSet& priors, std::vector<BetaPair>& fp,
                    std::vector<BetaPair>& tp) {
  const auto& data = *ws.data;
  require(theta.size() == data.num_examinees(), "one configuration per examinee required");
  fp.resize(ws.tasks.size());
  tp.resize(ws.tasks.size());
  for (std::size_t t = 0; t < ws.tasks.size(); ++t) {
    fp[t] = priors.task_fp[static_cast<std::size_t>(ws.tasks[t].model_task)];
    tp[t] = priors.task_tp[static_cast<std::size_t>(ws.tasks[t].model_task)];
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const std::size_t c = theta[i];
    require(c < ws.configs.num_configs, "configuration index out of range");
    for (std::size_t t = 0; t < ws.tasks.size(); ++t) {
      const auto& b = ws.tasks[t];
      const auto x = data.cell(i, static_cast<std::size_t>(b.data_col));
      if (x == ResponseMatrix::kMissing) continue;
      auto& pair = ws.delta_em[static_cast<std::size_t>(b.em)][c] ? tp[t] : fp[t];
      if (x == 1)
        pair.alpha += 1.0;
      else
        pair.beta += 1.0;
    }
  }
}

std::vector<PiPair> draw_pi(const GibbsWorkspace& ws, std::span<const std::size_t> theta,
                            const PriorSet& priors, Rng& rng) {
  std::vector<BetaPair> fp, tp;
  pi_conditional(ws, theta, priors, fp, tp);
  std::vector<PiPair> out(ws.tasks.size());
  for (std::size_t t = 0; t < ws.tasks.size(); ++t) {
    out[t].fp = rng.beta(fp[t].alpha, fp[t].beta);
    out[t].tp = rng.beta(tp[t].alpha, tp[t].beta);
  }
  return out;
}

namespace {

struct ThetaScratch {
  std::vector<double> config_prior;
  std::vector<double> group_prior;
  std::vector<std::array<double, 4>> factors;  // per task: [delta*2 + x]
  std::vector<double> group_w;
  std::vector<double> member_w;
  std::vector<double> p0, p1;  // per evidence model
  std::vector<double> base0, base1;  // optional fixed per-examinee EM products
  std::vector<int> active;           // indexes into ws.tasks
};

void prepare_prior(const GibbsWorkspace& ws, const Lambda& lambda, ThetaScratch& s) {
  ws.model->graph.validate_lambda(lambda);
  s.config_prior.resize(ws.configs.num_configs);
  joint_probs(ws.model->graph, ws.configs, lambda, s.config_prior);
  s.group_prior.assign(ws.group_members.size(), 0.0);
  for (std::size_t g = 0; g < ws.group_members.size(); ++g)
    for (const auto c : ws.group_members[g]) s.group_prior[g] += s.config_prior[c];
}

void set_factors(const std::vector<PiPair>& pi, std::span<const int> tasks, ThetaScratch& s) {
  for (const int t : tasks) {
    const auto& p = pi[static_cast<std::size_t>(t)];
    s.factors[static_cast<std::size_t>(t)] = {1.0 - p.fp, p.fp, 1.0 - p.tp, p.tp};
  }
}

// One exact draw per examinee: group by likelihood signature, then a
// prior-weighted member draw within the chosen group.
void theta_sweep(const GibbsWorkspace& ws, ThetaScratch& s, Rng& rng,
                 std::span<std::size_t> theta_out) {
  const auto& data = *ws.data;
  const std::size_t num_ems = ws.model->evidence_models.size();
  const std::size_t num_groups = ws.group_members.size();
  s.group_w.resize(num_groups);
  s.p0.resize(num_ems);
  s.p1.resize(num_ems);

  for (std::size_t i = 0; i < theta_out.size(); ++i) {
    if (s.base0.empty()) {
      std::fill(s.p0.begin(), s.p0.end(), 1.0);
      std::fill(s.p1.begin(), s.p1.end(), 1.0);
    } else {
      std::copy_n(s.base0.begin() + static_cast<std::ptrdiff_t>(i * num_ems), num_ems,
                  s.p0.begin());
      std::copy_n(s.base1.begin() + static_cast<std::ptrdiff_t>(i * num_ems), num_ems,
                  s.p1.begin());
    }
    for (const int t : s.active) {
      const auto& b = ws.tasks[static_cast<std::size_t>(t)];
      const auto x = data.cell(i, static_cast<std::size_t>(b.data_col));
      if (x == ResponseMatrix::kMissing) continue;
      const auto& f = s.factors[static_cast<std::size_t>(t)];
      s.p0[static_cast<std::size_t>(b.em)] *= f[static_cast<std::size_t>(x)];
      s.p1[static_cast<std::size_t>(b.em)] *= f[static_cast<std::size_t>(2 + x)];
    }
    for (std::size_t g = 0; g < num_groups; ++g) {
      double w = s.group_prior[g];
      const auto& sig = ws.group_delta[g];
      for (std::size_t m = 0; m < num_ems; ++m) w *= sig[m] ? s.p1[m] : s.p0[m];
      s.group_w[g] = w;
    }
    std::size_t g;
    try {
      g = rng.categorical(s.group_w);
    } catch (const Error&) {
      throw_numeric("examinee '" + data.examinees()[i] +
                    "': zero-mass conditional for the skill configuration");
    }
    const auto& members = ws.group_members[g];
    if (members.size() == 1) {
      theta_out[i] = members[0];
      continue;
    }
    s.member_w.resize(members.size());
    for (std::size_t m = 0; m < members.size(); ++m)
      s.member_w[m] = s.config_prior[members[m]];
    theta_out[i] = members[rng.categorical(s.member_w)];
  }
}

std::vector<int> all_tasks(const GibbsWorkspace& ws) {
  std::vector<int> out(ws.tasks.size());
  for (std::size_t t = 0; t < ws.tasks.size(); ++t) out[t] = static_cast<int>(t);
  return out;
}

}  // namespace

void draw_theta(const GibbsWorkspace& ws, const Lambda& lambda,
                const std::vector<PiPair>& pi, Rng& rng, std::span<std::size_t> theta_out) {
  require(pi.size() == ws.tasks.size(), "one misclassification pair per bound task required");
  require(theta_out.size() == ws.data->num_examinees(),
          "one output configuration per examinee required");
  ThetaScratch s;
  s.factors.resize(ws.tasks.size());
  s.active = all_tasks(ws);
  prepare_prior(ws, lambda, s);
  set_factors(pi, s.active, s);
  theta_sweep(ws, s, rng, theta_out);
}

namespace {

// Flat catalog of the scalar parameters a run tracks.
struct ScalarLayout {
  std::vector<std::string> names;
  std::vector<ScalarRef> refs;
  std::vector<BetaPair> base_priors;
  struct Extract {
    int kind;  // 0 lambda, 1 fp, 2 tp
    int a;     // slot index or ws task index
    int b;     // component
  };
  std::vector<Extract> ex;

  void add_lambda(const AssessmentModel& model, const PriorSet& base) {
    const auto& slots = model.graph.slots();
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto& slot = slots[s];
      if (slot.kind == SlotKind::Bernoulli) {
        names.push_back(slot.scalar_name());
        refs.push_back({ScalarRef::Kind::Lambda, slot.family, slot.z, 0, ""});
        base_priors.push_back({base.lambda[s][0], base.lambda[s][1]});
        ex.push_back({0, static_cast<int>(s), 0});
      } else {
        double total = 0.0;
        for (double a : base.lambda[s]) total += a;
        for (int k = 0; k < slot.dim; ++k) {
          names.push_back(slot.scalar_name(k));
          refs.push_back({ScalarRef::Kind::Lambda, slot.family, slot.z, k, ""});
          const double a = base.lambda[s][static_cast<std::size_t>(k)];
          base_priors.push_back({a, total - a});
          ex.push_back({0, static_cast<int>(s), k});
        }
      }
    }
  }

  void add_task(const AssessmentModel& model, const PriorSet& base, const GibbsWorkspace& ws,
                std::size_t t) {
    const auto& task = model.tasks[static_cast<std::size_t>(ws.tasks[t].model_task)];
    names.push_back("pi[" + task.id + "][fp]");
    refs.push_back({ScalarRef::Kind::TaskFp, "", 0, 0, task.id});
    base_priors.push_back(base.task_fp[static_cast<std::size_t>(ws.tasks[t].model_task)]);
    ex.push_back({1, static_cast<int>(t), 0});
    names.push_back("pi[" + task.id + "][tp]");
    refs.push_back({ScalarRef::Kind::TaskTp, "", 0, 0, task.id});
    base_priors.push_back(base.task_tp[static_cast<std::size_t>(ws.tasks[t].model_task)]);
    ex.push_back({2, static_cast<int>(t), 0});
  }

  double value(const Lambda& lambda, const std::vector<PiPair>& pi, std::size_t s) const {
    const auto& e = ex[s];
    if (e.kind == 0)
      return lambda.values[static_cast<std::size_t>(e.a)][static_cast<std::size_t>(e.b)];
    const auto& p = pi[static_cast<std::size_t>(e.a)];
    return e.kind == 1 ? p.fp : p.tp;
  }
};

void finalize_run(CalibrationRun& run) {
  const std::size_t num_scalars = run.names.size();
  run.summaries.clear();
  run.summaries.reserve(num_scalars);
  const int retained = run.config.retained;
  for (std::size_t s = 0; s < num_scalars; ++s) {
    std::vector<double> all;
    all.reserve(static_cast<std::size_t>(run.config.chains) * static_cast<std::size_t>(retained));
    for (const auto& chain : run.draws) {
      const auto& series = chain[s];
      all.insert(all.end(), series.begin(), series.end());
    }
    auto summary = summarize(run.names[s], all, run.base_priors[s].alpha,
                             run.base_priors[s].beta);
    if (retained >= 10) {
      std::vector<std::vector<double>> per_chain;
      per_chain.reserve(run.draws.size());
      for (const auto& chain : run.draws) per_chain.push_back(chain[s]);
      summary.rhat = gelman_rubin(per_chain);
    }
    run.summaries.push_back(std::move(summary));
  }
}

Lambda sample_lambda_prior(const AssessmentModel& model, const PriorSet& priors, Rng& rng) {
  Lambda lambda;
  lambda.values.resize(priors.lambda.size());
  for (std::size_t s = 0; s < priors.lambda.size(); ++s) {
    if (model.graph.slots()[s].kind == SlotKind::Bernoulli)
      lambda.values[s] = {rng.beta(priors.lambda[s][0], priors.lambda[s][1])};
    else
      lambda.values[s] = rng.dirichlet(priors.lambda[s]);
  }
  return lambda;
}

CalibrationRun run_full_sweep(const AssessmentModel& model, const ResponseMatrix& data,
                              const PriorSet& run_priors, const PriorSet& book_priors,
                              const GibbsConfig& config, const std::string& mode) {
  model.validate();
  config.validate();
  run_priors.validate(model);
  book_priors.validate(model);
  const auto ws = GibbsWorkspace::build(model, data);

  ScalarLayout layout;
  layout.add_lambda(model, book_priors);
  for (std::size_t t = 0; t < ws.tasks.size(); ++t) layout.add_task(model, book_priors, ws, t);

  CalibrationRun run;
  run.mode = mode;
  run.config = config;
  run.names = layout.names;
  run.refs = layout.refs;
  run.base_priors = layout.base_priors;
  run.draws.assign(static_cast<std::size_t>(config.chains),
                   std::vector<std::vector<double>>(layout.names.size()));
  for (auto& chain : run.draws)
    for (auto& series : chain) series.reserve(static_cast<std::size_t>(config.retained));

  const int total_iters = config.burn_in + config.retained * config.thin;
  for (int k = 0; k < config.chains; ++k) {
    Rng rng(config.seed, static_cast<std::uint64_t>(k));
    Lambda lambda = sample_lambda_prior(model, run_priors, rng);
    std::vector<PiPair> pi(ws.tasks.size());
    for (std::size_t t = 0; t < ws.tasks.size(); ++t) {
      const auto j = static_cast<std::size_t>(ws.tasks[t].model_task);
      pi[t].fp = rng.beta(run_priors.task_fp[j].alpha, run_priors.task_fp[j].beta);
      pi[t].tp = rng.beta(run_priors.task_tp[j].alpha, run_priors.task_tp[j].beta);
    }
    std::vector<std::size_t> theta(data.num_examinees(), 0);

    ThetaScratch s;
    s.factors.resize(ws.tasks.size());
    s.active = all_tasks(ws);
    auto& chain_draws = run.draws[static_cast<std::size_t>(k)];
    int kept = 0;
    for (int iter = 0; iter < total_iters; ++iter) {
      prepare_prior(ws, lambda, s);
      set_factors(pi, s.active, s);
      theta_sweep(ws, s, rng, theta);
      pi = draw_pi(ws, theta, run_priors, rng);
      lambda = draw_lambda(ws, theta, run_priors, rng);
      if (iter >= config.burn_in && (iter - config.burn_in) % config.thin == 0) {
        for (std::size_t q = 0; q < layout.names.size(); ++q)
          chain_draws[q].push_back(layout.value(lambda, pi, q));
        ++kept;
      }
    }
    require(kept == config.retained, "internal draw-count mismatch");
  }

  finalize_run(run);
  return run;
}

}  // namespace

CalibrationRun run_gibbs(const AssessmentModel& model, const ResponseMatrix& data,
                         const PriorSet& priors, const GibbsConfig& config) {
  return run_full_sweep(model, data, priors, priors, config, "startup");
}

CalibrationRun calibrate_new_full(const AssessmentModel& model, const CalibrationRun& startup,
                                  const ResponseMatrix& new_data, const GibbsConfig& config) {
  const auto run_priors = priors_from_run(model, startup);
  const auto book = PriorSet::from_model(model);
  return run_full_sweep(model, new_data, run_priors, book, config, "full");
}

CalibrationRun calibrate_new_eb(const AssessmentModel& model, const CalibrationRun& startup,
                                const ResponseMatrix& new_data, const GibbsConfig& config) {
  return calibrate_new_eb(model, posterior_mean_lambda(model, startup),
                          posterior_mean_pi(model, startup), new_data, config);
}

CalibrationRun calibrate_new_eb(const AssessmentModel& model, const Lambda& lambda_hat,
                                const std::vector<std::optional<PiPair>>& pi_hat,
                                const ResponseMatrix& new_data, const GibbsConfig& config) {
  model.validate();
  config.validate();
  require(pi_hat.size() == model.tasks.size(), "one point estimate (or none) per model task");
  model.graph.validate_lambda(lambda_hat);
  const auto ws = GibbsWorkspace::build(model, new_data);
  const auto base = PriorSet::from_model(model);

  std::vector<int> new_tasks, old_tasks;
  for (std::size_t t = 0; t < ws.tasks.size(); ++t) {
    if (pi_hat[static_cast<std::size_t>(ws.tasks[t].model_task)].has_value())
      old_tasks.push_back(static_cast<int>(t));
    else
      new_tasks.push_back(static_cast<int>(t));
  }
  require(!new_tasks.empty(), "no uncalibrated tasks found in the new data");

  ScalarLayout layout;
  for (const int t : new_tasks) layout.add_task(model, base, ws, static_cast<std::size_t>(t));

  CalibrationRun run;
  run.mode = "eb";
  run.config = config;
  run.names = layout.names;
  run.refs = layout.refs;
  run.base_priors = layout.base_priors;
  run.draws.assign(static_cast<std::size_t>(config.chains),
                   std::vector<std::vector<double>>(layout.names.size()));

  // Old-task likelihood contributions never change: fold them into fixed
  // per-examinee products over evidence models.
  const std::size_t num_ems = model.evidence_models.size();
  const std::size_t n = new_data.num_examinees();
  ThetaScratch fixed;
  fixed.factors.resize(ws.tasks.size());
  std::vector<PiPair> pi_full(ws.tasks.size());
  for (const int t : old_tasks)
    pi_full[static_cast<std::size_t>(t)] =
        *pi_hat[static_cast<std::size_t>(ws.tasks[static_cast<std::size_t>(t)].model_task)];
  set_factors(pi_full, old_tasks, fixed);
  fixed.base0.assign(n * num_ems, 1.0);
  fixed.base1.assign(n * num_ems, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const int t : old_tasks) {
      const auto& b = ws.tasks[static_cast<std::size_t>(t)];
      const auto x = new_data.cell(i, static_cast<std::size_t>(b.data_col));
      if (x == ResponseMatrix::kMissing) continue;
      const auto& f = fixed.factors[static_cast<std::size_t>(t)];
      fixed.base0[i * num_ems + static_cast<std::size_t>(b.em)] *=
          f[static_cast<std::size_t>(x)];
      fixed.base1[i * num_ems + static_cast<std::size_t>(b.em)] *=
          f[static_cast<std::size_t>(2 + x)];
    }
  }
  prepare_prior(ws, lambda_hat, fixed);

  // Conjugate pi updates touch only the new tasks; counts per sweep below.
  const int total_iters = config.burn_in + config.retained * config.thin;
  for (int k = 0; k < config.chains; ++k) {
    Rng rng(config.seed, static_cast<std::uint64_t>(k));
    std::vector<PiPair> pi_new(new_tasks.size());
    for (std::size_t q = 0; q < new_tasks.size(); ++q) {
      const auto j = static_cast<std::size_t>(
          ws.tasks[static_cast<std::size_t>(new_tasks[q])].model_task);
      pi_new[q].fp = rng.beta(base.task_fp[j].alpha, base.task_fp[j].beta);
      pi_new[q].tp = rng.beta(base.task_tp[j].alpha, base.task_tp[j].beta);
    }
    std::vector<std::size_t> theta(n, 0);

    ThetaScratch s = fixed;  // shares prior, factors for old tasks, base products
    s.active = new_tasks;
    auto& chain_draws = run.draws[static_cast<std::size_t>(k)];
    for (int iter = 0; iter < total_iters; ++iter) {
      for (std::size_t q = 0; q < new_tasks.size(); ++q)
        pi_full[static_cast<std::size_t>(new_tasks[q])] = pi_new[q];
      set_factors(pi_full, new_tasks, s);
      theta_sweep(ws, s, rng, theta);

      for (std::size_t q = 0; q < new_tasks.size(); ++q) {
        const auto& b = ws.tasks[static_cast<std::size_t>(new_tasks[q])];
        const auto j = static_cast<std::size_t>(b.model_task);
        BetaPair fp = base.task_fp[j];
        BetaPair tp = base.task_tp[j];
        for (std::size_t i = 0; i < n; ++i) {
          const auto x = new_data.cell(i, static_cast<std::size_t>(b.data_col));
          if (x == ResponseMatrix::kMissing) continue;
          auto& pair = ws.delta_em[static_cast<std::size_t>(b.em)][theta[i]] ? tp : fp;
          if (x == 1)
            pair.alpha += 1.0;
          else
            pair.beta += 1.0;
        }
        pi_new[q].fp = rng.beta(fp.alpha, fp.beta);
        pi_new[q].tp = rng.beta(tp.alpha, tp.beta);
      }

      if (iter >= config.burn_in && (iter - config.burn_in) % config.thin == 0) {
        for (std::size_t q = 0; q < pi_new.size(); ++q) {
          chain_draws[2 * q].push_back(pi_new[q].fp);
          chain_draws[2 * q + 1].push_back(pi_new[q].tp);
        }
      }
    }
  }

  finalize_run(run);
  return run;
}

namespace {

const ParameterSummary* find_scalar(const CalibrationRun& run, ScalarRef::Kind kind,
                                    const std::string& family, int z, int component,
                                    const std::string& task) {
  for (std::size_t s = 0; s < run.refs.size(); ++s) {
    const auto& r = run.refs[s];
    if (r.kind != kind) continue;
    if (kind == ScalarRef::Kind::Lambda) {
      if (r.family == family && r.z == z && r.component == component)
        return &run.summaries[s];
    } else if (r.task == task) {
      return &run.summaries[s];
    }
  }
  return nullptr;
}

}  // namespace

Lambda posterior_mean_lambda(const AssessmentModel& model, const CalibrationRun& run) {
  Lambda lambda;
  const auto& slots = model.graph.slots();
  lambda.values.resize(slots.size());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto& slot = slots[s];
    if (slot.kind == SlotKind::Bernoulli) {
      const auto* sum = find_scalar(run, ScalarRef::Kind::Lambda, slot.family, slot.z, 0, "");
      require(sum != nullptr, "run lacks a summary for " + slot.scalar_name());
      lambda.values[s] = {sum->mean};
    } else {
      std::vector<double> v(static_cast<std::size_t>(slot.dim));
      double total = 0.0;
      for (int k = 0; k < slot.dim; ++k) {
        const auto* sum = find_scalar(run, ScalarRef::Kind::Lambda, slot.family, slot.z, k, "");
        require(sum != nullptr, "run lacks a summary for " + slot.scalar_name(k));
        v[static_cast<std::size_t>(k)] = sum->mean;
        total += sum->mean;
      }
      require(total > 0.0, "degenerate categorical posterior for " + slot.family);
      for (double& x : v) x /= total;
      lambda.values[s] = std::move(v);
    }
  }
  return lambda;
}

std::vector<std::optional<PiPair>> posterior_mean_pi(const AssessmentModel& model,
                                                     const CalibrationRun& run) {
  std::vector<std::optional<PiPair>> out(model.tasks.size());
  for (std::size_t j = 0; j < model.tasks.size(); ++j) {
    const auto& id = model.tasks[j].id;
    const auto* fp = find_scalar(run, ScalarRef::Kind::TaskFp, "", 0, 0, id);
    const auto* tp = find_scalar(run, ScalarRef::Kind::TaskTp, "", 0, 0, id);
    require((fp == nullptr) == (tp == nullptr),
            "run carries only one side of the misclassification pair for '" + id + "'");
    if (fp) out[j] = PiPair{fp->mean, tp->mean};
  }
  return out;
}

PriorSet priors_from_run(const AssessmentModel& model, const CalibrationRun& startup) {
  PriorSet out = PriorSet::from_model(model);
  const auto& slots = model.graph.slots();
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto& slot = slots[s];
    if (slot.kind == SlotKind::Bernoulli) {
      const auto* sum = find_scalar(startup, ScalarRef::Kind::Lambda, slot.family, slot.z, 0, "");
      require(sum != nullptr, "startup run lacks a summary for " + slot.scalar_name());
      out.lambda[s] = {sum->alpha_hat, sum->beta_hat};
    } else {
      std::vector<double> means(static_cast<std::size_t>(slot.dim));
      std::vector<double> sds(static_cast<std::size_t>(slot.dim));
      for (int k = 0; k < slot.dim; ++k) {
        const auto* sum = find_scalar(startup, ScalarRef::Kind::Lambda, slot.family, slot.z, k, "");
        require(sum != nullptr, "startup run lacks a summary for " + slot.scalar_name(k));
        means[static_cast<std::size_t>(k)] = sum->mean;
        sds[static_cast<std::size_t>(k)] = sum->sd;
      }
      double total = 0.0;
      for (double m : means) total += m;
      for (double& m : means) m /= total;  // guard tiny drift before the simplex check
      out.lambda[s] = moment_match_dirichlet(means, sds);
    }
  }
  for (std::size_t j = 0; j < model.tasks.size(); ++j) {
    const auto& id = model.tasks[j].id;
    const auto* fp = find_scalar(startup, ScalarRef::Kind::TaskFp, "", 0, 0, id);
    const auto* tp = find_scalar(startup, ScalarRef::Kind::TaskTp, "", 0, 0, id);
    require((fp == nullptr) == (tp == nullptr),
            "startup run carries only one side of the misclassification pair for '" + id + "'");
    if (fp) {
      out.task_fp[j] = {fp->alpha_hat, fp->beta_hat};
      out.task_tp[j] = {tp->alpha_hat, tp->beta_hat};
    }
  }
  return out;
}

}  // namespace edubayes

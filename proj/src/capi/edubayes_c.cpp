#include "edubayes.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "edubayes/belief.hpp"
#include "edubayes/cat.hpp"
#include "edubayes/errors.hpp"
#include "edubayes/evidence_model.hpp"
#include "edubayes/gibbs.hpp"
#include "edubayes/io.hpp"
#include "edubayes/irt.hpp"
#include "edubayes/rasch_calibrate.hpp"
#include "edubayes/report.hpp"
#include "edubayes/response_matrix.hpp"
#include "edubayes/rng.hpp"
#include "edubayes/synthetic.hpp"

using nlohmann::json;

struct eb_model {
  edubayes::AssessmentModel v;
};
struct eb_truth {
  edubayes::SyntheticTruth v;
};
struct eb_responses {
  edubayes::ResponseMatrix v;
};
struct eb_run {
  edubayes::CalibrationRun v;
};
struct eb_score_report {
  edubayes::ScoreReport v;
};
struct eb_pool {
  std::vector<edubayes::RaschItem> v;
};
struct eb_cat_result {
  struct Entry {
    std::string selector;
    edubayes::CatSimConfig config;
    edubayes::CatSimResult result;
  };
  std::vector<Entry> entries;
};

namespace {

thread_local std::string g_last_error;

int code_of(edubayes::ErrorCode code) {
  switch (code) {
    case edubayes::ErrorCode::InvalidArgument: return EB_ERR_INVALID_ARGUMENT;
    case edubayes::ErrorCode::IoError: return EB_ERR_IO;
    case edubayes::ErrorCode::ParseError: return EB_ERR_PARSE;
    case edubayes::ErrorCode::NumericError: return EB_ERR_NUMERIC;
    default: return EB_ERR_INTERNAL;
  }
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return EB_OK;
  } catch (const edubayes::Error& e) {
    g_last_error = e.what();
    return code_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unidentified failure";
    return EB_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p) edubayes::throw_invalid(std::string(what) + " must not be null");
}

std::vector<std::string> split_ids(const char* csv) {
  need(csv, "id list");
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    std::size_t b = cur.find_first_not_of(" \t");
    std::size_t e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (const char* p = csv; *p; ++p) {
    if (*p == ',')
      flush();
    else
      cur += *p;
  }
  flush();
  edubayes::require(!out.empty(), "id list is empty");
  return out;
}

std::vector<edubayes::Observation> parse_observations(const char* text) {
  std::vector<edubayes::Observation> obs;
  if (!text) return obs;
  std::string cur;
  const auto flush = [&] {
    std::size_t b = cur.find_first_not_of(" \t");
    if (b == std::string::npos) {
      cur.clear();
      return;
    }
    std::size_t e = cur.find_last_not_of(" \t");
    const std::string item = cur.substr(b, e - b + 1);
    cur.clear();
    const std::size_t eq = item.find('=');
    edubayes::require(eq != std::string::npos,
                      "observation '" + item + "' is not of the form task=value");
    const std::string task = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    edubayes::require(!task.empty(), "observation '" + item + "' names no task");
    edubayes::require(value == "0" || value == "1",
                      "observation '" + item + "' must end in 0 or 1");
    obs.push_back({task, value == "1" ? 1 : 0});
  };
  for (const char* p = text; *p; ++p) {
    if (*p == ',')
      flush();
    else
      cur += *p;
  }
  flush();
  return obs;
}

json parse_config_json(const char* text, const char* what) {
  if (!text) return json::object();
  json j = json::parse(text, nullptr, false);
  edubayes::throw_parse_if(j.is_discarded() || !j.is_object(),
                           std::string(what) + " config must be a JSON object");
  return j;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const char* what) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    edubayes::throw_parse_if(!ok,
                             std::string(what) + " config key '" + key + "' is not recognized");
  }
}

edubayes::GibbsConfig parse_gibbs_config(const char* text) {
  const json j = parse_config_json(text, "calibration");
  reject_unknown_keys(j, {"chains", "burn_in", "retained", "thin", "seed"}, "calibration");
  edubayes::GibbsConfig config;
  if (j.contains("chains")) config.chains = j["chains"].get<int>();
  if (j.contains("burn_in")) config.burn_in = j["burn_in"].get<int>();
  if (j.contains("retained")) config.retained = j["retained"].get<int>();
  if (j.contains("thin")) config.thin = j["thin"].get<int>();
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  return config;
}

struct CatRequest {
  edubayes::CatSimConfig sim;
  edubayes::ThetaGrid grid;
  std::vector<std::string> selectors;
};

CatRequest parse_cat_config(const char* text) {
  const json j = parse_config_json(text, "simulation");
  reject_unknown_keys(j,
                      {"sessions", "theta_mean", "theta_sd", "theta_fixed", "stop_sd",
                       "max_items", "selector", "seed", "grid_points", "grid_min", "grid_max"},
                      "simulation");
  CatRequest req;
  if (j.contains("sessions")) req.sim.sessions = j["sessions"].get<int>();
  if (j.contains("theta_mean")) req.sim.theta_mean = j["theta_mean"].get<double>();
  if (j.contains("theta_sd")) req.sim.theta_sd = j["theta_sd"].get<double>();
  if (j.contains("theta_fixed")) {
    req.sim.fixed_theta = true;
    req.sim.theta_fixed = j["theta_fixed"].get<double>();
  }
  if (j.contains("stop_sd")) req.sim.cat.stop_sd = j["stop_sd"].get<double>();
  if (j.contains("max_items")) req.sim.cat.max_items = j["max_items"].get<int>();
  if (j.contains("seed")) req.sim.seed = j["seed"].get<std::uint64_t>();

  int points = 61;
  double lo = -4.0, hi = 4.0;
  if (j.contains("grid_points")) points = j["grid_points"].get<int>();
  if (j.contains("grid_min")) lo = j["grid_min"].get<double>();
  if (j.contains("grid_max")) hi = j["grid_max"].get<double>();
  req.grid = edubayes::ThetaGrid::standard_normal(points, lo, hi);

  std::string selector = "adaptive";
  if (j.contains("selector")) selector = j["selector"].get<std::string>();
  if (selector == "both") {
    req.selectors = {"adaptive", "random"};
  } else {
    edubayes::require(selector == "adaptive" || selector == "random",
                      "selector must be adaptive, random, or both");
    req.selectors = {selector};
  }
  return req;
}

edubayes::RaschCalibConfig parse_rasch_config(const char* text) {
  const json j = parse_config_json(text, "calibration");
  reject_unknown_keys(
      j, {"burn_in", "retained", "thin", "proposal_sd", "seed", "grid_points", "grid_min",
          "grid_max"},
      "calibration");
  edubayes::RaschCalibConfig config;
  if (j.contains("burn_in")) config.burn_in = j["burn_in"].get<int>();
  if (j.contains("retained")) config.retained = j["retained"].get<int>();
  if (j.contains("thin")) config.thin = j["thin"].get<int>();
  if (j.contains("proposal_sd")) config.proposal_sd = j["proposal_sd"].get<double>();
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  int points = 61;
  double lo = -4.0, hi = 4.0;
  if (j.contains("grid_points")) points = j["grid_points"].get<int>();
  if (j.contains("grid_min")) lo = j["grid_min"].get<double>();
  if (j.contains("grid_max")) hi = j["grid_max"].get<double>();
  config.grid = edubayes::ThetaGrid::standard_normal(points, lo, hi);
  return config;
}

// Model with task parameters pinned for scoring, plus the lambda to use.
struct ScoringSetup {
  edubayes::AssessmentModel model;
  edubayes::Lambda lambda;
};

ScoringSetup setup_from_run(const eb_model* model, const eb_run* run) {
  ScoringSetup setup;
  setup.model = model->v;
  if (run) {
    setup.lambda = edubayes::posterior_mean_lambda(model->v, run->v);
    const auto pis = edubayes::posterior_mean_pi(model->v, run->v);
    for (std::size_t t = 0; t < pis.size(); ++t)
      if (pis[t]) setup.model.tasks[t].pi = *pis[t];
  } else {
    setup.lambda = model->v.prior_mean_lambda();
  }
  return setup;
}

}  // namespace

extern "C" {

const char* eb_version(void) { return "1.0.0"; }

const char* eb_last_error(void) { return g_last_error.c_str(); }

void eb_string_free(char* s) { delete[] s; }

/* model */

int eb_model_builtin(eb_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = new eb_model{edubayes::builtin_fraction_assessment()};
  });
}

int eb_model_load(const char* path, eb_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new eb_model{edubayes::load_model(path)};
  });
}

int eb_model_save(const eb_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    edubayes::save_model(model->v, path);
  });
}

int eb_model_to_json(const eb_model* model, char** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = dup_string(edubayes::model_to_json_text(model->v));
  });
}

void eb_model_free(eb_model* model) { delete model; }

int eb_model_counts(const eb_model* model, int32_t* variables, int32_t* scalars,
                    int32_t* evidence_models, int32_t* tasks) {
  return guarded([&] {
    need(model, "model");
    if (variables) *variables = model->v.graph.num_vars();
    if (scalars) *scalars = model->v.graph.num_scalars();
    if (evidence_models) *evidence_models = static_cast<int32_t>(model->v.evidence_models.size());
    if (tasks) *tasks = static_cast<int32_t>(model->v.tasks.size());
  });
}

/* truth */

int eb_truth_sample(const eb_model* model, uint64_t seed, eb_truth** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    edubayes::Rng rng(seed);
    auto truth = edubayes::sample_truth(model->v, rng);
    truth.seed = seed;
    *out = new eb_truth{std::move(truth)};
  });
}

int eb_truth_load(const char* path, const eb_model* model, eb_truth** out) {
  return guarded([&] {
    need(path, "path");
    need(model, "model");
    need(out, "out");
    *out = new eb_truth{edubayes::load_truth(path, model->v)};
  });
}

int eb_truth_save(const eb_model* model, const eb_truth* truth, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(truth, "truth");
    need(path, "path");
    edubayes::save_truth(model->v, truth->v, path);
  });
}

void eb_truth_free(eb_truth* truth) { delete truth; }

int eb_generate(const eb_model* model, const eb_truth* truth, int32_t examinees, uint64_t seed,
                eb_responses** out_responses, eb_truth** out_truth) {
  return guarded([&] {
    need(model, "model");
    need(truth, "truth");
    need(out_responses, "out_responses");
    auto [matrix, full] = edubayes::generate_synthetic(model->v, truth->v.lambda_true,
                                                       truth->v.pi_true, examinees, seed);
    *out_responses = new eb_responses{std::move(matrix)};
    if (out_truth) *out_truth = new eb_truth{std::move(full)};
  });
}

/* responses */

int eb_responses_load(const char* path, eb_responses** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new eb_responses{edubayes::load_responses_csv(path)};
  });
}

int eb_responses_save(const eb_responses* data, const char* path) {
  return guarded([&] {
    need(data, "responses");
    need(path, "path");
    edubayes::save_responses_csv(data->v, path);
  });
}

void eb_responses_free(eb_responses* data) { delete data; }

int eb_responses_shape(const eb_responses* data, int32_t* examinees, int32_t* tasks) {
  return guarded([&] {
    need(data, "responses");
    if (examinees) *examinees = static_cast<int32_t>(data->v.num_examinees());
    if (tasks) *tasks = static_cast<int32_t>(data->v.num_tasks());
  });
}

int eb_responses_task_name(const eb_responses* data, int32_t index, char** out) {
  return guarded([&] {
    need(data, "responses");
    need(out, "out");
    edubayes::require(index >= 0 && static_cast<std::size_t>(index) < data->v.num_tasks(),
                      "task index out of range");
    *out = dup_string(data->v.tasks()[static_cast<std::size_t>(index)]);
  });
}

int eb_responses_examinee_name(const eb_responses* data, int32_t index, char** out) {
  return guarded([&] {
    need(data, "responses");
    need(out, "out");
    edubayes::require(index >= 0 && static_cast<std::size_t>(index) < data->v.num_examinees(),
                      "examinee index out of range");
    *out = dup_string(data->v.examinees()[static_cast<std::size_t>(index)]);
  });
}

int eb_responses_head(const eb_responses* data, int32_t examinees, eb_responses** out) {
  return guarded([&] {
    need(data, "responses");
    need(out, "out");
    edubayes::require(examinees >= 1, "need at least one examinee");
    edubayes::require(static_cast<std::size_t>(examinees) <= data->v.num_examinees(),
                      "not that many examinees");
    *out = new eb_responses{data->v.slice_examinees(0, static_cast<std::size_t>(examinees))};
  });
}

int eb_responses_tail(const eb_responses* data, int32_t examinees, eb_responses** out) {
  return guarded([&] {
    need(data, "responses");
    need(out, "out");
    edubayes::require(examinees >= 1, "need at least one examinee");
    edubayes::require(static_cast<std::size_t>(examinees) <= data->v.num_examinees(),
                      "not that many examinees");
    const std::size_t n = data->v.num_examinees();
    *out = new eb_responses{data->v.slice_examinees(n - static_cast<std::size_t>(examinees), n)};
  });
}

int eb_responses_select_tasks(const eb_responses* data, const char* task_ids, eb_responses** out) {
  return guarded([&] {
    need(data, "responses");
    need(out, "out");
    *out = new eb_responses{data->v.select_tasks(split_ids(task_ids))};
  });
}

int eb_responses_drop_tasks(const eb_responses* data, const char* task_ids, eb_responses** out) {
  return guarded([&] {
    need(data, "responses");
    need(out, "out");
    *out = new eb_responses{data->v.drop_tasks(split_ids(task_ids))};
  });
}

/* calibration */

int eb_calibrate(const eb_model* model, const eb_responses* data, const char* config_json,
                 eb_run** out) {
  return guarded([&] {
    need(model, "model");
    need(data, "responses");
    need(out, "out");
    const auto config = parse_gibbs_config(config_json);
    const auto priors = edubayes::PriorSet::from_model(model->v);
    *out = new eb_run{edubayes::run_gibbs(model->v, data->v, priors, config)};
  });
}

int eb_calibrate_new(const eb_model* model, const eb_run* startup, const eb_responses* new_data,
                     const char* mode, const char* config_json, eb_run** out) {
  return guarded([&] {
    need(model, "model");
    need(startup, "startup run");
    need(new_data, "responses");
    need(mode, "mode");
    need(out, "out");
    const auto config = parse_gibbs_config(config_json);
    const std::string m = mode;
    if (m == "full")
      *out = new eb_run{edubayes::calibrate_new_full(model->v, startup->v, new_data->v, config)};
    else if (m == "eb")
      *out = new eb_run{edubayes::calibrate_new_eb(model->v, startup->v, new_data->v, config)};
    else
      edubayes::throw_invalid("mode must be 'full' or 'eb'");
  });
}

/* runs */

int eb_run_load(const char* path, eb_run** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new eb_run{edubayes::load_run(path)};
  });
}

int eb_run_save(const eb_run* run, const char* path) {
  return guarded([&] {
    need(run, "run");
    need(path, "path");
    edubayes::save_run(run->v, path);
  });
}

void eb_run_free(eb_run* run) { delete run; }

int eb_run_mode(const eb_run* run, char** out) {
  return guarded([&] {
    need(run, "run");
    need(out, "out");
    *out = dup_string(run->v.mode);
  });
}

int eb_run_report_text(const eb_run* run, char** out) {
  return guarded([&] {
    need(run, "run");
    need(out, "out");
    *out = dup_string(edubayes::run_report_text(run->v));
  });
}

int eb_run_to_json(const eb_run* run, char** out) {
  return guarded([&] {
    need(run, "run");
    need(out, "out");
    *out = dup_string(edubayes::run_to_json_text(run->v));
  });
}

int eb_run_draws_csv(const eb_run* run, char** out) {
  return guarded([&] {
    need(run, "run");
    need(out, "out");
    *out = dup_string(edubayes::draws_to_csv(run->v));
  });
}

int eb_run_num_scalars(const eb_run* run, int32_t* out) {
  return guarded([&] {
    need(run, "run");
    need(out, "out");
    *out = static_cast<int32_t>(run->v.names.size());
  });
}

int eb_run_scalar_name(const eb_run* run, int32_t index, char** out) {
  return guarded([&] {
    need(run, "run");
    need(out, "out");
    edubayes::require(index >= 0 && static_cast<std::size_t>(index) < run->v.names.size(),
                      "scalar index out of range");
    *out = dup_string(run->v.names[static_cast<std::size_t>(index)]);
  });
}

int eb_run_scalar(const eb_run* run, const char* name, double out_stats[6]) {
  return guarded([&] {
    need(run, "run");
    need(name, "name");
    need(out_stats, "out_stats");
    const int s = run->v.scalar_index(name);
    edubayes::require(s >= 0, "run tracks no scalar named '" + std::string(name) + "'");
    const auto& sum = run->v.summaries[static_cast<std::size_t>(s)];
    out_stats[0] = sum.mean;
    out_stats[1] = sum.sd;
    out_stats[2] = sum.alpha_hat;
    out_stats[3] = sum.beta_hat;
    out_stats[4] = sum.n_hat;
    out_stats[5] = sum.rhat;
  });
}

int eb_comparison_report_text(const eb_run* full, const eb_run* eb, char** out) {
  return guarded([&] {
    need(full, "full run");
    need(eb, "eb run");
    need(out, "out");
    *out = dup_string(edubayes::comparison_report_text(full->v, eb->v));
  });
}

/* scoring */

int eb_score(const eb_model* model, const eb_run* run, const char* observations,
             eb_score_report** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const auto setup = setup_from_run(model, run);
    *out = new eb_score_report{
        edubayes::score_examinee(setup.model, setup.lambda, parse_observations(observations))};
  });
}

int eb_score_with_truth(const eb_model* model, const eb_truth* truth, const char* observations,
                        eb_score_report** out) {
  return guarded([&] {
    need(model, "model");
    need(truth, "truth");
    need(out, "out");
    edubayes::AssessmentModel pinned = model->v;
    edubayes::require(truth->v.pi_true.size() == pinned.tasks.size(),
                      "truth does not cover every task");
    for (std::size_t t = 0; t < pinned.tasks.size(); ++t)
      pinned.tasks[t].pi = truth->v.pi_true[t];
    *out = new eb_score_report{edubayes::score_examinee(pinned, truth->v.lambda_true,
                                                        parse_observations(observations))};
  });
}

int eb_score_matrix(const eb_model* model, const eb_run* run, const eb_responses* data,
                    const char* examinee, eb_score_report** out) {
  return guarded([&] {
    need(model, "model");
    need(data, "responses");
    need(examinee, "examinee");
    need(out, "out");
    const auto& m = data->v;
    std::size_t row = m.num_examinees();
    for (std::size_t i = 0; i < m.num_examinees(); ++i)
      if (m.examinees()[i] == examinee) row = i;
    edubayes::require(row < m.num_examinees(),
                      "no examinee named '" + std::string(examinee) + "'");
    std::vector<edubayes::Observation> obs;
    for (std::size_t t = 0; t < m.num_tasks(); ++t)
      if (!m.missing(row, t)) obs.push_back({m.tasks()[t], m.cell(row, t)});
    const auto setup = setup_from_run(model, run);
    *out = new eb_score_report{edubayes::score_examinee(setup.model, setup.lambda, obs)};
  });
}

void eb_score_report_free(eb_score_report* report) { delete report; }

int eb_score_report_text(const eb_score_report* report, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = dup_string(edubayes::score_report_text(report->v));
  });
}

int eb_score_report_json(const eb_score_report* report, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = dup_string(edubayes::score_to_json_text(report->v));
  });
}

int eb_score_report_size(const eb_score_report* report, int32_t* out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = static_cast<int32_t>(report->v.skills.size());
  });
}

int eb_score_report_skill(const eb_score_report* report, int32_t index, char** skill,
                          double* prior, double* posterior) {
  return guarded([&] {
    need(report, "report");
    edubayes::require(index >= 0 && static_cast<std::size_t>(index) < report->v.skills.size(),
                      "skill index out of range");
    const auto& s = report->v.skills[static_cast<std::size_t>(index)];
    if (skill) *skill = dup_string(s.skill);
    if (prior) *prior = s.prior;
    if (posterior) *posterior = s.posterior;
  });
}

/* item pools */

int eb_pool_load(const char* path, eb_pool** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new eb_pool{edubayes::load_pool(path)};
  });
}

int eb_pool_save(const eb_pool* pool, const char* path) {
  return guarded([&] {
    need(pool, "pool");
    need(path, "path");
    edubayes::save_pool(pool->v, path);
  });
}

void eb_pool_free(eb_pool* pool) { delete pool; }

int eb_pool_size(const eb_pool* pool, int32_t* out) {
  return guarded([&] {
    need(pool, "pool");
    need(out, "out");
    *out = static_cast<int32_t>(pool->v.size());
  });
}

int eb_pool_synthetic(int32_t items, double beta_min, double beta_max, uint64_t seed,
                      eb_pool** out) {
  return guarded([&] {
    need(out, "out");
    edubayes::require(items >= 1, "need at least one item");
    edubayes::require(beta_min < beta_max, "difficulty range is empty");
    std::size_t width = 1;
    for (int n = items; n >= 10; n /= 10) ++width;
    if (width < 3) width = 3;
    edubayes::Rng rng(seed);
    std::vector<edubayes::RaschItem> pool;
    pool.reserve(static_cast<std::size_t>(items));
    for (int i = 1; i <= items; ++i) {
      std::string digits = std::to_string(i);
      if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
      pool.push_back({"i" + digits, rng.uniform(beta_min, beta_max), {}});
    }
    *out = new eb_pool{std::move(pool)};
  });
}

/* adaptive testing */

int eb_cat_simulate(const eb_pool* pool, const char* config_json, eb_cat_result** out) {
  return guarded([&] {
    need(pool, "pool");
    need(out, "out");
    auto req = parse_cat_config(config_json);
    auto result = std::make_unique<eb_cat_result>();
    for (const auto& selector : req.selectors) {
      edubayes::CatSimConfig config = req.sim;
      config.cat.selector = selector == "adaptive" ? edubayes::CatConfig::Selector::Adaptive
                                                   : edubayes::CatConfig::Selector::Random;
      auto sim = edubayes::simulate_cat(pool->v, req.grid, config);
      result->entries.push_back({selector, std::move(config), std::move(sim)});
    }
    *out = result.release();
  });
}

void eb_cat_result_free(eb_cat_result* result) { delete result; }

int eb_cat_traces_csv(const eb_cat_result* result, char** out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    std::string csv;
    for (std::size_t k = 0; k < result->entries.size(); ++k) {
      const auto& entry = result->entries[k];
      std::string part = edubayes::cat_traces_to_csv(entry.result, entry.selector);
      if (k > 0) part.erase(0, part.find('\n') + 1);
      csv += part;
    }
    *out = dup_string(csv);
  });
}

int eb_cat_summary_json(const eb_cat_result* result, char** out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    json j;
    j["format"] = "edubayes-cat-summary";
    j["version"] = 1;
    json runs = json::array();
    for (const auto& entry : result->entries) {
      const auto stats = edubayes::cat_stats(entry.result, entry.config.cat);
      json r;
      r["selector"] = entry.selector;
      r["sessions"] = entry.result.sessions.size();
      r["stop_sd"] = entry.config.cat.stop_sd;
      r["max_items"] = entry.config.cat.max_items;
      r["mean_items"] = stats.mean_items;
      r["mean_abs_error"] = stats.mean_abs_error;
      r["coverage_3sd"] = stats.coverage_3sd;
      r["stop_rate"] = stats.stop_rate;
      runs.push_back(std::move(r));
    }
    j["runs"] = std::move(runs);
    if (result->entries.size() == 2) {
      const auto a = edubayes::cat_stats(result->entries[0].result, result->entries[0].config.cat);
      const auto b = edubayes::cat_stats(result->entries[1].result, result->entries[1].config.cat);
      j["mean_items_difference"] = a.mean_items - b.mean_items;
    }
    *out = dup_string(j.dump(2) + "\n");
  });
}

int eb_cat_summary_text(const eb_cat_result* result, char** out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    std::string text;
    for (const auto& entry : result->entries)
      text += edubayes::cat_summary_text(entry.result, entry.selector, entry.config);
    if (result->entries.size() == 2) {
      const auto a = edubayes::cat_stats(result->entries[0].result, result->entries[0].config.cat);
      const auto b = edubayes::cat_stats(result->entries[1].result, result->entries[1].config.cat);
      char buf[96];
      std::snprintf(buf, sizeof buf, "Mean items, %s minus %s: %+.2f\n",
                    result->entries[0].selector.c_str(), result->entries[1].selector.c_str(),
                    a.mean_items - b.mean_items);
      text += buf;
    }
    *out = dup_string(text);
  });
}

int eb_cat_stats(const eb_cat_result* result, const char* selector, double* mean_items,
                 double* mean_abs_error, double* coverage_3sd) {
  return guarded([&] {
    need(result, "result");
    need(selector, "selector");
    for (const auto& entry : result->entries) {
      if (entry.selector != selector) continue;
      const auto stats = edubayes::cat_stats(entry.result, entry.config.cat);
      if (mean_items) *mean_items = stats.mean_items;
      if (mean_abs_error) *mean_abs_error = stats.mean_abs_error;
      if (coverage_3sd) *coverage_3sd = stats.coverage_3sd;
      return;
    }
    edubayes::throw_invalid("result holds no '" + std::string(selector) + "' run");
  });
}

/* online difficulty calibration */

int eb_rasch_online(const eb_responses* data, const eb_pool* old_items, const char* priors_json,
                    const char* config_json, char** out_json) {
  return guarded([&] {
    need(data, "responses");
    need(out_json, "out_json");
    const auto config = parse_rasch_config(config_json);
    const std::vector<edubayes::RaschItem> old = old_items ? old_items->v
                                                           : std::vector<edubayes::RaschItem>{};

    // New columns, in data order; priors default to a diffuse normal.
    std::vector<std::string> new_ids;
    for (const auto& id : data->v.tasks()) {
      bool is_old = false;
      for (const auto& item : old)
        if (item.id == id) is_old = true;
      if (!is_old) new_ids.push_back(id);
    }
    std::vector<edubayes::BetaPrior> priors(new_ids.size(), edubayes::BetaPrior{0.0, 4.0});
    if (priors_json) {
      json j = json::parse(priors_json, nullptr, false);
      edubayes::throw_parse_if(j.is_discarded() || !j.is_array(),
                               "priors must be a JSON array of {id, mean, variance}");
      for (const auto& entry : j) {
        edubayes::throw_parse_if(!entry.contains("id") || !entry["id"].is_string(),
                                 "each prior needs an item id");
        const std::string id = entry["id"].get<std::string>();
        bool found = false;
        for (std::size_t k = 0; k < new_ids.size(); ++k) {
          if (new_ids[k] != id) continue;
          if (entry.contains("mean")) priors[k].mean = entry["mean"].get<double>();
          if (entry.contains("variance")) priors[k].variance = entry["variance"].get<double>();
          found = true;
        }
        edubayes::require(found, "prior names '" + id + "', which is not an uncalibrated column");
      }
    }

    const auto result = edubayes::calibrate_rasch_online(data->v, old, priors, config);
    json j;
    j["format"] = "edubayes-rasch-online";
    j["version"] = 1;
    json items = json::array();
    for (const auto& item : result.items) {
      json entry;
      entry["id"] = item.id;
      entry["mean"] = item.mean;
      entry["sd"] = item.sd;
      entry["acceptance"] = item.acceptance;
      entry["acceptance_warning"] = item.acceptance_warning;
      items.push_back(std::move(entry));
    }
    j["items"] = std::move(items);
    *out_json = dup_string(j.dump(2) + "\n");
  });
}

/* utility */

int eb_file_checksum(const char* path, char** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = dup_string(edubayes::file_checksum(path));
  });
}

}  // extern "C"

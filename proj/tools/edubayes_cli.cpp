// edubayes command-line front end. Every artifact-producing command writes a
// manifest recording arguments, seeds, and checksums of all files it read and
// wrote, so any run can be reproduced byte for byte from its manifest.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edubayes.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void fail(int status, const std::string& context) {
  const std::string detail = eb_last_error();
  throw CliError{status == EB_ERR_INTERNAL ? 2 : 1,
                 context + (detail.empty() ? "" : ": " + detail)};
}

void check(int status, const std::string& context) {
  if (status != EB_OK) fail(status, context);
}

// Owning wrapper for strings returned by the library.
struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { eb_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

template <typename Handle, void (*Free)(Handle*)>
struct Owned {
  Handle* ptr = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(ptr); }
  Handle** slot() { return &ptr; }
  Handle* get() const { return ptr; }
};

using ModelHandle = Owned<eb_model, eb_model_free>;
using TruthHandle = Owned<eb_truth, eb_truth_free>;
using ResponsesHandle = Owned<eb_responses, eb_responses_free>;
using RunHandle = Owned<eb_run, eb_run_free>;
using ScoreHandle = Owned<eb_score_report, eb_score_report_free>;
using PoolHandle = Owned<eb_pool, eb_pool_free>;
using CatHandle = Owned<eb_cat_result, eb_cat_result_free>;

// Tracks what a command reads and writes; serialized at the end of the run.
struct Manifest {
  std::string command;
  std::vector<std::string> arguments;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, checksum
  std::vector<std::pair<std::string, std::string>> outputs;

  void add_input(const std::string& path) { inputs.emplace_back(path, checksum(path)); }
  void add_output(const std::string& path) { outputs.emplace_back(path, checksum(path)); }

  static std::string checksum(const std::string& path) {
    OwnedString sum;
    check(eb_file_checksum(path.c_str(), &sum.ptr), "checksumming '" + path + "'");
    return sum.str();
  }

  void write(const std::string& path) const {
    json j;
    j["format"] = "edubayes-manifest";
    j["version"] = 1;
    j["command"] = command;
    j["arguments"] = arguments;
    j["seed"] = seed;
    json in = json::array();
    for (const auto& [p, sum] : inputs) in.push_back({{"path", p}, {"checksum", sum}});
    json out = json::array();
    for (const auto& [p, sum] : outputs) out.push_back({{"path", p}, {"checksum", sum}});
    j["inputs"] = std::move(in);
    j["outputs"] = std::move(out);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw CliError{1, "cannot write '" + path + "'"};
    f << j.dump(2) << '\n';
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError{1, "cannot write '" + path + "'"};
  f << content;
  if (!f.good()) throw CliError{1, "failed writing '" + path + "'"};
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError{1, "cannot create output directory '" + dir + "'"};
}

// Model from --model when given, the built-in assessment otherwise.
void load_model_arg(const std::string& model_path, ModelHandle& model, Manifest& manifest) {
  if (model_path.empty()) {
    check(eb_model_builtin(model.slot()), "building the default model");
  } else {
    check(eb_model_load(model_path.c_str(), model.slot()), "loading model '" + model_path + "'");
    manifest.add_input(model_path);
  }
}

std::string gibbs_config_json(int chains, int burn_in, int retained, int thin,
                              std::uint64_t seed) {
  json j;
  j["chains"] = chains;
  j["burn_in"] = burn_in;
  j["retained"] = retained;
  j["thin"] = thin;
  j["seed"] = seed;
  return j.dump();
}

void apply_subsets(ResponsesHandle& data, int examinee_subset, int task_subset,
                   const std::string& exclude_tasks) {
  if (task_subset > 0) {
    int32_t tasks = 0;
    check(eb_responses_shape(data.get(), nullptr, &tasks), "inspecting responses");
    if (task_subset > tasks) throw CliError{1, "task subset exceeds the number of columns"};
    std::string ids;
    for (int32_t t = 0; t < task_subset; ++t) {
      OwnedString name;
      check(eb_responses_task_name(data.get(), t, &name.ptr), "inspecting responses");
      if (t) ids += ',';
      ids += name.str();
    }
    ResponsesHandle subset;
    check(eb_responses_select_tasks(data.get(), ids.c_str(), subset.slot()),
          "selecting task subset");
    std::swap(data.ptr, subset.ptr);
  }
  if (!exclude_tasks.empty()) {
    ResponsesHandle subset;
    check(eb_responses_drop_tasks(data.get(), exclude_tasks.c_str(), subset.slot()),
          "excluding tasks");
    std::swap(data.ptr, subset.ptr);
  }
  if (examinee_subset > 0) {
    ResponsesHandle subset;
    check(eb_responses_head(data.get(), examinee_subset, subset.slot()),
          "selecting examinee subset");
    std::swap(data.ptr, subset.ptr);
  }
}

// Prints R-hat warnings to stderr; the run still succeeds.
void warn_on_rhat(const eb_run* run) {
  int32_t n = 0;
  check(eb_run_num_scalars(run, &n), "inspecting run");
  for (int32_t s = 0; s < n; ++s) {
    OwnedString name;
    check(eb_run_scalar_name(run, s, &name.ptr), "inspecting run");
    double stats[6];
    check(eb_run_scalar(run, name.ptr, stats), "inspecting run");
    if (stats[5] > 1.1)
      std::cerr << "warning: R-hat " << stats[5] << " for " << name.str()
                << " suggests the chains have not converged\n";
  }
}

struct CommonArgs {
  std::string model_path;
  std::string out_dir;
  std::string format = "text";
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool model_flag = true) {
  if (model_flag)
    cmd->add_option("--model", args.model_path, "Model file (defaults to the built-in assessment)");
  cmd->add_option("--out", args.out_dir, "Output directory for artifacts and the manifest");
  cmd->add_option("--format", args.format, "Stdout format")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--seed", args.seed, "Random seed");
}

int cmd_generate(const CommonArgs& common, const std::string& truth_path, bool sample_truth,
                 std::optional<std::uint64_t> truth_seed, int examinees, Manifest manifest) {
  if (common.out_dir.empty()) throw CliError{1, "generate requires --out"};
  if (truth_path.empty() == !sample_truth)
    throw CliError{1, "pass exactly one of --truth or --sample-truth"};
  ensure_out_dir(common.out_dir);

  ModelHandle model;
  load_model_arg(common.model_path, model, manifest);

  TruthHandle truth;
  if (sample_truth) {
    check(eb_truth_sample(model.get(), truth_seed.value_or(common.seed), truth.slot()),
          "sampling generating parameters");
  } else {
    check(eb_truth_load(truth_path.c_str(), model.get(), truth.slot()),
          "loading truth '" + truth_path + "'");
    manifest.add_input(truth_path);
  }

  ResponsesHandle data;
  TruthHandle realized;
  check(eb_generate(model.get(), truth.get(), examinees, common.seed, data.slot(),
                    realized.slot()),
        "generating responses");

  const std::string model_out = out_path(common.out_dir, "model.json");
  const std::string truth_out = out_path(common.out_dir, "truth.json");
  const std::string responses_out = out_path(common.out_dir, "responses.csv");
  check(eb_model_save(model.get(), model_out.c_str()), "writing '" + model_out + "'");
  check(eb_truth_save(model.get(), realized.get(), truth_out.c_str()),
        "writing '" + truth_out + "'");
  check(eb_responses_save(data.get(), responses_out.c_str()),
        "writing '" + responses_out + "'");
  manifest.add_output(model_out);
  manifest.add_output(truth_out);
  manifest.add_output(responses_out);
  manifest.write(out_path(common.out_dir, "manifest.json"));

  int32_t rows = 0, cols = 0;
  check(eb_responses_shape(data.get(), &rows, &cols), "inspecting responses");
  if (common.format == "json") {
    json j;
    j["examinees"] = rows;
    j["tasks"] = cols;
    j["responses"] = responses_out;
    j["truth"] = truth_out;
    j["model"] = model_out;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "wrote " << rows << " x " << cols << " responses to " << responses_out << '\n';
  }
  return 0;
}

int cmd_calibrate(const CommonArgs& common, const std::string& responses_path, int chains,
                  int burn_in, int retained, int thin, int examinee_subset, int task_subset,
                  const std::string& exclude_tasks, bool save_draws, Manifest manifest) {
  if (common.out_dir.empty()) throw CliError{1, "calibrate requires --out"};
  ensure_out_dir(common.out_dir);

  ModelHandle model;
  load_model_arg(common.model_path, model, manifest);
  ResponsesHandle data;
  check(eb_responses_load(responses_path.c_str(), data.slot()),
        "loading responses '" + responses_path + "'");
  manifest.add_input(responses_path);
  apply_subsets(data, examinee_subset, task_subset, exclude_tasks);

  RunHandle run;
  const std::string config = gibbs_config_json(chains, burn_in, retained, thin, common.seed);
  check(eb_calibrate(model.get(), data.get(), config.c_str(), run.slot()), "calibrating");
  warn_on_rhat(run.get());

  const std::string run_out = out_path(common.out_dir, "run.json");
  const std::string report_out = out_path(common.out_dir, "report.txt");
  check(eb_run_save(run.get(), run_out.c_str()), "writing '" + run_out + "'");
  OwnedString report;
  check(eb_run_report_text(run.get(), &report.ptr), "rendering report");
  write_file(report_out, report.str());
  manifest.add_output(run_out);
  manifest.add_output(report_out);
  if (save_draws) {
    OwnedString draws;
    check(eb_run_draws_csv(run.get(), &draws.ptr), "rendering draws");
    const std::string draws_out = out_path(common.out_dir, "draws.csv");
    write_file(draws_out, draws.str());
    manifest.add_output(draws_out);
  }
  manifest.write(out_path(common.out_dir, "manifest.json"));

  if (common.format == "json") {
    OwnedString run_json;
    check(eb_run_to_json(run.get(), &run_json.ptr), "rendering run");
    std::cout << run_json.str();
  } else {
    std::cout << report.str();
  }
  return 0;
}

int cmd_score(const CommonArgs& common, const std::string& run_path,
              const std::string& truth_path, const std::string& observations,
              const std::string& responses_path, const std::string& examinee,
              Manifest manifest) {
  if (!run_path.empty() && !truth_path.empty())
    throw CliError{1, "pass at most one of --run and --truth"};
  const bool have_obs = !observations.empty();
  const bool have_matrix = !responses_path.empty() || !examinee.empty();
  if (have_obs == have_matrix)
    throw CliError{1, "pass either --obs or both --responses and --examinee"};
  if (have_matrix && (responses_path.empty() || examinee.empty()))
    throw CliError{1, "--responses and --examinee go together"};

  ModelHandle model;
  load_model_arg(common.model_path, model, manifest);
  RunHandle run;
  if (!run_path.empty()) {
    check(eb_run_load(run_path.c_str(), run.slot()), "loading run '" + run_path + "'");
    manifest.add_input(run_path);
  }
  TruthHandle truth;
  if (!truth_path.empty()) {
    check(eb_truth_load(truth_path.c_str(), model.get(), truth.slot()),
          "loading truth '" + truth_path + "'");
    manifest.add_input(truth_path);
  }

  ScoreHandle score;
  if (have_obs) {
    if (truth.get())
      check(eb_score_with_truth(model.get(), truth.get(), observations.c_str(), score.slot()),
            "scoring");
    else
      check(eb_score(model.get(), run.get(), observations.c_str(), score.slot()), "scoring");
  } else {
    if (truth.get()) throw CliError{1, "--truth scoring takes --obs"};
    ResponsesHandle data;
    check(eb_responses_load(responses_path.c_str(), data.slot()),
          "loading responses '" + responses_path + "'");
    manifest.add_input(responses_path);
    check(eb_score_matrix(model.get(), run.get(), data.get(), examinee.c_str(), score.slot()),
          "scoring examinee '" + examinee + "'");
  }

  OwnedString text;
  check(eb_score_report_text(score.get(), &text.ptr), "rendering profile");
  OwnedString as_json;
  check(eb_score_report_json(score.get(), &as_json.ptr), "rendering profile");

  if (!common.out_dir.empty()) {
    ensure_out_dir(common.out_dir);
    const std::string score_out = out_path(common.out_dir, "score.json");
    write_file(score_out, as_json.str());
    manifest.add_output(score_out);
    manifest.write(out_path(common.out_dir, "manifest.json"));
  }
  std::cout << (common.format == "json" ? as_json.str() : text.str());
  return 0;
}

int cmd_calibrate_new(const CommonArgs& common, const std::string& run_path,
                      const std::string& responses_path, const std::string& mode, int chains,
                      int burn_in, int retained, int thin, Manifest manifest) {
  if (common.out_dir.empty()) throw CliError{1, "calibrate-new requires --out"};
  ensure_out_dir(common.out_dir);

  ModelHandle model;
  load_model_arg(common.model_path, model, manifest);
  RunHandle startup;
  check(eb_run_load(run_path.c_str(), startup.slot()), "loading run '" + run_path + "'");
  manifest.add_input(run_path);
  ResponsesHandle data;
  check(eb_responses_load(responses_path.c_str(), data.slot()),
        "loading responses '" + responses_path + "'");
  manifest.add_input(responses_path);

  const std::string config = gibbs_config_json(chains, burn_in, retained, thin, common.seed);
  RunHandle full_run, eb_run_handle;
  if (mode == "full" || mode == "both") {
    check(eb_calibrate_new(model.get(), startup.get(), data.get(), "full", config.c_str(),
                           full_run.slot()),
          "full-Bayes online calibration");
    warn_on_rhat(full_run.get());
    const std::string p = out_path(common.out_dir, "run_full.json");
    check(eb_run_save(full_run.get(), p.c_str()), "writing '" + p + "'");
    manifest.add_output(p);
  }
  if (mode == "eb" || mode == "both") {
    check(eb_calibrate_new(model.get(), startup.get(), data.get(), "eb", config.c_str(),
                           eb_run_handle.slot()),
          "empirical-Bayes online calibration");
    warn_on_rhat(eb_run_handle.get());
    const std::string p = out_path(common.out_dir, "run_eb.json");
    check(eb_run_save(eb_run_handle.get(), p.c_str()), "writing '" + p + "'");
    manifest.add_output(p);
  }

  std::string text;
  json stdout_json;
  if (full_run.get()) {
    OwnedString r;
    check(eb_run_report_text(full_run.get(), &r.ptr), "rendering report");
    text += r.str() + "\n";
    OwnedString rj;
    check(eb_run_to_json(full_run.get(), &rj.ptr), "rendering run");
    stdout_json["full"] = json::parse(rj.str());
  }
  if (eb_run_handle.get()) {
    OwnedString r;
    check(eb_run_report_text(eb_run_handle.get(), &r.ptr), "rendering report");
    text += r.str() + "\n";
    OwnedString rj;
    check(eb_run_to_json(eb_run_handle.get(), &rj.ptr), "rendering run");
    stdout_json["eb"] = json::parse(rj.str());
  }
  if (mode == "both") {
    OwnedString cmp;
    check(eb_comparison_report_text(full_run.get(), eb_run_handle.get(), &cmp.ptr),
          "rendering comparison");
    text += cmp.str();
    const std::string p = out_path(common.out_dir, "comparison.txt");
    write_file(p, cmp.str());
    manifest.add_output(p);
  }
  const std::string report_out = out_path(common.out_dir, "report.txt");
  write_file(report_out, text);
  manifest.add_output(report_out);
  manifest.write(out_path(common.out_dir, "manifest.json"));

  if (common.format == "json") {
    stdout_json["format"] = "edubayes-online";
    stdout_json["version"] = 1;
    std::cout << stdout_json.dump(2) << '\n';
  } else {
    std::cout << text;
  }
  return 0;
}

int cmd_cat_sim(const CommonArgs& common, const std::string& pool_path, int pool_size,
                double pool_min, double pool_max, std::optional<std::uint64_t> pool_seed,
                int sessions, const std::string& selector, double stop_sd, int max_items,
                double theta_mean, double theta_sd, std::optional<double> theta_fixed,
                Manifest manifest) {
  if (common.out_dir.empty()) throw CliError{1, "cat-sim requires --out"};
  if (pool_path.empty() == (pool_size <= 0))
    throw CliError{1, "pass exactly one of --pool or --pool-size"};
  ensure_out_dir(common.out_dir);

  PoolHandle pool;
  if (!pool_path.empty()) {
    check(eb_pool_load(pool_path.c_str(), pool.slot()), "loading pool '" + pool_path + "'");
    manifest.add_input(pool_path);
  } else {
    check(eb_pool_synthetic(pool_size, pool_min, pool_max, pool_seed.value_or(common.seed),
                            pool.slot()),
          "building synthetic pool");
  }

  json config;
  config["sessions"] = sessions;
  config["selector"] = selector;
  config["stop_sd"] = stop_sd;
  config["max_items"] = max_items;
  config["theta_mean"] = theta_mean;
  config["theta_sd"] = theta_sd;
  if (theta_fixed) config["theta_fixed"] = *theta_fixed;
  config["seed"] = common.seed;
  const std::string config_text = config.dump();

  CatHandle result;
  check(eb_cat_simulate(pool.get(), config_text.c_str(), result.slot()), "simulating sessions");

  OwnedString traces;
  check(eb_cat_traces_csv(result.get(), &traces.ptr), "rendering traces");
  OwnedString summary_json;
  check(eb_cat_summary_json(result.get(), &summary_json.ptr), "rendering summary");
  OwnedString summary_text;
  check(eb_cat_summary_text(result.get(), &summary_text.ptr), "rendering summary");

  const std::string traces_out = out_path(common.out_dir, "traces.csv");
  const std::string summary_out = out_path(common.out_dir, "summary.json");
  write_file(traces_out, traces.str());
  write_file(summary_out, summary_json.str());
  manifest.add_output(traces_out);
  manifest.add_output(summary_out);
  if (pool_path.empty()) {
    const std::string pool_out = out_path(common.out_dir, "pool.csv");
    check(eb_pool_save(pool.get(), pool_out.c_str()), "writing '" + pool_out + "'");
    manifest.add_output(pool_out);
  }
  manifest.write(out_path(common.out_dir, "manifest.json"));

  std::cout << (common.format == "json" ? summary_json.str() : summary_text.str());
  return 0;
}

int cmd_report(const CommonArgs& common, const std::string& run_path, Manifest manifest) {
  ModelHandle unused;  // report does not need the model
  (void)unused;
  RunHandle run;
  check(eb_run_load(run_path.c_str(), run.slot()), "loading run '" + run_path + "'");
  manifest.add_input(run_path);

  OwnedString text;
  check(eb_run_report_text(run.get(), &text.ptr), "rendering report");
  OwnedString as_json;
  check(eb_run_to_json(run.get(), &as_json.ptr), "rendering run");

  if (!common.out_dir.empty()) {
    ensure_out_dir(common.out_dir);
    const std::string report_out = out_path(common.out_dir, "report.txt");
    write_file(report_out, text.str());
    manifest.add_output(report_out);
    manifest.write(out_path(common.out_dir, "manifest.json"));
  }
  std::cout << (common.format == "json" ? as_json.str() : text.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes-net assessment toolkit: synthetic data, Gibbs calibration, skill scoring, "
               "online task calibration, and adaptive-testing simulation"};
  app.require_subcommand(1);

  std::vector<std::string> raw_args(argv + 1, argv + argc);

  // generate
  CommonArgs gen_common;
  std::string gen_truth;
  bool gen_sample_truth = false;
  std::optional<std::uint64_t> gen_truth_seed;
  int gen_examinees = 0;
  auto* gen = app.add_subcommand("generate", "Simulate a synthetic response matrix");
  add_common(gen, gen_common);
  gen->add_option("--truth", gen_truth, "Generating-parameter file");
  gen->add_flag("--sample-truth", gen_sample_truth, "Draw generating parameters from the priors");
  gen->add_option("--truth-seed", gen_truth_seed, "Seed for --sample-truth (defaults to --seed)");
  gen->add_option("-n,--examinees", gen_examinees, "Number of examinees")->required();

  // calibrate
  CommonArgs cal_common;
  std::string cal_responses;
  int cal_chains = 3, cal_burn_in = 2000, cal_retained = 5000, cal_thin = 1;
  int cal_examinee_subset = 0, cal_task_subset = 0;
  std::string cal_exclude;
  bool cal_draws = false;
  auto* cal = app.add_subcommand("calibrate", "Estimate population and task parameters");
  add_common(cal, cal_common);
  cal->add_option("--responses", cal_responses, "Response CSV")->required();
  cal->add_option("--chains", cal_chains, "Parallel chains");
  cal->add_option("--burn-in", cal_burn_in, "Discarded sweeps per chain");
  cal->add_option("--retained", cal_retained, "Retained draws per chain");
  cal->add_option("--thin", cal_thin, "Keep every k-th sweep");
  cal->add_option("--examinee-subset", cal_examinee_subset, "Use only the first N examinees");
  cal->add_option("--task-subset", cal_task_subset, "Use only the first N task columns");
  cal->add_option("--exclude-tasks", cal_exclude, "Comma-separated task columns to drop");
  cal->add_flag("--draws", cal_draws, "Also write the retained draws as CSV");

  // score
  CommonArgs score_common;
  std::string score_run, score_truth, score_obs, score_responses, score_examinee;
  auto* score = app.add_subcommand("score", "Skill profile for one examinee");
  add_common(score, score_common);
  score->add_option("--run", score_run, "Calibration run supplying parameter estimates");
  score->add_option("--truth", score_truth, "Score under generating parameters instead");
  score->add_option("--obs", score_obs, "Inline observations, e.g. item01=1,item03=0");
  score->add_option("--responses", score_responses, "Response CSV to take one row from");
  score->add_option("--examinee", score_examinee, "Row id within --responses");

  // calibrate-new
  CommonArgs new_common;
  std::string new_run, new_responses, new_mode = "both";
  int new_chains = 3, new_burn_in = 2000, new_retained = 5000, new_thin = 1;
  auto* cal_new = app.add_subcommand("calibrate-new", "Calibrate uncalibrated tasks online");
  add_common(cal_new, new_common);
  cal_new->add_option("--run", new_run, "Startup calibration run")->required();
  cal_new->add_option("--responses", new_responses, "New response CSV")->required();
  cal_new->add_option("--mode", new_mode, "full, eb, or both")
      ->check(CLI::IsMember({"full", "eb", "both"}));
  cal_new->add_option("--chains", new_chains, "Parallel chains");
  cal_new->add_option("--burn-in", new_burn_in, "Discarded sweeps per chain");
  cal_new->add_option("--retained", new_retained, "Retained draws per chain");
  cal_new->add_option("--thin", new_thin, "Keep every k-th sweep");

  // cat-sim
  CommonArgs cat_common;
  std::string cat_pool, cat_selector = "adaptive";
  int cat_pool_size = 0, cat_sessions = 500, cat_max_items = 30;
  double cat_pool_min = -3.0, cat_pool_max = 3.0, cat_stop_sd = 0.35;
  double cat_theta_mean = 0.0, cat_theta_sd = 1.0;
  std::optional<std::uint64_t> cat_pool_seed;
  std::optional<double> cat_theta_fixed;
  auto* cat = app.add_subcommand("cat-sim", "Simulate adaptive testing sessions");
  add_common(cat, cat_common, /*model_flag=*/false);
  cat->add_option("--pool", cat_pool, "Item pool file (CSV or JSON)");
  cat->add_option("--pool-size", cat_pool_size, "Generate a synthetic pool of this size");
  cat->add_option("--pool-min", cat_pool_min, "Synthetic pool difficulty lower bound");
  cat->add_option("--pool-max", cat_pool_max, "Synthetic pool difficulty upper bound");
  cat->add_option("--pool-seed", cat_pool_seed, "Synthetic pool seed (defaults to --seed)");
  cat->add_option("--sessions", cat_sessions, "Number of simulated examinees");
  cat->add_option("--selector", cat_selector, "adaptive, random, or both")
      ->check(CLI::IsMember({"adaptive", "random", "both"}));
  cat->add_option("--stop-sd", cat_stop_sd, "Stop once the posterior SD reaches this");
  cat->add_option("--max-items", cat_max_items, "Hard cap on items per session");
  cat->add_option("--theta-mean", cat_theta_mean, "True proficiency mean");
  cat->add_option("--theta-sd", cat_theta_sd, "True proficiency SD");
  cat->add_option("--theta-fixed", cat_theta_fixed, "Pin every session's true proficiency");

  // report
  CommonArgs report_common;
  std::string report_run;
  auto* report = app.add_subcommand("report", "Render a saved calibration run");
  add_common(report, report_common, /*model_flag=*/false);
  report->add_option("--run", report_run, "Calibration run file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const auto manifest_for = [&](const std::string& command, std::uint64_t seed) {
    Manifest m;
    m.command = command;
    m.arguments = raw_args;
    m.seed = seed;
    return m;
  };

  try {
    if (gen->parsed())
      return cmd_generate(gen_common, gen_truth, gen_sample_truth, gen_truth_seed, gen_examinees,
                          manifest_for("generate", gen_common.seed));
    if (cal->parsed())
      return cmd_calibrate(cal_common, cal_responses, cal_chains, cal_burn_in, cal_retained,
                           cal_thin, cal_examinee_subset, cal_task_subset, cal_exclude, cal_draws,
                           manifest_for("calibrate", cal_common.seed));
    if (score->parsed())
      return cmd_score(score_common, score_run, score_truth, score_obs, score_responses,
                       score_examinee, manifest_for("score", score_common.seed));
    if (cal_new->parsed())
      return cmd_calibrate_new(new_common, new_run, new_responses, new_mode, new_chains,
                               new_burn_in, new_retained, new_thin,
                               manifest_for("calibrate-new", new_common.seed));
    if (cat->parsed())
      return cmd_cat_sim(cat_common, cat_pool, cat_pool_size, cat_pool_min, cat_pool_max,
                         cat_pool_seed, cat_sessions, cat_selector, cat_stop_sd, cat_max_items,
                         cat_theta_mean, cat_theta_sd, cat_theta_fixed,
                         manifest_for("cat-sim", cat_common.seed));
    if (report->parsed())
      return cmd_report(report_common, report_run, manifest_for("report", report_common.seed));
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

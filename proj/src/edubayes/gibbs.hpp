#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edubayes/evidence_model.hpp"
#include "edubayes/response_matrix.hpp"
#include "edubayes/rng.hpp"
#include "edubayes/stats.hpp"

namespace edubayes {

// Hyperparameters for one calibration: per-slot Beta/Dirichlet vectors plus
// per-task Beta pairs for the misclassification probabilities.
struct PriorSet {
  std::vector<SlotPrior> lambda;  // aligned with graph slots
  std::vector<BetaPair> task_fp;  // aligned with model tasks
  std::vector<BetaPair> task_tp;

  static PriorSet from_model(const AssessmentModel& model);
  void validate(const AssessmentModel& model) const;
};

struct GibbsConfig {
  int chains = 3;
  int burn_in = 2000;
  int retained = 5000;
  int thin = 1;
  std::uint64_t seed = 0;

  void validate() const;  // chains >= 2, burn_in >= 0, retained >= 1, thin >= 1
};

// Current imputation of one chain.
struct ChainState {
  std::vector<std::size_t> theta;  // joint-configuration index per examinee
  Lambda lambda;
  std::vector<PiPair> pi;  // aligned with the run's task bindings
  int iteration = 0;
};

// Identity of one scalar parameter tracked by a run.
struct ScalarRef {
  enum class Kind { Lambda, TaskFp, TaskTp };
  Kind kind = Kind::Lambda;
  std::string family;  // lambda slots
  int z = 0;
  int component = 0;
  std::string task;  // misclassification parameters
};

struct CalibrationRun {
  std::string mode;  // "startup", "full", or "eb"
  GibbsConfig config;
  std::vector<std::string> names;      // canonical scalar order
  std::vector<ScalarRef> refs;         // aligned with names
  std::vector<BetaPair> base_priors;   // per scalar, the n_hat reference point
  std::vector<std::vector<std::vector<double>>> draws;  // [chain][scalar][draw]
  std::vector<ParameterSummary> summaries;  // per scalar, rhat filled in

  int scalar_index(const std::string& name) const;  // -1 when absent
};

// Precomputed structure shared by every sweep over one (model, data) pair.
// Tasks are the model tasks present in the data, in model order; all per-task
// vectors in this module align with that list.
struct GibbsWorkspace {
  const AssessmentModel* model = nullptr;
  const ResponseMatrix* data = nullptr;
  JointTable configs;

  struct TaskBinding {
    int model_task = -1;
    int data_col = -1;
    int em = -1;
  };
  std::vector<TaskBinding> tasks;
  std::vector<std::vector<std::uint8_t>> delta_em;  // [evidence model][config]

  // Configurations grouped by their delta signature across evidence models;
  // configurations in a group are likelihood-equivalent for any response set.
  std::vector<std::vector<std::uint32_t>> group_members;
  std::vector<std::vector<std::uint8_t>> group_delta;  // [group][evidence model]

  // Per (config, stochastic variable): which slot governs it and its state.
  struct SlotState {
    std::int32_t slot = -1;
    std::int32_t state = 0;
  };
  std::vector<SlotState> config_slots;  // row-major config x stochastic variable
  int num_stochastic = 0;

  static GibbsWorkspace build(const AssessmentModel& model, const ResponseMatrix& data);
};

// Conjugate conditional hyperparameters given the imputed configurations.
// These are exactly the distributions draw_lambda / draw_pi sample from.
std::vector<SlotPrior> lambda_conditional(const GibbsWorkspace& ws,
                                          std::span<const std::size_t> theta,
                                          const PriorSet& priors);
void pi_conditional(const GibbsWorkspace& ws, std::span<const std::size_t> theta,
                    const PriorSet& priors, std::vector<BetaPair>& fp,
                    std::vector<BetaPair>& tp);

Lambda draw_lambda(const GibbsWorkspace& ws, std::span<const std::size_t> theta,
                   const PriorSet& priors, Rng& rng);
std::vector<PiPair> draw_pi(const GibbsWorkspace& ws, std::span<const std::size_t> theta,
                            const PriorSet& priors, Rng& rng);

// Exact categorical draw of each examinee's configuration given lambda and
// the per-task misclassification pairs (aligned with ws.tasks).
void draw_theta(const GibbsWorkspace& ws, const Lambda& lambda,
                const std::vector<PiPair>& pi, Rng& rng, std::span<std::size_t> theta_out);

// Startup calibration: systematic-scan sweep theta, pi, lambda over all
// chains; retains post-burn-in draws; summaries use `priors` as the n_hat
// reference.
CalibrationRun run_gibbs(const AssessmentModel& model, const ResponseMatrix& data,
                         const PriorSet& priors, const GibbsConfig& config);

// Online calibration, full-Bayes flavor: startup posteriors become priors via
// moment matching, then the full sweep runs on the new data. Old and new
// parameters both move; n_hat stays anchored to the model's base priors so
// effective sample sizes accumulate across runs.
CalibrationRun calibrate_new_full(const AssessmentModel& model, const CalibrationRun& startup,
                                  const ResponseMatrix& new_data, const GibbsConfig& config);

// Online calibration, empirical-Bayes flavor: lambda and previously
// calibrated pi are pinned at their startup posterior means; the sweep
// alternates theta and the new tasks' pi only. Summaries cover new tasks only.
CalibrationRun calibrate_new_eb(const AssessmentModel& model, const Lambda& lambda_hat,
                                const std::vector<std::optional<PiPair>>& pi_hat,
                                const ResponseMatrix& new_data, const GibbsConfig& config);
CalibrationRun calibrate_new_eb(const AssessmentModel& model, const CalibrationRun& startup,
                                const ResponseMatrix& new_data, const GibbsConfig& config);

// Point estimates recovered from a run's summaries.
Lambda posterior_mean_lambda(const AssessmentModel& model, const CalibrationRun& run);
// One entry per model task; nullopt where the run carries no summary.
std::vector<std::optional<PiPair>> posterior_mean_pi(const AssessmentModel& model,
                                                     const CalibrationRun& run);

// The prior set calibrate_new_full runs under (exposed for inspection):
// moment-matched slot and old-task priors, evidence-model priors elsewhere.
PriorSet priors_from_run(const AssessmentModel& model, const CalibrationRun& startup);

}  // namespace edubayes

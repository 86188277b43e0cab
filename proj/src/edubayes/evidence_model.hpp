#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edubayes/skill_graph.hpp"
#include "edubayes/stats.hpp"

namespace edubayes {

// Which reporting skills a class of tasks requires (one 0/1 flag per skill,
// aligned with SkillGraph::reporting_skills). At least one skill required.
struct QMatrixRow {
  std::vector<int> skills_required;
};

// A class of exchangeable tasks: shared skill requirements and shared priors
// for the misclassification probabilities of any task in the class.
struct EvidenceModelSpec {
  std::string id;
  QMatrixRow skills_required;
  BetaPair prior_false_pos;  // P(X=1 | missing a required skill)
  BetaPair prior_true_pos;   // P(X=1 | has every required skill)
};

struct PiPair {
  double fp = 0.0;
  double tp = 0.0;
};

struct Task {
  std::string id;
  std::string evidence_model;
  std::optional<PiPair> pi;  // unset until the task is calibrated
  std::map<std::string, std::string> attributes;
};

// delta: 1 iff the configuration has every skill the row requires.
int skill_conjunction(std::span<const int> reporting_states, const QMatrixRow& row);

// delta per canonical joint configuration, for fast repeated lookups.
std::vector<std::uint8_t> delta_table(const SkillGraph& graph, const JointTable& configs,
                                      const QMatrixRow& row);

// Per-slot prior hyperparameters, aligned with SkillGraph::slots():
// {a, b} for a Bernoulli slot, `dim` Dirichlet concentrations otherwise.
using SlotPrior = std::vector<double>;

// A complete assessment definition: structure, population priors, evidence
// models, and the task list.
struct AssessmentModel {
  SkillGraph graph;
  std::vector<SlotPrior> lambda_priors;
  std::vector<EvidenceModelSpec> evidence_models;
  std::vector<Task> tasks;

  int em_index(const std::string& id) const;    // throws on unknown id
  int task_index(const std::string& id) const;  // throws on unknown id
  const EvidenceModelSpec& em_for_task(std::size_t task) const;

  // Point-estimate lambda at the prior means; handy for scoring demos and
  // for chain initialization.
  Lambda prior_mean_lambda() const;

  void validate() const;
};

// The 15-item study bundle: Method B graph, default priors, six evidence
// models, tasks item01..item15 (uncalibrated).
AssessmentModel builtin_fraction_assessment();

}  // namespace edubayes

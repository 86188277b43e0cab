#pragma once

#include <string>
#include <vector>

#include "edubayes/evidence_model.hpp"
#include "edubayes/skill_graph.hpp"

namespace edubayes {

// One examinee's distribution over joint skill configurations. Updates return
// new states; an existing BeliefState is never mutated.
struct BeliefState {
  const SkillGraph* graph = nullptr;
  JointTable configs;  // shared canonical enumeration
  std::vector<double> probs;
};

struct Observation {
  std::string task;
  int value = 0;  // 0 or 1
};

BeliefState init_belief(const SkillGraph& graph, const Lambda& lambda);

// Multiplies in the misclassification likelihood of one response and
// renormalizes. Errors if every configuration is ruled out.
BeliefState absorb(const BeliefState& belief, const QMatrixRow& row, const PiPair& pi, int value);

std::vector<double> marginal(const BeliefState& belief, const std::string& variable);

struct SkillScore {
  std::string skill;
  double prior = 0.0;
  double posterior = 0.0;
};

struct ScoreReport {
  std::vector<SkillScore> skills;
};

// Absorbs the listed responses in order and reports prior and posterior
// P(skill = 1) for each reporting skill. Tasks referenced by the observations
// must be calibrated.
ScoreReport score_examinee(const AssessmentModel& model, const Lambda& lambda,
                           const std::vector<Observation>& responses);

}  // namespace edubayes

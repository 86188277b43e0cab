#include "edubayes/belief.hpp"

#include <cmath>

#include "edubayes/errors.hpp"

namespace edubayes {

namespace {
constexpr double kMinMass = 1e-300;
}

BeliefState init_belief(const SkillGraph& graph, const Lambda& lambda) {
  BeliefState b;
  b.graph = &graph;
  b.configs = enumerate_joint(graph, lambda);
  b.probs = b.configs.probs;
  b.configs.probs.clear();
  return b;
}

BeliefState absorb(const BeliefState& belief, const QMatrixRow& row, const PiPair& pi,
                   int value) {
  require(belief.graph != nullptr, "belief state not initialized");
  require(value == 0 || value == 1, "response must be 0 or 1");
  require(pi.fp >= 0.0 && pi.fp <= 1.0 && pi.tp >= 0.0 && pi.tp <= 1.0,
          "misclassification probabilities must lie in [0,1]");

  const auto delta = delta_table(*belief.graph, belief.configs, row);
  BeliefState out;
  out.graph = belief.graph;
  out.configs = belief.configs;
  out.probs.resize(belief.probs.size());

  double total = 0.0;
  for (std::size_t c = 0; c < belief.probs.size(); ++c) {
    const double p_correct = delta[c] ? pi.tp : pi.fp;
    const double like = value == 1 ? p_correct : 1.0 - p_correct;
    out.probs[c] = belief.probs[c] * like;
    total += out.probs[c];
  }
  if (!(total > kMinMass) || !std::isfinite(total))
    throw_numeric("response contradicts every skill configuration (zero posterior mass)");
  for (double& p : out.probs) p /= total;
  return out;
}

std::vector<double> marginal(const BeliefState& belief, const std::string& variable) {
  require(belief.graph != nullptr, "belief state not initialized");
  const int v = belief.graph->var_index(variable);
  const int card = belief.graph->variables()[static_cast<std::size_t>(v)].cardinality;
  std::vector<double> out(static_cast<std::size_t>(card), 0.0);
  for (std::size_t c = 0; c < belief.probs.size(); ++c)
    out[static_cast<std::size_t>(belief.configs.state(c, v))] += belief.probs[c];
  double total = 0.0;
  for (double p : out) total += p;
  require(std::abs(total - 1.0) <= 1e-9, "belief state no longer normalized");
  return out;
}

ScoreReport score_examinee(const AssessmentModel& model, const Lambda& lambda,
                           const std::vector<Observation>& responses) {
  BeliefState prior = init_belief(model.graph, lambda);
  BeliefState posterior = prior;
  for (const auto& obs : responses) {
    const auto& task = model.tasks[static_cast<std::size_t>(model.task_index(obs.task))];
    require(task.pi.has_value(), "task '" + task.id + "' is not calibrated");
    const auto& em = model.evidence_models[static_cast<std::size_t>(
        model.em_index(task.evidence_model))];
    posterior = absorb(posterior, em.skills_required, *task.pi, obs.value);
  }

  ScoreReport report;
  for (const auto& skill : model.graph.reporting_skills()) {
    SkillScore row;
    row.skill = skill;
    row.prior = marginal(prior, skill)[1];
    row.posterior = marginal(posterior, skill)[1];
    report.skills.push_back(std::move(row));
  }
  return report;
}

}  // namespace edubayes

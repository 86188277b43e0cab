#include "edubayes/evidence_model.hpp"

#include <cstdio>
#include <unordered_set>

#include "edubayes/errors.hpp"

namespace edubayes {

int skill_conjunction(std::span<const int> reporting_states, const QMatrixRow& row) {
  require(reporting_states.size() == row.skills_required.size(),
          "skill configuration does not match the Q-matrix row length");
  for (std::size_t k = 0; k < row.skills_required.size(); ++k)
    if (row.skills_required[k] == 1 && reporting_states[k] != 1) return 0;
  return 1;
}

std::vector<std::uint8_t> delta_table(const SkillGraph& graph, const JointTable& configs,
                                      const QMatrixRow& row) {
  require(static_cast<int>(row.skills_required.size()) == graph.num_reporting(),
          "Q-matrix row length does not match the graph's reporting skills");
  const auto& reporting = graph.reporting_indices();
  std::vector<std::uint8_t> out(configs.num_configs, 1);
  for (std::size_t c = 0; c < configs.num_configs; ++c) {
    for (std::size_t k = 0; k < reporting.size(); ++k) {
      if (row.skills_required[k] == 1 && configs.state(c, reporting[k]) != 1) {
        out[c] = 0;
        break;
      }
    }
  }
  return out;
}

int AssessmentModel::em_index(const std::string& id) const {
  for (int s = 0; s < static_cast<int>(evidence_models.size()); ++s)
    if (evidence_models[s].id == id) return s;
  throw_invalid("unknown evidence model '" + id + "'");
}

int AssessmentModel::task_index(const std::string& id) const {
  for (int j = 0; j < static_cast<int>(tasks.size()); ++j)
    if (tasks[j].id == id) return j;
  throw_invalid("unknown task '" + id + "'");
}

const EvidenceModelSpec& AssessmentModel::em_for_task(std::size_t task) const {
  require(task < tasks.size(), "task index out of range");
  return evidence_models[static_cast<std::size_t>(em_index(tasks[task].evidence_model))];
}

Lambda AssessmentModel::prior_mean_lambda() const {
  Lambda lambda;
  lambda.values.resize(graph.slots().size());
  for (std::size_t s = 0; s < graph.slots().size(); ++s) {
    const auto& prior = lambda_priors[s];
    if (graph.slots()[s].kind == SlotKind::Bernoulli) {
      lambda.values[s] = {prior[0] / (prior[0] + prior[1])};
    } else {
      double total = 0.0;
      for (double a : prior) total += a;
      auto& v = lambda.values[s];
      v.reserve(prior.size());
      for (double a : prior) v.push_back(a / total);
    }
  }
  return lambda;
}

void AssessmentModel::validate() const {
  require(lambda_priors.size() == graph.slots().size(),
          "one prior required per parameter slot");
  for (std::size_t s = 0; s < lambda_priors.size(); ++s) {
    const auto& slot = graph.slots()[s];
    const auto& prior = lambda_priors[s];
    const std::size_t want = slot.kind == SlotKind::Bernoulli ? 2 : static_cast<std::size_t>(slot.dim);
    require(prior.size() == want,
            "prior for slot (" + slot.family + ", z=" + std::to_string(slot.z) +
                ") has the wrong number of hyperparameters");
    for (double a : prior)
      require(a > 0.0, "prior for slot (" + slot.family + "): hyperparameters must be positive");
  }

  require(!evidence_models.empty(), "at least one evidence model required");
  std::unordered_set<std::string> em_ids;
  std::vector<std::vector<int>> rows;
  for (const auto& em : evidence_models) {
    require(!em.id.empty(), "evidence model with empty id");
    require(em_ids.insert(em.id).second, "duplicate evidence model '" + em.id + "'");
    require(static_cast<int>(em.skills_required.skills_required.size()) == graph.num_reporting(),
            "evidence model '" + em.id + "': Q-matrix row length mismatch");
    int ones = 0;
    for (int y : em.skills_required.skills_required) {
      require(y == 0 || y == 1, "evidence model '" + em.id + "': Q-matrix entries must be 0/1");
      ones += y;
    }
    require(ones >= 1, "evidence model '" + em.id + "': a task must require at least one skill");
    for (const auto& other : rows)
      require(other != em.skills_required.skills_required,
              "evidence model '" + em.id + "': duplicate Q-matrix row (merge the models)");
    rows.push_back(em.skills_required.skills_required);
    require(em.prior_false_pos.alpha > 0 && em.prior_false_pos.beta > 0 &&
                em.prior_true_pos.alpha > 0 && em.prior_true_pos.beta > 0,
            "evidence model '" + em.id + "': Beta prior parameters must be positive");
  }

  require(!tasks.empty(), "at least one task required");
  std::unordered_set<std::string> task_ids;
  for (const auto& t : tasks) {
    require(!t.id.empty(), "task with empty id");
    require(task_ids.insert(t.id).second, "duplicate task '" + t.id + "'");
    require(em_ids.count(t.evidence_model) > 0,
            "task '" + t.id + "': unknown evidence model '" + t.evidence_model + "'");
    if (t.pi) {
      require(t.pi->fp > 0.0 && t.pi->fp < 1.0 && t.pi->tp > 0.0 && t.pi->tp < 1.0,
              "task '" + t.id + "': calibrated probabilities must lie strictly in (0,1)");
    }
  }
}

AssessmentModel builtin_fraction_assessment() {
  AssessmentModel m;
  m.graph = build_fraction_model();

  // Priors with 25 effective observations each: Beta(21,6) where the skill is
  // expected, Beta(6,21) where it is not, Dirichlet rows totaling 27.
  const auto slot_prior = [&](const std::string& family, int z) -> SlotPrior {
    if (family == "lambda_1") return {21.0, 6.0};
    if (family == "lambda_2") return z == 0 ? SlotPrior{6.0, 21.0} : SlotPrior{21.0, 6.0};
    if (family == "lambda_5") {
      if (z == 0) return {6.0, 21.0};
      if (z == 1) return {13.5, 13.5};
      return {21.0, 6.0};
    }
    // lambda_WN, z = count of skills 1, 2, 5 held
    switch (z) {
      case 0: return {18.0, 6.0, 3.0};
      case 1: return {12.0, 9.0, 6.0};
      case 2: return {6.0, 9.0, 12.0};
      default: return {3.0, 6.0, 18.0};
    }
  };
  m.lambda_priors.reserve(m.graph.slots().size());
  for (const auto& slot : m.graph.slots()) m.lambda_priors.push_back(slot_prior(slot.family, slot.z));

  const BetaPair fp_prior{6.0, 21.0};
  const BetaPair tp_prior{21.0, 6.0};
  const auto em = [&](std::string id, std::vector<int> row) {
    return EvidenceModelSpec{std::move(id), QMatrixRow{std::move(row)}, fp_prior, tp_prior};
  };
  m.evidence_models = {
      em("em1", {1, 0, 0, 0, 0}), em("em2", {1, 1, 0, 0, 0}), em("em3", {1, 0, 1, 0, 0}),
      em("em4", {1, 0, 1, 1, 0}), em("em5", {1, 0, 1, 1, 1}), em("em6", {1, 1, 1, 1, 0}),
  };

  const auto add_tasks = [&](int first, int last, const std::string& em_id) {
    for (int j = first; j <= last; ++j) {
      char id[16];
      std::snprintf(id, sizeof id, "item%02d", j);
      m.tasks.push_back(Task{id, em_id, std::nullopt, {}});
    }
  };
  add_tasks(1, 2, "em1");
  add_tasks(3, 3, "em2");
  add_tasks(4, 6, "em3");
  add_tasks(7, 11, "em4");
  add_tasks(12, 14, "em5");
  add_tasks(15, 15, "em6");

  m.validate();
  return m;
}

}  // namespace edubayes

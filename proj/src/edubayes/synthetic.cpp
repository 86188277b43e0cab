#include "edubayes/synthetic.hpp"

#include <cstdio>

#include "edubayes/errors.hpp"

namespace edubayes {

SyntheticTruth sample_truth(const AssessmentModel& model, Rng& rng) {
  SyntheticTruth truth;
  truth.lambda_true.values.resize(model.graph.slots().size());
  for (std::size_t s = 0; s < model.graph.slots().size(); ++s) {
    const auto& prior = model.lambda_priors[s];
    if (model.graph.slots()[s].kind == SlotKind::Bernoulli)
      truth.lambda_true.values[s] = {rng.beta(prior[0], prior[1])};
    else
      truth.lambda_true.values[s] = rng.dirichlet(prior);
  }
  truth.pi_true.reserve(model.tasks.size());
  for (std::size_t j = 0; j < model.tasks.size(); ++j) {
    const auto& em = model.em_for_task(j);
    PiPair pi;
    pi.fp = rng.beta(em.prior_false_pos.alpha, em.prior_false_pos.beta);
    pi.tp = rng.beta(em.prior_true_pos.alpha, em.prior_true_pos.beta);
    truth.pi_true.push_back(pi);
  }
  return truth;
}

std::pair<ResponseMatrix, SyntheticTruth> generate_synthetic(const AssessmentModel& model,
                                                             const Lambda& lambda_true,
                                                             const std::vector<PiPair>& pi_true,
                                                             int num_examinees,
                                                             std::uint64_t seed) {
  require(num_examinees >= 1, "need at least one examinee");
  require(pi_true.size() == model.tasks.size(), "one misclassification pair per task required");
  for (const auto& pi : pi_true)
    require(pi.fp >= 0.0 && pi.fp <= 1.0 && pi.tp >= 0.0 && pi.tp <= 1.0,
            "misclassification probabilities must lie in [0,1]");

  const auto joint = enumerate_joint(model.graph, lambda_true);
  std::vector<std::vector<std::uint8_t>> delta(model.tasks.size());
  for (std::size_t j = 0; j < model.tasks.size(); ++j)
    delta[j] = delta_table(model.graph, joint, model.em_for_task(j).skills_required);

  std::size_t width = 1;
  for (int n = num_examinees; n >= 10; n /= 10) ++width;
  if (width < 3) width = 3;

  std::vector<std::string> examinee_ids;
  examinee_ids.reserve(static_cast<std::size_t>(num_examinees));
  for (int i = 1; i <= num_examinees; ++i) {
    std::string digits = std::to_string(i);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    examinee_ids.push_back("ex" + digits);
  }
  std::vector<std::string> task_ids;
  task_ids.reserve(model.tasks.size());
  for (const auto& t : model.tasks) task_ids.push_back(t.id);

  Rng rng(seed);
  ResponseMatrix m(std::move(examinee_ids), std::move(task_ids));
  SyntheticTruth truth;
  truth.lambda_true = lambda_true;
  truth.pi_true = pi_true;
  truth.seed = seed;
  truth.theta_true.reserve(static_cast<std::size_t>(num_examinees));

  const int nv = model.graph.num_vars();
  for (int i = 0; i < num_examinees; ++i) {
    const std::size_t cfg = rng.categorical(joint.probs);
    std::vector<int> states(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) states[static_cast<std::size_t>(v)] = joint.state(cfg, v);
    truth.theta_true.push_back(std::move(states));
    for (std::size_t j = 0; j < model.tasks.size(); ++j) {
      const double p = delta[j][cfg] ? pi_true[j].tp : pi_true[j].fp;
      m.set(static_cast<std::size_t>(i), j, rng.bernoulli(p) ? 1 : 0);
    }
  }
  return {std::move(m), std::move(truth)};
}

}  // namespace edubayes

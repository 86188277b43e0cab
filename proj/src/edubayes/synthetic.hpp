#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "edubayes/evidence_model.hpp"
#include "edubayes/response_matrix.hpp"
#include "edubayes/rng.hpp"

namespace edubayes {

// Generating parameters behind a synthetic dataset, kept for recovery checks.
struct SyntheticTruth {
  Lambda lambda_true;
  std::vector<PiPair> pi_true;              // aligned with AssessmentModel::tasks
  std::vector<std::vector<int>> theta_true;  // per examinee, state per variable
  std::uint64_t seed = 0;
};

// Draws lambda from the slot priors and every task's misclassification pair
// from its evidence model's priors.
SyntheticTruth sample_truth(const AssessmentModel& model, Rng& rng);

// theta_i ~ p(theta | lambda_true), then x_ij ~ Bern(pi_{j, delta}).
// Deterministic given the seed.
std::pair<ResponseMatrix, SyntheticTruth> generate_synthetic(const AssessmentModel& model,
                                                             const Lambda& lambda_true,
                                                             const std::vector<PiPair>& pi_true,
                                                             int num_examinees,
                                                             std::uint64_t seed);

}  // namespace edubayes

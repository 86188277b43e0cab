#pragma once

#include <string>

#include "edubayes/belief.hpp"
#include "edubayes/cat.hpp"
#include "edubayes/gibbs.hpp"

namespace edubayes {

// Parameter/State, Mean, SD, alpha, beta, n, Rhat. Means and SDs print to
// two decimals without a leading zero; hyperparameters round to integers.
std::string run_report_text(const CalibrationRun& run);

// SKILL / PRIOR PROB. / POSTERIOR PROB., three decimals.
std::string score_report_text(const ScoreReport& report);

// Paired new-task table: posterior means and effective sample sizes under
// both online modes. Rows are the scalars the EB run tracked.
std::string comparison_report_text(const CalibrationRun& full, const CalibrationRun& eb);

std::string cat_summary_text(const CatSimResult& result, const std::string& selector,
                             const CatSimConfig& config);

}  // namespace edubayes

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edubayes/belief.hpp"
#include "edubayes/cat.hpp"
#include "edubayes/evidence_model.hpp"
#include "edubayes/gibbs.hpp"
#include "edubayes/irt.hpp"
#include "edubayes/synthetic.hpp"

namespace edubayes {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a over the file bytes, as 16 hex digits.
std::string file_checksum(const std::string& path);

// Versioned JSON codecs. Every reader requires the format and version fields
// and reports malformed content with its origin (path) attached.

std::string model_to_json_text(const AssessmentModel& model);
AssessmentModel model_from_json_text(const std::string& text, const std::string& origin);
AssessmentModel load_model(const std::string& path);
void save_model(const AssessmentModel& model, const std::string& path);

std::string truth_to_json_text(const AssessmentModel& model, const SyntheticTruth& truth);
SyntheticTruth truth_from_json_text(const std::string& text, const std::string& origin,
                                    const AssessmentModel& model);
SyntheticTruth load_truth(const std::string& path, const AssessmentModel& model);
void save_truth(const AssessmentModel& model, const SyntheticTruth& truth,
                const std::string& path);

// Runs serialize without retained draws; draws export separately as CSV.
std::string run_to_json_text(const CalibrationRun& run);
CalibrationRun run_from_json_text(const std::string& text, const std::string& origin);
CalibrationRun load_run(const std::string& path);
void save_run(const CalibrationRun& run, const std::string& path);

// Columns chain, draw, then one column per scalar parameter.
std::string draws_to_csv(const CalibrationRun& run);

std::string score_to_json_text(const ScoreReport& report);

// Item pools: CSV ("id,beta,<feature...>"; empty beta = uncalibrated) or the
// JSON form. Loaders validate ids; uses validate difficulty finiteness.
std::vector<RaschItem> pool_from_csv(const std::string& text, const std::string& origin);
std::string pool_to_csv(const std::vector<RaschItem>& pool);
std::vector<RaschItem> pool_from_json_text(const std::string& text, const std::string& origin);
std::string pool_to_json_text(const std::vector<RaschItem>& pool);
std::vector<RaschItem> load_pool(const std::string& path);  // dispatches on extension
void save_pool(const std::vector<RaschItem>& pool, const std::string& path);

std::string cat_traces_to_csv(const CatSimResult& result, const std::string& selector);

}  // namespace edubayes

#include "edubayes/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "edubayes/errors.hpp"

namespace edubayes {

namespace {

// Paper-style probability: two decimals, no leading zero, no negative zero.
std::string prob2(double x) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  if (s.size() > 1 && s[0] == '0') s.erase(0, 1);
  if (s.size() > 2 && s[0] == '-' && s[1] == '0') s.erase(1, 1);
  return s;
}

std::string prob3(double x) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  std::string s = buf;
  if (s.size() > 1 && s[0] == '0') s.erase(0, 1);
  return s;
}

std::string round_int(double x) { return std::to_string(static_cast<long long>(std::llround(x))); }

std::string fixed2(double x) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

struct Row {
  std::string parameter;
  std::string state;
  std::vector<std::string> cells;
};

std::string layout_table(const std::vector<std::string>& headers, std::vector<Row> rows) {
  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) widths[c] = headers[c].size();
  std::string last_param;
  for (auto& row : rows) {
    if (row.parameter == last_param)
      row.parameter.clear();
    else
      last_param = row.parameter;
    widths[0] = std::max(widths[0], row.parameter.size());
    widths[1] = std::max(widths[1], row.state.size());
    for (std::size_t c = 0; c < row.cells.size(); ++c)
      widths[c + 2] = std::max(widths[c + 2], row.cells[c].size());
  }

  std::ostringstream out;
  const auto pad_left = [&](const std::string& s, std::size_t w) {
    out << s << std::string(w - s.size(), ' ');
  };
  const auto pad_right = [&](const std::string& s, std::size_t w) {
    out << std::string(w - s.size(), ' ') << s;
  };

  pad_left(headers[0], widths[0]);
  out << "  ";
  pad_left(headers[1], widths[1]);
  for (std::size_t c = 2; c < headers.size(); ++c) {
    out << "  ";
    pad_right(headers[c], widths[c]);
  }
  out << '\n';
  std::size_t total = widths[0] + widths[1] + 2;
  for (std::size_t c = 2; c < headers.size(); ++c) total += widths[c] + 2;
  out << std::string(total, '-') << '\n';

  for (const auto& row : rows) {
    pad_left(row.parameter, widths[0]);
    out << "  ";
    pad_left(row.state, widths[1]);
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      out << "  ";
      pad_right(row.cells[c], widths[c + 2]);
    }
    out << '\n';
  }
  return out.str();
}

void ref_labels(const CalibrationRun& run, std::size_t s, std::string& parameter,
                std::string& state) {
  const auto& ref = run.refs[s];
  if (ref.kind == ScalarRef::Kind::Lambda) {
    parameter = ref.family;
    int max_z = 0, max_component = 0;
    for (const auto& other : run.refs) {
      if (other.kind != ScalarRef::Kind::Lambda || other.family != ref.family) continue;
      max_z = std::max(max_z, other.z);
      max_component = std::max(max_component, other.component);
    }
    if (max_component > 0) {
      state = "z=" + std::to_string(ref.z) + ", level " + std::to_string(ref.component);
    } else if (max_z > 0) {
      state = "z=" + std::to_string(ref.z);
    } else {
      state.clear();
    }
  } else {
    parameter = "pi(" + ref.task + ")";
    state = ref.kind == ScalarRef::Kind::TaskFp ? "FalsePos" : "TruePos";
  }
}

}  // namespace

std::string run_report_text(const CalibrationRun& run) {
  require(run.summaries.size() == run.refs.size(), "run summaries are incomplete");
  std::ostringstream head;
  head << "Calibration (" << run.mode << "): " << run.config.chains << " chains, "
       << run.config.burn_in << " burn-in, " << run.config.retained << " retained";
  if (run.config.thin > 1) head << ", thin " << run.config.thin;
  head << ", seed " << run.config.seed << "\n\n";

  std::vector<Row> rows;
  for (std::size_t s = 0; s < run.summaries.size(); ++s) {
    const auto& sum = run.summaries[s];
    Row row;
    ref_labels(run, s, row.parameter, row.state);
    row.cells = {prob2(sum.mean),          prob2(sum.sd),       round_int(sum.alpha_hat),
                 round_int(sum.beta_hat),  round_int(sum.n_hat),
                 sum.rhat > 0.0 ? fixed2(sum.rhat) : std::string("-")};
    rows.push_back(std::move(row));
  }
  return head.str() +
         layout_table({"Parameter", "State", "Mean", "SD", "alpha", "beta", "n", "Rhat"},
                      std::move(rows));
}

std::string score_report_text(const ScoreReport& report) {
  std::size_t w = std::string("SKILL").size();
  for (const auto& s : report.skills) w = std::max(w, s.skill.size());
  std::ostringstream out;
  out << "SKILL" << std::string(w - 5, ' ') << "  PRIOR PROB.  POSTERIOR PROB.\n";
  for (const auto& s : report.skills) {
    out << s.skill << std::string(w - s.skill.size(), ' ');
    const std::string prior = prob3(s.prior);
    const std::string post = prob3(s.posterior);
    out << "  " << std::string(11 - prior.size(), ' ') << prior;
    out << "  " << std::string(15 - post.size(), ' ') << post << '\n';
  }
  return out.str();
}

std::string comparison_report_text(const CalibrationRun& full, const CalibrationRun& eb) {
  std::vector<Row> rows;
  for (std::size_t s = 0; s < eb.names.size(); ++s) {
    const int f = full.scalar_index(eb.names[s]);
    require(f >= 0, "full run is missing scalar '" + eb.names[s] + "'");
    const auto& fs = full.summaries[static_cast<std::size_t>(f)];
    const auto& es = eb.summaries[s];
    Row row;
    ref_labels(eb, s, row.parameter, row.state);
    row.cells = {prob2(fs.mean), prob2(es.mean), prob2(es.mean - fs.mean),
                 round_int(fs.n_hat), round_int(es.n_hat)};
    rows.push_back(std::move(row));
  }
  return "New-task posterior comparison (full vs empirical Bayes)\n\n" +
         layout_table({"Parameter", "State", "Full mean", "EB mean", "Diff", "Full n", "EB n"},
                      std::move(rows));
}

std::string cat_summary_text(const CatSimResult& result, const std::string& selector,
                             const CatSimConfig& config) {
  const CatRunStats stats = cat_stats(result, config.cat);
  char buf[64];
  std::ostringstream out;
  out << "CAT simulation: " << result.sessions.size() << " sessions, selector " << selector
      << ", stop SD " << prob2(config.cat.stop_sd) << ", max items " << config.cat.max_items
      << '\n';
  std::snprintf(buf, sizeof buf, "  mean items administered  %.2f\n", stats.mean_items);
  out << buf;
  std::snprintf(buf, sizeof buf, "  mean |error|             %.3f\n", stats.mean_abs_error);
  out << buf;
  std::snprintf(buf, sizeof buf, "  3-SD coverage            %.3f\n", stats.coverage_3sd);
  out << buf;
  std::snprintf(buf, sizeof buf, "  reached stop SD          %.3f\n", stats.stop_rate);
  out << buf;
  return out.str();
}

}  // namespace edubayes

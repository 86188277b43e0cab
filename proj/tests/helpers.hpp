#pragma once

// Hand-built fixture assessments plus independent brute-force oracles. The
// enumeration code here is written as explicit nested loops on purpose: it
// must not share logic with the library paths it checks.

#include <optional>
#include <string>
#include <vector>

#include "edubayes/belief.hpp"
#include "edubayes/errors.hpp"
#include "edubayes/evidence_model.hpp"
#include "edubayes/rng.hpp"
#include "edubayes/skill_graph.hpp"

#define CHECK_ERROR(expr, expected_code)                                      \
  do {                                                                        \
    bool caught_ = false;                                                     \
    try {                                                                     \
      (void)(expr);                                                           \
    } catch (const edubayes::Error& e_) {                                     \
      caught_ = true;                                                         \
      CHECK_MESSAGE(e_.code() == (expected_code), #expr, ": ", e_.what());    \
    }                                                                         \
    CHECK_MESSAGE(caught_, #expr " did not raise");                           \
  } while (0)

namespace testfix {

using edubayes::AssessmentModel;
using edubayes::EvidenceModelSpec;
using edubayes::Lambda;
using edubayes::Observation;
using edubayes::ParameterSlot;
using edubayes::PiPair;
using edubayes::QMatrixRow;
using edubayes::Rng;
using edubayes::SkillGraph;
using edubayes::SkillVariable;
using edubayes::SlotKind;
using edubayes::Task;
using edubayes::VariableKind;

// Fixture 1: a single binary skill, one evidence model, three tasks.
inline AssessmentModel one_skill_model() {
  std::vector<SkillVariable> vars;
  vars.push_back({.name = "s1",
                  .cardinality = 2,
                  .kind = VariableKind::Stochastic,
                  .parents = {},
                  .slot = "p1",
                  .determinism = {}});
  std::vector<ParameterSlot> slots;
  slots.push_back({.family = "p1", .z = 0, .kind = SlotKind::Bernoulli, .dim = 1});
  AssessmentModel m;
  m.graph = SkillGraph::create(std::move(vars), std::move(slots), {"s1"});
  m.lambda_priors = {{2.0, 2.0}};
  m.evidence_models = {EvidenceModelSpec{"emA", QMatrixRow{{1}}, {6.0, 21.0}, {21.0, 6.0}}};
  m.tasks = {Task{"t1", "emA", std::nullopt, {}}, Task{"t2", "emA", std::nullopt, {}},
             Task{"t3", "emA", std::nullopt, {}}};
  m.validate();
  return m;
}

// Fixture 2: chain s1 -> s2, both reported; evidence models over each subset.
inline AssessmentModel two_skill_chain_model() {
  std::vector<SkillVariable> vars;
  vars.push_back({.name = "s1",
                  .cardinality = 2,
                  .kind = VariableKind::Stochastic,
                  .parents = {},
                  .slot = "a",
                  .determinism = {}});
  vars.push_back({.name = "s2",
                  .cardinality = 2,
                  .kind = VariableKind::Stochastic,
                  .parents = {"s1"},
                  .slot = "b",
                  .determinism = {}});
  std::vector<ParameterSlot> slots;
  slots.push_back({.family = "a", .z = 0, .kind = SlotKind::Bernoulli, .dim = 1});
  slots.push_back({.family = "b", .z = 0, .kind = SlotKind::Bernoulli, .dim = 1});
  slots.push_back({.family = "b", .z = 1, .kind = SlotKind::Bernoulli, .dim = 1});
  AssessmentModel m;
  m.graph = SkillGraph::create(std::move(vars), std::move(slots), {"s1", "s2"});
  m.lambda_priors = {{2.0, 2.0}, {2.0, 5.0}, {5.0, 2.0}};
  m.evidence_models = {EvidenceModelSpec{"em1", QMatrixRow{{1, 0}}, {6.0, 21.0}, {21.0, 6.0}},
                       EvidenceModelSpec{"em2", QMatrixRow{{0, 1}}, {6.0, 21.0}, {21.0, 6.0}},
                       EvidenceModelSpec{"em3", QMatrixRow{{1, 1}}, {6.0, 21.0}, {21.0, 6.0}}};
  m.tasks = {Task{"u1", "em1", std::nullopt, {}}, Task{"u2", "em2", std::nullopt, {}},
             Task{"u3", "em3", std::nullopt, {}}, Task{"u4", "em3", std::nullopt, {}}};
  m.validate();
  return m;
}

// Fixture 3: binary s1, a three-level child w, and a deterministic indicator
// d = [w >= 1]; reporting skills are (s1, d).
inline AssessmentModel det_child_model() {
  std::vector<SkillVariable> vars;
  vars.push_back({.name = "s1",
                  .cardinality = 2,
                  .kind = VariableKind::Stochastic,
                  .parents = {},
                  .slot = "g",
                  .determinism = {}});
  vars.push_back({.name = "w",
                  .cardinality = 3,
                  .kind = VariableKind::Stochastic,
                  .parents = {"s1"},
                  .slot = "h",
                  .determinism = {}});
  vars.push_back({.name = "d",
                  .cardinality = 2,
                  .kind = VariableKind::Deterministic,
                  .parents = {"w"},
                  .slot = "",
                  .determinism = {0, 1, 1}});
  std::vector<ParameterSlot> slots;
  slots.push_back({.family = "g", .z = 0, .kind = SlotKind::Bernoulli, .dim = 1});
  slots.push_back({.family = "h", .z = 0, .kind = SlotKind::Categorical, .dim = 3});
  slots.push_back({.family = "h", .z = 1, .kind = SlotKind::Categorical, .dim = 3});
  AssessmentModel m;
  m.graph = SkillGraph::create(std::move(vars), std::move(slots), {"s1", "d"});
  m.lambda_priors = {{2.0, 2.0}, {3.0, 2.0, 1.0}, {1.0, 2.0, 3.0}};
  m.evidence_models = {EvidenceModelSpec{"em1", QMatrixRow{{1, 0}}, {6.0, 21.0}, {21.0, 6.0}},
                       EvidenceModelSpec{"em2", QMatrixRow{{0, 1}}, {6.0, 21.0}, {21.0, 6.0}},
                       EvidenceModelSpec{"em3", QMatrixRow{{1, 1}}, {6.0, 21.0}, {21.0, 6.0}}};
  m.tasks = {Task{"v1", "em1", std::nullopt, {}}, Task{"v2", "em2", std::nullopt, {}},
             Task{"v3", "em3", std::nullopt, {}}};
  m.validate();
  return m;
}

struct BruteConfig {
  std::vector<int> states;     // per graph variable, graph order
  std::vector<int> reporting;  // per reporting skill
  double prob = 0.0;
};

// All joint configurations of fixture `which`, probabilities from explicit
// loops over the conditional tables.
inline std::vector<BruteConfig> brute_enumerate(int which, const Lambda& L) {
  const auto bern = [](double p, int x) { return x ? p : 1.0 - p; };
  std::vector<BruteConfig> out;
  if (which == 1) {
    for (int a = 0; a <= 1; ++a) out.push_back({{a}, {a}, bern(L.values[0][0], a)});
  } else if (which == 2) {
    for (int a = 0; a <= 1; ++a)
      for (int b = 0; b <= 1; ++b) {
        const double pb = a == 0 ? L.values[1][0] : L.values[2][0];
        out.push_back({{a, b}, {a, b}, bern(L.values[0][0], a) * bern(pb, b)});
      }
  } else {
    for (int a = 0; a <= 1; ++a)
      for (int w = 0; w <= 2; ++w) {
        const auto& cat = a == 0 ? L.values[1] : L.values[2];
        const int d = w >= 1 ? 1 : 0;
        out.push_back({{a, w, d}, {a, d}, bern(L.values[0][0], a) * cat[w]});
      }
  }
  return out;
}

inline double obs_likelihood(const AssessmentModel& m, const std::vector<int>& reporting,
                             const Observation& o) {
  const Task* task = nullptr;
  for (const auto& t : m.tasks)
    if (t.id == o.task) task = &t;
  const EvidenceModelSpec* em = nullptr;
  for (const auto& e : m.evidence_models)
    if (e.id == task->evidence_model) em = &e;
  int delta = 1;
  for (std::size_t k = 0; k < reporting.size(); ++k)
    if (em->skills_required.skills_required[k] == 1 && reporting[k] != 1) delta = 0;
  const double p1 = delta ? task->pi->tp : task->pi->fp;
  return o.value ? p1 : 1.0 - p1;
}

// Posterior P(skill = 1) per reporting skill by direct summation.
inline std::vector<double> brute_posterior(const AssessmentModel& m, int which, const Lambda& L,
                                           const std::vector<Observation>& obs) {
  const auto configs = brute_enumerate(which, L);
  const std::size_t nrep = static_cast<std::size_t>(m.graph.num_reporting());
  double total = 0.0;
  std::vector<double> hit(nrep, 0.0);
  for (const auto& c : configs) {
    double w = c.prob;
    for (const auto& o : obs) w *= obs_likelihood(m, c.reporting, o);
    total += w;
    for (std::size_t k = 0; k < nrep; ++k)
      if (c.reporting[k] == 1) hit[k] += w;
  }
  for (auto& h : hit) h /= total;
  return hit;
}

// Same oracle for the built-in assessment. Slot layout is spelled out by
// hand: lambda_1 z0; lambda_2 z0,z1; lambda_5 z0,z1,z2; lambda_WN z0..z3.
// Reporting order (skill1, skill2, skill3, skill4, skill5) with
// skill3 = [w >= 1], skill4 = [w == 2].
inline std::vector<double> brute_fraction_posterior(const AssessmentModel& m, const Lambda& L,
                                                    const std::vector<Observation>& obs) {
  const auto bern = [](double p, int x) { return x ? p : 1.0 - p; };
  double total = 0.0;
  std::vector<double> hit(5, 0.0);
  for (int t1 = 0; t1 <= 1; ++t1)
    for (int t2 = 0; t2 <= 1; ++t2)
      for (int t5 = 0; t5 <= 1; ++t5)
        for (int wn = 0; wn <= 2; ++wn) {
          const double p = bern(L.values[0][0], t1) * bern(L.values[1 + t1][0], t2) *
                           bern(L.values[3 + t1 + t2][0], t5) * L.values[6 + t1 + t2 + t5][wn];
          const std::vector<int> rep = {t1, t2, wn >= 1 ? 1 : 0, wn == 2 ? 1 : 0, t5};
          double w = p;
          for (const auto& o : obs) w *= obs_likelihood(m, rep, o);
          total += w;
          for (int k = 0; k < 5; ++k)
            if (rep[static_cast<std::size_t>(k)]) hit[static_cast<std::size_t>(k)] += w;
        }
  for (auto& h : hit) h /= total;
  return hit;
}

// Random parameter draws for oracle trials.
inline Lambda random_lambda(const AssessmentModel& m, Rng& rng) {
  Lambda L;
  L.values.resize(m.graph.slots().size());
  for (std::size_t s = 0; s < m.graph.slots().size(); ++s) {
    const auto& slot = m.graph.slots()[s];
    if (slot.kind == SlotKind::Bernoulli) {
      L.values[s] = {rng.uniform(0.05, 0.95)};
    } else {
      const std::vector<double> conc(static_cast<std::size_t>(slot.dim), 1.0);
      L.values[s] = rng.dirichlet(conc);
    }
  }
  return L;
}

inline void randomize_pi(AssessmentModel& m, Rng& rng) {
  for (auto& t : m.tasks) t.pi = PiPair{rng.uniform(0.02, 0.6), rng.uniform(0.4, 0.98)};
}

}  // namespace testfix

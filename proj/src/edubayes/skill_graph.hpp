#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace edubayes {

enum class VariableKind { Stochastic, Deterministic };

// One student-model variable. Stochastic variables draw their state from the
// parameter slot family named by `slot`, conditioned on the sum of their
// parents' states. Deterministic variables map each parent configuration to a
// fixed state via `determinism` (mixed-radix over parents in listed order,
// last parent fastest).
struct SkillVariable {
  std::string name;
  int cardinality = 2;
  VariableKind kind = VariableKind::Stochastic;
  std::vector<std::string> parents;
  std::string slot;             // stochastic only
  std::vector<int> determinism; // deterministic only; size = product of parent cardinalities
};

enum class SlotKind { Bernoulli, Categorical };

// One population parameter: the conditional distribution of a stochastic
// variable given parent statistic z. Bernoulli slots hold a single success
// probability; categorical slots hold a simplex over the child's states.
struct ParameterSlot {
  std::string family;
  int z = 0;
  SlotKind kind = SlotKind::Bernoulli;
  int dim = 1;  // 1 for Bernoulli, child cardinality otherwise

  std::string scalar_name(int component = 0) const;
};

// Assignment of values to every parameter slot of a graph, indexed like
// SkillGraph::slots(). Bernoulli entries have one element, categorical entries
// `dim` elements; an empty entry means unassigned.
struct Lambda {
  std::vector<std::vector<double>> values;
};

class SkillGraph {
 public:
  // Validates and freezes the model structure. `variables` must be listed in
  // a topological order (parents precede children); every reachable value of
  // each stochastic variable's parent-sum statistic must have a slot.
  // `reporting_skills` name the binary variables scored against Q-matrix rows.
  static SkillGraph create(std::vector<SkillVariable> variables,
                           std::vector<ParameterSlot> slots,
                           std::vector<std::string> reporting_skills);

  const std::vector<SkillVariable>& variables() const { return variables_; }
  const std::vector<ParameterSlot>& slots() const { return slots_; }
  const std::vector<std::string>& reporting_skills() const { return reporting_skills_; }

  int var_index(const std::string& name) const;          // throws on unknown name
  int slot_index(const std::string& family, int z) const;  // -1 when absent
  int slot_for(int var_index, int z) const;               // slot of a stochastic variable

  std::size_t joint_size() const { return joint_size_; }
  int num_vars() const { return static_cast<int>(variables_.size()); }
  int num_reporting() const { return static_cast<int>(reporting_skills_.size()); }
  const std::vector<int>& reporting_indices() const { return reporting_indices_; }

  // Total count of scalar parameters across all slots.
  int num_scalars() const;

  void validate_lambda(const Lambda& lambda) const;

 private:
  std::vector<SkillVariable> variables_;
  std::vector<ParameterSlot> slots_;
  std::vector<std::string> reporting_skills_;
  std::vector<int> reporting_indices_;
  std::vector<std::vector<int>> slot_lookup_;  // [var][z] -> slot index, -1 for det vars
  std::size_t joint_size_ = 0;

  friend struct JointEnumerator;
};

// All joint configurations of a graph in canonical order: mixed-radix over the
// stochastic variables in graph order, the last stochastic variable ticking
// fastest. Deterministic variables are filled in. `states` is row-major,
// num_configs x num_vars.
struct JointTable {
  std::size_t num_configs = 0;
  int num_vars = 0;
  std::vector<std::uint8_t> states;
  std::vector<double> probs;

  int state(std::size_t config, int var) const {
    return states[config * static_cast<std::size_t>(num_vars) + static_cast<std::size_t>(var)];
  }
};

inline constexpr std::size_t kDefaultJointCap = 1'000'000;

// Exact joint distribution over all configurations. Probabilities sum to 1
// within 1e-12 (up to degenerate lambdas, where some entries are exactly 0).
JointTable enumerate_joint(const SkillGraph& graph, const Lambda& lambda,
                           std::size_t cap = kDefaultJointCap);

// Configurations only (no probabilities); same canonical order.
JointTable enumerate_configs(const SkillGraph& graph, std::size_t cap = kDefaultJointCap);

// Per-configuration prior probabilities written into `out` (size num_configs).
// Fast path used by the Gibbs sweep; identical numbers to enumerate_joint.
void joint_probs(const SkillGraph& graph, const JointTable& configs, const Lambda& lambda,
                 std::span<double> out);

// The Method B mixed-number-subtraction student model: five binary skills,
// a three-level whole-number variable driving skills 3 and 4 deterministically.
SkillGraph build_fraction_model();

}  // namespace edubayes

#include "edubayes/skill_graph.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "edubayes/errors.hpp"

namespace edubayes {

std::string ParameterSlot::scalar_name(int component) const {
  std::string out = family + "[z=" + std::to_string(z) + "]";
  if (kind == SlotKind::Categorical) out += "[" + std::to_string(component) + "]";
  return out;
}

SkillGraph SkillGraph::create(std::vector<SkillVariable> variables,
                              std::vector<ParameterSlot> slots,
                              std::vector<std::string> reporting_skills) {
  SkillGraph g;
  g.variables_ = std::move(variables);
  g.slots_ = std::move(slots);
  g.reporting_skills_ = std::move(reporting_skills);

  require(!g.variables_.empty(), "skill graph needs at least one variable");

  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(g.variables_.size()); ++i) {
    const auto& v = g.variables_[i];
    require(!v.name.empty(), "variable with empty name");
    require(v.cardinality >= 2, "variable '" + v.name + "': cardinality must be >= 2");
    require(index.emplace(v.name, i).second, "duplicate variable '" + v.name + "'");
  }

  // Topological listing: parents must already be defined, which also rules
  // out cycles and self-parenting.
  for (int i = 0; i < static_cast<int>(g.variables_.size()); ++i) {
    const auto& v = g.variables_[i];
    for (const auto& p : v.parents) {
      auto it = index.find(p);
      require(it != index.end() && it->second < i,
              "variable '" + v.name + "': parent '" + p +
                  "' must be declared earlier (topological order)");
    }
  }

  std::unordered_map<std::string, int> slot_by_key;
  for (int s = 0; s < static_cast<int>(g.slots_.size()); ++s) {
    const auto& slot = g.slots_[s];
    require(!slot.family.empty(), "parameter slot with empty family name");
    require(slot.z >= 0, "slot '" + slot.family + "': negative statistic value");
    if (slot.kind == SlotKind::Bernoulli)
      require(slot.dim == 1, "bernoulli slot '" + slot.family + "' must have dim 1");
    else
      require(slot.dim >= 2, "categorical slot '" + slot.family + "' must have dim >= 2");
    const std::string key = slot.family + "\x1f" + std::to_string(slot.z);
    require(slot_by_key.emplace(key, s).second,
            "duplicate slot (" + slot.family + ", z=" + std::to_string(slot.z) + ")");
  }

  g.slot_lookup_.assign(g.variables_.size(), {});
  std::size_t joint = 1;
  std::unordered_set<std::string> used_slots;
  for (int i = 0; i < static_cast<int>(g.variables_.size()); ++i) {
    const auto& v = g.variables_[i];
    if (v.kind == VariableKind::Stochastic) {
      require(!v.slot.empty(), "stochastic variable '" + v.name + "' has no slot binding");
      require(v.determinism.empty(),
              "stochastic variable '" + v.name + "' must not carry a determinism table");
      int max_z = 0;
      for (const auto& p : v.parents) max_z += g.variables_[index.at(p)].cardinality - 1;
      auto& lookup = g.slot_lookup_[i];
      lookup.assign(static_cast<std::size_t>(max_z) + 1, -1);
      for (int z = 0; z <= max_z; ++z) {
        auto it = slot_by_key.find(v.slot + "\x1f" + std::to_string(z));
        require(it != slot_by_key.end(), "variable '" + v.name + "': no slot (" + v.slot +
                                             ", z=" + std::to_string(z) + ")");
        const auto& slot = g.slots_[it->second];
        if (v.cardinality == 2)
          require(slot.kind == SlotKind::Bernoulli,
                  "binary variable '" + v.name + "' needs bernoulli slots");
        else
          require(slot.kind == SlotKind::Categorical && slot.dim == v.cardinality,
                  "variable '" + v.name + "' needs categorical slots of dim " +
                      std::to_string(v.cardinality));
        lookup[static_cast<std::size_t>(z)] = it->second;
        used_slots.insert(v.slot);
      }
      const std::size_t prev = joint;
      joint *= static_cast<std::size_t>(v.cardinality);
      require(joint >= prev, "joint state space overflow");
    } else {
      require(v.slot.empty(), "deterministic variable '" + v.name + "' must not bind a slot");
      require(!v.parents.empty(), "deterministic variable '" + v.name + "' needs parents");
      std::size_t table = 1;
      for (const auto& p : v.parents)
        table *= static_cast<std::size_t>(g.variables_[index.at(p)].cardinality);
      require(v.determinism.size() == table,
              "variable '" + v.name + "': determinism table must cover all " +
                  std::to_string(table) + " parent configurations");
      for (int s : v.determinism)
        require(s >= 0 && s < v.cardinality,
                "variable '" + v.name + "': determinism value out of range");
    }
  }
  g.joint_size_ = joint;

  for (const auto& slot : g.slots_)
    require(used_slots.count(slot.family) > 0,
            "slot family '" + slot.family + "' is not bound to any variable");

  require(!g.reporting_skills_.empty(), "at least one reporting skill required");
  std::unordered_set<std::string> seen;
  for (const auto& name : g.reporting_skills_) {
    auto it = index.find(name);
    require(it != index.end(), "reporting skill '" + name + "' is not a variable");
    require(g.variables_[it->second].cardinality == 2,
            "reporting skill '" + name + "' must be binary");
    require(seen.insert(name).second, "duplicate reporting skill '" + name + "'");
    g.reporting_indices_.push_back(it->second);
  }
  return g;
}

int SkillGraph::var_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(variables_.size()); ++i)
    if (variables_[i].name == name) return i;
  throw_invalid("unknown variable '" + name + "'");
}

int SkillGraph::slot_index(const std::string& family, int z) const {
  for (int s = 0; s < static_cast<int>(slots_.size()); ++s)
    if (slots_[s].family == family && slots_[s].z == z) return s;
  return -1;
}

int SkillGraph::slot_for(int var, int z) const {
  const auto& lookup = slot_lookup_.at(static_cast<std::size_t>(var));
  require(z >= 0 && z < static_cast<int>(lookup.size()),
          "statistic value out of range for variable '" + variables_[var].name + "'");
  return lookup[static_cast<std::size_t>(z)];
}

int SkillGraph::num_scalars() const {
  int n = 0;
  for (const auto& s : slots_) n += s.dim;
  return n;
}

void SkillGraph::validate_lambda(const Lambda& lambda) const {
  require(lambda.values.size() == slots_.size(), "lambda does not match the graph's slots");
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const auto& slot = slots_[s];
    const auto& v = lambda.values[s];
    require(!v.empty(), "unassigned slot (" + slot.family + ", z=" + std::to_string(slot.z) + ")");
    require(static_cast<int>(v.size()) == slot.dim,
            "slot (" + slot.family + ", z=" + std::to_string(slot.z) + "): wrong dimension");
    if (slot.kind == SlotKind::Bernoulli) {
      require(v[0] >= 0.0 && v[0] <= 1.0,
              "slot (" + slot.family + ", z=" + std::to_string(slot.z) + "): value outside [0,1]");
    } else {
      double total = 0.0;
      for (double x : v) {
        require(x >= 0.0 && x <= 1.0, "slot (" + slot.family + "): component outside [0,1]");
        total += x;
      }
      require(std::abs(total - 1.0) <= 1e-12,
              "slot (" + slot.family + ", z=" + std::to_string(slot.z) + "): not a simplex");
    }
  }
}

namespace {

JointTable enumerate_impl(const SkillGraph& graph, const Lambda* lambda, std::size_t cap) {
  const auto& vars = graph.variables();
  require(graph.joint_size() <= cap, "joint state space (" + std::to_string(graph.joint_size()) +
                                         ") exceeds the cap (" + std::to_string(cap) + ")");
  if (lambda) graph.validate_lambda(*lambda);

  const int nv = graph.num_vars();
  std::vector<int> stochastic;
  for (int i = 0; i < nv; ++i)
    if (vars[i].kind == VariableKind::Stochastic) stochastic.push_back(i);

  std::vector<int> parent_idx_flat;
  std::vector<std::pair<int, int>> parent_ranges(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i) {
    const int begin = static_cast<int>(parent_idx_flat.size());
    for (const auto& p : vars[i].parents) parent_idx_flat.push_back(graph.var_index(p));
    parent_ranges[static_cast<std::size_t>(i)] = {begin,
                                                  static_cast<int>(parent_idx_flat.size())};
  }

  JointTable out;
  out.num_configs = graph.joint_size();
  out.num_vars = nv;
  out.states.assign(out.num_configs * static_cast<std::size_t>(nv), 0);
  if (lambda) out.probs.assign(out.num_configs, 0.0);

  std::vector<int> digits(stochastic.size(), 0);
  std::vector<int> cur(static_cast<std::size_t>(nv), 0);
  for (std::size_t cfg = 0; cfg < out.num_configs; ++cfg) {
    double p = 1.0;
    for (int i = 0; i < nv; ++i) {
      const auto& v = vars[static_cast<std::size_t>(i)];
      if (v.kind == VariableKind::Stochastic) {
        std::size_t k = 0;
        while (stochastic[k] != i) ++k;
        cur[static_cast<std::size_t>(i)] = digits[k];
        if (lambda) {
          int z = 0;
          for (int pi = parent_ranges[static_cast<std::size_t>(i)].first;
               pi < parent_ranges[static_cast<std::size_t>(i)].second; ++pi)
            z += cur[static_cast<std::size_t>(parent_idx_flat[static_cast<std::size_t>(pi)])];
          const auto& value = lambda->values[static_cast<std::size_t>(graph.slot_for(i, z))];
          const int state = cur[static_cast<std::size_t>(i)];
          if (v.cardinality == 2)
            p *= state == 1 ? value[0] : 1.0 - value[0];
          else
            p *= value[static_cast<std::size_t>(state)];
        }
      } else {
        // mixed-radix index over parents, last parent fastest
        std::size_t idx = 0;
        for (int pi = parent_ranges[static_cast<std::size_t>(i)].first;
             pi < parent_ranges[static_cast<std::size_t>(i)].second; ++pi) {
          const int parent = parent_idx_flat[static_cast<std::size_t>(pi)];
          idx = idx * static_cast<std::size_t>(vars[static_cast<std::size_t>(parent)].cardinality) +
                static_cast<std::size_t>(cur[static_cast<std::size_t>(parent)]);
        }
        cur[static_cast<std::size_t>(i)] = v.determinism[idx];
      }
      out.states[cfg * static_cast<std::size_t>(nv) + static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(cur[static_cast<std::size_t>(i)]);
    }
    if (lambda) out.probs[cfg] = p;

    // advance the odometer, last stochastic variable fastest
    for (int k = static_cast<int>(digits.size()) - 1; k >= 0; --k) {
      const int card = vars[static_cast<std::size_t>(stochastic[static_cast<std::size_t>(k)])]
                           .cardinality;
      if (++digits[static_cast<std::size_t>(k)] < card) break;
      digits[static_cast<std::size_t>(k)] = 0;
    }
  }
  return out;
}

}  // namespace

JointTable enumerate_joint(const SkillGraph& graph, const Lambda& lambda, std::size_t cap) {
  return enumerate_impl(graph, &lambda, cap);
}

JointTable enumerate_configs(const SkillGraph& graph, std::size_t cap) {
  return enumerate_impl(graph, nullptr, cap);
}

void joint_probs(const SkillGraph& graph, const JointTable& configs, const Lambda& lambda,
                 std::span<double> out) {
  require(out.size() == configs.num_configs, "joint_probs: output size mismatch");
  const auto& vars = graph.variables();
  const int nv = configs.num_vars;
  for (std::size_t cfg = 0; cfg < configs.num_configs; ++cfg) {
    double p = 1.0;
    for (int i = 0; i < nv; ++i) {
      const auto& v = vars[static_cast<std::size_t>(i)];
      if (v.kind != VariableKind::Stochastic) continue;
      int z = 0;
      for (const auto& parent : v.parents) z += configs.state(cfg, graph.var_index(parent));
      const auto& value = lambda.values[static_cast<std::size_t>(graph.slot_for(i, z))];
      const int state = configs.state(cfg, i);
      if (v.cardinality == 2)
        p *= state == 1 ? value[0] : 1.0 - value[0];
      else
        p *= value[static_cast<std::size_t>(state)];
    }
    out[cfg] = p;
  }
}

SkillGraph build_fraction_model() {
  std::vector<SkillVariable> vars;
  vars.push_back({.name = "theta_1", .cardinality = 2, .kind = VariableKind::Stochastic,
                  .parents = {}, .slot = "lambda_1"});
  vars.push_back({.name = "theta_2", .cardinality = 2, .kind = VariableKind::Stochastic,
                  .parents = {"theta_1"}, .slot = "lambda_2"});
  vars.push_back({.name = "theta_5", .cardinality = 2, .kind = VariableKind::Stochastic,
                  .parents = {"theta_1", "theta_2"}, .slot = "lambda_5"});
  vars.push_back({.name = "theta_WN", .cardinality = 3, .kind = VariableKind::Stochastic,
                  .parents = {"theta_1", "theta_2", "theta_5"}, .slot = "lambda_WN"});
  // theta_3 = [theta_WN >= 1], theta_4 = [theta_WN = 2]
  vars.push_back({.name = "theta_3", .cardinality = 2, .kind = VariableKind::Deterministic,
                  .parents = {"theta_WN"}, .determinism = {0, 1, 1}});
  vars.push_back({.name = "theta_4", .cardinality = 2, .kind = VariableKind::Deterministic,
                  .parents = {"theta_WN"}, .determinism = {0, 0, 1}});

  std::vector<ParameterSlot> slots;
  slots.push_back({.family = "lambda_1", .z = 0, .kind = SlotKind::Bernoulli, .dim = 1});
  for (int z = 0; z <= 1; ++z)
    slots.push_back({.family = "lambda_2", .z = z, .kind = SlotKind::Bernoulli, .dim = 1});
  for (int z = 0; z <= 2; ++z)
    slots.push_back({.family = "lambda_5", .z = z, .kind = SlotKind::Bernoulli, .dim = 1});
  for (int z = 0; z <= 3; ++z)
    slots.push_back({.family = "lambda_WN", .z = z, .kind = SlotKind::Categorical, .dim = 3});

  return SkillGraph::create(std::move(vars), std::move(slots),
                            {"theta_1", "theta_2", "theta_3", "theta_4", "theta_5"});
}

}  // namespace edubayes

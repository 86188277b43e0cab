#include "edubayes/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "edubayes/errors.hpp"

namespace edubayes {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  throw_io_if(!in, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  throw_io_if(in.bad(), "failed reading '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  throw_io_if(!out, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  throw_io_if(!out.good(), "failed writing '" + path + "'");
}

std::string file_checksum(const std::string& path) {
  const std::string bytes = read_text_file(path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

namespace {

json parse_json(const std::string& text, const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  throw_parse_if(j.is_discarded(), origin + ": malformed JSON");
  return j;
}

void check_header(const json& j, const std::string& format, int version,
                  const std::string& origin) {
  throw_parse_if(!j.is_object(), origin + ": expected a JSON object");
  throw_parse_if(!j.contains("format") || !j["format"].is_string(),
                 origin + ": missing format field");
  throw_parse_if(j["format"].get<std::string>() != format,
                 origin + ": format is '" + j["format"].get<std::string>() + "', expected '" +
                     format + "'");
  throw_parse_if(!j.contains("version"), origin + ": missing version field");
  throw_parse_if(!j["version"].is_number_integer() || j["version"].get<int>() != version,
                 origin + ": unsupported version (expected " + std::to_string(version) + ")");
}

const json& field(const json& j, const char* key, const std::string& origin) {
  throw_parse_if(!j.contains(key), origin + ": missing field '" + key + "'");
  return j[key];
}

double num(const json& j, const char* key, const std::string& origin) {
  const auto& v = field(j, key, origin);
  throw_parse_if(!v.is_number(), origin + ": field '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

int integer(const json& j, const char* key, const std::string& origin) {
  const auto& v = field(j, key, origin);
  throw_parse_if(!v.is_number_integer(),
                 origin + ": field '" + std::string(key) + "' must be an integer");
  return v.get<int>();
}

std::string str(const json& j, const char* key, const std::string& origin) {
  const auto& v = field(j, key, origin);
  throw_parse_if(!v.is_string(), origin + ": field '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> num_array(const json& v, const std::string& origin, const char* what) {
  throw_parse_if(!v.is_array(), origin + ": " + std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    throw_parse_if(!x.is_number(), origin + ": " + std::string(what) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

std::string model_to_json_text(const AssessmentModel& model) {
  json j;
  j["format"] = "edubayes-model";
  j["version"] = 1;

  json vars = json::array();
  for (const auto& v : model.graph.variables()) {
    json entry;
    entry["name"] = v.name;
    entry["cardinality"] = v.cardinality;
    entry["parents"] = v.parents;
    if (v.kind == VariableKind::Stochastic) {
      entry["kind"] = "stochastic";
      entry["slot"] = v.slot;
    } else {
      entry["kind"] = "deterministic";
      entry["determinism"] = v.determinism;
    }
    vars.push_back(std::move(entry));
  }
  j["variables"] = std::move(vars);

  json slots = json::array();
  for (std::size_t s = 0; s < model.graph.slots().size(); ++s) {
    const auto& slot = model.graph.slots()[s];
    json entry;
    entry["family"] = slot.family;
    entry["z"] = slot.z;
    entry["kind"] = slot.kind == SlotKind::Bernoulli ? "bernoulli" : "categorical";
    entry["prior"] = model.lambda_priors[s];
    slots.push_back(std::move(entry));
  }
  j["slots"] = std::move(slots);
  j["reporting_skills"] = model.graph.reporting_skills();

  json ems = json::array();
  for (const auto& em : model.evidence_models) {
    json entry;
    entry["id"] = em.id;
    entry["skills_required"] = em.skills_required.skills_required;
    entry["prior_false_pos"] = {em.prior_false_pos.alpha, em.prior_false_pos.beta};
    entry["prior_true_pos"] = {em.prior_true_pos.alpha, em.prior_true_pos.beta};
    ems.push_back(std::move(entry));
  }
  j["evidence_models"] = std::move(ems);

  json tasks = json::array();
  for (const auto& t : model.tasks) {
    json entry;
    entry["id"] = t.id;
    entry["evidence_model"] = t.evidence_model;
    if (t.pi) entry["pi"] = {{"fp", t.pi->fp}, {"tp", t.pi->tp}};
    if (!t.attributes.empty()) entry["attributes"] = t.attributes;
    tasks.push_back(std::move(entry));
  }
  j["tasks"] = std::move(tasks);

  return j.dump(2) + "\n";
}

AssessmentModel model_from_json_text(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  check_header(j, "edubayes-model", 1, origin);

  std::vector<SkillVariable> vars;
  for (const auto& entry : field(j, "variables", origin)) {
    SkillVariable v;
    v.name = str(entry, "name", origin);
    v.cardinality = integer(entry, "cardinality", origin);
    const std::string kind = str(entry, "kind", origin);
    for (const auto& p : field(entry, "parents", origin)) {
      throw_parse_if(!p.is_string(), origin + ": parents must be strings");
      v.parents.push_back(p.get<std::string>());
    }
    if (kind == "stochastic") {
      v.kind = VariableKind::Stochastic;
      v.slot = str(entry, "slot", origin);
    } else if (kind == "deterministic") {
      v.kind = VariableKind::Deterministic;
      for (const auto& d : field(entry, "determinism", origin)) {
        throw_parse_if(!d.is_number_integer(), origin + ": determinism must hold integers");
        v.determinism.push_back(d.get<int>());
      }
    } else {
      throw_parse(origin + ": variable kind '" + kind + "' is not recognized");
    }
    vars.push_back(std::move(v));
  }

  std::vector<ParameterSlot> slots;
  std::vector<SlotPrior> priors;
  for (const auto& entry : field(j, "slots", origin)) {
    ParameterSlot slot;
    slot.family = str(entry, "family", origin);
    slot.z = integer(entry, "z", origin);
    const std::string kind = str(entry, "kind", origin);
    auto prior = num_array(field(entry, "prior", origin), origin, "slot prior");
    if (kind == "bernoulli") {
      slot.kind = SlotKind::Bernoulli;
      slot.dim = 1;
    } else if (kind == "categorical") {
      slot.kind = SlotKind::Categorical;
      slot.dim = static_cast<int>(prior.size());
    } else {
      throw_parse(origin + ": slot kind '" + kind + "' is not recognized");
    }
    slots.push_back(std::move(slot));
    priors.push_back(std::move(prior));
  }

  std::vector<std::string> reporting;
  for (const auto& r : field(j, "reporting_skills", origin)) {
    throw_parse_if(!r.is_string(), origin + ": reporting skills must be strings");
    reporting.push_back(r.get<std::string>());
  }

  AssessmentModel model;
  model.graph = SkillGraph::create(std::move(vars), std::move(slots), std::move(reporting));
  model.lambda_priors = std::move(priors);

  for (const auto& entry : field(j, "evidence_models", origin)) {
    EvidenceModelSpec em;
    em.id = str(entry, "id", origin);
    for (const auto& y : field(entry, "skills_required", origin)) {
      throw_parse_if(!y.is_number_integer(), origin + ": skills_required must hold integers");
      em.skills_required.skills_required.push_back(y.get<int>());
    }
    auto fp = num_array(field(entry, "prior_false_pos", origin), origin, "prior_false_pos");
    auto tp = num_array(field(entry, "prior_true_pos", origin), origin, "prior_true_pos");
    throw_parse_if(fp.size() != 2 || tp.size() != 2,
                   origin + ": misclassification priors are [alpha, beta] pairs");
    em.prior_false_pos = {fp[0], fp[1]};
    em.prior_true_pos = {tp[0], tp[1]};
    model.evidence_models.push_back(std::move(em));
  }

  for (const auto& entry : field(j, "tasks", origin)) {
    Task t;
    t.id = str(entry, "id", origin);
    t.evidence_model = str(entry, "evidence_model", origin);
    if (entry.contains("pi")) {
      const auto& pi = entry["pi"];
      t.pi = PiPair{num(pi, "fp", origin), num(pi, "tp", origin)};
    }
    if (entry.contains("attributes")) {
      for (const auto& [k, v] : entry["attributes"].items()) {
        throw_parse_if(!v.is_string(), origin + ": task attributes must be strings");
        t.attributes[k] = v.get<std::string>();
      }
    }
    model.tasks.push_back(std::move(t));
  }

  try {
    model.validate();
  } catch (const Error& e) {
    throw_parse(origin + ": " + e.what());
  }
  return model;
}

AssessmentModel load_model(const std::string& path) {
  return model_from_json_text(read_text_file(path), path);
}

void save_model(const AssessmentModel& model, const std::string& path) {
  write_text_file(path, model_to_json_text(model));
}

std::string truth_to_json_text(const AssessmentModel& model, const SyntheticTruth& truth) {
  json j;
  j["format"] = "edubayes-truth";
  j["version"] = 1;
  j["seed"] = truth.seed;

  json lambda = json::array();
  for (std::size_t s = 0; s < model.graph.slots().size(); ++s) {
    const auto& slot = model.graph.slots()[s];
    json entry;
    entry["family"] = slot.family;
    entry["z"] = slot.z;
    entry["value"] = truth.lambda_true.values[s];
    lambda.push_back(std::move(entry));
  }
  j["lambda"] = std::move(lambda);

  json pi = json::array();
  for (std::size_t t = 0; t < model.tasks.size(); ++t) {
    json entry;
    entry["task"] = model.tasks[t].id;
    entry["fp"] = truth.pi_true[t].fp;
    entry["tp"] = truth.pi_true[t].tp;
    pi.push_back(std::move(entry));
  }
  j["pi"] = std::move(pi);

  json names = json::array();
  for (const auto& v : model.graph.variables()) names.push_back(v.name);
  j["variables"] = std::move(names);
  j["theta"] = truth.theta_true;

  return j.dump(2) + "\n";
}

SyntheticTruth truth_from_json_text(const std::string& text, const std::string& origin,
                                    const AssessmentModel& model) {
  const json j = parse_json(text, origin);
  check_header(j, "edubayes-truth", 1, origin);

  SyntheticTruth truth;
  throw_parse_if(!field(j, "seed", origin).is_number_unsigned() &&
                     !field(j, "seed", origin).is_number_integer(),
                 origin + ": seed must be an integer");
  truth.seed = j["seed"].get<std::uint64_t>();

  truth.lambda_true.values.resize(model.graph.slots().size());
  for (const auto& entry : field(j, "lambda", origin)) {
    const std::string family = str(entry, "family", origin);
    const int z = integer(entry, "z", origin);
    const int s = model.graph.slot_index(family, z);
    throw_parse_if(s < 0, origin + ": unknown slot (" + family + ", z=" + std::to_string(z) + ")");
    truth.lambda_true.values[static_cast<std::size_t>(s)] =
        num_array(field(entry, "value", origin), origin, "slot value");
  }
  try {
    model.graph.validate_lambda(truth.lambda_true);
  } catch (const Error& e) {
    throw_parse(origin + ": " + e.what());
  }

  truth.pi_true.assign(model.tasks.size(), PiPair{});
  std::vector<char> seen(model.tasks.size(), 0);
  for (const auto& entry : field(j, "pi", origin)) {
    const std::string id = str(entry, "task", origin);
    int t = -1;
    try {
      t = model.task_index(id);
    } catch (const Error&) {
      throw_parse(origin + ": unknown task '" + id + "'");
    }
    truth.pi_true[static_cast<std::size_t>(t)] = {num(entry, "fp", origin),
                                                  num(entry, "tp", origin)};
    seen[static_cast<std::size_t>(t)] = 1;
  }
  for (std::size_t t = 0; t < seen.size(); ++t)
    throw_parse_if(!seen[t], origin + ": no generating parameters for task '" +
                                 model.tasks[t].id + "'");

  for (const auto& row : field(j, "theta", origin)) {
    std::vector<int> states;
    throw_parse_if(!row.is_array(), origin + ": theta rows must be arrays");
    for (const auto& s : row) {
      throw_parse_if(!s.is_number_integer(), origin + ": theta states must be integers");
      states.push_back(s.get<int>());
    }
    throw_parse_if(static_cast<int>(states.size()) != model.graph.num_vars(),
                   origin + ": theta rows must cover every variable");
    truth.theta_true.push_back(std::move(states));
  }
  return truth;
}

SyntheticTruth load_truth(const std::string& path, const AssessmentModel& model) {
  return truth_from_json_text(read_text_file(path), path, model);
}

void save_truth(const AssessmentModel& model, const SyntheticTruth& truth,
                const std::string& path) {
  write_text_file(path, truth_to_json_text(model, truth));
}

namespace {

const char* ref_kind_name(ScalarRef::Kind kind) {
  switch (kind) {
    case ScalarRef::Kind::Lambda: return "lambda";
    case ScalarRef::Kind::TaskFp: return "fp";
    default: return "tp";
  }
}

}  // namespace

std::string run_to_json_text(const CalibrationRun& run) {
  json j;
  j["format"] = "edubayes-run";
  j["version"] = 1;
  j["mode"] = run.mode;
  j["config"] = {{"chains", run.config.chains},
                 {"burn_in", run.config.burn_in},
                 {"retained", run.config.retained},
                 {"thin", run.config.thin},
                 {"seed", run.config.seed}};

  json params = json::array();
  for (std::size_t s = 0; s < run.names.size(); ++s) {
    const auto& ref = run.refs[s];
    const auto& sum = run.summaries[s];
    json entry;
    entry["name"] = run.names[s];
    entry["kind"] = ref_kind_name(ref.kind);
    if (ref.kind == ScalarRef::Kind::Lambda) {
      entry["family"] = ref.family;
      entry["z"] = ref.z;
      entry["component"] = ref.component;
    } else {
      entry["task"] = ref.task;
    }
    entry["prior"] = {run.base_priors[s].alpha, run.base_priors[s].beta};
    entry["mean"] = sum.mean;
    entry["sd"] = sum.sd;
    entry["alpha_hat"] = sum.alpha_hat;
    entry["beta_hat"] = sum.beta_hat;
    entry["n_hat"] = sum.n_hat;
    entry["rhat"] = sum.rhat;
    params.push_back(std::move(entry));
  }
  j["parameters"] = std::move(params);
  return j.dump(2) + "\n";
}

CalibrationRun run_from_json_text(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  check_header(j, "edubayes-run", 1, origin);

  CalibrationRun run;
  run.mode = str(j, "mode", origin);
  const auto& cfg = field(j, "config", origin);
  run.config.chains = integer(cfg, "chains", origin);
  run.config.burn_in = integer(cfg, "burn_in", origin);
  run.config.retained = integer(cfg, "retained", origin);
  run.config.thin = integer(cfg, "thin", origin);
  run.config.seed = field(cfg, "seed", origin).get<std::uint64_t>();

  for (const auto& entry : field(j, "parameters", origin)) {
    const std::string kind = str(entry, "kind", origin);
    ScalarRef ref;
    if (kind == "lambda") {
      ref.kind = ScalarRef::Kind::Lambda;
      ref.family = str(entry, "family", origin);
      ref.z = integer(entry, "z", origin);
      ref.component = integer(entry, "component", origin);
    } else if (kind == "fp" || kind == "tp") {
      ref.kind = kind == "fp" ? ScalarRef::Kind::TaskFp : ScalarRef::Kind::TaskTp;
      ref.task = str(entry, "task", origin);
    } else {
      throw_parse(origin + ": parameter kind '" + kind + "' is not recognized");
    }
    const auto prior = num_array(field(entry, "prior", origin), origin, "prior");
    throw_parse_if(prior.size() != 2, origin + ": parameter priors are [alpha, beta] pairs");

    ParameterSummary sum;
    sum.name = str(entry, "name", origin);
    sum.mean = num(entry, "mean", origin);
    sum.sd = num(entry, "sd", origin);
    sum.alpha_hat = num(entry, "alpha_hat", origin);
    sum.beta_hat = num(entry, "beta_hat", origin);
    sum.n_hat = num(entry, "n_hat", origin);
    sum.rhat = num(entry, "rhat", origin);

    run.names.push_back(sum.name);
    run.refs.push_back(std::move(ref));
    run.base_priors.push_back({prior[0], prior[1]});
    run.summaries.push_back(std::move(sum));
  }
  return run;
}

CalibrationRun load_run(const std::string& path) {
  return run_from_json_text(read_text_file(path), path);
}

void save_run(const CalibrationRun& run, const std::string& path) {
  write_text_file(path, run_to_json_text(run));
}

std::string draws_to_csv(const CalibrationRun& run) {
  require(!run.draws.empty(), "run carries no retained draws");
  std::ostringstream out;
  out << "chain,draw";
  for (const auto& name : run.names) out << ',' << name;
  out << '\n';
  char buf[32];
  for (std::size_t k = 0; k < run.draws.size(); ++k) {
    const auto& chain = run.draws[k];
    const std::size_t rows = chain.empty() ? 0 : chain.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
      out << k << ',' << r;
      for (const auto& series : chain) {
        std::snprintf(buf, sizeof buf, "%.17g", series[r]);
        out << ',' << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string score_to_json_text(const ScoreReport& report) {
  json j;
  j["format"] = "edubayes-score";
  j["version"] = 1;
  json skills = json::array();
  for (const auto& s : report.skills) {
    json entry;
    entry["skill"] = s.skill;
    entry["prior"] = s.prior;
    entry["posterior"] = s.posterior;
    skills.push_back(std::move(entry));
  }
  j["skills"] = std::move(skills);
  return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

}  // namespace

std::vector<RaschItem> pool_from_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  throw_parse_if(!std::getline(in, line), origin + ": empty file");
  const auto header = split_fields(line);
  throw_parse_if(header.size() < 2 || header[0] != "id" || header[1] != "beta",
                 origin + ":1: header must start with 'id,beta'");

  std::vector<RaschItem> pool;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    throw_parse_if(fields.size() != header.size(),
                   origin + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    RaschItem item;
    item.id = fields[0];
    throw_parse_if(item.id.empty(), origin + ":" + std::to_string(lineno) + ": empty item id");
    if (fields[1].empty()) {
      item.beta = std::nan("");
    } else {
      try {
        std::size_t pos = 0;
        item.beta = std::stod(fields[1], &pos);
        throw_parse_if(pos != fields[1].size(), "");
      } catch (...) {
        throw_parse(origin + ":" + std::to_string(lineno) + ": difficulty '" + fields[1] +
                    "' is not a number");
      }
    }
    for (std::size_t c = 2; c < fields.size(); ++c) {
      try {
        std::size_t pos = 0;
        item.features.push_back(std::stod(fields[c], &pos));
        throw_parse_if(pos != fields[c].size(), "");
      } catch (...) {
        throw_parse(origin + ":" + std::to_string(lineno) + ": feature '" + fields[c] +
                    "' is not a number");
      }
    }
    pool.push_back(std::move(item));
  }
  throw_parse_if(pool.empty(), origin + ": no items");
  for (std::size_t a = 0; a < pool.size(); ++a)
    for (std::size_t b = a + 1; b < pool.size(); ++b)
      throw_parse_if(pool[a].id == pool[b].id, origin + ": duplicate item id '" + pool[a].id + "'");
  return pool;
}

std::string pool_to_csv(const std::vector<RaschItem>& pool) {
  require(!pool.empty(), "empty item pool");
  const std::size_t k = pool.front().features.size();
  std::ostringstream out;
  out << "id,beta";
  for (std::size_t c = 0; c < k; ++c) out << ",f" << c + 1;
  out << '\n';
  char buf[32];
  for (const auto& item : pool) {
    require(item.features.size() == k, "inconsistent feature lengths in pool");
    out << item.id << ',';
    if (!std::isnan(item.beta)) {
      std::snprintf(buf, sizeof buf, "%.17g", item.beta);
      out << buf;
    }
    for (const double f : item.features) {
      std::snprintf(buf, sizeof buf, "%.17g", f);
      out << ',' << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::vector<RaschItem> pool_from_json_text(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  check_header(j, "edubayes-pool", 1, origin);
  std::vector<RaschItem> pool;
  for (const auto& entry : field(j, "items", origin)) {
    RaschItem item;
    item.id = str(entry, "id", origin);
    item.beta = entry.contains("beta") ? num(entry, "beta", origin) : std::nan("");
    if (entry.contains("features"))
      item.features = num_array(entry["features"], origin, "features");
    pool.push_back(std::move(item));
  }
  throw_parse_if(pool.empty(), origin + ": no items");
  return pool;
}

std::string pool_to_json_text(const std::vector<RaschItem>& pool) {
  json j;
  j["format"] = "edubayes-pool";
  j["version"] = 1;
  json items = json::array();
  for (const auto& item : pool) {
    json entry;
    entry["id"] = item.id;
    if (!std::isnan(item.beta)) entry["beta"] = item.beta;
    if (!item.features.empty()) entry["features"] = item.features;
    items.push_back(std::move(entry));
  }
  j["items"] = std::move(items);
  return j.dump(2) + "\n";
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<RaschItem> load_pool(const std::string& path) {
  const std::string text = read_text_file(path);
  if (ends_with(path, ".json")) return pool_from_json_text(text, path);
  return pool_from_csv(text, path);
}

void save_pool(const std::vector<RaschItem>& pool, const std::string& path) {
  if (ends_with(path, ".json"))
    write_text_file(path, pool_to_json_text(pool));
  else
    write_text_file(path, pool_to_csv(pool));
}

std::string cat_traces_to_csv(const CatSimResult& result, const std::string& selector) {
  std::ostringstream out;
  out << "session,selector,step,item,beta,response,post_mean,post_sd,theta_true\n";
  char buf[32];
  const auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
  };
  for (std::size_t k = 0; k < result.sessions.size(); ++k) {
    const auto& session = result.sessions[k];
    for (std::size_t s = 0; s < session.steps.size(); ++s) {
      const auto& step = session.steps[s];
      out << k + 1 << ',' << selector << ',' << s + 1 << ',' << step.item << ',';
      put(step.beta);
      out << ',' << step.response << ',';
      put(step.post_mean);
      out << ',';
      put(step.post_sd);
      out << ',';
      put(session.theta_true);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace edubayes

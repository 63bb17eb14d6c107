#ifndef WMRL_SESSION_IO_HPP
#define WMRL_SESSION_IO_HPP

// CSV sessions and JSON configs / fronts.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wmrl/fitting.hpp"

namespace wmrl {

using nlohmann::json;

inline constexpr const char* kSessionHeader =
    "session_id,problem_index,trial_index,phase,chosen_action,reward,rt,correct_action";

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& s, std::size_t row, const char* column) {
  T v{};
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw DataError("row " + std::to_string(row) + ": bad " + column + " '" + s + "'");
  return v;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses session CSV text. Row numbers in errors count the header as row 1.
inline Dataset parse_sessions(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty session file (header row required)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != kSessionHeader) throw DataError("row 1: expected header '" + std::string(kSessionHeader) + "'");

  Dataset data;
  std::vector<std::size_t> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 8)
      throw DataError("row " + std::to_string(row) + ": expected 8 columns, got " + std::to_string(f.size()));
    TrialRecord t;
    t.session_id = f[0];
    if (t.session_id.empty()) throw DataError("row " + std::to_string(row) + ": empty session_id");
    t.problem_index = detail::parse_number<std::size_t>(f[1], row, "problem_index");
    t.trial_index = detail::parse_number<std::size_t>(f[2], row, "trial_index");
    if (f[3] == "S") t.phase = Phase::Search;
    else if (f[3] == "R") t.phase = Phase::Repetition;
    else throw DataError("row " + std::to_string(row) + ": phase must be S or R");
    t.chosen_action = detail::parse_number<int>(f[4], row, "chosen_action");
    t.reward = detail::parse_number<int>(f[5], row, "reward");
    t.correct_action = detail::parse_number<int>(f[7], row, "correct_action");
    if (t.chosen_action < 0 || t.chosen_action >= kNumActions)
      throw DataError("row " + std::to_string(row) + ": chosen_action outside 0..3");
    if (t.correct_action < 0 || t.correct_action >= kNumActions)
      throw DataError("row " + std::to_string(row) + ": correct_action outside 0..3");
    if (t.reward != 0 && t.reward != 1) throw DataError("row " + std::to_string(row) + ": reward must be 0 or 1");
    if (!f[6].empty()) {
      const double rt = detail::parse_number<double>(f[6], row, "rt");
      if (!std::isfinite(rt)) throw DataError("row " + std::to_string(row) + ": rt is not finite");
      t.rt = rt;
    } else {
      data.has_rt = false;
    }
    data.trials.push_back(std::move(t));
    rows.push_back(row);
  }
  label_problems(data.trials, [&](std::size_t k) { return rows[k]; });
  return data;
}

inline Dataset load_sessions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_sessions(in);
}

inline void write_sessions(std::ostream& out, const std::vector<TrialRecord>& trials) {
  out << kSessionHeader << '\n';
  for (const auto& t : trials) {
    out << t.session_id << ',' << t.problem_index << ',' << t.trial_index << ',' << phase_code(t.phase) << ','
        << t.chosen_action << ',' << t.reward << ',' << (t.rt ? detail::format_double(*t.rt) : "") << ','
        << t.correct_action << '\n';
  }
}

/// Free-choice session of `problems` problems from a fresh agent.
inline std::vector<TrialRecord> synth_generate(const AgentConfig& cfg, std::size_t problems, std::uint64_t seed,
                                               const std::string& session_id = "synth") {
  Rng task_rng(derive_seed(seed, 1));
  const auto chain = generate_session(task_rng, problems);
  std::optional<MetaEntropyTable> meta;
  if (cfg.flags.meta) meta = build_meta_table(cfg, chain, derive_seed(seed, 3));
  Agent agent(cfg, meta);
  Rng rng(derive_seed(seed, 2));
  std::vector<TrialRecord> out;
  for (auto& t : simulate_chain(agent, chain, rng, session_id)) out.push_back(std::move(t.rec));
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline json params_to_json(const AgentConfig& cfg) {
  json p = json::object();
  for (ParamId id : active_params(cfg.model, cfg.flags)) p[std::string(param_info(id).name)] = cfg.params[id];
  return p;
}

inline json flags_to_json(const VariationFlags& f) {
  return {{"free_gamma", f.free_gamma}, {"no_init", f.no_init}, {"decay", f.decay},
          {"ant", f.ant},               {"meta", f.meta},       {"thr", f.thr}};
}

inline json config_to_json(const AgentConfig& cfg) {
  json j = {{"model", std::string(to_string(cfg.model))}, {"variation", cfg.variation}, {"params", params_to_json(cfg)}};
  if (cfg.variation == 0) j["flags"] = flags_to_json(cfg.flags);
  if (cfg.meta_phase_only) j["meta_phase_only"] = true;
  if (cfg.model == ModelKind::Mixture && (cfg.mixture.reliability != ReliabilitySource::ChoiceProbability ||
                                          !cfg.mixture.reset_weight))
    j["mixture"] = {{"reliability", cfg.mixture.reliability == ReliabilitySource::ChoiceProbability ? "choice" : "reward"},
                    {"reset_weight", cfg.mixture.reset_weight}};
  return j;
}

inline AgentConfig config_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("agent config must be a JSON object");
    const ModelKind kind = parse_model_kind(j.at("model").get<std::string>());
    ParamVector params;
    if (j.contains("params")) {
      for (const auto& [name, v] : j.at("params").items()) {
        if (!v.is_number()) throw ConfigError("parameter " + name + " must be a number");
        params[parse_param(name)] = v.get<double>();
      }
    }
    AgentConfig cfg;
    if (j.contains("flags")) {
      VariationFlags f;
      const auto& fj = j.at("flags");
      for (const auto& [name, v] : fj.items()) {
        const bool b = v.get<bool>();
        if (name == "free_gamma") f.free_gamma = b;
        else if (name == "no_init") f.no_init = b;
        else if (name == "decay") f.decay = b;
        else if (name == "ant") f.ant = b;
        else if (name == "meta") f.meta = b;
        else if (name == "thr") f.thr = b;
        else throw ConfigError("unknown flag " + name);
      }
      cfg = make_config(kind, f, params);
    } else {
      cfg = make_config(kind, j.value("variation", 1), params);
    }
    cfg.meta_phase_only = j.value("meta_phase_only", false);
    if (j.contains("mixture")) {
      const auto& m = j.at("mixture");
      const std::string rel = m.value("reliability", std::string("choice"));
      if (rel == "choice") cfg.mixture.reliability = ReliabilitySource::ChoiceProbability;
      else if (rel == "reward") cfg.mixture.reliability = ReliabilitySource::RewardEstimate;
      else throw ConfigError("mixture reliability must be 'choice' or 'reward'");
      cfg.mixture.reset_weight = m.value("reset_weight", true);
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("agent config: ") + e.what());
  }
}

inline FitRunConfig fit_run_from_json(const json& j) {
  try {
    FitRunConfig run;
    run.model = parse_model_kind(j.at("model").get<std::string>());
    run.variation = j.value("variation", 1);
    variation_flags(run.model, run.variation);
    run.population = j.value("population", run.population);
    run.generations = j.value("generations", run.generations);
    run.seed = j.value("seed", run.seed);
    run.replicates = j.value("replicates", run.replicates);
    run.report_replicates = j.value("report_replicates", run.report_replicates);
    run.fit_rt = j.value("fit_rt", run.fit_rt);
    run.crossover_rate = j.value("crossover_rate", run.crossover_rate);
    run.mutation_rate = j.value("mutation_rate", run.mutation_rate);
    run.threads = j.value("threads", run.threads);
    if (j.contains("bounds"))
      for (const auto& [name, b] : j.at("bounds").items()) {
        if (!b.is_array() || b.size() != 2) throw ConfigError("bounds for " + name + " must be [lo, hi]");
        run.bounds[name] = {b[0].get<double>(), b[1].get<double>()};
      }
    if (run.population < 4 || run.population % 2 != 0) throw ConfigError("population must be even and at least 4");
    return run;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("fit config: ") + e.what());
  }
}

inline json solution_to_json(const Solution& s) {
  json j = config_to_json(s.cfg);
  j["negll"] = s.objectives.neg_log_likelihood_choice;
  j["rt_mse"] = s.objectives.rt_mse;
  return j;
}

inline json front_to_json(const ParetoFront& front) {
  json a = json::array();
  for (const auto& s : front.solutions) a.push_back(solution_to_json(s));
  return a;
}

inline ParetoFront front_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("front must be a JSON array");
  ParetoFront front;
  for (const auto& e : j) {
    Solution s;
    s.cfg = config_from_json(e);
    try {
      s.objectives = {e.at("negll").get<double>(), e.at("rt_mse").get<double>()};
    } catch (const json::exception& ex) {
      throw ConfigError(std::string("front entry: ") + ex.what());
    }
    front.solutions.push_back(std::move(s));
  }
  return front;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace wmrl

#endif  // WMRL_SESSION_IO_HPP

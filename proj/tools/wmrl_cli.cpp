// wmrl: synth / fit / select / simulate / bic / validate

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "wmrl/wmrl.hpp"

namespace fs = std::filesystem;
using namespace wmrl;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitConfig = 3;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out.precision(17);
  return out;
}

void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  open_out(path) << j.dump(2) << '\n';
}

int run_synth(const std::string& config, std::size_t problems, std::uint64_t seed, const std::string& out) {
  const AgentConfig cfg = config_from_json(read_json_file(config));
  const auto trials = synth_generate(cfg, problems, seed);
  if (out.empty() || out == "-") {
    write_sessions(std::cout, trials);
  } else {
    auto f = open_out(out);
    write_sessions(f, trials);
  }
  return 0;
}

int run_fit(const std::string& config, const std::string& data_path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> reps, const std::string& out) {
  FitRunConfig run = fit_run_from_json(read_json_file(config));
  if (seed) run.seed = *seed;
  if (reps) run.replicates = *reps;
  const Dataset data = load_sessions(data_path);
  const ParetoFront front = nsga2_fit(make_config(run.model, run.variation), data, run);
  write_json(out, front_to_json(front));
  return 0;
}

int run_select(const std::string& front_path, const std::string& out) {
  const ParetoFront front = front_from_json(read_json_file(front_path));
  if (front.solutions.empty()) throw ConfigError("front is empty");
  const RankedSolution best = chebyshev_rank(front);
  json j = solution_to_json(best.solution);
  j["chebyshev"] = best.score;
  j["front_index"] = best.index;
  write_json(out, j);
  return 0;
}

int run_bic(const std::string& config, const std::string& data_path, const std::string& out) {
  const json cj = read_json_file(config);
  const Dataset data = load_sessions(data_path);
  json rows = json::array();
  const auto one = [&](const json& entry) {
    const AgentConfig cfg = config_from_json(entry);
    const double nll = choice_negll(cfg, data);
    const std::size_t k = param_count(cfg);
    rows.push_back({{"model", std::string(to_string(cfg.model))},
                    {"variation", cfg.variation},
                    {"negll", nll},
                    {"k", k},
                    {"n", data.size()},
                    {"bic", bic(nll, k, data.size())}});
  };
  if (cj.is_array()) {
    for (const auto& e : cj) one(e);
  } else {
    one(cj);
  }
  // Uniform random chooser for reference.
  const double rnd = static_cast<double>(data.size()) * std::log(static_cast<double>(kNumActions));
  rows.push_back({{"model", "random"}, {"negll", rnd}, {"k", 0}, {"n", data.size()}, {"bic", bic(rnd, 0, data.size())}});
  write_json(out, rows);
  return 0;
}

void write_reports(const ReplayResult& res, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto f = open_out((dir / "performance_by_errors.csv").string());
    f << "errors,repeat,n,mean,sem\n";
    for (const auto& r : res.performance.rows)
      f << r.errors << ',' << r.repeat << ',' << r.n << ',' << r.mean << ',' << r.sem << '\n';
  }
  {
    double rt_center = 0.0;
    std::size_t cells = 0;
    for (const auto& g : res.curve.groups)
      for (const auto& p : g.positions)
        if (p.rt_n > 0) {
          rt_center += p.rt_mean;
          ++cells;
        }
    if (cells > 0) rt_center /= static_cast<double>(cells);
    auto f = open_out((dir / "representative_curve.csv").string());
    f << "errors,position,phase,n,perf_mean,perf_sem,rt_mean,rt_centered,rt_sem\n";
    for (const auto& g : res.curve.groups)
      for (const auto& p : g.positions)
        f << g.errors << ',' << p.position << ',' << phase_code(p.phase) << ',' << p.n << ',' << p.perf_mean << ','
          << p.perf_sem << ',' << p.rt_mean << ',' << p.rt_mean - rt_center << ',' << p.rt_sem << '\n';
  }
  {
    auto f = open_out((dir / "contribution_trace.csv").string());
    f << "errors,position,phase,items_retrieved,weight,update_probability\n";
    for (const auto& p : res.trace.points) {
      f << p.errors << ',' << p.position << ',' << phase_code(p.phase) << ',' << p.items_retrieved << ',';
      if (res.trace.has_weight) f << p.weight;
      f << ',' << p.update_probability << '\n';
    }
  }
  {
    auto f = open_out((dir / "density.csv").string());
    f << "errors,problems,density\n";
    for (const auto& g : res.curve.groups) f << g.errors << ',' << g.problem_count << ',' << g.density << '\n';
  }
}

int run_simulate(const std::string& config, const std::string& data_path, std::size_t problems, std::uint64_t seed,
                 std::size_t reps, std::size_t threads, bool dump_trials, const std::string& out) {
  const AgentConfig cfg = config_from_json(read_json_file(config));
  std::vector<ProblemSpec> chain;
  if (!data_path.empty()) {
    chain = problem_chain(load_sessions(data_path));
  } else {
    Rng rng(derive_seed(seed, 1));
    chain = generate_session(rng, problems);
  }
  if (chain.empty()) throw DataError("no problems to simulate");
  ReplayOptions opts;
  opts.keep_trials = dump_trials;
  opts.threads = threads;
  const ReplayResult res = replay_simulate(cfg, chain, reps, seed, opts);
  if (out.empty()) throw ConfigError("simulate needs --out <directory>");
  write_reports(res, out);
  if (dump_trials) {
    std::vector<TrialRecord> recs;
    for (const auto& t : res.trials) recs.push_back(t.rec);
    auto f = open_out((fs::path(out) / "trials.csv").string());
    write_sessions(f, recs);
  }
  for (const auto& n : res.curve.notes) std::cerr << "note: " << n << '\n';
  return 0;
}

int run_validate(const std::string& data_path, const std::string& out) {
  const Dataset data = load_sessions(data_path);
  const auto curve = representative_steps(data.trials);
  const auto perf = performance_by_error_count(data.trials);
  std::size_t problems = split_problems(data.trials).size();
  std::size_t incomplete = 0;
  for (const auto& p : split_problems(data.trials))
    if (co1_index(p) < 0) ++incomplete;
  for (const auto& r : perf.rows)
    if (r.mean < 0.0 || r.mean > 1.0) throw DataError("performance outside [0, 1]");
  std::size_t counted = 0;
  for (const auto& g : curve.groups) counted += g.problem_count;
  if (counted != curve.included_problems) throw DataError("group counts do not add up to included problems");
  json j = {{"trials", data.size()},
            {"problems", problems},
            {"unsolved_problems", incomplete},
            {"representative_problems", curve.included_problems},
            {"excluded_problems", curve.excluded_problems},
            {"has_rt", data.has_rt}};
  write_json(out, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Working-memory / reinforcement-learning task models"};
  app.require_subcommand(1);

  std::string config, data, out, front;
  std::uint64_t seed = 1;
  std::size_t reps = 1000, problems = 300, threads = 0;
  bool dump_trials = false;

  auto* synth = app.add_subcommand("synth", "simulate an agent on a fresh session and write a session CSV");
  synth->add_option("--config", config, "agent config JSON")->required();
  synth->add_option("--problems", problems, "number of problems");
  synth->add_option("--seed", seed);
  synth->add_option("--out", out, "output CSV (stdout if omitted)");

  auto* fit = app.add_subcommand("fit", "NSGA-II fit; writes the Pareto front");
  std::optional<std::uint64_t> fit_seed;
  std::optional<std::size_t> fit_reps;
  fit->add_option("--config", config, "fit run JSON")->required();
  fit->add_option("--data", data, "session CSV")->required();
  fit->add_option("--seed", fit_seed);
  fit->add_option("--reps", fit_reps, "replays per candidate");
  fit->add_option("--out", out, "front JSON (stdout if omitted)");

  auto* select = app.add_subcommand("select", "Chebyshev choice over a saved front");
  select->add_option("--front,--config", front, "front JSON")->required();
  select->add_option("--out", out);

  auto* simulate = app.add_subcommand("simulate", "replay an agent and write report tables");
  simulate->add_option("--config", config, "agent config JSON")->required();
  simulate->add_option("--data", data, "session CSV whose problem chain is replayed");
  simulate->add_option("--problems", problems, "fresh chain length when --data is absent");
  simulate->add_option("--seed", seed);
  simulate->add_option("--reps", reps);
  simulate->add_option("--threads", threads);
  simulate->add_flag("--trials", dump_trials, "also write every simulated trial");
  simulate->add_option("--out", out, "output directory")->required();

  auto* bic_cmd = app.add_subcommand("bic", "choice negLL and BIC of configs on a dataset");
  bic_cmd->add_option("--config", config, "agent config JSON or a list of them")->required();
  bic_cmd->add_option("--data", data, "session CSV")->required();
  bic_cmd->add_option("--out", out);

  auto* validate = app.add_subcommand("validate", "check a session CSV");
  validate->add_option("--data", data, "session CSV")->required();
  validate->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth) return run_synth(config, problems, seed, out);
    if (*fit) return run_fit(config, data, fit_seed, fit_reps, out);
    if (*select) return run_select(front, out);
    if (*simulate) return run_simulate(config, data, problems, seed, reps, threads, dump_trials, out);
    if (*bic_cmd) return run_bic(config, data, out);
    if (*validate) return run_validate(data, out);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}

#include <charconv>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "cpssperso/cli.hpp"
#include "cpssperso/evaluate.hpp"
#include "cpssperso/format.hpp"
#include "cpssperso/graph_io.hpp"

namespace cpssperso::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::optional<json> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_object() && doc.contains("config") && doc.contains("config_hash")) return doc;
  return std::nullopt;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::string describe(const meta::SosClassification& c) {
  if (c.is_true_cpss) {
    std::string axioms;
    for (auto a : c.matched_axioms) {
      if (a == meta::Axiom::Other) continue;
      axioms += (axioms.empty() ? "" : ", ") + std::string(meta::to_string(a));
    }
    return "true CPSS (axiom " + axioms + ")";
  }
  if (c.is_sos) return "SoS, not true CPSS";
  return "not a SoS";
}

// ---------------------------------------------------------------- classify

int cmd_classify(const fs::path& graph_path) {
  const auto graph = meta::load_graph(graph_path);
  const auto report = meta::validate_graph(graph);
  if (!report.empty()) {
    std::cout << "invalid graph '" << graph.id << "'\n"
              << json{{"violations", meta::report_to_json(report)}}.dump(2) << '\n';
    return kExitConfig;
  }
  const auto c = meta::classify_sos(graph);
  std::cout << graph.id << ": " << describe(c) << '\n';
  for (const auto& node : graph.nodes) {
    std::cout << "  " << node.id << ": "
              << meta::to_string(meta::classify_system(node.components)) << '\n';
  }
  json out = meta::classification_to_json(c);
  out["graph"] = graph.id;
  out["summary"] = describe(c);
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int cmd_validate(const fs::path& graph_path) {
  const auto graph = meta::load_graph(graph_path);
  const auto report = meta::validate_graph(graph);
  json out{{"graph", graph.id},
           {"valid", report.empty()},
           {"violations", meta::report_to_json(report)}};
  std::cout << (report.empty() ? "valid" : "invalid") << '\n' << out.dump(2) << '\n';
  return report.empty() ? kExitOk : kExitConfig;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  fs::path config;
  std::string agent;
  bool partial_obs = false;
  std::string out;
};

void write_vi_metrics(const std::vector<double>& deltas, const fs::path& path) {
  std::ostringstream out;
  out << "iteration,delta\n";
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    out << i + 1 << ',' << format_double(deltas[i]) << '\n';
  }
  write_file(path, out.str());
}

int cmd_train(const TrainArgs& args) {
  const auto manifest = read_manifest(args.config);
  ExperimentConfig cfg = load_config(args.config);
  apply_seed_override(cfg);

  std::string agent = args.agent;
  bool partial = args.partial_obs;
  if (agent.empty() && manifest) {
    agent = manifest->value("agent", "tabular");
    partial = partial || manifest->value("partial_obs", false);
  }
  if (agent.empty()) agent = "tabular";
  if (agent != "tabular" && agent != "dqn" && agent != "vi") {
    throw Error(ErrorKind::Config, "unknown agent '" + agent + "'");
  }
  if (agent == "vi" && partial) {
    throw Error(ErrorKind::Config, "value iteration needs the full state; drop --partial-obs");
  }

  std::vector<std::string> warnings;
  const env::EnvParams envp = resolve_env(cfg, &warnings);
  print_warnings(warnings);

  const fs::path dir = args.out.empty() ? cfg.output_dir / cfg.run_id : fs::path(args.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

  std::string artifact;
  if (agent == "tabular") {
    const auto run = rl::train_tabular(envp, cfg.schedule, envp.gamma, {partial});
    rl::write_metrics_csv(run.metrics, dir / "metrics.csv");
    artifact = "qtable.bin";
    rl::save_qtable(run.q, envp.gamma, dir / artifact);
  } else if (agent == "vi") {
    const auto vi = rl::value_iteration(env::to_finite_mdp(envp), envp.gamma, 1e-10);
    write_vi_metrics(vi.deltas, dir / "metrics.csv");
    artifact = "qtable.bin";
    rl::save_qtable(vi.q, envp.gamma, dir / artifact);
  } else {
    const auto run = dqn::train_dqn(envp, cfg.dqn, partial);
    dqn::write_metrics_csv(run.metrics, dir / "metrics.csv");
    artifact = "params.txt";
    dqn::save_params(run.params, dir / artifact);
  }

  const std::string hash = config_hash(cfg);
  json record{{"run_id", cfg.run_id},
              {"agent", agent},
              {"partial_obs", partial},
              {"config_hash", hash},
              {"seed", agent == "dqn" ? cfg.dqn.seed : cfg.env.seed},
              {"provenance", "cpssperso-0.1.0+" + hash.substr(0, 8) + " agent=" + agent},
              {"files", {{"metrics", "metrics.csv"}, {"artifact", artifact}}},
              {"warnings", warnings},
              {"config", config_to_json(cfg)}};
  write_file(dir / "run.json", record.dump(2) + "\n");
  std::cout << "run " << cfg.run_id << " (" << agent << ", config " << hash << ") -> "
            << dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  fs::path artifact;
  fs::path config;
  std::size_t episodes = 100;
  bool partial_obs = false;
  std::string out;
};

std::string first_word(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string word;
  in >> word;
  return word;
}

int cmd_evaluate(const EvaluateArgs& args) {
  ExperimentConfig cfg = load_config(args.config);
  apply_seed_override(cfg);
  std::vector<std::string> warnings;
  const env::EnvParams envp = resolve_env(cfg, &warnings);
  print_warnings(warnings);

  eval::Agent agent;
  const std::string kind = first_word(args.artifact);
  if (kind == "qtable") {
    const auto q = rl::load_qtable(args.artifact);
    if (q.num_states() != env::num_states(envp) || q.num_actions() != env::kNumActions) {
      throw Error(ErrorKind::ShapeError,
                  "Q-table is " + std::to_string(q.num_states()) + "x" +
                      std::to_string(q.num_actions()) + " but the environment has " +
                      std::to_string(env::num_states(envp)) + " states and " +
                      std::to_string(env::kNumActions) + " actions");
    }
    agent = eval::tabular_agent(rl::greedy_policy(q), envp, args.partial_obs);
  } else if (kind == "mlp") {
    auto params = dqn::load_params(args.artifact);
    if (params.input_dim() != dqn::feature_dim(envp) ||
        params.output_dim() != env::kNumActions) {
      throw Error(ErrorKind::ShapeError,
                  "network shape does not match the environment features/actions");
    }
    agent = [params = std::move(params), envp, partial = args.partial_obs](
                const env::WorkshopState& s, const env::Observation& o) {
      return rl::argmax(dqn::forward(params, partial ? dqn::encode_features(o, envp)
                                                     : dqn::encode_features(s, envp)));
    };
  } else {
    throw Error(ErrorKind::Parse, args.artifact.string() + " is not a Q-table or network file");
  }

  json summary{{"artifact", args.artifact.string()},
               {"episodes", args.episodes},
               {"seed", envp.seed}};
  if (args.episodes == 0) {
    summary["mean_return"] = nullptr;
    summary["worker_match_rate"] = nullptr;
    summary["safety_violation_rate"] = nullptr;
    std::cout << "episodes: 0 (nothing evaluated)\n";
  } else {
    const auto r = eval::evaluate(agent, envp, args.episodes, envp.seed);
    summary["mean_return"] = r.mean_return;
    summary["worker_match_rate"] = r.match_rate;
    summary["safety_violation_rate"] = 1.0 - r.safety_rate;
    std::cout << "episodes: " << r.episodes << '\n'
              << "mean return: " << format_double(r.mean_return) << '\n'
              << "worker-match rate: " << format_double(r.match_rate) << '\n'
              << "safety-violation rate: " << format_double(1.0 - r.safety_rate) << '\n';
  }
  const fs::path out = args.out.empty() ? args.artifact.parent_path() / "evaluation.json"
                                        : fs::path(args.out);
  write_file(out, summary.dump(2) + "\n");
  return kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  fs::path config;
  std::string param;
  std::string values;
  std::string agent = "vi";
  std::size_t episodes = 100;
  std::string out;
};

const std::map<std::string, std::string>& param_aliases() {
  static const std::map<std::string, std::string> aliases{
      {"w_worker", "env.weights.w_worker"},
      {"w_team", "env.weights.w_team"},
      {"w_context", "env.weights.w_context"},
      {"alpha", "env.alpha"},
      {"gamma", "env.gamma"},
      {"noise_p", "env.noise_p"},
  };
  return aliases;
}

json::json_pointer pointer_for(const std::string& key) {
  const auto& aliases = param_aliases();
  const auto it = aliases.find(key);
  std::string path = it != aliases.end() ? it->second : key;
  std::string ptr;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw Error(ErrorKind::Config, "malformed parameter key '" + key + "'");
    ptr += "/" + part;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return json::json_pointer(ptr);
}

std::vector<std::pair<std::string, double>> parse_values(const std::string& text) {
  std::vector<std::pair<std::string, double>> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, e - b + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorKind::Config, "sweep value '" + item + "' is not a number");
    }
    out.emplace_back(item, v);
  }
  if (out.empty()) throw Error(ErrorKind::Config, "sweep needs at least one value");
  return out;
}

struct SweepRow {
  std::string value;
  std::uint64_t seed = 0;
  double mean_return = 0.0;
  double match_rate = 0.0;
};

SweepRow sweep_point(const ExperimentConfig& cfg, const std::string& agent,
                     std::size_t episodes) {
  const env::EnvParams envp = resolve_env(cfg);
  rl::Policy policy;
  if (agent == "vi") {
    rl::ViOptions opts;
    opts.backend = kernels::Backend::Serial;
    policy = rl::greedy_policy(
        rl::value_iteration(env::to_finite_mdp(envp), envp.gamma, 1e-10, opts).q);
  } else if (agent == "tabular") {
    policy = rl::greedy_policy(rl::train_tabular(envp, cfg.schedule, envp.gamma).q);
  } else {
    auto dcfg = cfg.dqn;
    dcfg.backend = kernels::Backend::Serial;
    policy = dqn::greedy_policy(dqn::train_dqn(envp, dcfg).params, envp);
  }
  SweepRow row;
  row.seed = envp.seed;
  row.mean_return = episodes == 0 ? 0.0
                                  : eval::evaluate(eval::tabular_agent(policy, envp), envp,
                                                   episodes, envp.seed)
                                        .mean_return;
  row.match_rate = rl::policy_match_rate(policy, envp);
  return row;
}

int cmd_sweep(const SweepArgs& args) {
  if (args.agent != "vi" && args.agent != "tabular" && args.agent != "dqn") {
    throw Error(ErrorKind::Config, "unknown agent '" + args.agent + "'");
  }
  ExperimentConfig base = load_config(args.config);
  apply_seed_override(base);
  const json doc = config_to_json(base);
  const auto ptr = pointer_for(args.param);
  if (!doc.contains(ptr) || !doc.at(ptr).is_number()) {
    throw Error(ErrorKind::Config, "'" + args.param + "' is not a numeric config field");
  }
  const bool integral = doc.at(ptr).is_number_unsigned();
  const auto values = parse_values(args.values);

  std::vector<ExperimentConfig> configs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    json point = doc;
    const double v = values[i].second;
    if (integral) {
      if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
        throw Error(ErrorKind::Config,
                    "'" + args.param + "' takes non-negative integers, got " + values[i].first);
      }
      point[ptr] = static_cast<std::uint64_t>(v);
    } else {
      point[ptr] = v;
    }
    point["env"]["seed"] = base.env.seed + i;
    point["dqn"]["seed"] = base.dqn.seed + i;
    configs.push_back(config_from_json(point));
  }

  // Points are independent single-threaded runs; results land in fixed slots
  // so the CSV does not depend on scheduling.
  std::vector<SweepRow> rows(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const long n = static_cast<long>(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    try {
      rows[ui] = sweep_point(configs[ui], args.agent, args.episodes);
      rows[ui].value = values[ui].first;
    } catch (...) {
      errors[ui] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ostringstream csv;
  csv << "value,seed,mean_return,match_rate\n";
  for (const auto& r : rows) {
    csv << r.value << ',' << r.seed << ',' << format_double(r.mean_return) << ','
        << format_double(r.match_rate) << '\n';
  }
  fs::path out;
  if (args.out.empty()) {
    const fs::path dir = base.output_dir / base.run_id;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
    out = dir / "sweep.csv";
  } else {
    out = args.out;
  }
  write_file(out, csv.str());
  std::cout << csv.str();
  return kExitOk;
}

// ---------------------------------------------------------- emit-plot-data

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const fs::path& file) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::Parse, file.string() + ": bad number '" + text + "'");
  }
  return v;
}

int cmd_emit_plot_data(const fs::path& dir, std::size_t window) {
  if (window == 0) throw Error(ErrorKind::Config, "window must be positive");
  const fs::path metrics = dir / "metrics.csv";
  std::ifstream in(metrics);
  if (!in) throw Error(ErrorKind::Config, "no metrics.csv in " + dir.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, metrics.string() + " is empty");
  const auto header = split_csv(line);
  auto column = [&](const char* name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto ep_col = column("episode");
  auto ret_col = column("return");
  const bool per_step = !ret_col && column("episode_return");
  if (per_step) ret_col = column("episode_return");
  if (!ep_col || !ret_col) {
    throw Error(ErrorKind::Config, metrics.string() + " has no per-episode return series");
  }

  // Per-step metrics carry the running return; an episode's return is its
  // last row. A trailing episode shorter than the horizon is dropped.
  std::vector<double> episodes, returns, lengths;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::Parse, metrics.string() + ": ragged row '" + line + "'");
    }
    const double ep = parse_number(cells[*ep_col], metrics);
    const double r = parse_number(cells[*ret_col], metrics);
    if (per_step && !episodes.empty() && episodes.back() == ep) {
      returns.back() = r;
      lengths.back() += 1;
    } else {
      episodes.push_back(ep);
      returns.push_back(r);
      lengths.push_back(1);
    }
  }
  if (per_step && !episodes.empty()) {
    if (const auto manifest = read_manifest(dir / "run.json")) {
      const double horizon = manifest->at("config").at("env").value("horizon", 0.0);
      if (lengths.back() < horizon) {
        episodes.pop_back();
        returns.pop_back();
      }
    }
  }
  if (returns.empty()) throw Error(ErrorKind::Config, metrics.string() + " has no episodes");

  std::ostringstream raw;
  raw << "episode,return\n";
  for (std::size_t i = 0; i < returns.size(); ++i) {
    raw << format_double(episodes[i]) << ',' << format_double(returns[i]) << '\n';
  }
  const auto smooth = moving_average(returns, window);
  std::ostringstream sm;
  sm << "episode,smoothed_return\n";
  const std::size_t first = returns.size() - smooth.size();
  for (std::size_t i = 0; i < smooth.size(); ++i) {
    sm << format_double(episodes[first + i]) << ',' << format_double(smooth[i]) << '\n';
  }
  write_file(dir / "plot_raw.csv", raw.str());
  write_file(dir / "plot_smoothed.csv", sm.str());
  std::cout << "wrote " << returns.size() << " raw and " << smooth.size()
            << " smoothed rows to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"CPSS meta-model classification and cobot personalisation experiments",
               "cpssperso"};
  app.require_subcommand(1);

  fs::path graph_path;
  auto* classify = app.add_subcommand("classify", "Classify a system-of-systems graph");
  classify->add_option("graph", graph_path, "Graph file (JSON)")->required();
  auto* validate = app.add_subcommand("validate", "Validate a system-of-systems graph");
  validate->add_option("graph", graph_path, "Graph file (JSON)")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train an agent and write a run directory");
  train_cmd->add_option("config", train.config, "Config file or run manifest")->required();
  train_cmd->add_option("--agent", train.agent, "tabular, dqn or vi");
  train_cmd->add_flag("--partial-obs", train.partial_obs, "Act on the inferred worker state");
  train_cmd->add_option("--out", train.out, "Run directory (default output_dir/run_id)");

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Greedy rollouts of a trained artifact");
  eval_cmd->add_option("artifact", evaluate.artifact, "qtable.bin or params.txt")->required();
  eval_cmd->add_option("config", evaluate.config, "Config file or run manifest")->required();
  eval_cmd->add_option("--episodes", evaluate.episodes, "Number of episodes");
  eval_cmd->add_flag("--partial-obs", evaluate.partial_obs, "Act on the inferred worker state");
  eval_cmd->add_option("--out", evaluate.out, "Summary file (default next to the artifact)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one experiment per parameter value");
  sweep_cmd->add_option("config", sweep.config, "Config file")->required();
  sweep_cmd->add_option("--param", sweep.param, "Numeric key, dotted or an alias such as w_worker")
      ->required();
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated values")->required();
  sweep_cmd->add_option("--agent", sweep.agent, "vi (default), tabular or dqn");
  sweep_cmd->add_option("--episodes", sweep.episodes, "Evaluation episodes per point");
  sweep_cmd->add_option("--out", sweep.out, "Output CSV");

  fs::path run_dir;
  std::size_t window = 100;
  auto* plot = app.add_subcommand("emit-plot-data", "Write learning-curve series for a run");
  plot->add_option("rundir", run_dir, "Run directory")->required();
  plot->add_option("--window", window, "Moving-average window");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*classify) return cmd_classify(graph_path);
    if (*validate) return cmd_validate(graph_path);
    if (*train_cmd) return cmd_train(train);
    if (*eval_cmd) return cmd_evaluate(evaluate);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*plot) return cmd_emit_plot_data(run_dir, window);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitFailure;
}

}  // namespace cpssperso::cli

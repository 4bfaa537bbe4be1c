#include <cerrno>
#include <concepts>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "cpssperso/cli.hpp"
#include "cpssperso/graph_io.hpp"

namespace cpssperso::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Config, where + ": " + what);
}

void only_keys(const json& j, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where, "must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) bad(where, "unknown key '" + key + "'");
  }
}

void read(const json& j, const char* key, const std::string& where, double& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number()) bad(where, std::string("'") + key + "' must be a number");
  out = j.at(key).get<double>();
}

template <std::unsigned_integral U>
void read(const json& j, const char* key, const std::string& where, U& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_unsigned()) {
    bad(where, std::string("'") + key + "' must be a non-negative integer");
  }
  out = j.at(key).get<U>();
}

void read(const json& j, const char* key, const std::string& where, std::string& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_string()) bad(where, std::string("'") + key + "' must be a string");
  out = j.at(key).get<std::string>();
}

env::EnvParams env_from_json(const json& j) {
  const std::string w = "env";
  only_keys(j, w,
            {"gamma", "alpha", "noise_p", "team_flip_p", "machine_fail_p",
             "machine_recover_p", "horizon", "seed", "weights", "magnitudes",
             "profile", "contexts"});
  env::EnvParams p;
  read(j, "gamma", w, p.gamma);
  read(j, "alpha", w, p.alpha);
  read(j, "noise_p", w, p.noise_p);
  read(j, "team_flip_p", w, p.team_flip_p);
  read(j, "machine_fail_p", w, p.machine_fail_p);
  read(j, "machine_recover_p", w, p.machine_recover_p);
  read(j, "horizon", w, p.horizon);
  read(j, "seed", w, p.seed);
  if (j.contains("weights")) {
    const auto& s = j.at("weights");
    only_keys(s, "env.weights", {"w_worker", "w_team", "w_context"});
    read(s, "w_worker", "env.weights", p.weights.worker);
    read(s, "w_team", "env.weights", p.weights.team);
    read(s, "w_context", "env.weights", p.weights.context);
  }
  if (j.contains("magnitudes")) {
    const auto& s = j.at("magnitudes");
    const std::string m = "env.magnitudes";
    only_keys(s, m, {"worker_match", "worker_miss", "team_ok", "team_blocked", "unsafe"});
    read(s, "worker_match", m, p.magnitudes.worker_match);
    read(s, "worker_miss", m, p.magnitudes.worker_miss);
    read(s, "team_ok", m, p.magnitudes.team_ok);
    read(s, "team_blocked", m, p.magnitudes.team_blocked);
    read(s, "unsafe", m, p.magnitudes.unsafe);
  }
  if (j.contains("profile")) {
    const auto& s = j.at("profile");
    only_keys(s, "env.profile", {"skill", "pace_preference"});
    std::string skill(env::to_string(p.profile.skill));
    std::string pace(env::to_string(p.profile.pace_preference));
    read(s, "skill", "env.profile", skill);
    read(s, "pace_preference", "env.profile", pace);
    auto sk = env::parse_skill(skill);
    auto pc = env::parse_pace(pace);
    if (!sk) bad("env.profile", "unknown skill '" + skill + "'");
    if (!pc) bad("env.profile", "unknown pace_preference '" + pace + "'");
    p.profile = {*sk, *pc};
  }
  if (j.contains("contexts")) {
    if (!j.at("contexts").is_array()) bad(w, "'contexts' must be an array");
    p.contexts.clear();
    for (const auto& c : j.at("contexts")) {
      only_keys(c, "env.contexts", {"id", "influences_worker"});
      env::ContextSpec spec;
      read(c, "id", "env.contexts", spec.id);
      if (spec.id.empty()) bad("env.contexts", "every context needs an id");
      if (c.contains("influences_worker")) {
        if (!c.at("influences_worker").is_boolean()) {
          bad("env.contexts", "'influences_worker' must be boolean");
        }
        spec.influences_worker = c.at("influences_worker").get<bool>();
      }
      p.contexts.push_back(std::move(spec));
    }
  }
  return p;
}

json env_to_json(const env::EnvParams& p) {
  json contexts = json::array();
  for (const auto& c : p.contexts) {
    contexts.push_back({{"id", c.id}, {"influences_worker", c.influences_worker}});
  }
  return {{"gamma", p.gamma},
          {"alpha", p.alpha},
          {"noise_p", p.noise_p},
          {"team_flip_p", p.team_flip_p},
          {"machine_fail_p", p.machine_fail_p},
          {"machine_recover_p", p.machine_recover_p},
          {"horizon", p.horizon},
          {"seed", p.seed},
          {"weights",
           {{"w_worker", p.weights.worker},
            {"w_team", p.weights.team},
            {"w_context", p.weights.context}}},
          {"magnitudes",
           {{"worker_match", p.magnitudes.worker_match},
            {"worker_miss", p.magnitudes.worker_miss},
            {"team_ok", p.magnitudes.team_ok},
            {"team_blocked", p.magnitudes.team_blocked},
            {"unsafe", p.magnitudes.unsafe}}},
          {"profile",
           {{"skill", env::to_string(p.profile.skill)},
            {"pace_preference", env::to_string(p.profile.pace_preference)}}},
          {"contexts", contexts}};
}

rl::LearningSchedule schedule_from_json(const json& j) {
  const std::string w = "schedule";
  only_keys(j, w,
            {"learning_rate", "epsilon_start", "epsilon_end", "decay_steps", "episodes",
             "initial_q"});
  std::size_t episodes = 5000;
  read(j, "episodes", w, episodes);
  auto s = rl::LearningSchedule::defaults_for(episodes);
  read(j, "learning_rate", w, s.learning_rate);
  read(j, "epsilon_start", w, s.epsilon_start);
  read(j, "epsilon_end", w, s.epsilon_end);
  read(j, "decay_steps", w, s.decay_steps);
  read(j, "initial_q", w, s.initial_q);
  return s;
}

json schedule_to_json(const rl::LearningSchedule& s) {
  return {{"learning_rate", s.learning_rate}, {"epsilon_start", s.epsilon_start},
          {"epsilon_end", s.epsilon_end},     {"decay_steps", s.decay_steps},
          {"episodes", s.episodes},           {"initial_q", s.initial_q}};
}

dqn::DqnConfig dqn_from_json(const json& j) {
  const std::string w = "dqn";
  only_keys(j, w,
            {"hidden", "lr", "batch", "buffer_capacity", "target_sync", "total_steps",
             "epsilon", "seed"});
  dqn::DqnConfig c;
  if (j.contains("hidden")) {
    if (!j.at("hidden").is_array()) bad(w, "'hidden' must be an array");
    c.hidden.clear();
    for (const auto& h : j.at("hidden")) {
      if (!h.is_number_unsigned()) bad(w, "hidden sizes must be positive integers");
      c.hidden.push_back(h.get<std::size_t>());
    }
  }
  read(j, "lr", w, c.lr);
  read(j, "batch", w, c.batch);
  read(j, "buffer_capacity", w, c.buffer_capacity);
  read(j, "target_sync", w, c.target_sync);
  read(j, "total_steps", w, c.total_steps);
  read(j, "seed", w, c.seed);
  if (j.contains("epsilon")) {
    const auto& e = j.at("epsilon");
    only_keys(e, "dqn.epsilon", {"start", "end", "decay_steps"});
    read(e, "start", "dqn.epsilon", c.epsilon.start);
    read(e, "end", "dqn.epsilon", c.epsilon.end);
    read(e, "decay_steps", "dqn.epsilon", c.epsilon.decay_steps);
  }
  return c;
}

json dqn_to_json(const dqn::DqnConfig& c) {
  return {{"hidden", c.hidden},
          {"lr", c.lr},
          {"batch", c.batch},
          {"buffer_capacity", c.buffer_capacity},
          {"target_sync", c.target_sync},
          {"total_steps", c.total_steps},
          {"epsilon",
           {{"start", c.epsilon.start},
            {"end", c.epsilon.end},
            {"decay_steps", c.epsilon.decay_steps}}},
          {"seed", c.seed}};
}

json parse_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& doc, const fs::path& base_dir) {
  only_keys(doc, "config",
            {"run_id", "output_dir", "graph", "env", "schedule", "dqn", "roles",
             "objectives"});
  ExperimentConfig c;
  read(doc, "run_id", "config", c.run_id);
  if (c.run_id.empty() || c.run_id.find('/') != std::string::npos) {
    bad("config", "run_id must be a non-empty name without '/'");
  }
  std::string out = c.output_dir.string();
  read(doc, "output_dir", "config", out);
  c.output_dir = out;  // relative to the working directory
  if (doc.contains("graph")) {
    std::string g;
    read(doc, "graph", "config", g);
    c.graph = fs::path(g).is_absolute() ? fs::path(g) : base_dir / g;
    c.graph = c.graph->lexically_normal();
  }
  if (doc.contains("env")) c.env = env_from_json(doc.at("env"));
  if (doc.contains("schedule")) c.schedule = schedule_from_json(doc.at("schedule"));
  if (doc.contains("dqn")) c.dqn = dqn_from_json(doc.at("dqn"));
  try {
    if (doc.contains("roles")) c.roles = perso::roles_from_json(doc.at("roles"));
    if (doc.contains("objectives")) {
      c.objectives = perso::objectives_from_json(doc.at("objectives"));
    }
  } catch (const nlohmann::json::exception& e) {
    bad("config", e.what());
  }
  c.env.validate();
  c.schedule.validate();
  c.dqn.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j = {{"run_id", c.run_id},
            {"output_dir", c.output_dir.lexically_normal().string()},
            {"env", env_to_json(c.env)},
            {"schedule", schedule_to_json(c.schedule)},
            {"dqn", dqn_to_json(c.dqn)},
            {"objectives", perso::objectives_to_json(c.objectives)}};
  if (c.graph) j["graph"] = c.graph->string();
  if (c.roles) j["roles"] = perso::roles_to_json(*c.roles);
  return j;
}

ExperimentConfig load_config(const fs::path& path) {
  json doc = parse_file(path);
  const fs::path base = fs::absolute(path).parent_path();
  if (doc.is_object() && doc.contains("config") && doc.contains("config_hash")) {
    return config_from_json(doc.at("config"), base);
  }
  return config_from_json(doc, base);
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(config).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

void apply_seed_override(ExperimentConfig& config) {
  const char* raw = std::getenv("CPSSPERSO_SEED");
  if (!raw || !*raw) return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (errno != 0 || *end != '\0' || raw[0] == '-') {
    throw Error(ErrorKind::Config,
                std::string("CPSSPERSO_SEED must be a decimal integer, got '") + raw + "'");
  }
  config.env.seed = v;
  config.dqn.seed = v;
}

env::EnvParams resolve_env(const ExperimentConfig& config,
                           std::vector<std::string>* warnings) {
  if (!config.roles) return config.env;
  perso::PersoScenario scenario;
  if (config.graph) {
    auto binding = perso::bind_roles(meta::load_graph(*config.graph), *config.roles);
    if (warnings) {
      warnings->insert(warnings->end(), binding.warnings.begin(), binding.warnings.end());
    }
    scenario = std::move(binding.scenario);
  } else {
    const auto& r = *config.roles;
    if (r.user == r.device) {
      throw Error(ErrorKind::RoleCollision, "user and device are both bound to '" + r.user + "'");
    }
    scenario = {"", r.user, r.crowd, r.device, r.context};
  }
  auto task = perso::assemble_rl_task(scenario, config.objectives, config.env);
  task.env.validate();
  return task.env;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const meta::ValidationFailed*>(&e)) return kExitConfig;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::Io:
      case ErrorKind::Parse:
        return kExitIo;
      case ErrorKind::Divergence:
      case ErrorKind::EpisodeOver:
        return kExitFailure;
      default:
        return kExitConfig;
    }
  }
  return kExitFailure;
}

std::vector<double> moving_average(const std::vector<double>& values,
                                   std::size_t window) {
  std::vector<double> out;
  if (values.empty() || window == 0) return out;
  if (window >= values.size()) {
    double sum = 0.0;
    for (double v : values) sum += v;
    out.push_back(sum / static_cast<double>(values.size()));
    return out;
  }
  // Each window is summed afresh so every output is the plain mean of its
  // window rather than a drifting running sum.
  for (std::size_t end = window; end <= values.size(); ++end) {
    double sum = 0.0;
    for (std::size_t i = end - window; i < end; ++i) sum += values[i];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

}  // namespace cpssperso::cli

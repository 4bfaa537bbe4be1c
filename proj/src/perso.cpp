#include "cpssperso/perso.hpp"

#include <algorithm>
#include <set>

namespace cpssperso::perso {

using nlohmann::json;

namespace {

void require_node(const meta::SosGraph& graph, const std::string& id,
                  const char* role) {
  if (!graph.find(id)) {
    throw Error(ErrorKind::UnknownSystem,
                std::string(role) + " '" + id + "' is not a node of graph '" +
                    graph.id + "'");
  }
}

ObjectivePair ordered(const std::string& a, const std::string& b) {
  return a < b ? ObjectivePair{a, b} : ObjectivePair{b, a};
}

template <typename Pred>
std::vector<ObjectivePair> pairs_where(const std::vector<ObjectiveSpec>& objectives,
                                       Pred pred) {
  std::set<std::string> ids;
  for (const auto& o : objectives) {
    if (!ids.insert(o.id).second) {
      throw Error(ErrorKind::DuplicateObjective, "objective id '" + o.id + "' repeats");
    }
  }
  std::vector<ObjectivePair> out;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    for (std::size_t j = i + 1; j < objectives.size(); ++j) {
      const auto& a = objectives[i];
      const auto& b = objectives[j];
      if (a.metric == b.metric && pred(a.direction, b.direction)) {
        out.push_back(ordered(a.id, b.id));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

const json& field(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::Config, std::string(where) + ": missing '" + key + "'");
  }
  return j.at(key);
}

std::string string_field(const json& j, const char* key, const char* where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) {
    throw Error(ErrorKind::Config, std::string(where) + ": '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

Binding bind_roles(const meta::SosGraph& graph, const RoleConfig& roles) {
  auto report = meta::validate_graph(graph);
  if (!report.empty()) throw meta::ValidationFailed(std::move(report));

  require_node(graph, roles.user, "user");
  require_node(graph, roles.device, "device");
  for (const auto& c : roles.crowd) require_node(graph, c, "crowd member");
  for (const auto& c : roles.context) require_node(graph, c.id, "context element");
  if (roles.user == roles.device) {
    throw Error(ErrorKind::RoleCollision,
                "user and device are both bound to '" + roles.user + "'");
  }

  Binding b{{graph.id, roles.user, roles.crowd, roles.device, roles.context}, {}};
  const auto kind = meta::classify_system(graph.find(roles.device)->components);
  if (kind != meta::SystemKind::CPSS) {
    b.warnings.push_back("device '" + roles.device + "' classifies as " +
                         std::string(meta::to_string(kind)) +
                         ", so the SoS is not a true CPSS");
  }
  return b;
}

RoleConfig roles_of(const PersoScenario& scenario) {
  return {scenario.user, scenario.device, scenario.crowd, scenario.context};
}

std::vector<ObjectivePair> detect_conflicts(const std::vector<ObjectiveSpec>& objectives) {
  return pairs_where(objectives, [](Direction a, Direction b) { return a != b; });
}

std::vector<ObjectivePair> detect_complementary(
    const std::vector<ObjectiveSpec>& objectives) {
  return pairs_where(objectives, [](Direction a, Direction b) { return a == b; });
}

RlTaskDef assemble_rl_task(const PersoScenario& scenario,
                           const std::vector<ObjectiveSpec>& objectives,
                           const env::EnvParams& env_section) {
  const auto& w = env_section.weights;
  if (!(w.worker > w.team && w.worker > w.context)) {
    throw Error(ErrorKind::PriorityViolation,
                "the user reward weight must be strictly greater than the crowd and "
                "context weights");
  }
  if (scenario.crowd.empty()) {
    throw Error(ErrorKind::InvalidParams, "scenario has no crowd members");
  }

  RlTaskDef task;
  task.gamma = env_section.gamma;
  task.action_set.assign(std::begin(env::kAllActions), std::end(env::kAllActions));
  task.conflicts = detect_conflicts(objectives);

  std::string crowd_id;
  for (const auto& c : scenario.crowd) crowd_id += (crowd_id.empty() ? "" : "+") + c;

  task.state_composition.push_back({scenario.user, EntityRole::User});
  task.reward_terms.push_back({"user", scenario.user, w.worker});
  task.state_composition.push_back({crowd_id, EntityRole::Crowd});
  task.reward_terms.push_back({"crowd", crowd_id, w.team});

  task.env = env_section;
  task.env.contexts.clear();
  for (const auto& c : scenario.context) {
    if (!c.influences_user) continue;
    task.state_composition.push_back({c.id, EntityRole::Context});
    task.reward_terms.push_back({"context:" + c.id, c.id, w.context});
    task.env.contexts.push_back({c.id, true});
  }
  return task;
}

std::string_view to_string(Direction d) {
  return d == Direction::Maximize ? "maximize" : "minimize";
}

std::string_view to_string(EntityRole r) {
  switch (r) {
    case EntityRole::User:
      return "user";
    case EntityRole::Crowd:
      return "crowd";
    case EntityRole::Context:
      return "context";
  }
  return "?";
}

json roles_to_json(const RoleConfig& roles) {
  json ctx = json::array();
  for (const auto& c : roles.context) {
    ctx.push_back({{"id", c.id}, {"influences_user", c.influences_user}});
  }
  return {{"user", roles.user},
          {"device", roles.device},
          {"crowd", roles.crowd},
          {"context", ctx}};
}

RoleConfig roles_from_json(const json& j) {
  RoleConfig r;
  r.user = string_field(j, "user", "roles");
  r.device = string_field(j, "device", "roles");
  if (j.contains("crowd")) {
    if (!j.at("crowd").is_array()) {
      throw Error(ErrorKind::Config, "roles: 'crowd' must be an array");
    }
    for (const auto& c : j.at("crowd")) {
      if (!c.is_string()) throw Error(ErrorKind::Config, "roles: crowd ids must be strings");
      r.crowd.push_back(c.get<std::string>());
    }
  }
  if (j.contains("context")) {
    if (!j.at("context").is_array()) {
      throw Error(ErrorKind::Config, "roles: 'context' must be an array");
    }
    for (const auto& c : j.at("context")) {
      ContextRole cr{string_field(c, "id", "roles.context"), true};
      if (c.contains("influences_user")) {
        if (!c.at("influences_user").is_boolean()) {
          throw Error(ErrorKind::Config, "roles.context: 'influences_user' must be boolean");
        }
        cr.influences_user = c.at("influences_user").get<bool>();
      }
      r.context.push_back(std::move(cr));
    }
  }
  return r;
}

json objectives_to_json(const std::vector<ObjectiveSpec>& objectives) {
  json out = json::array();
  for (const auto& o : objectives) {
    out.push_back({{"id", o.id},
                   {"owner", o.owner},
                   {"metric", o.metric},
                   {"direction", to_string(o.direction)},
                   {"weight", o.weight}});
  }
  return out;
}

std::vector<ObjectiveSpec> objectives_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Config, "objectives must be an array");
  std::vector<ObjectiveSpec> out;
  for (const auto& o : j) {
    ObjectiveSpec s;
    s.id = string_field(o, "id", "objectives");
    s.owner = string_field(o, "owner", "objectives");
    s.metric = string_field(o, "metric", "objectives");
    const std::string dir = string_field(o, "direction", "objectives");
    if (dir == "maximize") {
      s.direction = Direction::Maximize;
    } else if (dir == "minimize") {
      s.direction = Direction::Minimize;
    } else {
      throw Error(ErrorKind::Config, "objectives: unknown direction '" + dir + "'");
    }
    if (o.contains("weight")) {
      if (!o.at("weight").is_number()) {
        throw Error(ErrorKind::Config, "objectives: 'weight' must be a number");
      }
      s.weight = o.at("weight").get<double>();
    }
    if (!(s.weight > 0.0)) {
      throw Error(ErrorKind::Config, "objectives: weight of '" + s.id + "' must be positive");
    }
    out.push_back(std::move(s));
  }
  return out;
}

json task_to_json(const RlTaskDef& task) {
  json state = json::array();
  for (const auto& e : task.state_composition) {
    state.push_back({{"id", e.id}, {"role", to_string(e.role)}});
  }
  json actions = json::array();
  for (auto a : task.action_set) actions.push_back(env::to_string(a));
  json terms = json::array();
  for (const auto& t : task.reward_terms) {
    terms.push_back({{"id", t.id}, {"owner", t.owner}, {"weight", t.weight}});
  }
  json conflicts = json::array();
  for (const auto& [a, b] : task.conflicts) conflicts.push_back({a, b});
  return {{"state_composition", state},
          {"action_set", actions},
          {"reward_terms", terms},
          {"gamma", task.gamma},
          {"conflicts", conflicts}};
}

}  // namespace cpssperso::perso

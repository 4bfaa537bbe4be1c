#ifndef CPSSPERSO_PERSO_HPP_
#define CPSSPERSO_PERSO_HPP_

// The personalisation pipeline over a system-of-systems graph:
//   bind_roles        user / crowd / device / context roles onto graph nodes
//   detect_conflicts  objective pairs that pull the same metric both ways
//   assemble_rl_task  state composition, reward terms and env parameters

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cpssperso/meta_model.hpp"
#include "cpssperso/workshop_env.hpp"

namespace cpssperso::perso {

struct ContextRole {
  std::string id;
  bool influences_user = true;
  friend bool operator==(const ContextRole&, const ContextRole&) = default;
};

// Role assignment as written in the `roles` config section.
struct RoleConfig {
  std::string user;
  std::string device;
  std::vector<std::string> crowd;
  std::vector<ContextRole> context;
  friend bool operator==(const RoleConfig&, const RoleConfig&) = default;
};

struct PersoScenario {
  std::string cpss;  // id of the hosting graph
  std::string user;
  std::vector<std::string> crowd;
  std::string device;
  std::vector<ContextRole> context;
  friend bool operator==(const PersoScenario&, const PersoScenario&) = default;
};

struct Binding {
  PersoScenario scenario;
  std::vector<std::string> warnings;
};

// Throws ValidationFailed for an invalid graph, Error(UnknownSystem) for a
// role naming a missing node and Error(RoleCollision) when user and device
// coincide. A device that does not classify as a single-system CPSS is
// accepted with a warning.
Binding bind_roles(const meta::SosGraph& graph, const RoleConfig& roles);

RoleConfig roles_of(const PersoScenario& scenario);

enum class Direction { Maximize, Minimize };

struct ObjectiveSpec {
  std::string id;
  std::string owner;
  std::string metric;
  Direction direction = Direction::Maximize;
  double weight = 1.0;
  friend bool operator==(const ObjectiveSpec&, const ObjectiveSpec&) = default;
};

// Unordered pair of objective ids, stored with first < second.
using ObjectivePair = std::pair<std::string, std::string>;

// Pairs sharing a metric with opposite directions, sorted, each listed once.
// Throws Error(DuplicateObjective) on repeated ids.
std::vector<ObjectivePair> detect_conflicts(const std::vector<ObjectiveSpec>& objectives);
// Pairs sharing a metric and a direction.
std::vector<ObjectivePair> detect_complementary(
    const std::vector<ObjectiveSpec>& objectives);

enum class EntityRole { User, Crowd, Context };

struct StateEntity {
  std::string id;  // the crowd entity joins its member ids with '+'
  EntityRole role;
  friend bool operator==(const StateEntity&, const StateEntity&) = default;
};

struct RewardTerm {
  std::string id;
  std::string owner;
  double weight;
  friend bool operator==(const RewardTerm&, const RewardTerm&) = default;
};

struct RlTaskDef {
  std::vector<StateEntity> state_composition;  // user, crowd, influencing contexts
  std::vector<env::Action> action_set;
  std::vector<RewardTerm> reward_terms;        // same order as state_composition
  double gamma = 0.0;
  std::vector<ObjectivePair> conflicts;
  env::EnvParams env;  // `env_section` with the scenario's influencing contexts
};

// Throws Error(PriorityViolation) unless the user weight is strictly above
// the crowd and context weights, Error(InvalidParams) for an empty crowd.
RlTaskDef assemble_rl_task(const PersoScenario& scenario,
                           const std::vector<ObjectiveSpec>& objectives,
                           const env::EnvParams& env_section);

std::string_view to_string(Direction d);
std::string_view to_string(EntityRole r);

// `roles` section: {user, device, crowd:[...], context:[{id, influences_user}]}.
nlohmann::json roles_to_json(const RoleConfig& roles);
RoleConfig roles_from_json(const nlohmann::json& j);
// `objectives` section: [{id, owner, metric, direction, weight}].
nlohmann::json objectives_to_json(const std::vector<ObjectiveSpec>& objectives);
std::vector<ObjectiveSpec> objectives_from_json(const nlohmann::json& j);
nlohmann::json task_to_json(const RlTaskDef& task);

}  // namespace cpssperso::perso

#endif  // CPSSPERSO_PERSO_HPP_

#ifndef CPSSPERSO_META_MODEL_HPP_
#define CPSSPERSO_META_MODEL_HPP_

// Systemic formalism for cyber-physical-social systems: components and their
// capabilities, the seven inter-component relation kinds, single-system
// classification and System-of-Systems (SoS) classification against the
// formation axioms.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpssperso/error.hpp"

namespace cpssperso::meta {

enum class ComponentKind { Cyber, Physical, Social };

enum class Capability { Sensing, Actuation, Computation, SocialActuation };

// A component with the capabilities it provides. Physical components may
// provide sensing and/or actuation, cyber components computation, social
// components social actuation.
struct Component {
  ComponentKind kind = ComponentKind::Cyber;
  std::set<Capability> capabilities;

  // Component carrying the full capability set of its kind.
  static Component full(ComponentKind kind);

  friend bool operator==(const Component&, const Component&) = default;
};

// Allowed capabilities for a component kind.
std::set<Capability> allowed_capabilities(ComponentKind kind);

// Throws Error(InvalidSystem) when the capability set is empty or contains a
// capability the kind cannot provide.
void validate_component(const Component& component);

enum class Coupling { Tight, Loose };

struct SystemNode {
  std::string id;
  std::vector<Component> components;
  bool operational_independence = true;
  bool managerial_independence = true;
  Coupling coupling = Coupling::Loose;
  std::vector<std::string> objectives;

  bool independent() const {
    return operational_independence && managerial_independence;
  }

  friend bool operator==(const SystemNode&, const SystemNode&) = default;
};

enum class RelationKind { RC, RP, RS, RCP, RPS, RCS, RCPS };

inline constexpr RelationKind kAllRelationKinds[] = {
    RelationKind::RC,  RelationKind::RP,  RelationKind::RS,  RelationKind::RCP,
    RelationKind::RPS, RelationKind::RCS, RelationKind::RCPS};

// Component kinds a relation involves, e.g. RPS -> {Physical, Social}.
std::set<ComponentKind> involved_kinds(RelationKind kind);

// Relations are undirected; `from`/`to` only record how the edge was written.
struct Relation {
  std::string from;
  std::string to;
  RelationKind kind = RelationKind::RS;

  friend bool operator==(const Relation&, const Relation&) = default;
};

struct SosGraph {
  std::string id;
  std::vector<SystemNode> nodes;
  std::vector<Relation> edges;

  const SystemNode* find(std::string_view node_id) const;

  friend bool operator==(const SosGraph&, const SosGraph&) = default;
};

enum class SystemKind {
  CyberSystem,
  PhysicalSystem,
  SocialSystem,
  CPS,
  PSS,
  CSS,
  CPSS
};

// One-to-one map from a nonempty set of component kinds.
SystemKind kind_from_set(const std::set<ComponentKind>& kinds);
std::set<ComponentKind> component_set(SystemKind kind);

// Component kinds that survive the capability check: Physical needs both
// sensing and actuation (pooled over all physical components), Cyber needs
// computation, Social needs social actuation. When nothing survives the raw
// kind set is kept, so a lone sensor is still a physical system.
std::set<ComponentKind> effective_kinds(std::span<const Component> components);

// Throws Error(InvalidSystem) for an empty or invalid component list.
SystemKind classify_system(std::span<const Component> components);

enum class ViolationKind {
  DuplicateId,
  DanglingEndpoint,
  SelfLoop,
  EmptyComponents,
  InvalidComponent,
  InvalidCompoundRelation
};

struct Violation {
  ViolationKind kind;
  std::string subject;  // offending node id, or edge endpoint id
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_graph(const SosGraph& graph);

class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

enum class Axiom { A1, A2, A3, Other };

struct SosClassification {
  std::optional<SystemKind> component_union;  // empty graph -> nullopt
  bool is_sos = false;
  bool is_true_cpss = false;
  std::vector<Axiom> matched_axioms;
  // SoS formation is recorded as weak emergence; set whenever is_sos holds.
  bool weak_emergence = false;
};

// isSoS holds when some relation joins two independent systems. A1/A2/A3 hold
// for a social relation between two independent systems where one side is a
// single-system CPSS and the other a PSS/CPS/CSS respectively. Other marks a
// SoS that matches none of those. Throws ValidationFailed on invalid graphs.
SosClassification classify_sos(const SosGraph& graph);

std::string_view to_string(ComponentKind kind);
std::string_view to_string(Capability capability);
std::string_view to_string(Coupling coupling);
std::string_view to_string(RelationKind kind);
std::string_view to_string(SystemKind kind);
std::string_view to_string(ViolationKind kind);
std::string_view to_string(Axiom axiom);

std::optional<ComponentKind> parse_component_kind(std::string_view text);
std::optional<Capability> parse_capability(std::string_view text);
std::optional<Coupling> parse_coupling(std::string_view text);
std::optional<RelationKind> parse_relation_kind(std::string_view text);

}  // namespace cpssperso::meta

#endif  // CPSSPERSO_META_MODEL_HPP_

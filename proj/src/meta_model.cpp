#include "cpssperso/meta_model.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace cpssperso::meta {

namespace {

std::string describe(const ValidationReport& report) {
  std::string out = std::to_string(report.size()) + " violation(s)";
  for (const auto& v : report) {
    out += "; ";
    out += to_string(v.kind);
    out += "(" + v.subject + ")";
  }
  return out;
}

}  // namespace

Component Component::full(ComponentKind kind) {
  return Component{kind, allowed_capabilities(kind)};
}

std::set<Capability> allowed_capabilities(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Physical:
      return {Capability::Sensing, Capability::Actuation};
    case ComponentKind::Cyber:
      return {Capability::Computation};
    case ComponentKind::Social:
      return {Capability::SocialActuation};
  }
  return {};
}

void validate_component(const Component& component) {
  if (component.capabilities.empty()) {
    throw Error(ErrorKind::InvalidSystem,
                std::string(to_string(component.kind)) +
                    " component has no capabilities");
  }
  const auto allowed = allowed_capabilities(component.kind);
  for (Capability c : component.capabilities) {
    if (!allowed.contains(c)) {
      throw Error(ErrorKind::InvalidSystem,
                  std::string(to_string(component.kind)) +
                      " component cannot provide " +
                      std::string(to_string(c)));
    }
  }
}

std::set<ComponentKind> involved_kinds(RelationKind kind) {
  using K = ComponentKind;
  switch (kind) {
    case RelationKind::RC: return {K::Cyber};
    case RelationKind::RP: return {K::Physical};
    case RelationKind::RS: return {K::Social};
    case RelationKind::RCP: return {K::Cyber, K::Physical};
    case RelationKind::RPS: return {K::Physical, K::Social};
    case RelationKind::RCS: return {K::Cyber, K::Social};
    case RelationKind::RCPS: return {K::Cyber, K::Physical, K::Social};
  }
  return {};
}

const SystemNode* SosGraph::find(std::string_view node_id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(),
                         [&](const SystemNode& n) { return n.id == node_id; });
  return it == nodes.end() ? nullptr : &*it;
}

SystemKind kind_from_set(const std::set<ComponentKind>& kinds) {
  const bool c = kinds.contains(ComponentKind::Cyber);
  const bool p = kinds.contains(ComponentKind::Physical);
  const bool s = kinds.contains(ComponentKind::Social);
  if (c && p && s) return SystemKind::CPSS;
  if (c && p) return SystemKind::CPS;
  if (p && s) return SystemKind::PSS;
  if (c && s) return SystemKind::CSS;
  if (c) return SystemKind::CyberSystem;
  if (p) return SystemKind::PhysicalSystem;
  if (s) return SystemKind::SocialSystem;
  throw Error(ErrorKind::InvalidSystem, "empty component set");
}

std::set<ComponentKind> component_set(SystemKind kind) {
  using K = ComponentKind;
  switch (kind) {
    case SystemKind::CyberSystem: return {K::Cyber};
    case SystemKind::PhysicalSystem: return {K::Physical};
    case SystemKind::SocialSystem: return {K::Social};
    case SystemKind::CPS: return {K::Cyber, K::Physical};
    case SystemKind::PSS: return {K::Physical, K::Social};
    case SystemKind::CSS: return {K::Cyber, K::Social};
    case SystemKind::CPSS: return {K::Cyber, K::Physical, K::Social};
  }
  return {};
}

std::set<ComponentKind> effective_kinds(std::span<const Component> components) {
  std::map<ComponentKind, std::set<Capability>> pooled;
  for (const auto& comp : components) {
    pooled[comp.kind].insert(comp.capabilities.begin(),
                             comp.capabilities.end());
  }
  std::set<ComponentKind> raw;
  std::set<ComponentKind> effective;
  for (const auto& [kind, caps] : pooled) {
    raw.insert(kind);
    const auto required = allowed_capabilities(kind);
    if (std::includes(caps.begin(), caps.end(), required.begin(),
                      required.end())) {
      effective.insert(kind);
    }
  }
  return effective.empty() ? raw : effective;
}

SystemKind classify_system(std::span<const Component> components) {
  if (components.empty()) {
    throw Error(ErrorKind::InvalidSystem, "system has no components");
  }
  for (const auto& comp : components) validate_component(comp);
  return kind_from_set(effective_kinds(components));
}

ValidationFailed::ValidationFailed(ValidationReport report)
    : Error(ErrorKind::ValidationFailed, describe(report)),
      report_(std::move(report)) {}

ValidationReport validate_graph(const SosGraph& graph) {
  ValidationReport report;
  std::unordered_map<std::string, int> seen;
  for (const auto& node : graph.nodes) {
    if (++seen[node.id] == 2) {
      report.push_back({ViolationKind::DuplicateId, node.id, "node id repeated"});
    }
    if (node.components.empty()) {
      report.push_back(
          {ViolationKind::EmptyComponents, node.id, "node has no components"});
    }
    for (const auto& comp : node.components) {
      try {
        validate_component(comp);
      } catch (const Error& e) {
        report.push_back({ViolationKind::InvalidComponent, node.id, e.what()});
      }
    }
  }
  for (const auto& edge : graph.edges) {
    const SystemNode* a = graph.find(edge.from);
    const SystemNode* b = graph.find(edge.to);
    if (a == nullptr) {
      report.push_back({ViolationKind::DanglingEndpoint, edge.from,
                        "edge endpoint does not exist"});
    }
    if (b == nullptr) {
      report.push_back({ViolationKind::DanglingEndpoint, edge.to,
                        "edge endpoint does not exist"});
    }
    if (edge.from == edge.to) {
      report.push_back(
          {ViolationKind::SelfLoop, edge.from, "relation joins a node to itself"});
    }
    if (a == nullptr || b == nullptr) continue;
    std::set<ComponentKind> present;
    for (const auto* n : {a, b}) {
      for (const auto& comp : n->components) present.insert(comp.kind);
    }
    const auto needed = involved_kinds(edge.kind);
    if (!std::includes(present.begin(), present.end(), needed.begin(),
                       needed.end())) {
      report.push_back({ViolationKind::InvalidCompoundRelation,
                        edge.from + "-" + edge.to,
                        std::string(to_string(edge.kind)) +
                            " needs component kinds the endpoints lack"});
    }
  }
  return report;
}

SosClassification classify_sos(const SosGraph& graph) {
  if (auto report = validate_graph(graph); !report.empty()) {
    throw ValidationFailed(std::move(report));
  }

  SosClassification out;
  std::vector<Component> all;
  for (const auto& node : graph.nodes) {
    all.insert(all.end(), node.components.begin(), node.components.end());
  }
  if (!all.empty()) out.component_union = classify_system(all);

  std::set<Axiom> axioms;
  for (const auto& edge : graph.edges) {
    const SystemNode& a = *graph.find(edge.from);
    const SystemNode& b = *graph.find(edge.to);
    if (!a.independent() || !b.independent()) continue;
    out.is_sos = true;
    if (edge.kind != RelationKind::RS) continue;

    const SystemKind ka = classify_system(a.components);
    const SystemKind kb = classify_system(b.components);
    auto check = [&](SystemKind cpss_side, SystemKind other) {
      if (cpss_side != SystemKind::CPSS) return;
      if (other == SystemKind::PSS) axioms.insert(Axiom::A1);
      if (other == SystemKind::CPS) axioms.insert(Axiom::A2);
      if (other == SystemKind::CSS) axioms.insert(Axiom::A3);
    };
    check(ka, kb);
    check(kb, ka);
  }
  out.is_true_cpss = !axioms.empty();
  out.matched_axioms.assign(axioms.begin(), axioms.end());
  if (out.is_sos && axioms.empty()) out.matched_axioms.push_back(Axiom::Other);
  out.weak_emergence = out.is_sos;
  return out;
}

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Cyber: return "Cyber";
    case ComponentKind::Physical: return "Physical";
    case ComponentKind::Social: return "Social";
  }
  return "?";
}

std::string_view to_string(Capability capability) {
  switch (capability) {
    case Capability::Sensing: return "sensing";
    case Capability::Actuation: return "actuation";
    case Capability::Computation: return "computation";
    case Capability::SocialActuation: return "socialActuation";
  }
  return "?";
}

std::string_view to_string(Coupling coupling) {
  return coupling == Coupling::Tight ? "Tight" : "Loose";
}

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::RC: return "RC";
    case RelationKind::RP: return "RP";
    case RelationKind::RS: return "RS";
    case RelationKind::RCP: return "RCP";
    case RelationKind::RPS: return "RPS";
    case RelationKind::RCS: return "RCS";
    case RelationKind::RCPS: return "RCPS";
  }
  return "?";
}

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::CyberSystem: return "CyberSystem";
    case SystemKind::PhysicalSystem: return "PhysicalSystem";
    case SystemKind::SocialSystem: return "SocialSystem";
    case SystemKind::CPS: return "CPS";
    case SystemKind::PSS: return "PSS";
    case SystemKind::CSS: return "CSS";
    case SystemKind::CPSS: return "CPSS";
  }
  return "?";
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DuplicateId: return "DuplicateId";
    case ViolationKind::DanglingEndpoint: return "DanglingEndpoint";
    case ViolationKind::SelfLoop: return "SelfLoop";
    case ViolationKind::EmptyComponents: return "EmptyComponents";
    case ViolationKind::InvalidComponent: return "InvalidComponent";
    case ViolationKind::InvalidCompoundRelation:
      return "InvalidCompoundRelation";
  }
  return "?";
}

std::string_view to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::A1: return "A1";
    case Axiom::A2: return "A2";
    case Axiom::A3: return "A3";
    case Axiom::Other: return "OTHER";
  }
  return "?";
}

std::optional<ComponentKind> parse_component_kind(std::string_view text) {
  for (auto k : {ComponentKind::Cyber, ComponentKind::Physical,
                 ComponentKind::Social}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::optional<Capability> parse_capability(std::string_view text) {
  for (auto c : {Capability::Sensing, Capability::Actuation,
                 Capability::Computation, Capability::SocialActuation}) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

std::optional<Coupling> parse_coupling(std::string_view text) {
  if (text == "Tight") return Coupling::Tight;
  if (text == "Loose") return Coupling::Loose;
  return std::nullopt;
}

std::optional<RelationKind> parse_relation_kind(std::string_view text) {
  for (auto k : kAllRelationKinds) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

}  // namespace cpssperso::meta

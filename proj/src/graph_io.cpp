#include "cpssperso/graph_io.hpp"

#include <fstream>

namespace cpssperso::meta {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorKind::Parse,
                std::string(where) + ": missing key '" + key + "'");
  }
  return obj.at(key);
}

std::string require_string(const json& obj, const char* key,
                           const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw Error(ErrorKind::Parse,
                std::string(where) + ": '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

bool optional_bool(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) {
    throw Error(ErrorKind::Parse, std::string("'") + key + "' must be boolean");
  }
  return obj.at(key).get<bool>();
}

template <typename T, typename Parser>
T parse_enum(const std::string& text, Parser parser, const char* what) {
  auto v = parser(text);
  if (!v) {
    throw Error(ErrorKind::Parse,
                std::string("unknown ") + what + " '" + text + "'");
  }
  return *v;
}

Component component_from_json(const json& doc) {
  Component comp;
  comp.kind = parse_enum<ComponentKind>(require_string(doc, "kind", "component"),
                                        parse_component_kind, "component kind");
  const json& caps = require(doc, "capabilities", "component");
  if (!caps.is_array()) {
    throw Error(ErrorKind::Parse, "component: 'capabilities' must be an array");
  }
  for (const auto& c : caps) {
    if (!c.is_string()) throw Error(ErrorKind::Parse, "capability must be a string");
    comp.capabilities.insert(parse_enum<Capability>(c.get<std::string>(),
                                                    parse_capability, "capability"));
  }
  return comp;
}

}  // namespace

SosGraph graph_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "graph must be an object");
  SosGraph graph;
  if (doc.contains("id") && doc.at("id").is_string()) {
    graph.id = doc.at("id").get<std::string>();
  }
  const json& nodes = require(doc, "nodes", "graph");
  const json& edges = require(doc, "edges", "graph");
  if (!nodes.is_array() || !edges.is_array()) {
    throw Error(ErrorKind::Parse, "graph: 'nodes' and 'edges' must be arrays");
  }
  for (const auto& n : nodes) {
    SystemNode node;
    node.id = require_string(n, "id", "node");
    const json& comps = require(n, "components", "node");
    if (!comps.is_array()) {
      throw Error(ErrorKind::Parse, "node: 'components' must be an array");
    }
    for (const auto& c : comps) node.components.push_back(component_from_json(c));
    node.operational_independence =
        optional_bool(n, "operational_independence", true);
    node.managerial_independence =
        optional_bool(n, "managerial_independence", true);
    if (n.contains("coupling")) {
      node.coupling = parse_enum<Coupling>(require_string(n, "coupling", "node"),
                                           parse_coupling, "coupling");
    }
    if (n.contains("objectives")) {
      for (const auto& o : n.at("objectives")) {
        if (!o.is_string()) throw Error(ErrorKind::Parse, "objective id must be a string");
        node.objectives.push_back(o.get<std::string>());
      }
    }
    graph.nodes.push_back(std::move(node));
  }
  for (const auto& e : edges) {
    Relation rel;
    rel.from = require_string(e, "from", "edge");
    rel.to = require_string(e, "to", "edge");
    rel.kind = parse_enum<RelationKind>(require_string(e, "kind", "edge"),
                                        parse_relation_kind, "relation kind");
    graph.edges.push_back(std::move(rel));
  }
  return graph;
}

json graph_to_json(const SosGraph& graph) {
  json nodes = json::array();
  for (const auto& node : graph.nodes) {
    json comps = json::array();
    for (const auto& c : node.components) {
      json caps = json::array();
      for (auto cap : c.capabilities) caps.push_back(std::string(to_string(cap)));
      comps.push_back({{"kind", std::string(to_string(c.kind))},
                       {"capabilities", caps}});
    }
    nodes.push_back({{"id", node.id},
                     {"components", comps},
                     {"operational_independence", node.operational_independence},
                     {"managerial_independence", node.managerial_independence},
                     {"coupling", std::string(to_string(node.coupling))},
                     {"objectives", node.objectives}});
  }
  json edges = json::array();
  for (const auto& e : graph.edges) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"kind", std::string(to_string(e.kind))}});
  }
  return {{"id", graph.id}, {"nodes", nodes}, {"edges", edges}};
}

SosGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  return graph_from_json(doc);
}

json classification_to_json(const SosClassification& c) {
  json axioms = json::array();
  for (auto a : c.matched_axioms) axioms.push_back(std::string(to_string(a)));
  return {{"component_union", c.component_union
                                  ? json(std::string(to_string(*c.component_union)))
                                  : json(nullptr)},
          {"is_sos", c.is_sos},
          {"is_true_cpss", c.is_true_cpss},
          {"matched_axioms", axioms},
          {"weak_emergence", c.weak_emergence}};
}

json report_to_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& v : report) {
    out.push_back({{"kind", std::string(to_string(v.kind))},
                   {"subject", v.subject},
                   {"detail", v.detail}});
  }
  return out;
}

}  // namespace cpssperso::meta

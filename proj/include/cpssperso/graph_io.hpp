#ifndef CPSSPERSO_GRAPH_IO_HPP_
#define CPSSPERSO_GRAPH_IO_HPP_

#include <filesystem>

#include "json.hpp"

#include "cpssperso/meta_model.hpp"

namespace cpssperso::meta {

// Schema:
//   { "id": "...",
//     "nodes": [{ "id", "components": [{ "kind", "capabilities": [...] }],
//                 "operational_independence", "managerial_independence",
//                 "coupling", "objectives": [...] }],
//     "edges": [{ "from", "to", "kind" }] }
// Unknown enum strings and missing required keys throw Error(Parse).
// Structural problems (dangling edges, duplicate ids) are left for
// validate_graph.
SosGraph graph_from_json(const nlohmann::json& doc);
nlohmann::json graph_to_json(const SosGraph& graph);

// Throws Error(Io) if the file cannot be read, Error(Parse) on bad content.
SosGraph load_graph(const std::filesystem::path& path);

nlohmann::json classification_to_json(const SosClassification& c);
nlohmann::json report_to_json(const ValidationReport& report);

}  // namespace cpssperso::meta

#endif  // CPSSPERSO_GRAPH_IO_HPP_

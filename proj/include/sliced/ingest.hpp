#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sliced/model_ir.hpp"

namespace sliced {

// Component-graph document (JSON, see docs/format.md). Throws Syntax with
// line/column, MultiSourceLine, or the kind of the first validation violation.
ComponentGraph parse_model(const std::string& document);
ComponentGraph load_model(const std::string& path);  // Io when unreadable
std::string serialize_model(const ComponentGraph& g);

// Custom archetype definitions in the document's `archetypes` section.
std::shared_ptr<const ArchetypeSpec> parse_archetype_json(const std::string& json_text);
std::string serialize_archetype_json(const ArchetypeSpec& spec);

struct ClassRow {
  std::string pattern;               // lower-case
  std::optional<std::string> kind;   // required block kind, exact
  std::string archetype;             // builtin tag or document archetype name
  bool prefix = false;               // match at the start of the name only
  bool exclusive = false;            // AmbiguousMatch against another exclusive row
};

// Ordered rows, first match wins, matching is case-insensitive.
struct ClassificationTable {
  std::vector<ClassRow> rows;
  static ClassificationTable defaults();
};

struct Classified {
  std::string path;
  std::shared_ptr<const ArchetypeSpec> spec;
  std::size_t row = 0;  // matching row, or SIZE_MAX for an explicit `archetype`
};

struct Classification {
  std::vector<Classified> classified;  // depth-first pre-order
  std::vector<std::string> unmatched;
};

// A matched block is a black box: its children are not visited.
Classification classify(const ComponentGraph& g, const ClassificationTable& table);

struct OpenEndpoint {
  std::string from;  // classified block path, or the unclassified origin
  int port = 1;
  std::string reached;  // block where the path stopped
  bool downstream = true;  // false: a classified sink fed by nothing classified
};

struct ResolvedConnections {
  std::vector<Connection> connections;  // endpoints are block paths
  std::vector<OpenEndpoint> open;
};

// Follows lines through unclassified blocks (every in port forwards to every
// out port) until a classified block is reached.
ResolvedConnections resolve_connections(const ComponentGraph& g, const Classification& c);

struct ModelStats {
  std::size_t total_blocks = 0;
  std::size_t max_depth = 0;
  std::vector<std::size_t> per_level;
  std::size_t classified = 0;
  std::size_t lines = 0;
};

ModelStats model_stats(const ComponentGraph& g, const ClassificationTable* table = nullptr);

}  // namespace sliced

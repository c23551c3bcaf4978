#pragma once

#include <map>
#include <string>
#include <vector>

#include "sliced/composer.hpp"
#include "sliced/config.hpp"
#include "sliced/ingest.hpp"

namespace sliced {

// A classified model ready for composition.
struct Model {
  ComponentGraph graph;
  Classification classes;
  ResolvedConnections resolved;
  std::vector<Instance> instances;     // includes OpenLoad pseudo instances
  std::vector<Connection> connections;  // endpoints are instance names
  std::map<std::string, std::string> instance_of;  // block path -> instance name
};

// Instance names are the block names with non-identifier characters replaced
// by '_', or the whole path when two classified blocks share a name.
Model build_model(ComponentGraph g, const Config& config);

CompositeMachine build_machine(const Model& model, const NondetOptions& nondet);

// Error discovery runs with user actions off.
inline NondetOptions discovery_nondet() { return {false, true, true}; }

}  // namespace sliced

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "sliced/explore.hpp"
#include "sliced/ingest.hpp"

namespace sliced {

struct Config {
  ClassificationTable table = ClassificationTable::defaults();
  // Archetype name -> parameter defaults; block `params` take precedence.
  std::map<std::string, std::map<std::string, long>> defaults;
  std::size_t cap = 50'000'000;
  long bound = 20;
  Backend backend = Backend::OpenMP;
  std::size_t enumeration_cap = 1'000'000;
  bool plan_toggle_guard = false;
  bool plan_faults = false;
  // Draw range of the pseudo load standing in for an open downstream endpoint.
  long open_load_lo = 0;
  long open_load_hi = 2;
};

// Values present in the JSON text override those in `base`.
Config parse_config(const std::string& json_text, Config base = {});
Config load_config(const std::string& path, Config base = {});

// Replaces the whole classification table (a JSON array of rows or an object
// with `classification`).
ClassificationTable load_table(const std::string& path);

// $SLICED_CONFIG when set and non-empty.
std::optional<std::string> config_path_from_env();

}  // namespace sliced

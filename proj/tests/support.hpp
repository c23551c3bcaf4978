#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "sliced/config.hpp"
#include "sliced/ingest.hpp"
#include "sliced/pipeline.hpp"

namespace support {

inline std::string source_path(const std::string& rel) { return std::string(SLICED_SOURCE_DIR) + "/" + rel; }

inline std::string corpus(const std::string& name) { return source_path("corpus/" + name + ".json"); }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline sliced::Model load(const std::string& name, const sliced::Config& config = {}) {
  return sliced::build_model(sliced::load_model(corpus(name)), config);
}

inline sliced::CompositeMachine machine(const std::string& name,
                                        sliced::NondetOptions nondet = sliced::discovery_nondet()) {
  return sliced::build_machine(load(name), nondet);
}

inline const char* kCorpus[] = {"adapt-mini", "adapt-breaker", "adapt-repair", "adapt-banks", "periodic-tasks"};

}  // namespace support

#include "sliced/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sliced/error.hpp"

namespace sliced {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Syntax, what + ": " + e.what());
  }
}

ClassificationTable table_from(const json& rows) {
  if (!rows.is_array()) throw Error(ErrorKind::Semantic, "classification table must be an array");
  ClassificationTable t;
  for (const json& r : rows) {
    ClassRow row;
    row.pattern = r.at("pattern").get<std::string>();
    for (char& c : row.pattern) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (r.contains("kind") && !r["kind"].is_null()) row.kind = r["kind"].get<std::string>();
    row.archetype = r.at("archetype").get<std::string>();
    row.prefix = r.value("prefix", false);
    row.exclusive = r.value("exclusive", false);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

Config parse_config(const std::string& json_text, Config base) {
  json doc = parse_json(json_text, "config");
  Config c = std::move(base);
  try {
    if (doc.contains("classification")) c.table = table_from(doc["classification"]);
    if (doc.contains("defaults")) {
      for (const auto& [archetype, params] : doc["defaults"].items()) {
        for (const auto& [name, value] : params.items()) c.defaults[archetype][name] = value.get<long>();
      }
    }
    if (doc.contains("checker")) {
      const json& k = doc["checker"];
      c.cap = k.value("cap", c.cap);
      c.bound = k.value("bound", c.bound);
      if (k.contains("backend")) {
        auto b = backend_from_string(k["backend"].get<std::string>());
        if (!b) throw Error(ErrorKind::Semantic, "config: unknown backend '" + k["backend"].get<std::string>() + "'");
        c.backend = *b;
      }
    }
    if (doc.contains("reducer")) c.enumeration_cap = doc["reducer"].value("enumeration_cap", c.enumeration_cap);
    if (doc.contains("plan")) {
      c.plan_toggle_guard = doc["plan"].value("toggle_guard", c.plan_toggle_guard);
      c.plan_faults = doc["plan"].value("faults", c.plan_faults);
    }
    if (doc.contains("open_load")) {
      c.open_load_lo = doc["open_load"].value("lo", c.open_load_lo);
      c.open_load_hi = doc["open_load"].value("hi", c.open_load_hi);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Semantic, std::string("config: ") + e.what());
  }
  return c;
}

Config load_config(const std::string& path, Config base) { return parse_config(read_file(path), std::move(base)); }

ClassificationTable load_table(const std::string& path) {
  json doc = parse_json(read_file(path), "table");
  try {
    return table_from(doc.is_object() ? doc.at("classification") : doc);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Semantic, std::string("table: ") + e.what());
  }
}

std::optional<std::string> config_path_from_env() {
  const char* v = std::getenv("SLICED_CONFIG");
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

}  // namespace sliced

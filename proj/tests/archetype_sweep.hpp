#pragma once

// Exhaustive sweep of one archetype's step/output over state x input domains.

#include <functional>
#include <string>
#include <vector>

#include "sliced/archetype.hpp"

namespace support {

struct SweepResult {
  std::size_t cases = 0;
  std::size_t empty = 0;          // step returned no successor
  std::size_t nondeterministic = 0;  // more than one successor with nondeterminism off
  std::size_t out_of_range = 0;   // draw outside its declared range
};

// Parameters small enough to enumerate, large enough to cross every guard.
inline std::map<std::string, long> sweep_params(const sliced::ArchetypeSpec& spec) {
  std::map<std::string, long> p;
  for (const sliced::ParamSpec& ps : spec.params) {
    if (ps.name == "capacity") p[ps.name] = 4;
    else if (ps.name == "limit") p[ps.name] = 3;
    else if (ps.name == "drawlimit") p[ps.name] = 4;
    else if (ps.name == "top") p[ps.name] = 3;
    else if (ps.name == "hi") p[ps.name] = 2;
    else p[ps.name] = std::max(ps.lo, std::min(ps.hi, 1L));
  }
  return p;
}

inline SweepResult sweep(const sliced::Instance& inst, long draw_hi = 6) {
  using namespace sliced;
  const ArchetypeSpec& spec = *inst.spec;
  SweepResult r;
  std::vector<std::string> keys;
  std::vector<std::vector<long>> domains;
  for (const std::string& f : upstream_fields(spec)) {
    keys.push_back("input." + f);
    domains.push_back(f == "supplyingPower" || f == "send" ? std::vector<long>{0, 1} : std::vector<long>{0, 1, 2});
  }
  std::size_t arity = std::max<std::size_t>(spec.canonical_arity, spec.downstream ? 2 : 0);
  for (std::size_t k = 1; k <= arity; ++k) {
    for (const std::string& f : downstream_fields(spec)) {
      keys.push_back("output" + std::to_string(k) + "." + f);
      std::vector<long> d;
      if (f == "draw") {
        for (long v = 0; v <= draw_hi; ++v) d.push_back(v);
      } else {
        d = {0, 1};
      }
      domains.push_back(d);
    }
  }
  std::vector<std::vector<long>> var_domains;
  for (const VarSpec& v : spec.vars) var_domains.push_back(var_domain(inst, v));

  LocalState local(spec.vars.size());
  InputValuation in;
  std::function<void(std::size_t)> over_inputs;
  std::function<void(std::size_t)> over_state = [&](std::size_t i) {
    if (i == local.size()) {
      over_inputs(0);
      return;
    }
    for (long v : var_domains[i]) {
      local[i] = v;
      over_state(i + 1);
    }
  };
  over_inputs = [&](std::size_t i) {
    if (i < keys.size()) {
      for (long v : domains[i]) {
        in[keys[i]] = v;
        over_inputs(i + 1);
      }
      return;
    }
    ++r.cases;
    if (step(inst, local, in, NondetOptions{}).empty()) ++r.empty;
    if (step(inst, local, in, NondetOptions::deterministic()).size() != 1) ++r.nondeterministic;
    auto out = output(inst, local, in);
    if (auto d = out.find("draw"); d != out.end()) {
      if (spec.tag == Archetype::Actuator && (d->second < 0 || d->second > 2)) ++r.out_of_range;
      if (d->second < 0) ++r.out_of_range;
    }
    for (std::size_t k = 0; k < spec.vars.size(); ++k) {
      if (spec.tag == Archetype::MergedLoadBank && (local[k] < 0 || local[k] > inst.params.at("drawlimit"))) {
        ++r.out_of_range;
      }
    }
  };
  over_state(0);
  return r;
}

}  // namespace support

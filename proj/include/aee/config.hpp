#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "aee/model.hpp"
#include "aee/rational.hpp"

namespace aee {

enum class ClockMode { Simulated, Realtime };
enum class Retention { Full, PruneCompleted };

/// Per-layer processing costs making up the event-processing bound: outcome
/// routing, logistics traversal, activity sequencing, and dispatch-queue
/// preparation. Charged exactly in simulated runs, measured in realtime runs.
struct ComponentCosts {
  Time route;        // file key dEvent
  Time logistics;    // file key dLC
  Time sequencing;   // file key dAC
  Time preparation;  // file key daC

  Time sum() const { return route + logistics + sequencing + preparation; }
};

struct EngineConfig {
  Time psi = Time(0);        // wall-clock start of the execution
  Time delay_bound = Time(0);        // D_A: bound on per-node execution delay
  Time event_bound = Time(0);        // D_E: bound on event-outcome processing
  ClockMode clock = ClockMode::Simulated;
  ComponentCosts costs;
  Retention retention = Retention::Full;
};

inline EngineConfig parse_engine_config(const nlohmann::json& j) {
  EngineConfig cfg;
  auto time_at = [&](const char* key, Time fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_string()) return parse_time(v.get<std::string>());
    if (v.is_number_integer()) return Time(v.get<std::int64_t>());
    throw SpecError(std::string("schema: '") + key + "' must be a decimal string");
  };
  cfg.psi = time_at("psi", Time(0));
  cfg.delay_bound = time_at("dA", Time(0));
  cfg.event_bound = time_at("dE", Time(0));
  if (cfg.delay_bound.is_negative() || cfg.event_bound.is_negative())
    throw SpecError("schema: delay bounds must be non-negative");
  if (j.contains("clock")) {
    std::string mode = j.at("clock").get<std::string>();
    if (mode == "simulated") cfg.clock = ClockMode::Simulated;
    else if (mode == "realtime") cfg.clock = ClockMode::Realtime;
    else throw SpecError("schema: clock must be 'simulated' or 'realtime'");
  }
  if (j.contains("componentCosts")) {
    const auto& c = j.at("componentCosts");
    auto cost = [&](const char* key) {
      if (!c.contains(key)) return Time(0);
      const auto& v = c.at(key);
      if (v.is_string()) return parse_time(v.get<std::string>());
      if (v.is_number_integer()) return Time(v.get<std::int64_t>());
      throw SpecError(std::string("schema: componentCosts.") + key +
                      " must be a decimal string");
    };
    cfg.costs = {cost("dEvent"), cost("dLC"), cost("dAC"), cost("daC")};
  }
  if (j.contains("retention")) {
    std::string r = j.at("retention").get<std::string>();
    if (r == "full") cfg.retention = Retention::Full;
    else if (r == "prune-completed") cfg.retention = Retention::PruneCompleted;
    else throw SpecError("schema: retention must be 'full' or 'prune-completed'");
  }
  return cfg;
}

}  // namespace aee

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "aee/config.hpp"
#include "aee/spec.hpp"

namespace aee {

/// Resolves event outcomes either from a fixed script (consumed once per
/// emission, in emission order) or from a seeded distribution over the
/// event's declared outcomes.
struct OutcomeSource {
  std::vector<OutcomeName> script;
  std::map<OutcomeName, double> distribution;  // weights; empty when scripted

  bool scripted() const { return distribution.empty(); }
};

struct ActionPlantConfig {
  Time worst_case;        // bound on the execution duration
  Time jitter_lo;         // sampled duration range, within [0, worst_case]
  Time jitter_hi;
  bool fail_start = false;  // failure injection: refuse to start
};

struct EventPlantConfig {
  Time resolution;  // bound on the sampling/resolution time
  OutcomeSource source;
};

/// Bounded-plant model: worst-case durations with seeded jitter, bounded
/// start/observation delays, and per-event outcome sources.
struct PlantConfig {
  std::map<std::pair<ActionName, Peripheral>, ActionPlantConfig> actions;
  std::map<EventName, EventPlantConfig> events;
  Time start_delay_max;    // bound on the delay before an issued node starts
  Time observe_delay_max;  // bound on the delay before a completion is seen
  std::uint64_t seed = 0;

  /// A plant that satisfies the conservative-duration assumptions by
  /// construction: every duration at its allowed maximum, zero jitter and
  /// zero delays. Starting point for tests and for specs without a plant
  /// section.
  static PlantConfig conforming(const ActivitySpec& spec, const EngineConfig& cfg) {
    PlantConfig p;
    for (const auto& [name, act] : spec.activities) {
      for (const auto& n : act.nodes) {
        if (n.label.is_action()) {
          Time budget = n.duration - cfg.delay_bound;
          if (budget.is_negative()) budget = Time(0);
          auto key = std::make_pair(n.label.action, n.label.peripheral);
          auto it = p.actions.find(key);
          if (it == p.actions.end() || budget < it->second.worst_case)
            p.actions[key] = {budget, budget, budget, false};
        } else if (n.label.is_event()) {
          Time budget = n.duration - cfg.event_bound - cfg.delay_bound;
          if (budget.is_negative()) budget = Time(0);
          OutcomeSource source;
          for (const auto& u : spec.universe.outcomes_of(n.label.event))
            source.distribution[u] = 1.0;
          auto it = p.events.find(n.label.event);
          if (it == p.events.end() || budget < it->second.resolution)
            p.events[n.label.event] = {budget, source};
        }
      }
    }
    p.start_delay_max = Time(0);
    p.observe_delay_max = Time(0);
    return p;
  }
};

/// Checks the declared plant bounds against the specification: specified
/// durations must cover worst case plus the delay bound, specified event
/// delays must additionally cover event processing, and the plant's delay
/// split must fit inside the delay bound.
inline ValidationReport check_plant_against_spec(const PlantConfig& plant,
                                                 const ActivitySpec& spec,
                                                 const EngineConfig& cfg) {
  ValidationReport report;
  if (plant.start_delay_max + plant.observe_delay_max > cfg.delay_bound)
    report.add(Check::DelayBound, {},
               "start (" + plant.start_delay_max.to_string() + ") + observation (" +
                   plant.observe_delay_max.to_string() + ") delays exceed dA " +
                   cfg.delay_bound.to_string());
  for (const auto& [name, act] : spec.activities) {
    for (const auto& n : act.nodes) {
      std::string subject = name + ":" + n.id;
      if (n.label.is_action()) {
        auto it = plant.actions.find({n.label.action, n.label.peripheral});
        if (it == plant.actions.end()) {
          report.add(Check::Structure, {subject},
                     "no plant entry for " + n.label.to_string());
          continue;
        }
        const auto& a = it->second;
        if (a.jitter_lo.is_negative() || a.jitter_hi < a.jitter_lo ||
            a.worst_case < a.jitter_hi)
          report.add(Check::Structure, {subject},
                     "jitter range outside [0, worstCase] for " + n.label.to_string());
        if (n.duration < a.worst_case + cfg.delay_bound)
          report.add(Check::DurationBound, {subject},
                     "specified " + n.duration.to_string() + " < worst case " +
                         a.worst_case.to_string() + " + dA " + cfg.delay_bound.to_string());
      } else if (n.label.is_event()) {
        auto it = plant.events.find(n.label.event);
        if (it == plant.events.end()) {
          report.add(Check::Structure, {subject}, "no plant entry for event " + n.label.event);
          continue;
        }
        if (n.duration < it->second.resolution + cfg.event_bound + cfg.delay_bound)
          report.add(Check::EventDelayBound, {subject},
                     "specified " + n.duration.to_string() + " < resolution " +
                         it->second.resolution.to_string() + " + dE " +
                         cfg.event_bound.to_string() + " + dA " +
                         cfg.delay_bound.to_string());
        for (const auto& u : it->second.source.script)
          if (!spec.universe.gamma.count({n.label.event, u}))
            report.add(Check::CrossRef, {n.label.event},
                       "scripted outcome " + u + " not in gamma");
        for (const auto& [u, w] : it->second.source.distribution)
          if (!spec.universe.gamma.count({n.label.event, u}))
            report.add(Check::CrossRef, {n.label.event},
                       "distribution outcome " + u + " not in gamma");
      }
    }
  }
  report.normalize();
  return report;
}

/// Raised when the plant refuses or cannot resolve a request (failure
/// injection, exhausted outcome script).
class PlantError : public SpecError {
 public:
  using SpecError::SpecError;
};

/// Seeded simulated plant. A passive responder: every call answers one
/// issued node; the sampled values are deterministic in (seed, call order).
class SimPlant {
 public:
  SimPlant(PlantConfig config, const ActivitySpec& spec)
      : cfg_(std::move(config)), spec_(&spec), rng_(cfg_.seed) {}

  const PlantConfig& config() const { return cfg_; }

  struct ActionResult {
    Time start;        // S'(n): issue time + start delay
    Time completion;   // C'(n): start + sampled duration
    Time observed_at;  // completion + observation delay
  };

  ActionResult start_action(const NodeRef& node, const NodeLabel& label, Time issue) {
    if (!label.is_action())
      throw PlantError("node " + node.to_string() + " is not an action node");
    auto it = cfg_.actions.find({label.action, label.peripheral});
    if (it == cfg_.actions.end())
      throw PlantError("no plant entry for " + label.to_string());
    if (it->second.fail_start)
      throw PlantError("injected start failure for " + label.to_string() + " at " +
                       node.to_string());
    Time start = issue + sample_range(Time(0), cfg_.start_delay_max);
    Time completion = start + sample_range(it->second.jitter_lo, it->second.jitter_hi);
    Time observed = completion + sample_range(Time(0), cfg_.observe_delay_max);
    return {start, completion, observed};
  }

  struct EventResult {
    OutcomeName outcome;
    Time start;        // S'(n): sampling begins
    Time resolved_at;  // C'(n): outcome available at the plant boundary
  };

  EventResult sample_event(const NodeRef& node, const NodeLabel& label, Time issue) {
    if (!label.is_event())
      throw PlantError("node " + node.to_string() + " is not an event node");
    auto it = cfg_.events.find(label.event);
    if (it == cfg_.events.end())
      throw PlantError("no plant entry for event " + label.event);
    Time start = issue + sample_range(Time(0), cfg_.start_delay_max);
    Time resolved = start + sample_range(Time(0), it->second.resolution);
    return {draw_outcome(label.event, it->second.source), start, resolved};
  }

 private:
  // Uniform rational sample on a 2^20-step grid over [lo, hi]; stays exact
  // and never exceeds hi.
  Time sample_range(const Time& lo, const Time& hi) {
    if (hi < lo) throw PlantError("invalid sampling range");
    if (lo == hi) return lo;
    constexpr std::int64_t kSteps = 1 << 20;
    std::uniform_int_distribution<std::int64_t> dist(0, kSteps);
    return lo + (hi - lo) * Time(dist(rng_), kSteps);
  }

  OutcomeName draw_outcome(const EventName& event, const OutcomeSource& source) {
    if (source.scripted()) {
      std::size_t& cursor = script_cursor_[event];
      if (cursor >= source.script.size())
        throw PlantError("outcome script for event " + event +
                         " exhausted after " + std::to_string(cursor) + " emission(s)");
      return source.script[cursor++];
    }
    double total = 0;
    for (const auto& [u, w] : source.distribution) total += w;
    std::uniform_real_distribution<double> dist(0.0, total);
    double pick = dist(rng_);
    for (const auto& [u, w] : source.distribution) {
      pick -= w;
      if (pick <= 0) return u;
    }
    return source.distribution.rbegin()->first;
  }

  PlantConfig cfg_;
  const ActivitySpec* spec_;
  std::mt19937_64 rng_;
  std::map<EventName, std::size_t> script_cursor_;
};

/// Plant section of a specification document.
inline PlantConfig parse_plant(const nlohmann::json& j, const ActivitySpec& spec) {
  PlantConfig p;
  auto time_of = [&](const nlohmann::json& v, const std::string& where) {
    return detail::time_field(v, where);
  };
  if (j.contains("actions"))
    for (const auto& a : j.at("actions")) {
      ActionName action = detail::require_string(a, "action", "plant action");
      Peripheral peripheral = detail::require_string(a, "peripheral", "plant action");
      ActionPlantConfig c;
      c.worst_case = time_of(detail::require(a, "worstCase", "plant action"), "worstCase");
      if (a.contains("jitter")) {
        const auto& range = a.at("jitter");
        if (!range.is_array() || range.size() != 2)
          throw SpecError("schema: jitter is a [lo, hi] pair");
        c.jitter_lo = time_of(range.at(0), "jitter");
        c.jitter_hi = time_of(range.at(1), "jitter");
      } else {
        c.jitter_lo = c.jitter_hi = c.worst_case;
      }
      if (a.contains("failStart")) c.fail_start = a.at("failStart").get<bool>();
      p.actions[{action, peripheral}] = c;
    }
  if (j.contains("events"))
    for (const auto& e : j.at("events")) {
      EventName event = detail::require_string(e, "event", "plant event");
      EventPlantConfig c;
      c.resolution = time_of(detail::require(e, "resolution", "plant event"), "resolution");
      const auto& source = detail::require(e, "source", "plant event");
      if (source.contains("script")) {
        for (const auto& u : source.at("script"))
          c.source.script.push_back(u.get<std::string>());
      } else if (source.contains("dist")) {
        for (const auto& [u, w] : source.at("dist").items())
          c.source.distribution[u] = w.get<double>();
      } else {
        throw SpecError("schema: event source needs 'script' or 'dist'");
      }
      p.events[event] = c;
    }
  if (j.contains("delays")) {
    const auto& d = j.at("delays");
    if (d.contains("startMax")) p.start_delay_max = time_of(d.at("startMax"), "startMax");
    if (d.contains("observeMax"))
      p.observe_delay_max = time_of(d.at("observeMax"), "observeMax");
  }
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  (void)spec;
  return p;
}

}  // namespace aee

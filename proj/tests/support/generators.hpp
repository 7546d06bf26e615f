#pragma once

// Seeded random inputs for property tests: arbitrary labeled DAGs (often
// invalid) for validator cross-checks, and well-formed-by-construction
// activities for timing and sequencing properties.

#include <random>
#include <string>
#include <vector>

#include "aee/model.hpp"

namespace gen {

struct SmallUniverse {
  aee::Universe universe;
  std::vector<aee::Peripheral> peripherals;
  std::vector<aee::EventName> events;
};

inline SmallUniverse small_universe(std::mt19937_64& rng) {
  SmallUniverse out;
  std::size_t resources = 1 + rng() % 3;
  for (std::size_t i = 0; i < resources; ++i) {
    aee::Resource r = "s" + std::to_string(i);
    out.universe.resources.push_back(r);
    std::size_t per = 1 + rng() % 2;
    for (std::size_t j = 0; j < per; ++j) {
      aee::Peripheral p = r + "p" + std::to_string(j);
      out.universe.owner[p] = r;
      out.peripherals.push_back(p);
    }
  }
  std::size_t events = rng() % 3;
  for (std::size_t i = 0; i < events; ++i) {
    aee::EventName e = "ev" + std::to_string(i);
    out.universe.events.insert(e);
    out.events.push_back(e);
    out.universe.outcomes.insert("ok");
    out.universe.outcomes.insert("ko");
    out.universe.gamma.insert({e, "ok"});
    out.universe.gamma.insert({e, "ko"});
  }
  return out;
}

/// Arbitrary labeled graph over the universe; edges are mostly forward in
/// creation order, with occasional back edges to exercise cycle handling.
inline aee::Activity arbitrary_activity(std::mt19937_64& rng, const SmallUniverse& su,
                                        std::size_t max_nodes = 10) {
  aee::Activity a;
  a.name = "rand";
  std::size_t n = rng() % (max_nodes + 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::string id = "n" + std::to_string(i);
    switch (rng() % 4) {
      case 0: {
        const auto& r = su.universe.resources[rng() % su.universe.resources.size()];
        a.add_node(id, aee::NodeLabel::make_claim(r));
        break;
      }
      case 1: {
        const auto& r = su.universe.resources[rng() % su.universe.resources.size()];
        a.add_node(id, aee::NodeLabel::make_release(r));
        break;
      }
      case 2: {
        const auto& p = su.peripherals[rng() % su.peripherals.size()];
        a.add_node(id, aee::NodeLabel::make_action("act" + std::to_string(rng() % 3), p),
                   aee::Time(std::int64_t(rng() % 4), 2));
        break;
      }
      default: {
        if (su.events.empty()) {
          const auto& p = su.peripherals[rng() % su.peripherals.size()];
          a.add_node(id, aee::NodeLabel::make_action("act0", p), aee::Time(1));
        } else {
          a.add_node(id, aee::NodeLabel::make_event(su.events[rng() % su.events.size()]),
                     aee::Time(std::int64_t(rng() % 4), 2));
        }
      }
    }
  }
  std::size_t edges = n == 0 ? 0 : rng() % (2 * n);
  for (std::size_t i = 0; i < edges; ++i) {
    std::size_t x = rng() % n, y = rng() % n;
    if (x == y) continue;
    if (x > y && rng() % 8 != 0) std::swap(x, y);  // mostly forward
    a.add_edge("n" + std::to_string(x), "n" + std::to_string(y));
  }
  return a;
}

/// Well-formed by construction: per-resource claim/release brackets, actions
/// chained per peripheral and bracketed by their resource, events preceded
/// and chained per event name.
inline aee::Activity wellformed_activity(std::mt19937_64& rng, const SmallUniverse& su,
                                         std::size_t max_inner = 8,
                                         bool use_events = true) {
  aee::Activity a;
  a.name = "gen";
  for (const auto& r : su.universe.resources) {
    a.add_node(r + ".cl", aee::NodeLabel::make_claim(r));
    a.add_node(r + ".rl", aee::NodeLabel::make_release(r));
    a.add_edge(r + ".cl", r + ".rl");
  }
  std::map<aee::Peripheral, std::string> last_on_peripheral;
  std::map<aee::EventName, std::string> last_of_event;
  std::vector<std::string> inner;  // creation order = a valid topological order
  std::size_t n = rng() % (max_inner + 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::string id = "n" + std::to_string(i);
    bool make_event = use_events && !su.events.empty() && !inner.empty() && rng() % 4 == 0;
    if (make_event) {
      const auto& e = su.events[rng() % su.events.size()];
      a.add_node(id, aee::NodeLabel::make_event(e), aee::Time(std::int64_t(rng() % 4), 2));
      a.add_edge(inner[rng() % inner.size()], id);
      if (last_of_event.count(e)) a.add_edge(last_of_event[e], id);
      last_of_event[e] = id;
    } else {
      const auto& p = su.peripherals[rng() % su.peripherals.size()];
      const auto& r = su.universe.resource_of(p);
      a.add_node(id, aee::NodeLabel::make_action("act" + std::to_string(rng() % 3), p),
                 aee::Time(std::int64_t(rng() % 4), 2));
      a.add_edge(r + ".cl", id);
      a.add_edge(id, r + ".rl");
      if (last_on_peripheral.count(p)) a.add_edge(last_on_peripheral[p], id);
      last_on_peripheral[p] = id;
    }
    // Extra forward edges keep the graph interesting without breaking
    // any constraint (never out of a release, never into a claim).
    if (!inner.empty() && rng() % 2 == 0) a.add_edge(inner[rng() % inner.size()], id);
    inner.push_back(id);
  }
  return a;
}

/// A random specification with the loop-and-finish control shape: two
/// straight activities, one event emitter, a decision that either loops or
/// finishes. Contents (resources, node counts, durations, edges) are random;
/// the shape keeps the automaton deterministic, complete, nonblocking and
/// consistent by construction.
inline aee::ActivitySpec random_small_spec(std::mt19937_64& rng) {
  SmallUniverse su = small_universe(rng);
  su.universe.events = {"ev"};
  su.events.assign(1, "ev");
  su.universe.outcomes = {"go", "stop"};
  su.universe.gamma = {{"ev", "go"}, {"ev", "stop"}};

  auto plain = [&](const std::string& name) {
    aee::Activity a = wellformed_activity(rng, su, 5, false);
    a.name = name;
    for (auto& n : a.nodes)
      if (n.label.is_action()) n.duration += aee::Time(1, 4);
    return a;
  };
  aee::Activity emitter = plain("Aemit");
  {
    std::vector<std::string> anchors;
    for (const auto& n : emitter.nodes)
      if (!n.label.is_release()) anchors.push_back(n.id);
    emitter.add_node("evn", aee::NodeLabel::make_event("ev"),
                     aee::Time(1) + aee::Time(std::int64_t(rng() % 4), 4));
    emitter.add_edge(anchors[rng() % anchors.size()], "evn");
  }

  aee::ActivitySpec spec;
  spec.universe = su.universe;
  for (auto& a : {plain("A1"), emitter, plain("A2"), plain("A3")})
    spec.activities[a.name] = a;

  spec.automaton.states = {"s0", "s1", "sd", "sf"};
  spec.automaton.initials = {"s0"};
  spec.automaton.finals = {"sf"};
  spec.automaton.transitions = {
      {"s0", std::nullopt, "A1", "s1"},
      {"s1", std::nullopt, "Aemit", "sd"},
      {"sd", aee::EventOutcome{"ev", "go"}, "A2", "s0"},
      {"sd", aee::EventOutcome{"ev", "stop"}, "A3", "sf"},
  };
  return spec;
}

}  // namespace gen

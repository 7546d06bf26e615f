#pragma once

#include <map>
#include <optional>
#include <vector>

#include "aee/automaton.hpp"
#include "aee/model.hpp"
#include "aee/sequencing.hpp"

namespace aee {

/// Availability time of every resource; claims anchor at these values.
struct ResourceState {
  std::map<Resource, Time> availability;

  static ResourceState zero(const Universe& u) {
    ResourceState s;
    for (const auto& r : u.resources) s.availability[r] = Time(0);
    return s;
  }

  Time at(const Resource& r) const {
    auto it = availability.find(r);
    if (it == availability.end()) throw SpecError("no availability for resource " + r);
    return it->second;
  }

  Time min() const {
    if (availability.empty()) throw SpecError("empty resource state");
    Time m = availability.begin()->second;
    for (const auto& [r, t] : availability) m = Time::min(m, t);
    return m;
  }

  ResourceState shifted(const Time& delta) const {
    ResourceState s = *this;
    for (auto& [r, t] : s.availability) t += delta;
    return s;
  }
};

struct ScheduleEntry {
  NodeRef node;
  Time start;       // S(n)
  Time completion;  // C(n) = S(n) + duration
};

using Schedule = std::map<NodeRef, ScheduleEntry>;

/// Max-plus node timing: claims start at the resource availability, every
/// other node starts at the latest completion among its predecessors.
/// Single topological pass; exact arithmetic.
inline Schedule node_times(const ComposedActivity& a, const ResourceState& x) {
  auto order = topological_order(a);
  if (!order) throw SpecError("node_times requires an acyclic activity");
  Schedule out;
  for (const auto& id : *order) {
    const auto& entry = a.node(id);
    Time start(0);
    if (entry.label.is_claim()) {
      start = x.at(entry.label.resource);
    } else {
      const auto& preds = a.preds(id);
      if (preds.empty())
        throw SpecError("non-claim node without predecessor: " + id.to_string());
      bool first = true;
      for (const auto& p : preds) {
        const Time& c = out.at(p).completion;
        start = first ? c : Time::max(start, c);
        first = false;
      }
    }
    out[id] = {id, start, start + entry.duration};
  }
  return out;
}

inline Schedule node_times(const Activity& a, const ResourceState& x) {
  return node_times(lift(a, 0), x);
}

/// Earliest specified start over all nodes; the minimum availability when
/// the activity is empty.
inline Time activity_start(const ComposedActivity& a, const ResourceState& x) {
  if (a.empty()) return x.min();
  Schedule times = node_times(a, x);
  bool first = true;
  Time m(0);
  for (const auto& [id, entry] : times) {
    m = first ? entry.start : Time::min(m, entry.start);
    first = false;
  }
  return m;
}

inline Time activity_start(const Activity& a, const ResourceState& x) {
  return activity_start(lift(a, 0), x);
}

/// Specified start time of a decision path: the earliest start among the
/// nodes the path adds when its activities are folded onto the behavior
/// built so far. Falls back to the minimum availability when the path
/// contributes no nodes.
inline Time decision_path_start(const std::map<std::string, Activity>& acts,
                                const Universe& u, const DecisionPath& rho,
                                const ResourceState& x,
                                const ComposedActivity& prior_behavior,
                                const SeqOptions& opts = {}) {
  ComposedActivity acc = prior_behavior;
  std::uint32_t instance = acc.empty() ? 0 : acc.max_instance() + 1;
  bool first = true;
  for (const auto& out : rho.activities()) {
    ComposedActivity rhs;
    if (out) {
      auto it = acts.find(*out);
      if (it == acts.end()) throw SpecError("unknown activity: " + *out);
      rhs = lift(it->second, instance);
    }
    std::optional<EventInstance> processing;
    if (first && rho.processing_input()) {
      const auto& eu = *rho.processing_input();
      processing = EventInstance{eu.event, prior_behavior.processed_count(eu.event) + 1};
    }
    detail::fold_into(acc, rhs, u, processing, opts);
    ++instance;
    first = false;
  }
  Schedule times = node_times(acc, x);
  std::optional<Time> m;
  for (const auto& [id, entry] : times) {
    if (prior_behavior.has_node(id)) continue;
    m = m ? Time::min(*m, entry.start) : entry.start;
  }
  return m ? *m : x.min();
}

}  // namespace aee

#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "aee/model.hpp"
#include "aee/report.hpp"
#include "aee/sequencing.hpp"

namespace aee {

namespace detail {

/// All structural constraints of a well-formed activity, checked over a
/// composed view so the same code serves plain and sequenced activities.
/// `display` renders node ids for the report.
inline ValidationReport validate_graph(
    const ComposedActivity& a, const Universe& u,
    const std::function<std::string(const NodeRef&)>& display) {
  ValidationReport report;
  if (a.empty()) return report;  // the empty activity is valid by definition

  auto closure = reachability(a);
  auto reaches = [&](const NodeRef& x, const NodeRef& y) {
    return closure[x].count(y) != 0;
  };

  // Acyclicity of the dependency relation.
  if (!topological_order(a)) {
    std::vector<std::string> cyclic;
    for (const auto& [id, entry] : a.nodes())
      if (reaches(id, id)) cyclic.push_back(display(id));
    report.add(Check::Acyclic, cyclic, "dependency cycle");
  }

  std::map<Resource, std::vector<NodeRef>> claims, releases;
  std::map<Peripheral, std::vector<NodeRef>> per_peripheral;
  std::map<EventName, std::vector<NodeRef>> per_event;
  for (const auto& [id, entry] : a.nodes()) {
    const NodeLabel& l = entry.label;
    if (l.is_claim()) claims[l.resource].push_back(id);
    if (l.is_release()) releases[l.resource].push_back(id);
    if (l.is_action()) per_peripheral[l.peripheral].push_back(id);
    if (l.is_event()) per_event[l.event].push_back(id);
  }

  // I: actions on one peripheral form a chain.
  for (const auto& [p, nodes] : per_peripheral)
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = i + 1; j < nodes.size(); ++j)
        if (!reaches(nodes[i], nodes[j]) && !reaches(nodes[j], nodes[i]))
          report.add(Check::C_I, {display(nodes[i]), display(nodes[j])},
                     "unordered actions on peripheral " + p);

  // II / III: each resource claimed and released exactly once.
  for (const auto& r : u.resources) {
    if (claims[r].size() != 1) {
      std::vector<std::string> subjects;
      for (const auto& n : claims[r]) subjects.push_back(display(n));
      report.add(Check::C_II, subjects,
                 "resource " + r + " claimed " + std::to_string(claims[r].size()) + "x");
    }
    if (releases[r].size() != 1) {
      std::vector<std::string> subjects;
      for (const auto& n : releases[r]) subjects.push_back(display(n));
      report.add(Check::C_III, subjects,
                 "resource " + r + " released " + std::to_string(releases[r].size()) + "x");
    }
  }

  auto any_reaches = [&](const std::vector<NodeRef>& from, const NodeRef& to) {
    for (const auto& f : from)
      if (reaches(f, to)) return true;
    return false;
  };
  auto reaches_any = [&](const NodeRef& from, const std::vector<NodeRef>& to) {
    for (const auto& t : to)
      if (reaches(from, t)) return true;
    return false;
  };

  for (const auto& [id, entry] : a.nodes()) {
    const NodeLabel& l = entry.label;
    if (l.is_action()) {
      const Resource& r = u.resource_of(l.peripheral);
      // IV / V: actions are bracketed by their resource's claim and release.
      if (!any_reaches(claims[r], id))
        report.add(Check::C_IV, {display(id)}, "no preceding claim of " + r);
      if (!reaches_any(id, releases[r]))
        report.add(Check::C_V, {display(id)}, "no succeeding release of " + r);
    } else if (l.is_release()) {
      // VI: a claim precedes every release.
      if (!any_reaches(claims[l.resource], id))
        report.add(Check::C_VI, {display(id)}, "no preceding claim of " + l.resource);
      // IX: releases are sinks.
      if (!closure[id].empty()) {
        std::vector<std::string> subjects{display(id)};
        report.add(Check::C_IX, subjects, "release has successors");
      }
    } else if (l.is_claim()) {
      // VII: a release succeeds every claim.
      if (!reaches_any(id, releases[l.resource]))
        report.add(Check::C_VII, {display(id)}, "no succeeding release of " + l.resource);
      // VIII: claims are sources.
      bool preceded = false;
      for (const auto& [other, oe] : a.nodes())
        if (!(other == id) && reaches(other, id)) preceded = true;
      if (preceded)
        report.add(Check::C_VIII, {display(id)}, "claim has predecessors");
    } else if (l.is_event()) {
      // X: events are preceded by at least one node.
      bool preceded = false;
      for (const auto& [other, oe] : a.nodes())
        if (!(other == id) && reaches(other, id)) preceded = true;
      if (!preceded)
        report.add(Check::C_X, {display(id)}, "event " + l.event + " has no predecessor");
    }
  }

  // XI: instances of the same event form a chain.
  for (const auto& [e, nodes] : per_event)
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = i + 1; j < nodes.size(); ++j)
        if (!reaches(nodes[i], nodes[j]) && !reaches(nodes[j], nodes[i]))
          report.add(Check::C_XI, {display(nodes[i]), display(nodes[j])},
                     "unordered instances of event " + e);

  report.normalize();
  return report;
}

}  // namespace detail

/// Validates an activity against all structural constraints. Dangling ids
/// in the dependency relation and duplicate node ids are structural errors
/// and raise SpecError instead of producing findings.
inline ValidationReport validate_activity(const Activity& a, const Universe& u) {
  std::set<std::string> ids;
  for (const auto& n : a.nodes)
    if (!ids.insert(n.id).second)
      throw SpecError("duplicate node id " + n.id + " in activity " + a.name);
  for (const auto& [from, to] : a.edges)
    if (!ids.count(from) || !ids.count(to))
      throw SpecError("dangling node id in dependency " + from + " -> " + to +
                      " of activity " + a.name);
  ComposedActivity lifted = lift(a, 0);
  return detail::validate_graph(lifted, u,
                                [](const NodeRef& n) { return n.local; });
}

inline ValidationReport validate_composed(const ComposedActivity& a, const Universe& u) {
  return detail::validate_graph(a, u, [](const NodeRef& n) { return n.to_string(); });
}

/// Adds the claim/release pass-through pair for every declared resource the
/// activity does not already touch (sequencing assumes all activities claim
/// and release all resources).
inline Activity normalized(Activity a, const Universe& u) {
  auto fresh = [&](std::string base) {
    while (a.has_node(base)) base += "'";
    return base;
  };
  for (const auto& r : u.resources) {
    auto cl = a.claim_of(r);
    auto rl = a.release_of(r);
    if (cl || rl) continue;  // an unmatched pair is left for the validator to flag
    std::string cl_id = fresh(r + ".cl");
    std::string rl_id = fresh(r + ".rl");
    a.add_node(cl_id, NodeLabel::make_claim(r));
    a.add_node(rl_id, NodeLabel::make_release(r));
    a.add_edge(cl_id, rl_id);
  }
  return a;
}

}  // namespace aee

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "aee/automaton.hpp"
#include "aee/model.hpp"
#include "aee/validate.hpp"

namespace aee {

/// Parse succeeded structurally but the content violates validation rules;
/// carries the full report.
class ValidationError : public SpecError {
 public:
  ValidationError(std::string what, ValidationReport report)
      : SpecError(std::move(what)), report(std::move(report)) {}

  ValidationReport report;
};

/// A fully resolved specification: universes, normalized activities, and
/// the logistics automaton. Immutable after parsing.
struct ActivitySpec {
  Universe universe;
  std::map<std::string, Activity> activities;
  IOAutomaton automaton;

  const Activity& activity(const std::string& name) const {
    auto it = activities.find(name);
    if (it == activities.end()) throw SpecError("unknown activity: " + name);
    return it->second;
  }
};

/// Aggregate of every static check: per-activity structural constraints
/// plus the automaton's determinism, completeness, non-blocking and
/// consistency checks.
inline ValidationReport validate_spec(const ActivitySpec& spec, int counter_bound = 64) {
  ValidationReport report;
  for (const auto& [name, act] : spec.activities) {
    ValidationReport r = validate_activity(act, spec.universe);
    for (auto& f : r.findings) f.detail = "activity " + name + ": " + f.detail;
    report.merge(r);
  }
  report.merge(validate_deterministic(spec.automaton, spec.universe.gamma));
  report.merge(validate_complete(spec.automaton, spec.universe.gamma));
  report.merge(validate_nonblocking(spec.automaton));
  // Consistency presumes the other automaton properties; skip it (instead of
  // chasing ill-formed walks) when they already failed.
  if (report.ok())
    report.merge(validate_consistent(spec.automaton, spec.activities, counter_bound));
  report.normalize();
  return report;
}

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key,
                                     const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw SpecError("schema: missing key '" + key + "' in " + where);
  return j.at(key);
}

inline std::string require_string(const nlohmann::json& j, const std::string& key,
                                  const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_string()) throw SpecError("schema: '" + key + "' in " + where + " must be a string");
  return v.get<std::string>();
}

inline Time time_field(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return parse_time(v.get<std::string>());
  if (v.is_number_integer()) return Time(v.get<std::int64_t>());
  throw SpecError("schema: time value in " + where +
                  " must be a decimal string (floats are not exact)");
}

}  // namespace detail

/// Parses a specification document. Structural problems (malformed JSON
/// values, duplicate or dangling identifiers) raise SpecError; semantic
/// cross-reference problems raise ValidationError with a report; when
/// `validate` is set, constraint violations do too.
inline ActivitySpec parse_spec(const nlohmann::json& doc, bool validate = true) {
  using nlohmann::json;
  ActivitySpec spec;
  ValidationReport crossref;

  // Universe.
  for (const auto& r : detail::require(doc, "resources", "document")) {
    std::string name = detail::require_string(r, "name", "resource");
    if (spec.universe.has_resource(name)) throw SpecError("duplicate resource " + name);
    spec.universe.resources.push_back(name);
    if (r.contains("peripherals"))
      for (const auto& p : r.at("peripherals")) {
        std::string pn = p.get<std::string>();
        if (spec.universe.owner.count(pn)) throw SpecError("duplicate peripheral " + pn);
        spec.universe.owner[pn] = name;
      }
  }
  if (doc.contains("events"))
    for (const auto& e : doc.at("events")) spec.universe.events.insert(e.get<std::string>());
  if (doc.contains("outcomes"))
    for (const auto& u : doc.at("outcomes")) spec.universe.outcomes.insert(u.get<std::string>());
  if (doc.contains("gamma"))
    for (const auto& pair : doc.at("gamma")) {
      if (!pair.is_array() || pair.size() != 2)
        throw SpecError("schema: gamma entries are [event, outcome] pairs");
      EventName e = pair.at(0).get<std::string>();
      OutcomeName u = pair.at(1).get<std::string>();
      if (!spec.universe.events.count(e))
        crossref.add(Check::CrossRef, {e}, "gamma references undeclared event");
      if (!spec.universe.outcomes.count(u))
        crossref.add(Check::CrossRef, {u}, "gamma references undeclared outcome");
      spec.universe.gamma.insert({e, u});
    }

  // Activities.
  for (const auto& a : detail::require(doc, "activities", "document")) {
    Activity act;
    act.name = detail::require_string(a, "name", "activity");
    if (act.name.find(':') != std::string::npos)
      throw SpecError("schema: ':' is reserved in activity names: " + act.name);
    if (spec.activities.count(act.name)) throw SpecError("duplicate activity " + act.name);
    for (const auto& n : detail::require(a, "nodes", "activity " + act.name)) {
      Node node;
      node.id = detail::require_string(n, "id", "node of " + act.name);
      if (node.id.find(':') != std::string::npos)
        throw SpecError("schema: ':' is reserved in node ids: " + node.id);
      std::string kind = detail::require_string(n, "kind", "node " + node.id);
      std::string where = "node " + node.id + " of " + act.name;
      if (kind == "action") {
        std::string action = detail::require_string(n, "action", where);
        std::string peripheral = detail::require_string(n, "peripheral", where);
        if (!spec.universe.owner.count(peripheral))
          crossref.add(Check::CrossRef, {node.id}, "undeclared peripheral " + peripheral);
        node.label = NodeLabel::make_action(action, peripheral);
        node.duration = detail::time_field(detail::require(n, "duration", where), where);
      } else if (kind == "claim" || kind == "release") {
        std::string resource = detail::require_string(n, "resource", where);
        if (!spec.universe.has_resource(resource))
          crossref.add(Check::CrossRef, {node.id}, "undeclared resource " + resource);
        node.label = kind == "claim" ? NodeLabel::make_claim(resource)
                                     : NodeLabel::make_release(resource);
        if (n.contains("duration") && !detail::time_field(n.at("duration"), where).is_zero())
          throw SpecError("schema: claim/release nodes have zero duration (" + where + ")");
      } else if (kind == "event") {
        std::string event = detail::require_string(n, "event", where);
        if (!spec.universe.events.count(event))
          crossref.add(Check::CrossRef, {node.id}, "undeclared event " + event);
        node.label = NodeLabel::make_event(event);
        node.duration = detail::time_field(detail::require(n, "duration", where), where);
      } else {
        throw SpecError("schema: unknown node kind '" + kind + "' in " + where);
      }
      if (node.duration.is_negative())
        throw SpecError("schema: negative duration in " + where);
      act.nodes.push_back(std::move(node));
    }
    if (a.contains("edges"))
      for (const auto& e : a.at("edges")) {
        if (!e.is_array() || e.size() != 2)
          throw SpecError("schema: edges are [from, to] pairs in activity " + act.name);
        act.add_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>());
      }
    Activity norm = normalized(std::move(act), spec.universe);
    spec.activities[norm.name] = std::move(norm);
  }

  // Automaton.
  const auto& aut = detail::require(doc, "automaton", "document");
  for (const auto& q : detail::require(aut, "states", "automaton"))
    spec.automaton.states.push_back(q.get<std::string>());
  spec.automaton.initials.push_back(detail::require_string(aut, "initial", "automaton"));
  if (!spec.automaton.has_state(spec.automaton.initials.front()))
    crossref.add(Check::CrossRef, {spec.automaton.initials.front()}, "undeclared initial state");
  for (const auto& f : detail::require(aut, "finals", "automaton")) {
    std::string q = f.get<std::string>();
    if (!spec.automaton.has_state(q))
      crossref.add(Check::CrossRef, {q}, "undeclared final state");
    spec.automaton.finals.insert(q);
  }
  for (const auto& t : detail::require(aut, "transitions", "automaton")) {
    Transition tr;
    tr.from = detail::require_string(t, "from", "transition");
    tr.to = detail::require_string(t, "to", "transition");
    for (const auto& q : {tr.from, tr.to})
      if (!spec.automaton.has_state(q))
        crossref.add(Check::CrossRef, {q}, "transition references undeclared state");
    const auto& input = detail::require(t, "input", "transition");
    if (!input.is_null()) {
      EventOutcome eu{detail::require_string(input, "event", "transition input"),
                      detail::require_string(input, "outcome", "transition input")};
      if (!spec.universe.gamma.count({eu.event, eu.outcome}))
        crossref.add(Check::CrossRef, {eu.event + "/" + eu.outcome},
                     "transition input not in gamma");
      tr.input = eu;
    }
    const auto& output = detail::require(t, "output", "transition");
    if (!output.is_null()) {
      std::string name = output.get<std::string>();
      if (!spec.activities.count(name))
        crossref.add(Check::CrossRef, {name}, "transition outputs undeclared activity");
      tr.output = name;
    }
    spec.automaton.transitions.push_back(std::move(tr));
  }

  // Events emitted by activities must be declared (checked per node above);
  // every automaton input must be a declared gamma pair (ditto).
  crossref.normalize();
  if (!crossref.ok())
    throw ValidationError("specification has unresolved references", crossref);

  if (validate) {
    ValidationReport report = validate_spec(spec);
    if (!report.ok()) throw ValidationError("specification failed validation", report);
  }
  return spec;
}

}  // namespace aee

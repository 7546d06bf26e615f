#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "aee/automaton.hpp"
#include "aee/sequencing.hpp"
#include "aee/spec.hpp"
#include "aee/timing.hpp"
#include "aee/trace.hpp"

namespace aee {

/// Execution timing relation: every executed node starts inside
/// [S(n)+psi, S(n)+psi+dA] and completes no later than C(n)+psi.
inline ValidationReport check_timing_relation(const ExecutionTrace& trace,
                                              std::optional<Time> delay_bound = {}) {
  Time da = delay_bound ? *delay_bound : trace.delay_bound;
  ValidationReport report;
  for (const auto& r : trace.records) {
    Time lo = r.spec_start + trace.psi;
    Time hi = lo + da;
    Time cap = r.spec_completion + trace.psi;
    if (r.exec_start < lo)
      report.add(Check::TimingRelation, {r.node.to_string()},
                 "started " + (lo - r.exec_start).to_string() + " early");
    if (hi < r.exec_start)
      report.add(Check::TimingRelation, {r.node.to_string()},
                 "started " + (r.exec_start - hi).to_string() + " past the delay bound");
    if (cap < r.exec_completion)
      report.add(Check::DeadlineMiss, {r.node.to_string()},
                 "completed " + (r.exec_completion - cap).to_string() + " late");
  }
  report.normalize();
  return report;
}

namespace detail {

/// Reconstructs the word the execution followed by replaying the processed
/// outcomes through the automaton. Returns the word and whether a final
/// state was reached; mismatches are reported.
struct ReplayedWord {
  Word word;
  bool reached_final = false;
};

inline ReplayedWord replay_word(const ExecutionTrace& trace, const ActivitySpec& spec,
                                ValidationReport& report) {
  ReplayedWord out;
  const IOAutomaton& y = spec.automaton;
  std::string state = y.initial();
  std::size_t cursor = 0;
  if (y.is_final(state)) {
    out.reached_final = true;
  } else {
    auto first = next_decision_path(y, state, std::nullopt);
    for (const auto& t : first->transitions) out.word.emplace_back(t.input, t.output);
    state = first->last_state();
  }
  while (!y.is_final(state)) {
    if (cursor >= trace.processed_outcomes.size()) {
      report.add(Check::IncompleteBehavior, {state},
                 "trace ends before a final state; " + std::to_string(cursor) +
                     " outcome(s) processed");
      return out;
    }
    const EventOutcome& eu = trace.processed_outcomes[cursor++];
    std::optional<DecisionPath> path;
    try {
      path = next_decision_path(y, state, eu);
    } catch (const SpecError& e) {
      report.add(Check::BehaviorMismatch, {state},
                 "processed outcome (" + eu.event + "," + eu.outcome +
                     ") does not match the automaton: " + e.what());
      return out;
    }
    for (const auto& t : path->transitions) out.word.emplace_back(t.input, t.output);
    state = path->last_state();
  }
  out.reached_final = true;
  if (cursor < trace.processed_outcomes.size())
    report.add(Check::BehaviorMismatch, {},
               std::to_string(trace.processed_outcomes.size() - cursor) +
                   " processed outcome(s) beyond the final state");
  return out;
}

/// Action/event dependency pairs of the behavior, looking through resource
/// nodes (which have no executed timings).
inline std::vector<std::pair<NodeRef, NodeRef>> observable_dependencies(
    const ComposedActivity& behavior) {
  std::vector<std::pair<NodeRef, NodeRef>> out;
  for (const auto& [id, entry] : behavior.nodes()) {
    if (entry.label.is_resource_node()) continue;
    // BFS over resource nodes; stop at the first action/event on each branch.
    std::set<NodeRef> seen;
    std::vector<NodeRef> stack(behavior.succs(id).begin(), behavior.succs(id).end());
    while (!stack.empty()) {
      NodeRef n = stack.back();
      stack.pop_back();
      if (!seen.insert(n).second) continue;
      const auto& label = behavior.node(n).label;
      if (label.is_resource_node()) {
        for (const auto& s : behavior.succs(n)) stack.push_back(s);
      } else {
        out.emplace_back(id, n);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Behavior preservation: the executed node set equals the behavior's
/// action/event nodes, processed outcomes match the word, and every
/// observable dependency is respected by the executed times.
inline ValidationReport check_behavior_preservation(const ExecutionTrace& trace,
                                                    const ActivitySpec& spec) {
  ValidationReport report;
  auto replay = detail::replay_word(trace, spec, report);

  // (c) U' is exactly the processed-events projection of the word.
  auto expected_outcomes = processed_events(replay.word);
  if (replay.reached_final && expected_outcomes != trace.processed_outcomes)
    report.add(Check::BehaviorMismatch, {},
               "processed-outcome sequence does not match the word");

  ComposedActivity behavior =
      behavior_activity(spec.universe, spec.activities, replay.word);

  std::map<NodeRef, const TraceRecord*> executed;
  for (const auto& r : trace.records) {
    if (executed.count(r.node))
      report.add(Check::BehaviorMismatch, {r.node.to_string()}, "node executed twice");
    executed[r.node] = &r;
  }

  // (a) every action/event node of the behavior executed...
  for (const auto& [id, entry] : behavior.nodes()) {
    if (entry.label.is_resource_node()) continue;
    if (!executed.count(id))
      report.add(Check::BehaviorMismatch, {id.to_string()}, "specified node never executed");
  }
  // (b) ...and nothing else.
  for (const auto& [id, rec] : executed)
    if (!behavior.has_node(id) || behavior.node(id).label.is_resource_node())
      report.add(Check::BehaviorMismatch, {id.to_string()},
                 "executed node is not part of the behavior");

  // (d) dependencies between observable nodes, through resource chains.
  for (const auto& [from, to] : detail::observable_dependencies(behavior)) {
    auto a = executed.find(from);
    auto b = executed.find(to);
    if (a == executed.end() || b == executed.end()) continue;  // reported above
    if (b->second->exec_start < a->second->exec_completion)
      report.add(Check::BehaviorMismatch, {from.to_string(), to.to_string()},
                 "dependency violated: completion " +
                     a->second->exec_completion.to_string() + " after start " +
                     b->second->exec_start.to_string());
  }

  report.normalize();
  return report;
}

/// Per-path readiness bound: after the first path, the dispatcher must hold
/// every node of a path before the path's specified start comes up.
inline ValidationReport check_path_readiness(const ExecutionTrace& trace) {
  ValidationReport report;
  for (const auto& p : trace.paths) {
    if (p.index == 0) continue;
    if (p.spec_start + trace.psi < p.ready)
      report.add(Check::TimingRelation, {"path " + std::to_string(p.index)},
                 "ready at " + p.ready.to_string() + " after specified start " +
                     (p.spec_start + trace.psi).to_string());
  }
  report.normalize();
  return report;
}

struct DeltaSummary {
  std::size_t count = 0;
  Time min;
  Time max;
  Time mean;
  Time p50;
  Time p90;
};

inline DeltaSummary delta_summary(const ExecutionTrace& trace) {
  DeltaSummary s;
  std::vector<Time> deltas;
  for (const auto& r : trace.records) deltas.push_back(r.delta);
  s.count = deltas.size();
  if (deltas.empty()) return s;
  std::sort(deltas.begin(), deltas.end());
  s.min = deltas.front();
  s.max = deltas.back();
  Time sum(0);
  for (const auto& d : deltas) sum += d;
  s.mean = sum / Time(static_cast<std::int64_t>(deltas.size()));
  s.p50 = deltas[deltas.size() / 2];
  s.p90 = deltas[(deltas.size() * 9) / 10 >= deltas.size() ? deltas.size() - 1
                                                           : (deltas.size() * 9) / 10];
  return s;
}

/// Time-criticality: the largest execution delay must stay within the
/// given bound.
inline ValidationReport check_criticality(const ExecutionTrace& trace, const Time& bound) {
  ValidationReport report;
  DeltaSummary s = delta_summary(trace);
  if (s.count > 0 && bound < s.max)
    report.add(Check::Criticality, {},
               "max delta " + s.max.to_string() + " exceeds bound " + bound.to_string() +
                   " (p50 " + s.p50.to_string() + ", p90 " + s.p90.to_string() + ")");
  return report;
}

// --- Gantt export ------------------------------------------------------------

/// One row per resource; every executed node contributes its specified
/// (shifted by psi) and executed intervals. Events are attributed to the
/// resource whose claim/release brackets them in their source activity.
inline nlohmann::json export_gantt(const ExecutionTrace& trace, const ActivitySpec& spec) {
  using nlohmann::json;

  auto event_resource = [&](const NodeRef& id) -> std::string {
    auto it = spec.activities.find(id.activity);
    if (it == spec.activities.end()) return "";
    ComposedActivity lifted = lift(it->second, 0);
    auto closure = reachability(lifted);
    NodeRef local{0, id.activity, id.local};
    for (const auto& r : spec.universe.resources) {
      auto cl = it->second.claim_of(r);
      auto rl = it->second.release_of(r);
      if (!cl || !rl) continue;
      NodeRef clref{0, id.activity, *cl};
      NodeRef rlref{0, id.activity, *rl};
      if (closure[clref].count(local) && closure[local].count(rlref)) return r;
    }
    return "";
  };

  std::map<std::string, std::vector<const TraceRecord*>> rows;
  for (const auto& r : trace.records) {
    std::string resource = r.label.is_action()
                               ? spec.universe.resource_of(r.label.peripheral)
                               : event_resource(r.node);
    rows[resource].push_back(&r);
  }

  json out;
  out["psi"] = trace.psi.to_string();
  out["rows"] = json::array();
  for (const auto& resource : spec.universe.resources) {
    json row;
    row["resource"] = resource;
    row["entries"] = json::array();
    auto it = rows.find(resource);
    if (it != rows.end()) {
      std::vector<const TraceRecord*> entries = it->second;
      std::sort(entries.begin(), entries.end(), [](const TraceRecord* a, const TraceRecord* b) {
        return std::tie(a->spec_start, a->node) < std::tie(b->spec_start, b->node);
      });
      for (const TraceRecord* r : entries)
        row["entries"].push_back(json{{"node", r->node.to_string()},
                                      {"label", r->label.to_string()},
                                      {"kind", r->label.is_event() ? "event" : "action"},
                                      {"specStart", (r->spec_start + trace.psi).to_string()},
                                      {"specEnd", (r->spec_completion + trace.psi).to_string()},
                                      {"execStart", r->exec_start.to_string()},
                                      {"execEnd", r->exec_completion.to_string()},
                                      {"path", r->path_index},
                                      {"deadlineViolated", r->deadline_violated}});
    }
    out["rows"].push_back(std::move(row));
  }
  return out;
}

/// Minimal vector drawing of the export: per resource row, specified
/// intervals on top, hatched executed intervals below.
inline std::string gantt_svg(const nlohmann::json& gantt) {
  double min_t = 1e18, max_t = -1e18;
  for (const auto& row : gantt.at("rows"))
    for (const auto& e : row.at("entries")) {
      auto lo = [](const std::string& s) {
        Rat r = Rat::parse(s); return double(r.num()) / double(r.den()); };
      min_t = std::min({min_t, lo(e.at("specStart").get<std::string>()),
                        lo(e.at("execStart").get<std::string>())});
      max_t = std::max({max_t, lo(e.at("specEnd").get<std::string>()),
                        lo(e.at("execEnd").get<std::string>())});
    }
  if (max_t <= min_t) { min_t = 0; max_t = 1; }
  const double width = 900.0, row_h = 48.0, left = 100.0;
  double scale = (width - left - 20.0) / (max_t - min_t);
  std::size_t nrows = gantt.at("rows").size();
  std::string svg = "<svg xmlns='http://www.w3.org/2000/svg' width='" +
                    std::to_string(int(width)) + "' height='" +
                    std::to_string(int(row_h * nrows + 20)) + "'>\n";
  svg += "<defs><pattern id='hatch' width='6' height='6' patternTransform='rotate(45)' "
         "patternUnits='userSpaceOnUse'><line x1='0' y1='0' x2='0' y2='6' "
         "stroke='#777' stroke-width='2'/></pattern></defs>\n";
  std::size_t i = 0;
  for (const auto& row : gantt.at("rows")) {
    double y = 10.0 + row_h * i++;
    svg += "<text x='8' y='" + std::to_string(y + 22) + "' font-size='13'>" +
           row.at("resource").get<std::string>() + "</text>\n";
    for (const auto& e : row.at("entries")) {
      auto x_of = [&](const std::string& s) {
        Rat r = Rat::parse(s);
        return left + (double(r.num()) / double(r.den()) - min_t) * scale;
      };
      double s0 = x_of(e.at("specStart").get<std::string>());
      double s1 = x_of(e.at("specEnd").get<std::string>());
      double e0 = x_of(e.at("execStart").get<std::string>());
      double e1 = x_of(e.at("execEnd").get<std::string>());
      std::string color = e.at("kind").get<std::string>() == "event" ? "#b39ddb" : "#80cbc4";
      svg += "<rect x='" + std::to_string(s0) + "' y='" + std::to_string(y) + "' width='" +
             std::to_string(std::max(1.0, s1 - s0)) + "' height='16' fill='" + color +
             "' stroke='#333'/>\n";
      svg += "<rect x='" + std::to_string(e0) + "' y='" + std::to_string(y + 18) +
             "' width='" + std::to_string(std::max(1.0, e1 - e0)) +
             "' height='16' fill='url(#hatch)' stroke='#333'/>\n";
      svg += "<text x='" + std::to_string(s0 + 2) + "' y='" + std::to_string(y + 13) +
             "' font-size='10'>" + e.at("label").get<std::string>() + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace aee

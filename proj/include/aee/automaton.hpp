#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aee/model.hpp"
#include "aee/report.hpp"

namespace aee {

struct Transition {
  std::string from;
  InputLabel input;    // nullopt = empty input
  OutputLabel output;  // nullopt = empty activity
  std::string to;

  friend auto operator<=>(const Transition&, const Transition&) = default;

  std::string to_string() const {
    std::string i = input ? "(" + input->event + "," + input->outcome + ")" : "-";
    std::string o = output ? *output : "-";
    return "(" + from + "," + i + "," + o + "," + to + ")";
  }
};

/// Logistics-controller automaton: transitions pair an (event, outcome)
/// input (or none) with an output activity (or none).
struct IOAutomaton {
  std::vector<std::string> states;
  std::vector<std::string> initials;  // a deterministic automaton has exactly one
  std::set<std::string> finals;
  std::vector<Transition> transitions;

  bool has_state(const std::string& q) const {
    return std::find(states.begin(), states.end(), q) != states.end();
  }

  bool is_final(const std::string& q) const { return finals.count(q) != 0; }

  std::vector<Transition> outgoing(const std::string& q) const {
    std::vector<Transition> out;
    for (const auto& t : transitions)
      if (t.from == q) out.push_back(t);
    return out;
  }

  const std::string& initial() const {
    if (initials.size() != 1)
      throw SpecError("automaton does not have exactly one initial state");
    return initials.front();
  }
};

/// A maximal run between decision points: starts at an initial or decision
/// state, ends at a final or decision state, and never passes through one.
struct DecisionPath {
  std::vector<Transition> transitions;

  std::size_t length() const { return transitions.size(); }

  const std::string& last_state() const {
    if (transitions.empty()) throw SpecError("empty decision path");
    return transitions.back().to;
  }

  /// The (event, outcome) pair that selected this path, if any.
  InputLabel processing_input() const {
    return transitions.empty() ? std::nullopt : transitions.front().input;
  }

  std::vector<OutputLabel> activities() const {
    std::vector<OutputLabel> out;
    for (const auto& t : transitions) out.push_back(t.output);
    return out;
  }
};

inline std::set<std::string> decision_states(const IOAutomaton& y) {
  std::map<std::string, int> outdeg;
  for (const auto& t : y.transitions) ++outdeg[t.from];
  std::set<std::string> out;
  for (const auto& [q, d] : outdeg)
    if (d >= 2) out.insert(q);
  return out;
}

/// Deterministic-automaton checks: one initial state, final states have no
/// outgoing transitions, branching only on distinct outcomes of one event,
/// and no event processing outside decision states.
inline ValidationReport validate_deterministic(
    const IOAutomaton& y, const std::set<std::pair<EventName, OutcomeName>>& gamma) {
  ValidationReport report;
  if (y.initials.size() != 1)
    report.add(Check::Deterministic, y.initials,
               "expected exactly one initial state, found " + std::to_string(y.initials.size()));
  for (const auto& t : y.transitions)
    if (y.is_final(t.from))
      report.add(Check::Deterministic, {t.from},
                 "final state has outgoing transition " + t.to_string());
  auto decisions = decision_states(y);
  for (const auto& q : y.states) {
    auto out = y.outgoing(q);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        const auto& a = out[i];
        const auto& b = out[j];
        bool ok = a.input && b.input && a.input->event == b.input->event &&
                  a.input->outcome != b.input->outcome &&
                  gamma.count({a.input->event, a.input->outcome}) &&
                  gamma.count({b.input->event, b.input->outcome}) &&
                  !(a == b);
        if (!ok)
          report.add(Check::Deterministic, {q},
                     "branch not on distinct outcomes of one event: " +
                         a.to_string() + " vs " + b.to_string());
      }
    }
    // Consuming an outcome anywhere but a decision state would leave the
    // traversal nowhere to wait for it.
    if (!decisions.count(q))
      for (const auto& t : out)
        if (t.input)
          report.add(Check::Deterministic, {q},
                     "event processed outside a decision state: " + t.to_string());
  }
  report.normalize();
  return report;
}

/// Completeness: every state that processes an event covers each declared
/// outcome of that event exactly once.
inline ValidationReport validate_complete(
    const IOAutomaton& y, const std::set<std::pair<EventName, OutcomeName>>& gamma) {
  ValidationReport report;
  for (const auto& q : y.states) {
    std::map<EventName, std::vector<OutcomeName>> seen;
    for (const auto& t : y.outgoing(q))
      if (t.input) seen[t.input->event].push_back(t.input->outcome);
    for (const auto& [e, outcomes] : seen) {
      std::vector<OutcomeName> declared;
      for (const auto& [ge, gu] : gamma)
        if (ge == e) declared.push_back(gu);
      for (const auto& u : declared) {
        auto n = std::count(outcomes.begin(), outcomes.end(), u);
        if (n == 0)
          report.add(Check::Complete, {q}, "missing outcome " + u + " of event " + e);
        if (n > 1)
          report.add(Check::Complete, {q}, "outcome " + u + " of event " + e + " covered " +
                                               std::to_string(n) + "x");
      }
    }
  }
  report.normalize();
  return report;
}

/// Lists every state with no path to a final state.
inline ValidationReport validate_nonblocking(const IOAutomaton& y) {
  std::set<std::string> can_finish(y.finals.begin(), y.finals.end());
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& t : y.transitions)
      if (can_finish.count(t.to) && can_finish.insert(t.from).second) grew = true;
  }
  ValidationReport report;
  for (const auto& q : y.states)
    if (!can_finish.count(q))
      report.add(Check::Nonblocking, {q}, "no path to a final state");
  report.normalize();
  return report;
}

/// Consistency: along every reachable prefix, an event is never processed
/// more often than it has been emitted, nothing is pending at a final
/// state, and no cycle changes the pending count (which would let it grow
/// without bound). Explored over (state, pending-count vector) pairs.
inline ValidationReport validate_consistent(
    const IOAutomaton& y, const std::map<std::string, Activity>& acts,
    int counter_bound = 64) {
  ValidationReport report;

  std::set<EventName> events;
  for (const auto& [name, act] : acts)
    for (const auto& n : act.nodes)
      if (n.label.is_event()) events.insert(n.label.event);
  for (const auto& t : y.transitions)
    if (t.input) events.insert(t.input->event);
  std::vector<EventName> event_list(events.begin(), events.end());

  auto emitted = [&](const OutputLabel& o, const EventName& e) {
    if (!o) return 0;
    auto it = acts.find(*o);
    if (it == acts.end()) throw SpecError("unknown activity: " + *o);
    int n = 0;
    for (const auto& node : it->second.nodes)
      if (node.label.is_event() && node.label.event == e) ++n;
    return n;
  };

  using Counts = std::vector<int>;
  using Config = std::pair<std::string, Counts>;

  std::set<Config> visited;
  std::vector<Config> path;   // current DFS chain, for growth detection
  std::vector<Config> stack;

  auto record_violation = [&](Check c, const std::string& q, const std::string& detail) {
    report.add(c, {q}, detail);
  };

  struct Frame { Config cfg; std::size_t depth; };
  std::vector<Frame> work;
  for (const auto& s : y.initials)
    work.push_back({{s, Counts(event_list.size(), 0)}, 0});

  // Iterative DFS keeping the chain of configurations that led here.
  std::vector<Config> chain;
  while (!work.empty()) {
    Frame f = work.back();
    work.pop_back();
    chain.resize(f.depth);

    if (visited.count(f.cfg)) continue;
    // A repeat of the same state with every pending count >= an ancestor's
    // (and one strictly greater) grows forever.
    bool growing = false;
    for (const auto& prev : chain) {
      if (prev.first != f.cfg.first) continue;
      bool ge = true, gt = false;
      for (std::size_t i = 0; i < event_list.size(); ++i) {
        if (f.cfg.second[i] < prev.second[i]) ge = false;
        if (f.cfg.second[i] > prev.second[i]) gt = true;
      }
      if (ge && gt) { growing = true; break; }
    }
    if (growing) {
      record_violation(Check::Consistent, f.cfg.first,
                       "a cycle accumulates unprocessed event emissions");
      continue;
    }
    visited.insert(f.cfg);
    chain.push_back(f.cfg);

    if (y.is_final(f.cfg.first)) {
      for (std::size_t i = 0; i < event_list.size(); ++i)
        if (f.cfg.second[i] != 0)
          record_violation(Check::Consistent, f.cfg.first,
                           "final state reachable with " + std::to_string(f.cfg.second[i]) +
                               " unprocessed emission(s) of " + event_list[i]);
    }

    for (const auto& t : y.outgoing(f.cfg.first)) {
      Counts next = f.cfg.second;
      bool negative = false;
      for (std::size_t i = 0; i < event_list.size(); ++i) {
        next[i] += emitted(t.output, event_list[i]);
        if (t.input && t.input->event == event_list[i]) --next[i];
        if (next[i] < 0) {
          record_violation(Check::Consistent, f.cfg.first,
                           "event " + event_list[i] + " processed before emission on " +
                               t.to_string());
          negative = true;
        }
        if (next[i] > counter_bound)
          throw SpecError("consistency search exceeded pending-event bound " +
                          std::to_string(counter_bound) + " for event " + event_list[i] +
                          " at state " + t.to);
      }
      if (!negative) work.push_back({{t.to, next}, chain.size()});
    }
  }
  report.normalize();
  return report;
}

/// Walks the automaton from an initial or decision state to the next
/// decision or final state. Returns nullopt when `from` is final.
inline std::optional<DecisionPath> next_decision_path(
    const IOAutomaton& y, const std::string& from,
    const std::optional<EventOutcome>& chosen) {
  if (!y.has_state(from)) throw SpecError("unknown state: " + from);
  if (y.is_final(from)) {
    if (chosen) throw SpecError("no transition from final state " + from);
    return std::nullopt;
  }
  auto decisions = decision_states(y);
  bool at_decision = decisions.count(from) != 0;
  bool at_initial =
      std::find(y.initials.begin(), y.initials.end(), from) != y.initials.end();
  if (!at_decision && !at_initial)
    throw SpecError("state " + from + " is neither initial nor a decision state");

  DecisionPath path;
  std::string current = from;
  std::set<std::string> seen{from};
  bool first = true;
  while (true) {
    auto out = y.outgoing(current);
    Transition step;
    if (first && at_decision) {
      if (!chosen) throw SpecError("decision state " + from + " requires an outcome");
      bool found = false;
      for (const auto& t : out)
        if (t.input && *t.input == *chosen) { step = t; found = true; }
      if (!found)
        throw SpecError("no transition from " + from + " for outcome (" + chosen->event +
                        "," + chosen->outcome + ")");
    } else {
      if (first && chosen) throw SpecError("state " + from + " does not take an outcome");
      if (out.size() != 1)
        throw SpecError("non-deterministic continuation at state " + current);
      step = out.front();
      if (step.input)
        throw SpecError("event processed outside a decision state at " + current);
    }
    path.transitions.push_back(step);
    current = step.to;
    first = false;
    if (y.is_final(current) || decisions.count(current)) return path;
    if (!seen.insert(current).second)
      throw SpecError("cycle without decision or final state at " + current);
  }
}

/// Word acceptance. Works for nondeterministic automata as well by
/// tracking the set of possible states.
inline bool accepts(const IOAutomaton& y, const Word& w) {
  std::set<std::string> current(y.initials.begin(), y.initials.end());
  for (const auto& [input, output] : w) {
    std::set<std::string> next;
    for (const auto& t : y.transitions)
      if (current.count(t.from) && t.input == input && t.output == output)
        next.insert(t.to);
    current = std::move(next);
    if (current.empty()) return false;
  }
  for (const auto& q : current)
    if (y.is_final(q)) return true;
  return false;
}

}  // namespace aee

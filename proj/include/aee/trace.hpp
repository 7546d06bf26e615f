#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aee/config.hpp"
#include "aee/model.hpp"

namespace aee {

/// One executed action or event node: specified times in model units,
/// executed times on the wall clock.
struct TraceRecord {
  NodeRef node;
  NodeLabel label;
  Time spec_start;        // S(n)
  Time spec_completion;   // C(n)
  Time exec_start;        // S'(n)
  Time exec_completion;   // C'(n)
  Time delta;             // S'(n) - S(n) - psi
  int path_index = 0;
  bool deadline_violated = false;
};

/// Per decision path: what selected it, when its nodes were ready at the
/// dispatcher, its specified start, and the processing-cost breakdown.
struct PathRecord {
  int index = 0;
  std::optional<EventOutcome> processed;
  std::optional<std::size_t> instance;  // k of the processed event
  Time ready;                           // T^aC(rho)
  Time spec_start;                      // S(rho)
  ComponentCosts measured;
  std::vector<std::string> activities;  // output labels, "" for the empty one
};

struct ExecutionTrace {
  std::vector<TraceRecord> records;
  std::vector<EventOutcome> processed_outcomes;  // U', in processing order
  std::vector<PathRecord> paths;
  Time psi;
  Time delay_bound;  // D_A the run was configured with
  Time event_bound;  // D_E
  bool completed = false;   // reached a final state and drained
  bool conforming = true;   // no deadline violations observed
  std::string abort_reason;

  Time max_delta() const {
    Time m(0);
    for (const auto& r : records) m = Time::max(m, r.delta);
    return m;
  }
};

// --- line-delimited serialization -------------------------------------------

namespace detail {

inline nlohmann::json label_json(const NodeLabel& l) {
  using nlohmann::json;
  switch (l.kind) {
    case NodeLabel::Kind::Action:
      return json{{"kind", "action"}, {"action", l.action}, {"peripheral", l.peripheral}};
    case NodeLabel::Kind::Claim:
      return json{{"kind", "claim"}, {"resource", l.resource}};
    case NodeLabel::Kind::Release:
      return json{{"kind", "release"}, {"resource", l.resource}};
    case NodeLabel::Kind::Event:
      return json{{"kind", "event"}, {"event", l.event}};
  }
  return {};
}

inline NodeLabel label_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "action")
    return NodeLabel::make_action(j.at("action").get<std::string>(),
                                  j.at("peripheral").get<std::string>());
  if (kind == "claim") return NodeLabel::make_claim(j.at("resource").get<std::string>());
  if (kind == "release") return NodeLabel::make_release(j.at("resource").get<std::string>());
  if (kind == "event") return NodeLabel::make_event(j.at("event").get<std::string>());
  throw SpecError("malformed trace: unknown label kind " + kind);
}

}  // namespace detail

inline std::string trace_to_jsonl(const ExecutionTrace& t) {
  using nlohmann::json;
  std::string out;
  auto emit = [&](const json& j) { out += j.dump() + "\n"; };
  emit(json{{"type", "meta"},
            {"psi", t.psi.to_string()},
            {"dA", t.delay_bound.to_string()},
            {"dE", t.event_bound.to_string()},
            {"completed", t.completed},
            {"conforming", t.conforming},
            {"abortReason", t.abort_reason}});
  for (const auto& p : t.paths) {
    json j{{"type", "path"},
           {"index", p.index},
           {"ready", p.ready.to_string()},
           {"specStart", p.spec_start.to_string()},
           {"activities", p.activities},
           {"costs",
            {{"dEvent", p.measured.route.to_string()},
             {"dLC", p.measured.logistics.to_string()},
             {"dAC", p.measured.sequencing.to_string()},
             {"daC", p.measured.preparation.to_string()}}}};
    if (p.processed) {
      j["event"] = p.processed->event;
      j["outcome"] = p.processed->outcome;
      j["instance"] = *p.instance;
    }
    emit(j);
  }
  for (const auto& r : t.records)
    emit(json{{"type", "node"},
              {"id", r.node.to_string()},
              {"label", detail::label_json(r.label)},
              {"S", r.spec_start.to_string()},
              {"C", r.spec_completion.to_string()},
              {"Sx", r.exec_start.to_string()},
              {"Cx", r.exec_completion.to_string()},
              {"delta", r.delta.to_string()},
              {"path", r.path_index},
              {"deadlineViolated", r.deadline_violated}});
  int seq = 0;
  for (const auto& u : t.processed_outcomes)
    emit(json{{"type", "outcome"}, {"seq", seq++}, {"event", u.event}, {"outcome", u.outcome}});
  return out;
}

inline ExecutionTrace trace_from_jsonl(std::istream& in) {
  using nlohmann::json;
  ExecutionTrace t;
  std::string line;
  bool meta_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    std::string type = j.at("type").get<std::string>();
    if (type == "meta") {
      t.psi = Time::parse(j.at("psi").get<std::string>());
      t.delay_bound = Time::parse(j.at("dA").get<std::string>());
      t.event_bound = Time::parse(j.at("dE").get<std::string>());
      t.completed = j.at("completed").get<bool>();
      t.conforming = j.at("conforming").get<bool>();
      t.abort_reason = j.value("abortReason", "");
      meta_seen = true;
    } else if (type == "path") {
      PathRecord p;
      p.index = j.at("index").get<int>();
      p.ready = Time::parse(j.at("ready").get<std::string>());
      p.spec_start = Time::parse(j.at("specStart").get<std::string>());
      for (const auto& a : j.at("activities")) p.activities.push_back(a.get<std::string>());
      const auto& c = j.at("costs");
      p.measured = {Time::parse(c.at("dEvent").get<std::string>()),
                    Time::parse(c.at("dLC").get<std::string>()),
                    Time::parse(c.at("dAC").get<std::string>()),
                    Time::parse(c.at("daC").get<std::string>())};
      if (j.contains("event")) {
        p.processed = EventOutcome{j.at("event").get<std::string>(),
                                   j.at("outcome").get<std::string>()};
        p.instance = j.at("instance").get<std::size_t>();
      }
      t.paths.push_back(std::move(p));
    } else if (type == "node") {
      TraceRecord r;
      r.node = NodeRef::parse(j.at("id").get<std::string>());
      r.label = detail::label_from_json(j.at("label"));
      r.spec_start = Time::parse(j.at("S").get<std::string>());
      r.spec_completion = Time::parse(j.at("C").get<std::string>());
      r.exec_start = Time::parse(j.at("Sx").get<std::string>());
      r.exec_completion = Time::parse(j.at("Cx").get<std::string>());
      r.delta = Time::parse(j.at("delta").get<std::string>());
      r.path_index = j.at("path").get<int>();
      r.deadline_violated = j.at("deadlineViolated").get<bool>();
      t.records.push_back(std::move(r));
    } else if (type == "outcome") {
      t.processed_outcomes.push_back(
          EventOutcome{j.at("event").get<std::string>(), j.at("outcome").get<std::string>()});
    } else {
      throw SpecError("malformed trace: unknown record type " + type);
    }
  }
  if (!meta_seen) throw SpecError("malformed trace: missing meta record");
  return t;
}

inline void write_trace(const ExecutionTrace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SpecError("cannot write trace file " + path);
  out << trace_to_jsonl(t);
}

inline ExecutionTrace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read trace file " + path);
  return trace_from_jsonl(in);
}

}  // namespace aee

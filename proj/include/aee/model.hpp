#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "aee/rational.hpp"

namespace aee {

using Resource = std::string;
using Peripheral = std::string;
using ActionName = std::string;
using EventName = std::string;
using OutcomeName = std::string;

/// Structural or configuration problem that prevents an operation from
/// producing a result (as opposed to a validation finding, which is data).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Declared identifier universes plus the peripheral-to-resource ownership
/// map and the event/outcome relation gamma.
struct Universe {
  std::vector<Resource> resources;           // declaration order preserved
  std::map<Peripheral, Resource> owner;      // peripheral -> containing resource
  std::set<EventName> events;
  std::set<OutcomeName> outcomes;
  std::set<std::pair<EventName, OutcomeName>> gamma;

  bool has_resource(const Resource& r) const {
    for (const auto& d : resources)
      if (d == r) return true;
    return false;
  }

  const Resource& resource_of(const Peripheral& p) const {
    auto it = owner.find(p);
    if (it == owner.end()) throw SpecError("unknown peripheral: " + p);
    return it->second;
  }

  std::vector<OutcomeName> outcomes_of(const EventName& e) const {
    std::vector<OutcomeName> out;
    for (const auto& [ev, u] : gamma)
      if (ev == e) out.push_back(u);
    return out;
  }
};

struct NodeLabel {
  enum class Kind { Action, Claim, Release, Event };

  Kind kind = Kind::Action;
  ActionName action;       // Action
  Peripheral peripheral;   // Action
  Resource resource;       // Claim / Release
  EventName event;         // Event

  static NodeLabel make_action(ActionName a, Peripheral p) {
    NodeLabel l;
    l.kind = Kind::Action;
    l.action = std::move(a);
    l.peripheral = std::move(p);
    return l;
  }
  static NodeLabel make_claim(Resource r) {
    NodeLabel l;
    l.kind = Kind::Claim;
    l.resource = std::move(r);
    return l;
  }
  static NodeLabel make_release(Resource r) {
    NodeLabel l;
    l.kind = Kind::Release;
    l.resource = std::move(r);
    return l;
  }
  static NodeLabel make_event(EventName e) {
    NodeLabel l;
    l.kind = Kind::Event;
    l.event = std::move(e);
    return l;
  }

  bool is_action() const { return kind == Kind::Action; }
  bool is_claim() const { return kind == Kind::Claim; }
  bool is_release() const { return kind == Kind::Release; }
  bool is_event() const { return kind == Kind::Event; }
  bool is_resource_node() const { return is_claim() || is_release(); }

  std::string to_string() const {
    switch (kind) {
      case Kind::Action: return "(" + action + "," + peripheral + ")";
      case Kind::Claim: return "(" + resource + ",cl)";
      case Kind::Release: return "(" + resource + ",rl)";
      case Kind::Event: return event;
    }
    return "?";
  }

  friend bool operator==(const NodeLabel& a, const NodeLabel& b) {
    return a.kind == b.kind && a.action == b.action &&
           a.peripheral == b.peripheral && a.resource == b.resource &&
           a.event == b.event;
  }
};

struct Node {
  std::string id;     // unique within the activity
  NodeLabel label;
  Time duration;      // zero for claim and release nodes
};

/// An activity: a DAG of labeled, timed nodes. Dependencies are stored as
/// ordered (from, to) id pairs.
struct Activity {
  std::string name;
  std::vector<Node> nodes;
  std::vector<std::pair<std::string, std::string>> edges;

  bool empty() const { return nodes.empty(); }

  bool has_node(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.id == id) return true;
    return false;
  }

  const Node& node(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.id == id) return n;
    throw SpecError("unknown node id: " + id + " in activity " + name);
  }

  /// Direct predecessors under the dependency relation (not its closure).
  std::set<std::string> predecessors(const std::string& id) const {
    if (!has_node(id)) throw SpecError("unknown node id: " + id + " in activity " + name);
    std::set<std::string> out;
    for (const auto& [from, to] : edges)
      if (to == id) out.insert(from);
    return out;
  }

  std::set<std::string> successors(const std::string& id) const {
    if (!has_node(id)) throw SpecError("unknown node id: " + id + " in activity " + name);
    std::set<std::string> out;
    for (const auto& [from, to] : edges)
      if (from == id) out.insert(to);
    return out;
  }

  std::optional<std::string> claim_of(const Resource& r) const {
    for (const auto& n : nodes)
      if (n.label.is_claim() && n.label.resource == r) return n.id;
    return std::nullopt;
  }

  std::optional<std::string> release_of(const Resource& r) const {
    for (const auto& n : nodes)
      if (n.label.is_release() && n.label.resource == r) return n.id;
    return std::nullopt;
  }

  void add_node(std::string id, NodeLabel label, Time duration = Time(0)) {
    nodes.push_back({std::move(id), std::move(label), duration});
  }

  void add_edge(std::string from, std::string to) {
    edges.emplace_back(std::move(from), std::move(to));
  }
};

struct EventOutcome {
  EventName event;
  OutcomeName outcome;

  friend auto operator<=>(const EventOutcome&, const EventOutcome&) = default;
};

using InputLabel = std::optional<EventOutcome>;   // nullopt is the empty input
using OutputLabel = std::optional<std::string>;   // nullopt is the empty activity
using Word = std::vector<std::pair<InputLabel, OutputLabel>>;

/// Identity of a node inside a composed activity: the instance counter
/// realizes the renaming that keeps repeated activities apart.
struct NodeRef {
  std::uint32_t instance = 0;
  std::string activity;
  std::string local;

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;

  std::string to_string() const {
    return std::to_string(instance) + ":" + activity + ":" + local;
  }

  static NodeRef parse(const std::string& text) {
    auto a = text.find(':');
    auto b = text.rfind(':');
    if (a == std::string::npos || b == a) throw SpecError("malformed node ref: " + text);
    NodeRef r;
    r.instance = static_cast<std::uint32_t>(std::stoul(text.substr(0, a)));
    r.activity = text.substr(a + 1, b - a - 1);
    r.local = text.substr(b + 1);
    return r;
  }
};

}  // namespace aee

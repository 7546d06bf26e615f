#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aee/model.hpp"

namespace aee {

struct SeqOptions {
  /// Release-to-claim splice edges are added per resource. The all-pairs
  /// variant (every release predecessor to every claim successor,
  /// regardless of resource) exists for differential testing only.
  bool resource_matched = true;
};

/// An activity built by sequencing others. Node identities carry the
/// instance counter assigned at sequencing time, so repeated activities
/// never collide.
class ComposedActivity {
 public:
  struct Entry {
    NodeLabel label;
    Time duration;
  };

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }

  const std::map<NodeRef, Entry>& nodes() const { return nodes_; }

  bool has_node(const NodeRef& n) const { return nodes_.count(n) != 0; }

  const Entry& node(const NodeRef& n) const {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) throw SpecError("unknown node: " + n.to_string());
    return it->second;
  }

  const std::set<NodeRef>& preds(const NodeRef& n) const {
    static const std::set<NodeRef> kEmpty;
    auto it = preds_.find(n);
    return it == preds_.end() ? kEmpty : it->second;
  }

  const std::set<NodeRef>& succs(const NodeRef& n) const {
    static const std::set<NodeRef> kEmpty;
    auto it = succs_.find(n);
    return it == succs_.end() ? kEmpty : it->second;
  }

  std::vector<std::pair<NodeRef, NodeRef>> edges() const {
    std::vector<std::pair<NodeRef, NodeRef>> out;
    for (const auto& [from, tos] : succs_)
      for (const auto& to : tos) out.emplace_back(from, to);
    return out;
  }

  bool has_edge(const NodeRef& from, const NodeRef& to) const {
    auto it = succs_.find(from);
    return it != succs_.end() && it->second.count(to) != 0;
  }

  /// Event-emitting nodes of `e` in emission (chain) order.
  const std::vector<NodeRef>& emissions(const EventName& e) const {
    static const std::vector<NodeRef> kEmpty;
    auto it = emissions_.find(e);
    return it == emissions_.end() ? kEmpty : it->second;
  }

  const std::map<EventName, std::vector<NodeRef>>& all_emissions() const {
    return emissions_;
  }

  /// How many instances of `e` have been processed by event sequencing.
  std::size_t processed_count(const EventName& e) const {
    auto it = processed_.find(e);
    return it == processed_.end() ? 0 : it->second;
  }

  void mark_processed(const EventName& e, std::size_t k) { processed_[e] = k; }

  std::optional<NodeRef> release_of(const Resource& r) const {
    auto it = releases_.find(r);
    if (it == releases_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<NodeRef> claim_of(const Resource& r) const {
    auto it = claims_.find(r);
    if (it == claims_.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t max_instance() const { return max_instance_; }

  /// Nodes whose direct successor set is empty (used by pruning and tests).
  std::vector<NodeRef> sinks() const {
    std::vector<NodeRef> out;
    for (const auto& [id, entry] : nodes_)
      if (succs(id).empty()) out.push_back(id);
    return out;
  }

  void add_node(const NodeRef& id, NodeLabel label, Time duration) {
    if (nodes_.count(id)) throw SpecError("duplicate node: " + id.to_string());
    nodes_[id] = {std::move(label), duration};
    const Entry& e = nodes_[id];
    if (e.label.is_claim()) {
      if (claims_.count(e.label.resource))
        claims_multiple_.insert(e.label.resource);
      claims_[e.label.resource] = id;
    } else if (e.label.is_release()) {
      if (releases_.count(e.label.resource))
        releases_multiple_.insert(e.label.resource);
      releases_[e.label.resource] = id;
    }
    max_instance_ = std::max(max_instance_, id.instance);
  }

  void add_edge(const NodeRef& from, const NodeRef& to) {
    if (!nodes_.count(from) || !nodes_.count(to))
      throw SpecError("edge references unknown node: " + from.to_string() +
                      " -> " + to.to_string());
    succs_[from].insert(to);
    preds_[to].insert(from);
  }

  void remove_node(const NodeRef& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) return;
    for (const auto& p : preds(id)) succs_[p].erase(id);
    for (const auto& s : succs(id)) preds_[s].erase(id);
    preds_.erase(id);
    succs_.erase(id);
    if (it->second.label.is_claim()) claims_.erase(it->second.label.resource);
    if (it->second.label.is_release()) releases_.erase(it->second.label.resource);
    nodes_.erase(it);
  }

  void append_emission(const EventName& e, const NodeRef& n) {
    emissions_[e].push_back(n);
  }

  /// Exactly one claim and one release per declared resource, none doubled.
  bool is_normalized(const Universe& u) const {
    if (empty()) return true;
    for (const auto& r : u.resources) {
      if (!claims_.count(r) || !releases_.count(r)) return false;
      if (claims_multiple_.count(r) || releases_multiple_.count(r)) return false;
    }
    return true;
  }

  void bump_instance(std::uint32_t instance) {
    max_instance_ = std::max(max_instance_, instance);
  }

 private:
  std::map<NodeRef, Entry> nodes_;
  std::map<NodeRef, std::set<NodeRef>> preds_;
  std::map<NodeRef, std::set<NodeRef>> succs_;
  std::map<EventName, std::vector<NodeRef>> emissions_;
  std::map<Resource, NodeRef> claims_;
  std::map<Resource, NodeRef> releases_;
  std::map<EventName, std::size_t> processed_;
  std::set<Resource> claims_multiple_;
  std::set<Resource> releases_multiple_;
  std::uint32_t max_instance_ = 0;
};

/// Forward reachability (transitive closure) of every node.
inline std::map<NodeRef, std::set<NodeRef>> reachability(const ComposedActivity& a) {
  std::map<NodeRef, std::set<NodeRef>> out;
  // Reverse topological accumulation would be faster, but graphs here are
  // small and this also works on cyclic (invalid) inputs.
  for (const auto& [start, entry] : a.nodes()) {
    std::set<NodeRef>& reach = out[start];
    std::vector<NodeRef> stack(a.succs(start).begin(), a.succs(start).end());
    while (!stack.empty()) {
      NodeRef n = stack.back();
      stack.pop_back();
      if (!reach.insert(n).second) continue;
      for (const auto& s : a.succs(n)) stack.push_back(s);
    }
  }
  return out;
}

/// Kahn topological order with deterministic ties (NodeRef order).
/// Returns nullopt when the graph has a cycle.
inline std::optional<std::vector<NodeRef>> topological_order(const ComposedActivity& a) {
  std::map<NodeRef, std::size_t> indegree;
  for (const auto& [id, entry] : a.nodes()) indegree[id] = a.preds(id).size();
  std::set<NodeRef> ready;
  for (const auto& [id, deg] : indegree)
    if (deg == 0) ready.insert(id);
  std::vector<NodeRef> order;
  while (!ready.empty()) {
    NodeRef n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    for (const auto& s : a.succs(n))
      if (--indegree[s] == 0) ready.insert(s);
  }
  if (order.size() != a.nodes().size()) return std::nullopt;
  return order;
}

/// Turns a plain activity into a composed one under the given instance
/// counter. Emission order follows the in-activity event chains.
inline ComposedActivity lift(const Activity& a, std::uint32_t instance = 0) {
  ComposedActivity out;
  out.bump_instance(instance);
  auto ref = [&](const std::string& local) {
    return NodeRef{instance, a.name, local};
  };
  for (const auto& n : a.nodes) out.add_node(ref(n.id), n.label, n.duration);
  for (const auto& [from, to] : a.edges) out.add_edge(ref(from), ref(to));

  // Order same-event nodes by how many emitters of that event precede them.
  auto closure = reachability(out);
  std::map<EventName, std::vector<std::pair<std::size_t, NodeRef>>> ranked;
  for (const auto& n : a.nodes) {
    if (!n.label.is_event()) continue;
    std::size_t before = 0;
    for (const auto& m : a.nodes) {
      if (&m == &n || !m.label.is_event() || m.label.event != n.label.event) continue;
      if (closure[ref(m.id)].count(ref(n.id))) ++before;
    }
    ranked[n.label.event].emplace_back(before, ref(n.id));
  }
  for (auto& [e, nodes] : ranked) {
    std::sort(nodes.begin(), nodes.end());
    for (const auto& [rank, id] : nodes) out.append_emission(e, id);
  }
  return out;
}

inline ComposedActivity shift_instances(const ComposedActivity& a, std::uint32_t delta) {
  if (delta == 0) return a;
  ComposedActivity out;
  auto shift = [&](const NodeRef& n) {
    return NodeRef{n.instance + delta, n.activity, n.local};
  };
  for (const auto& [id, entry] : a.nodes())
    out.add_node(shift(id), entry.label, entry.duration);
  for (const auto& [from, to] : a.edges()) out.add_edge(shift(from), shift(to));
  for (const auto& [e, nodes] : a.all_emissions()) {
    for (const auto& n : nodes) out.append_emission(e, shift(n));
    out.mark_processed(e, a.processed_count(e));
  }
  return out;
}

struct EventInstance {
  EventName event;
  std::size_t k = 0;  // 1-based instance number being processed
};

namespace detail {

/// Core of the sequencing operator: splices `rhs` onto `acc` in place.
/// When `processing` is set, the k-th emitter of the event additionally
/// precedes every claim successor of `rhs`.
inline void fold_into(ComposedActivity& acc, const ComposedActivity& rhs,
                      const Universe& universe,
                      const std::optional<EventInstance>& processing,
                      const SeqOptions& opts) {
  if (processing) {
    const auto& em = acc.emissions(processing->event);
    if (processing->k == 0 || em.size() < processing->k)
      throw SpecError("event-instance underflow: " + processing->event +
                      " instance " + std::to_string(processing->k));
  }
  if (rhs.empty()) {
    acc.bump_instance(std::max(acc.max_instance(), rhs.max_instance()));
    if (processing) acc.mark_processed(processing->event, processing->k);
    return;  // sequencing with the empty activity is the identity
  }
  if (acc.empty()) {
    acc = rhs;
    return;
  }
  if (!acc.is_normalized(universe) || !rhs.is_normalized(universe))
    throw SpecError("sequencing operands must claim and release every resource");

  std::optional<NodeRef> emitter;
  if (processing) emitter = acc.emissions(processing->event)[processing->k - 1];

  // Snapshot the splice sources before mutating: predecessors of each
  // release on the left, prior emitters per event.
  std::map<Resource, std::set<NodeRef>> release_preds;
  for (const auto& r : universe.resources) {
    NodeRef rel = *acc.release_of(r);
    release_preds[r] = acc.preds(rel);
    acc.remove_node(rel);
  }
  std::map<EventName, std::vector<NodeRef>> prior_emitters = acc.all_emissions();

  std::set<NodeRef> rhs_claims;
  std::map<Resource, std::set<NodeRef>> claim_succs;
  std::set<NodeRef> any_claim_succs;
  for (const auto& r : universe.resources) {
    NodeRef cl = *rhs.claim_of(r);
    rhs_claims.insert(cl);
    claim_succs[r] = rhs.succs(cl);
    any_claim_succs.insert(claim_succs[r].begin(), claim_succs[r].end());
  }

  for (const auto& [id, entry] : rhs.nodes())
    if (!rhs_claims.count(id)) acc.add_node(id, entry.label, entry.duration);

  // Right-hand internal dependencies, minus those sourced at claims.
  for (const auto& [from, to] : rhs.edges())
    if (!rhs_claims.count(from)) acc.add_edge(from, to);

  // Release-to-claim splices.
  if (opts.resource_matched) {
    for (const auto& r : universe.resources)
      for (const auto& p : release_preds[r])
        for (const auto& q : claim_succs[r]) acc.add_edge(p, q);
  } else {
    for (const auto& [r1, preds] : release_preds)
      for (const auto& p : preds)
        for (const auto& q : any_claim_succs) acc.add_edge(p, q);
  }

  // Same-event ordering across the splice.
  for (const auto& [e, rhs_nodes] : rhs.all_emissions()) {
    auto it = prior_emitters.find(e);
    if (it != prior_emitters.end())
      for (const auto& a : it->second)
        for (const auto& b : rhs_nodes) acc.add_edge(a, b);
    for (const auto& b : rhs_nodes) acc.append_emission(e, b);
  }

  // Causality from the processed event instance to the continuation.
  if (processing) {
    for (const auto& q : any_claim_succs) acc.add_edge(*emitter, q);
    acc.mark_processed(processing->event, processing->k);
  }
}

}  // namespace detail

ValidationReport validate_composed(const ComposedActivity& a, const Universe& u);

namespace detail {
inline void check_result(const ComposedActivity& a, const Universe& u) {
  ValidationReport report = validate_composed(a, u);
  if (!report.ok())
    throw SpecError("sequencing produced an invalid activity:\n" + report.to_text());
}
}  // namespace detail

/// A1 . A2 (no event processed).
inline ComposedActivity seq_plain(const Universe& u, const ComposedActivity& a1,
                                  const ComposedActivity& a2,
                                  const SeqOptions& opts = {}, bool validate = true) {
  ComposedActivity acc = a1;
  detail::fold_into(acc, shift_instances(a2, a1.empty() ? 0 : a1.max_instance() + 1),
                    u, std::nullopt, opts);
  if (validate) detail::check_result(acc, u);
  return acc;
}

inline ComposedActivity seq_plain(const Universe& u, const Activity& a1,
                                  const Activity& a2, const SeqOptions& opts = {},
                                  bool validate = true) {
  return seq_plain(u, lift(a1, 0), lift(a2, 0), opts, validate);
}

/// A1 ;_(e,k) A2 (sequencing while processing the k-th instance of e).
inline ComposedActivity seq_event(const Universe& u, const ComposedActivity& a1,
                                  const Activity& a2, const EventName& e,
                                  std::size_t k, const SeqOptions& opts = {},
                                  bool validate = true) {
  ComposedActivity acc = a1;
  detail::fold_into(acc, lift(a2, a1.empty() ? 0 : a1.max_instance() + 1), u,
                    EventInstance{e, k}, opts);
  if (validate) detail::check_result(acc, u);
  return acc;
}

// --- words and behaviors ---------------------------------------------------

/// The processed events function: inputs of the word with empty labels
/// dropped, order preserved.
inline std::vector<EventOutcome> processed_events(const Word& w) {
  std::vector<EventOutcome> out;
  for (const auto& [input, output] : w)
    if (input) out.push_back(*input);
  return out;
}

/// The behavior activity function: folds a word into a single activity.
/// Instance counters equal word positions, so any prefix of a word yields
/// a literal sub-DAG of the full fold.
inline ComposedActivity behavior_activity(
    const Universe& u, const std::map<std::string, Activity>& acts, const Word& w,
    const SeqOptions& opts = {}, bool validate = false) {
  ComposedActivity acc;
  std::uint32_t position = 0;
  for (const auto& [input, output] : w) {
    ComposedActivity rhs;
    if (output) {
      auto it = acts.find(*output);
      if (it == acts.end()) throw SpecError("unknown activity: " + *output);
      rhs = lift(it->second, position);
    }
    std::optional<EventInstance> processing;
    if (input) processing = EventInstance{input->event, acc.processed_count(input->event) + 1};
    detail::fold_into(acc, rhs, u, processing, opts);
    acc.bump_instance(position);
    ++position;
  }
  if (validate && !acc.empty()) detail::check_result(acc, u);
  return acc;
}

}  // namespace aee

#pragma once

#include <chrono>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "aee/automaton.hpp"
#include "aee/config.hpp"
#include "aee/plant.hpp"
#include "aee/sequencing.hpp"
#include "aee/spec.hpp"
#include "aee/timing.hpp"
#include "aee/trace.hpp"

namespace aee {

/// Top layer: walks the logistics automaton between decision points and
/// tracks which instance of each event is being processed.
class LogisticsController {
 public:
  explicit LogisticsController(const IOAutomaton& y) : y_(&y), current_(y.initial()) {}

  struct Advance {
    std::optional<DecisionPath> path;            // nullopt: execution complete
    std::optional<EventInstance> processing;     // (e, k) for the activity layer
  };

  /// `outcome` must be present exactly when parked at a decision state.
  Advance advance(const std::optional<EventOutcome>& outcome) {
    auto path = next_decision_path(*y_, current_, outcome);
    if (!path) return {std::nullopt, std::nullopt};
    std::optional<EventInstance> processing;
    if (outcome) {
      std::size_t k = ++processed_[outcome->event];
      processing = EventInstance{outcome->event, k};
    }
    current_ = path->last_state();
    return {std::move(path), processing};
  }

  bool completed() const { return y_->is_final(current_); }

  const std::string& current() const { return current_; }

  /// The event whose outcome the parked decision state consumes.
  std::optional<EventName> awaited_event() const {
    if (completed()) return std::nullopt;
    for (const auto& t : y_->outgoing(current_))
      if (t.input) return t.input->event;
    return std::nullopt;
  }

 private:
  const IOAutomaton* y_;
  std::string current_;
  std::map<EventName, std::size_t> processed_;
};

/// Middle layer: folds decision paths into the cumulative behavior and
/// derives the specified schedule of every newly added node. Prior nodes
/// keep their times; sequencing never adds dependencies into them.
class ActivityController {
 public:
  ActivityController(const ActivitySpec& spec, Retention retention)
      : spec_(&spec),
        retention_(retention),
        x0_(ResourceState::zero(spec.universe)) {}

  struct Extension {
    std::vector<ScheduleEntry> dispatch;  // new action and event nodes
    Time path_start;                      // S(rho)
  };

  Extension extend(const DecisionPath& path,
                   const std::optional<EventInstance>& processing) {
    std::set<NodeRef> before;
    for (const auto& [id, entry] : behavior_.nodes()) before.insert(id);

    bool first = true;
    for (const auto& t : path.transitions) {
      ComposedActivity rhs;
      if (t.output) rhs = lift(spec_->activity(*t.output), position_);
      std::optional<EventInstance> fold_processing;
      if (first && t.input) {
        if (!processing || processing->event != t.input->event)
          throw SpecError("activity layer: processed-event mismatch on path");
        fold_processing = processing;
      }
      detail::fold_into(behavior_, rhs, spec_->universe, fold_processing, {});
      behavior_.bump_instance(position_);
      word_.emplace_back(t.input, t.output);
      ++position_;
      first = false;
    }

    // Times for the newly added nodes, in one restricted topological pass.
    std::vector<NodeRef> fresh;
    for (const auto& [id, entry] : behavior_.nodes())
      if (!before.count(id)) fresh.push_back(id);
    std::map<NodeRef, std::size_t> indegree;
    std::set<NodeRef> fresh_set(fresh.begin(), fresh.end());
    std::set<NodeRef> ready;
    for (const auto& id : fresh) {
      std::size_t deg = 0;
      for (const auto& p : behavior_.preds(id))
        if (fresh_set.count(p)) ++deg;
      indegree[id] = deg;
      if (deg == 0) ready.insert(id);
    }
    std::size_t emitted = 0;
    while (!ready.empty()) {
      NodeRef id = *ready.begin();
      ready.erase(ready.begin());
      ++emitted;
      const auto& entry = behavior_.node(id);
      Time start(0);
      if (entry.label.is_claim()) {
        start = x0_.at(entry.label.resource);
      } else {
        const auto& preds = behavior_.preds(id);
        if (preds.empty())
          throw SpecError("non-claim node without predecessor: " + id.to_string());
        bool first_pred = true;
        for (const auto& p : preds) {
          Time c = schedule_.at(p).completion;
          start = first_pred ? c : Time::max(start, c);
          first_pred = false;
        }
      }
      schedule_[id] = {id, start, start + entry.duration};
      for (const auto& s : behavior_.succs(id))
        if (fresh_set.count(s) && --indegree[s] == 0) ready.insert(s);
    }
    if (emitted != fresh.size())
      throw SpecError("cycle among freshly sequenced nodes");

    Extension ext;
    std::optional<Time> min_start;
    for (const auto& id : fresh) {
      const auto& se = schedule_.at(id);
      min_start = min_start ? Time::min(*min_start, se.start) : se.start;
      const auto& label = behavior_.node(id).label;
      if (label.is_action() || label.is_event()) {
        ext.dispatch.push_back(se);
        dispatched_.insert(id);
      }
    }
    ext.path_start = min_start ? *min_start : x0_.min();
    std::sort(ext.dispatch.begin(), ext.dispatch.end(),
              [](const ScheduleEntry& a, const ScheduleEntry& b) {
                return std::tie(a.start, a.node) < std::tie(b.start, b.node);
              });
    if (retention_ == Retention::PruneCompleted) prune();
    return ext;
  }

  /// Outcome received from the dispatcher for an executed event node;
  /// validated and recorded, then handed to the logistics layer.
  EventOutcome on_outcome(const NodeRef& node, const OutcomeName& outcome) {
    if (!dispatched_.count(node))
      throw SpecError("outcome for a node that was never dispatched: " + node.to_string());
    auto it = labels_.find(node);
    const NodeLabel* label = nullptr;
    if (it != labels_.end()) label = &it->second;
    else if (behavior_.has_node(node)) label = &behavior_.node(node).label;
    if (!label || !label->is_event())
      throw SpecError("outcome for non-event node " + node.to_string());
    if (!spec_->universe.gamma.count({label->event, outcome}))
      throw SpecError("outcome " + outcome + " not declared for event " + label->event);
    EventOutcome eu{label->event, outcome};
    processed_.push_back(eu);
    return eu;
  }

  const ComposedActivity& behavior() const { return behavior_; }
  const Word& word() const { return word_; }
  const Schedule& schedule() const { return schedule_; }
  const std::vector<EventOutcome>& processed_record() const { return processed_; }
  const NodeLabel& label_of(const NodeRef& id) const {
    auto it = labels_.find(id);
    if (it != labels_.end()) return it->second;
    return behavior_.node(id).label;
  }
  std::size_t live_nodes() const { return behavior_.size(); }

 private:
  // Keeps only what future folds can reference: release nodes, their
  // predecessors, and event emitters. Labels of dropped nodes are retained
  // for outcome validation.
  void prune() {
    std::set<NodeRef> keep;
    for (const auto& r : spec_->universe.resources) {
      auto rel = behavior_.release_of(r);
      if (!rel) continue;
      keep.insert(*rel);
      for (const auto& p : behavior_.preds(*rel)) keep.insert(p);
      // claims stay so the next fold still sees a normalized operand
      if (auto cl = behavior_.claim_of(r)) keep.insert(*cl);
    }
    for (const auto& [e, nodes] : behavior_.all_emissions())
      for (const auto& n : nodes) keep.insert(n);
    std::vector<NodeRef> drop;
    for (const auto& [id, entry] : behavior_.nodes())
      if (!keep.count(id)) drop.push_back(id);
    for (const auto& id : drop) {
      labels_[id] = behavior_.node(id).label;
      behavior_.remove_node(id);
    }
  }

  const ActivitySpec* spec_;
  Retention retention_;
  ComposedActivity behavior_;
  Word word_;
  Schedule schedule_;
  ResourceState x0_;
  std::uint32_t position_ = 0;  // word position; also the instance counter
  std::set<NodeRef> dispatched_;
  std::map<NodeRef, NodeLabel> labels_;  // labels of pruned nodes
  std::vector<EventOutcome> processed_;
};

/// Runs a specification against a plant: the bottom dispatcher layer is a
/// discrete-event loop over intended start times (S(n) + psi), either on a
/// logical clock or paced by the host monotonic clock.
class Engine {
 public:
  Engine(const ActivitySpec& spec, SimPlant plant, EngineConfig cfg)
      : spec_(&spec), plant_(std::move(plant)), cfg_(cfg) {}

  ExecutionTrace run() {
    LogisticsController lc(spec_->automaton);
    ActivityController ac(*spec_, cfg_.retention);
    ExecutionTrace trace;
    trace.psi = cfg_.psi;
    trace.delay_bound = cfg_.delay_bound;
    trace.event_bound = cfg_.event_bound;

    bool realtime = cfg_.clock == ClockMode::Realtime;
    auto origin = std::chrono::steady_clock::now();
    auto now_wall = [&]() {
      auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                    std::chrono::steady_clock::now() - origin)
                    .count();
      return Time(us, 1000);
    };
    auto wait_until = [&](const Time& t) {
      if (!realtime) return;
      auto target = origin + std::chrono::microseconds(
                                 (t.num() * 1000 + t.den() - 1) / t.den());
      std::this_thread::sleep_until(target);
    };

    try {
      // Initialization: the first decision path is prepared before psi.
      auto first = lc.advance(std::nullopt);
      if (!first.path) {
        trace.completed = true;  // the initial state is final
        return trace;
      }
      auto ext = ac.extend(*first.path, std::nullopt);
      Time ready = cfg_.psi;
      if (realtime && !(now_wall() < cfg_.psi))
        throw SpecError("execution start time " + cfg_.psi.to_string() +
                        " is not far enough in the future: initialization finished at " +
                        now_wall().to_string());
      record_path(trace, 0, std::nullopt, std::nullopt, ready, ext.path_start,
                  realtime ? ComponentCosts{} : cfg_.costs, *first.path);
      enqueue(ext.dispatch, ready, 0);

      int path_index = 0;
      Time now = cfg_.psi;
      while (!dispatch_.empty() || !outcomes_.empty()) {
        bool take_outcome;
        if (outcomes_.empty()) take_outcome = false;
        else if (dispatch_.empty()) take_outcome = true;
        else take_outcome = !(dispatch_.top().due < outcomes_.top().at);

        if (take_outcome) {
          OutcomeEvent ev = outcomes_.top();
          outcomes_.pop();
          wait_until(ev.at);
          now = Time::max(now, ev.at);
          pending_[ev.outcome.event].push_back(ev);
          // Consume queued outcomes as long as the parked state expects them.
          while (true) {
            auto awaited = lc.awaited_event();
            if (!awaited || pending_[*awaited].empty()) break;
            OutcomeEvent next = pending_[*awaited].front();
            pending_[*awaited].pop_front();

            Time consume_at = realtime ? now_wall() : Time::max(next.at, now);
            auto t0 = std::chrono::steady_clock::now();
            EventOutcome eu = ac.on_outcome(next.node, next.outcome.outcome);
            trace.processed_outcomes.push_back(eu);
            auto adv = lc.advance(eu);
            auto t1 = std::chrono::steady_clock::now();
            ++path_index;
            if (!adv.path)
              throw SpecError("outcome consumed at a final state");
            auto extension = ac.extend(*adv.path, adv.processing);
            auto t2 = std::chrono::steady_clock::now();
            ComponentCosts measured;
            Time ready_at;
            if (realtime) {
              measured.route = consume_at - next.resolved;
              measured.logistics = elapsed(t0, t1);
              measured.sequencing = elapsed(t1, t2);
              measured.preparation = Time(0);
              ready_at = now_wall();
            } else {
              measured = cfg_.costs;
              ready_at = consume_at + cfg_.costs.logistics + cfg_.costs.sequencing +
                         cfg_.costs.preparation;
            }
            record_path(trace, path_index, eu, adv.processing, ready_at,
                        extension.path_start, measured, *adv.path);
            enqueue(extension.dispatch, ready_at, path_index);
          }
        } else {
          PendingNode pn = dispatch_.top();
          dispatch_.pop();
          wait_until(pn.due);
          now = Time::max(now, pn.due);
          Time issue = realtime ? Time::max(pn.due, now_wall()) : pn.due;
          const NodeLabel& label = ac.label_of(pn.entry.node);
          TraceRecord rec;
          rec.node = pn.entry.node;
          rec.label = label;
          rec.spec_start = pn.entry.start;
          rec.spec_completion = pn.entry.completion;
          rec.path_index = pn.path;
          if (label.is_action()) {
            auto res = plant_.start_action(pn.entry.node, label, issue);
            rec.exec_start = res.start;
            rec.exec_completion = res.completion;
          } else {
            auto res = plant_.sample_event(pn.entry.node, label, issue);
            rec.exec_start = res.start;
            rec.exec_completion = res.resolved_at;
            Time arrival = res.resolved_at + (realtime ? Time(0) : cfg_.costs.route);
            outcomes_.push(OutcomeEvent{arrival, res.resolved_at, pn.entry.node,
                                        EventOutcome{label.event, res.outcome}});
          }
          rec.delta = rec.exec_start - rec.spec_start - cfg_.psi;
          rec.deadline_violated = rec.spec_completion + cfg_.psi < rec.exec_completion;
          if (rec.deadline_violated) trace.conforming = false;
          trace.records.push_back(rec);
        }
      }
      if (!lc.completed())
        throw SpecError("execution stalled at state " + lc.current() +
                        " with no pending events");
      trace.completed = true;
    } catch (const std::exception& e) {
      trace.abort_reason = e.what();
      trace.completed = false;
      trace.conforming = false;
    }
    return trace;
  }

 private:
  struct PendingNode {
    Time due;
    ScheduleEntry entry;
    int path;

    bool operator>(const PendingNode& o) const {
      return std::tie(due, entry.node) > std::tie(o.due, o.entry.node);
    }
  };

  struct OutcomeEvent {
    Time at;        // arrival at the engine (resolution + routing)
    Time resolved;  // C'(n) at the plant boundary
    NodeRef node;
    EventOutcome outcome;

    bool operator>(const OutcomeEvent& o) const {
      return std::tie(at, node) > std::tie(o.at, o.node);
    }
  };

  static Time elapsed(std::chrono::steady_clock::time_point a,
                      std::chrono::steady_clock::time_point b) {
    auto us = std::chrono::duration_cast<std::chrono::microseconds>(b - a).count();
    return Time(us, 1000);
  }

  void enqueue(const std::vector<ScheduleEntry>& entries, const Time& ready, int path) {
    for (const auto& e : entries)
      dispatch_.push(
          PendingNode{Time::max(e.start + cfg_.psi, ready), e, path});
  }

  void record_path(ExecutionTrace& trace, int index,
                   const std::optional<EventOutcome>& eu,
                   const std::optional<EventInstance>& processing, const Time& ready,
                   const Time& path_start, const ComponentCosts& measured,
                   const DecisionPath& path) {
    PathRecord p;
    p.index = index;
    p.processed = eu;
    if (processing) p.instance = processing->k;
    p.ready = ready;
    p.spec_start = path_start;
    p.measured = measured;
    for (const auto& o : path.activities()) p.activities.push_back(o ? *o : "");
    trace.paths.push_back(std::move(p));
  }

  const ActivitySpec* spec_;
  SimPlant plant_;
  EngineConfig cfg_;
  std::priority_queue<PendingNode, std::vector<PendingNode>, std::greater<>> dispatch_;
  std::priority_queue<OutcomeEvent, std::vector<OutcomeEvent>, std::greater<>> outcomes_;
  std::map<EventName, std::deque<OutcomeEvent>> pending_;
};

inline ExecutionTrace run_engine(const ActivitySpec& spec, const PlantConfig& plant,
                                 const EngineConfig& cfg) {
  Engine engine(spec, SimPlant(plant, spec), cfg);
  return engine.run();
}

// --- decision-path enumeration and bound measurement -------------------------

/// Every decision path of the automaton: one from the initial state plus
/// one per (decision state, outcome) pair.
inline std::vector<DecisionPath> all_decision_paths(const IOAutomaton& y) {
  std::vector<DecisionPath> out;
  if (!y.is_final(y.initial()))
    if (auto p = next_decision_path(y, y.initial(), std::nullopt)) out.push_back(*p);
  for (const auto& q : decision_states(y))
    for (const auto& t : y.outgoing(q))
      if (t.input)
        if (auto p = next_decision_path(y, q, *t.input)) out.push_back(*p);
  return out;
}

inline std::size_t path_node_count(const ActivitySpec& spec, const DecisionPath& rho) {
  std::size_t n = 0;
  for (const auto& o : rho.activities())
    if (o) n += spec.activity(*o).nodes.size();
  return n;
}

struct MeasuredBounds {
  std::size_t largest_path_nodes = 0;
  std::size_t largest_path_length = 0;
  ComponentCosts components;  // measured or configured per-component costs
  Time suggested_event_bound; // sum of components, with margin applied
  bool within_configured = true;
};

/// Times the engine layers on the largest decision path (by node count),
/// the way a deployment would calibrate its event-processing bound. In
/// simulated mode the configured costs are charged, so the result is their
/// sum; in realtime mode the host clock is used.
inline MeasuredBounds measure_bounds(const ActivitySpec& spec, const EngineConfig& cfg,
                                     double margin = 0.0) {
  MeasuredBounds out;
  auto paths = all_decision_paths(spec.automaton);
  if (paths.empty()) {
    out.suggested_event_bound = cfg.costs.sum();
    return out;
  }
  const DecisionPath* largest = &paths.front();
  for (const auto& p : paths)
    if (path_node_count(spec, p) > path_node_count(spec, *largest)) largest = &p;
  out.largest_path_nodes = path_node_count(spec, *largest);
  out.largest_path_length = largest->length();

  if (cfg.clock == ClockMode::Simulated) {
    out.components = cfg.costs;
  } else {
    // Drive the layers on the largest path, off the plant, and take wall
    // measurements: automaton read, sequencing + scheduling, dispatch sort.
    auto us = [](auto a, auto b) {
      return Time(
          std::chrono::duration_cast<std::chrono::microseconds>(b - a).count(), 1000);
    };
    auto t0 = std::chrono::steady_clock::now();
    DecisionPath rho = *next_decision_path(
        spec.automaton, largest->transitions.front().from, largest->processing_input());
    auto t1 = std::chrono::steady_clock::now();
    ComposedActivity acc;
    std::uint32_t instance = 0;
    for (const auto& o : rho.activities()) {
      ComposedActivity rhs;
      if (o) rhs = lift(spec.activity(*o), instance++);
      detail::fold_into(acc, rhs, spec.universe, std::nullopt, {});
    }
    Schedule schedule = node_times(acc, ResourceState::zero(spec.universe));
    auto t2 = std::chrono::steady_clock::now();
    std::vector<ScheduleEntry> dispatch;
    for (const auto& [id, se] : schedule)
      if (!acc.node(id).label.is_resource_node()) dispatch.push_back(se);
    std::sort(dispatch.begin(), dispatch.end(),
              [](const ScheduleEntry& a, const ScheduleEntry& b) {
                return std::tie(a.start, a.node) < std::tie(b.start, b.node);
              });
    auto t3 = std::chrono::steady_clock::now();
    out.components.route = Time(0);
    out.components.logistics = us(t0, t1);
    out.components.sequencing = us(t1, t2);
    out.components.preparation = us(t2, t3);
  }
  Time total = out.components.sum();
  // Margin is a plain scale factor; exact arithmetic over a ppm grid.
  std::int64_t ppm = static_cast<std::int64_t>(margin * 1000000.0);
  out.suggested_event_bound = total + total * Time(ppm, 1000000);
  out.within_configured = !(cfg.event_bound < out.suggested_event_bound);
  return out;
}

}  // namespace aee

// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Every tolerance is pinned here; timing budgets are enforced where stated.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aee/aee.hpp"
#include "support/generators.hpp"
#include "support/mutations.hpp"
#include "support/running_example.hpp"

using namespace aee;

namespace {

int g_failures = 0;

void criterion(int index, const std::string& title, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
  std::string note;
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    ok = false;
    note = std::string("exception: ") + e.what();
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_seconds > 0 && elapsed > budget_seconds) {
    ok = false;
    note += (note.empty() ? "" : "; ") + std::string("over time budget");
  }
  std::ostringstream line;
  line << "criterion " << index << " " << (ok ? "PASS" : "FAIL") << ": " << title << " ("
       << elapsed << "s)";
  if (!ok && !note.empty()) line << " -- " << note;
  std::cout << line.str() << "\n";
  if (!ok) ++g_failures;
}

NodeRef ref(std::uint32_t i, const std::string& act, const std::string& local) {
  return NodeRef{i, act, local};
}

// Test-only oracle: memoized recursion over the timing equations.
struct MemoTimes {
  const ComposedActivity& a;
  const ResourceState& x;
  std::map<NodeRef, Time> memo;

  Time S(const NodeRef& n) {
    const auto& entry = a.node(n);
    if (entry.label.is_claim()) return x.at(entry.label.resource);
    Time s(0);
    bool first = true;
    for (const auto& p : a.preds(n)) {
      Time c = C(p);
      s = first ? c : Time::max(s, c);
      first = false;
    }
    return s;
  }

  Time C(const NodeRef& n) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    Time c = S(n) + a.node(n).duration;
    memo[n] = c;
    return c;
  }
};

}  // namespace

int main() {
  ActivitySpec spec = fixture::running_spec();
  ResourceState zero = ResourceState::zero(spec.universe);

  criterion(1, "golden schedule of the first decision path", 1.0, [&](std::string& note) {
    ComposedActivity a12 = seq_plain(spec.universe, fixture::act1(), fixture::act2());
    Schedule s = node_times(a12, zero);
    std::map<std::pair<std::string, std::string>, std::pair<Time, Time>> expected = {
        {{"Act2", "n4"}, {Time(0), Time(2)}}, {{"Act1", "n2"}, {Time(0), Time(1)}},
        {{"Act1", "n1"}, {Time(1), Time(2)}}, {{"Act2", "n3"}, {Time(2), Time(3)}},
        {{"Act2", "n5"}, {Time(3), Time(4)}}};
    for (const auto& [key, window] : expected) {
      NodeRef id{key.first == "Act1" ? 0u : 1u, key.first, key.second};
      auto it = s.find(id);
      if (it == s.end()) { note = "missing " + id.to_string(); return false; }
      if (!(it->second.start == window.first) ||
          !(it->second.completion == window.second)) {
        note = "wrong window for " + id.to_string() + ": [" +
               it->second.start.to_string() + "," + it->second.completion.to_string() + "]";
        return false;
      }
    }
    return true;
  });

  criterion(2, "golden structure of the finishing behavior", 1.0, [&](std::string& note) {
    Word w = {{std::nullopt, "Act1"},
              {std::nullopt, "Act2"},
              {EventOutcome{"e", "u2"}, "Act4"}};
    ComposedActivity b = behavior_activity(spec.universe, spec.activities, w);
    std::set<NodeRef> observable;
    for (const auto& [id, entry] : b.nodes())
      if (!entry.label.is_resource_node()) observable.insert(id);
    std::set<NodeRef> expected = {ref(0, "Act1", "n1"), ref(0, "Act1", "n2"),
                                  ref(1, "Act2", "n3"), ref(1, "Act2", "n4"),
                                  ref(1, "Act2", "n5"), ref(2, "Act4", "n7")};
    if (observable != expected) { note = "node set differs"; return false; }
    auto closure = reachability(b);
    NodeRef n1 = ref(0, "Act1", "n1"), n2 = ref(0, "Act1", "n2"), n3 = ref(1, "Act2", "n3"),
            n4 = ref(1, "Act2", "n4"), n5 = ref(1, "Act2", "n5"), n7 = ref(2, "Act4", "n7");
    bool facts = closure[n5].count(n7) && closure[n4].count(n7) && b.has_edge(n3, n5) &&
                 b.has_edge(n1, n3) && b.has_edge(n2, n1) && b.has_edge(n4, n3);
    if (!facts) { note = "reachability facts differ"; return false; }
    if (b.has_edge(n1, n7)) {
      note = "unexpected direct dependency n1 -> n7 (splices must be resource-matched)";
      return false;
    }
    return true;
  });

  // Criteria 3 and 4 share the same 1000 seeded runs.
  std::vector<ExecutionTrace> campaign;
  criterion(3, "1000 conforming seeded runs: timing and behavior preserved", 30.0,
            [&](std::string& note) {
    EngineConfig cfg = fixture::default_config();
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      PlantConfig plant = fixture::random_plant(spec, cfg, seed);
      if (seed == 0) {
        ValidationReport pre = check_plant_against_spec(plant, spec, cfg);
        if (!pre.ok()) { note = "plant not conforming:\n" + pre.to_text(); return false; }
      }
      ExecutionTrace t = run_engine(spec, plant, cfg);
      if (!t.completed) { note = "run aborted: " + t.abort_reason; return false; }
      ValidationReport timing = check_timing_relation(t);
      ValidationReport behavior = check_behavior_preservation(t, spec);
      if (!timing.ok() || !behavior.ok()) {
        note = "seed " + std::to_string(seed) + ":\n" + timing.to_text() + behavior.to_text();
        return false;
      }
      campaign.push_back(std::move(t));
    }
    return true;
  });

  criterion(4, "dispatcher readiness precedes every later path's start", 5.0,
            [&](std::string& note) {
    if (campaign.size() != 1000) { note = "campaign incomplete"; return false; }
    std::size_t multi_path = 0;
    for (const auto& t : campaign) {
      if (t.paths.size() >= 2) ++multi_path;
      for (const auto& p : t.paths) {
        if (p.index == 0) continue;
        if (p.spec_start + t.psi < p.ready) {
          note = "path " + std::to_string(p.index) + " ready " + p.ready.to_string() +
                 " after start " + (p.spec_start + t.psi).to_string();
          return false;
        }
      }
    }
    if (multi_path == 0) { note = "no multi-path runs sampled"; return false; }
    return true;
  });

  criterion(5, "scheduler equals the memoized-recursion oracle on 100 random activities",
            10.0, [&](std::string& note) {
    std::mt19937_64 rng(424242);
    for (int i = 0; i < 100; ++i) {
      auto su = gen::small_universe(rng);
      std::size_t budget = 12 - 2 * su.universe.resources.size();
      Activity act = gen::wellformed_activity(rng, su, budget);
      ComposedActivity a = lift(act, 0);
      if (a.size() > 12) { note = "generator exceeded 12 nodes"; return false; }
      ResourceState x;
      for (const auto& r : su.universe.resources)
        x.availability[r] = Time(std::int64_t(rng() % 10), 1 + rng() % 4);
      Schedule s = node_times(a, x);
      MemoTimes oracle{a, x, {}};
      for (const auto& [id, entry] : s) {
        if (!(oracle.S(id) == entry.start) || !(oracle.C(id) == entry.completion)) {
          note = "mismatch at " + id.to_string() + " on iteration " + std::to_string(i);
          return false;
        }
      }
    }
    return true;
  });

  criterion(6, "an overrunning action is flagged before and during the run", 5.0,
            [&](std::string& note) {
    EngineConfig cfg = fixture::default_config();
    PlantConfig plant = fixture::scripted_plant(spec, cfg, {"u2"});
    auto& c = plant.actions.at({"c", "p3"});  // node n3, specified duration 1
    c.worst_case = c.jitter_lo = c.jitter_hi = Rat::parse("1.05");

    ValidationReport pre = check_plant_against_spec(plant, spec, cfg);
    std::vector<std::string> flagged;
    for (const auto& f : pre.findings)
      for (const auto& s : f.subjects) flagged.push_back(s);
    if (flagged != std::vector<std::string>{"Act2:n3"}) {
      note = "pre-run check flagged: " + pre.to_text();
      return false;
    }

    ExecutionTrace t = run_engine(spec, plant, cfg);
    if (!t.completed) { note = "run aborted: " + t.abort_reason; return false; }
    for (const auto& r : t.records) {
      bool is_n3 = r.node.local == "n3";
      if (r.deadline_violated != is_n3) {
        note = "deadline flags wrong at " + r.node.to_string();
        return false;
      }
    }
    ValidationReport timing = check_timing_relation(t);
    for (const auto& f : timing.findings)
      if (f.check == Check::DeadlineMiss && f.subjects != std::vector<std::string>{"1:Act2:n3"}) {
        note = "checker flagged " + f.subjects.front();
        return false;
      }
    if (!timing.has(Check::DeadlineMiss)) { note = "deadline miss not reported"; return false; }
    return true;
  });

  criterion(7, "20 jitter seeds: identical schedule and outcomes, bounded starts", 10.0,
            [&](std::string& note) {
    EngineConfig cfg = fixture::default_config();
    std::vector<OutcomeName> script = {"u1", "u1", "u2"};
    std::optional<std::string> baseline_schedule;
    std::optional<std::vector<EventOutcome>> baseline_outcomes;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
      ExecutionTrace t =
          run_engine(spec, fixture::scripted_plant(spec, cfg, script, seed, true), cfg);
      if (!t.completed) { note = "run aborted"; return false; }
      std::ostringstream schedule;
      for (const auto& r : t.records)
        schedule << r.node.to_string() << " " << r.spec_start.to_string() << " "
                 << r.spec_completion.to_string() << "\n";
      if (!baseline_schedule) {
        baseline_schedule = schedule.str();
        baseline_outcomes = t.processed_outcomes;
      } else if (*baseline_schedule != schedule.str() ||
                 *baseline_outcomes != t.processed_outcomes) {
        note = "seed " + std::to_string(seed) + " changed the dispatched schedule or U'";
        return false;
      }
      for (const auto& r : t.records) {
        Time lo = r.spec_start + cfg.psi;
        if (r.exec_start < lo || lo + cfg.delay_bound < r.exec_start) {
          note = "start outside window at " + r.node.to_string();
          return false;
        }
        if (r.spec_completion + cfg.psi < r.exec_completion) {
          note = "completion after deadline at " + r.node.to_string();
          return false;
        }
      }
    }
    return true;
  });

  criterion(8, "mutation suite: 16 single edits trip exactly their checks", 10.0,
            [&](std::string& note) {
    auto activity_list = mutation::activity_mutations();
    if (activity_list.size() != 11) { note = "expected 11 activity mutations"; return false; }
    for (const auto& m : activity_list) {
      ValidationReport r = validate_activity(m.activity, spec.universe);
      std::set<Check> got;
      for (const auto& f : r.findings) got.insert(f.check);
      if (got != m.expected) {
        note = m.name + ": got\n" + r.to_text();
        return false;
      }
    }
    auto spec_list = mutation::automaton_mutations();
    if (spec_list.size() != 5) { note = "expected 5 automaton mutations"; return false; }
    for (const auto& m : spec_list) {
      ValidationReport r = validate_spec(m.spec);
      if (r.ok()) { note = m.name + ": nothing flagged"; return false; }
      for (const auto& f : r.findings)
        if (f.check != m.expected) {
          note = m.name + ": cross-talk\n" + r.to_text();
          return false;
        }
    }
    return true;
  });

  criterion(9, "millisecond-scale event bound arithmetic", 1.0,
            [&](std::string& note) {
    Universe u;
    u.resources = {"m"};
    u.owner = {{"mp", "m"}};
    u.events = {"pick"};
    u.outcomes = {"success", "failure"};
    u.gamma = {{"pick", "success"}, {"pick", "failure"}};
    auto build = [&](const char* delay) {
      Activity a;
      a.name = "Assemble";
      a.add_node("m.cl", NodeLabel::make_claim("m"));
      a.add_node("m.rl", NodeLabel::make_release("m"));
      a.add_node("grab", NodeLabel::make_action("grab", "mp"), parse_time("30ms"));
      a.add_node("evp", NodeLabel::make_event("pick"), parse_time(delay));
      a.add_edge("m.cl", "grab");
      a.add_edge("grab", "evp");
      a.add_edge("evp", "m.rl");
      ActivitySpec s;
      s.universe = u;
      s.activities[a.name] = a;
      s.automaton.states = {"s0", "s1"};
      s.automaton.initials = {"s0"};
      s.automaton.finals = {"s1"};
      s.automaton.transitions = {{"s0", std::nullopt, "Assemble", "s1"}};
      return s;
    };
    EngineConfig cfg;
    cfg.delay_bound = parse_time("1.6ms");
    cfg.event_bound = parse_time("6ms");
    ActivitySpec ten = build("10ms");
    PlantConfig plant = PlantConfig::conforming(ten, cfg);
    plant.events.at("pick").resolution = parse_time("1.9ms");
    auto& grab = plant.actions.at({"grab", "mp"});
    grab.worst_case = grab.jitter_lo = grab.jitter_hi = parse_time("20ms");
    if (!check_plant_against_spec(plant, ten, cfg).ok()) {
      note = "10 > 1.9 + 6 + 1.6 should pass";
      return false;
    }
    ActivitySpec nine = build("9ms");
    ValidationReport r = check_plant_against_spec(plant, nine, cfg);
    if (!r.has(Check::EventDelayBound)) {
      note = "9 < 9.5 should fail the event-delay bound";
      return false;
    }
    return true;
  });

  if (g_failures == 0) {
    std::cout << "all criteria passed\n";
    return 0;
  }
  std::cout << g_failures << " criteria failed\n";
  return 1;
}

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "aee/aee.hpp"
#include "support/running_example.hpp"

using namespace aee;

namespace {

Word word_of(std::initializer_list<std::pair<const char*, const char*>> pairs) {
  // first: "e/u1" or "" for the empty input; second: activity name or ""
  Word w;
  for (const auto& [i, o] : pairs) {
    InputLabel input;
    std::string is(i);
    if (!is.empty()) {
      auto slash = is.find('/');
      input = EventOutcome{is.substr(0, slash), is.substr(slash + 1)};
    }
    OutputLabel output;
    if (*o) output = std::string(o);
    w.emplace_back(input, output);
  }
  return w;
}

}  // namespace

TEST_CASE("decision states are the states with out-degree at least two") {
  IOAutomaton y = fixture::running_automaton();
  CHECK(decision_states(y) == std::set<std::string>{"q2"});

  IOAutomaton chain;
  chain.states = {"q0", "q1", "q2"};
  chain.initials = {"q0"};
  chain.finals = {"q2"};
  chain.transitions = {{"q0", std::nullopt, "Act1", "q1"},
                       {"q1", std::nullopt, "Act2", "q2"}};
  CHECK(decision_states(chain).empty());

  // Oracle: direct out-degree count after adding one more branch.
  IOAutomaton extra = fixture::running_automaton();
  extra.transitions.push_back({"q1", std::nullopt, "Act3", "q3"});
  std::map<std::string, int> outdeg;
  for (const auto& t : extra.transitions) ++outdeg[t.from];
  std::set<std::string> expect;
  for (const auto& [q, d] : outdeg)
    if (d >= 2) expect.insert(q);
  CHECK(decision_states(extra) == expect);
  CHECK(decision_states(extra) == std::set<std::string>{"q1", "q2"});
}

TEST_CASE("the demo automaton is deterministic, complete, nonblocking, consistent") {
  ActivitySpec spec = fixture::running_spec();
  CHECK(validate_deterministic(spec.automaton, spec.universe.gamma).ok());
  CHECK(validate_complete(spec.automaton, spec.universe.gamma).ok());
  CHECK(validate_nonblocking(spec.automaton).ok());
  CHECK(validate_consistent(spec.automaton, spec.activities).ok());
}

TEST_CASE("determinism violations") {
  ActivitySpec spec = fixture::running_spec();
  auto& gamma = spec.universe.gamma;

  IOAutomaton two_initial = spec.automaton;
  two_initial.initials.push_back("q1");
  CHECK(validate_deterministic(two_initial, gamma).has(Check::Deterministic));

  IOAutomaton relabeled = spec.automaton;
  for (auto& t : relabeled.transitions)
    if (t.input && t.input->outcome == "u2") t.input = EventOutcome{"e", "u1"};
  CHECK(validate_deterministic(relabeled, gamma).has(Check::Deterministic));

  IOAutomaton final_exit = spec.automaton;
  final_exit.transitions.push_back({"q3", std::nullopt, "Act1", "q0"});
  CHECK(validate_deterministic(final_exit, gamma).has(Check::Deterministic));
}

TEST_CASE("completeness violations") {
  ActivitySpec spec = fixture::running_spec();
  auto gamma = spec.universe.gamma;
  CHECK(validate_complete(spec.automaton, gamma).ok());

  auto extended = gamma;
  extended.insert({"e", "u3"});
  ValidationReport r = validate_complete(spec.automaton, extended);
  REQUIRE(r.has(Check::Complete));
  CHECK(r.findings.front().subjects == std::vector<std::string>{"q2"});

  // Oracle: outcome labels vs gamma. Deleting the u1 branch leaves q2 with
  // out-degree one, but it still processes e with an outcome missing.
  IOAutomaton pruned = spec.automaton;
  pruned.transitions.erase(
      std::remove_if(pruned.transitions.begin(), pruned.transitions.end(),
                     [](const Transition& t) { return t.input && t.input->outcome == "u1"; }),
      pruned.transitions.end());
  CHECK_FALSE(decision_states(pruned).count("q2"));
  ValidationReport r2 = validate_complete(pruned, gamma);
  REQUIRE(r2.has(Check::Complete));
}

TEST_CASE("nonblocking violations") {
  ActivitySpec spec = fixture::running_spec();
  CHECK(validate_nonblocking(spec.automaton).ok());

  IOAutomaton isolated = spec.automaton;
  isolated.states.push_back("q4");
  ValidationReport r = validate_nonblocking(isolated);
  REQUIRE(r.findings.size() == 1);
  CHECK(r.findings.front().subjects == std::vector<std::string>{"q4"});

  // Oracle: reverse reachability from finals. Removing the only exit leaves
  // the whole cycle blocked.
  IOAutomaton cut = spec.automaton;
  cut.transitions.erase(
      std::remove_if(cut.transitions.begin(), cut.transitions.end(),
                     [](const Transition& t) { return t.input && t.input->outcome == "u2"; }),
      cut.transitions.end());
  ValidationReport r2 = validate_nonblocking(cut);
  std::set<std::string> blocked;
  for (const auto& f : r2.findings) blocked.insert(f.subjects.front());
  CHECK(blocked == std::set<std::string>{"q0", "q1", "q2"});
}

TEST_CASE("consistency: pending-count walk of the demo system") {
  ActivitySpec spec = fixture::running_spec();
  CHECK(validate_consistent(spec.automaton, spec.activities).ok());

  // Processing an event before anything emitted it.
  IOAutomaton early = spec.automaton;
  early.transitions[0] = {"q0", EventOutcome{"e", "u1"}, "Act1", "q1"};
  ValidationReport r = validate_consistent(early, spec.activities);
  REQUIRE(r.has(Check::Consistent));

  // Replacing Act2 by an event-free activity starves q2.
  // Oracle: exhaustive path enumeration to depth 8 finds a negative count.
  ActivitySpec starved = fixture::running_spec();
  starved.activities["Act2"] = starved.activities.at("Act3");
  starved.activities["Act2"].name = "Act2";
  ValidationReport r2 = validate_consistent(starved.automaton, starved.activities);
  REQUIRE(r2.has(Check::Consistent));
  {
    struct Walk { std::string q; int count; int depth; };
    bool negative = false;
    std::vector<Walk> stack{{starved.automaton.initial(), 0, 0}};
    while (!stack.empty()) {
      Walk w = stack.back();
      stack.pop_back();
      if (w.depth > 8) continue;
      for (const auto& t : starved.automaton.outgoing(w.q)) {
        int next = w.count;
        if (t.output) {
          for (const auto& n : starved.activities.at(*t.output).nodes)
            if (n.label.is_event() && n.label.event == "e") ++next;
        }
        if (t.input && t.input->event == "e") --next;
        if (next < 0) { negative = true; continue; }
        stack.push_back({t.to, next, w.depth + 1});
      }
    }
    CHECK(negative);
  }

  // A cycle that emits without ever processing grows without bound.
  IOAutomaton loop;
  loop.states = {"q0", "q1"};
  loop.initials = {"q0"};
  loop.finals = {"q1"};
  loop.transitions = {{"q0", std::nullopt, "Act2", "q0"}};
  ValidationReport r3 = validate_consistent(loop, spec.activities);
  CHECK(r3.has(Check::Consistent));
}

TEST_CASE("next_decision_path follows the traversal the engine uses") {
  IOAutomaton y = fixture::running_automaton();

  auto rho1 = next_decision_path(y, "q0", std::nullopt);
  REQUIRE(rho1);
  REQUIRE(rho1->length() == 2);
  CHECK(rho1->transitions[0].output == "Act1");
  CHECK(rho1->transitions[1].output == "Act2");
  CHECK(rho1->last_state() == "q2");
  CHECK_FALSE(rho1->processing_input());

  auto rho2 = next_decision_path(y, "q2", EventOutcome{"e", "u1"});
  REQUIRE(rho2);
  REQUIRE(rho2->length() == 3);
  CHECK(rho2->transitions[0].output == "Act3");
  CHECK(rho2->transitions[1].output == "Act1");
  CHECK(rho2->transitions[2].output == "Act2");
  CHECK(rho2->last_state() == "q2");

  auto rho3 = next_decision_path(y, "q2", EventOutcome{"e", "u2"});
  REQUIRE(rho3);
  REQUIRE(rho3->length() == 1);
  CHECK(rho3->transitions[0].output == "Act4");
  CHECK(rho3->last_state() == "q3");

  CHECK_FALSE(next_decision_path(y, "q3", std::nullopt));  // completed

  CHECK_THROWS_AS(next_decision_path(y, "q2", std::nullopt), SpecError);
  CHECK_THROWS_AS(next_decision_path(y, "q2", EventOutcome{"e", "zz"}), SpecError);
  CHECK_THROWS_AS(next_decision_path(y, "q1", std::nullopt), SpecError);  // interior
}

TEST_CASE("acceptance of words") {
  IOAutomaton y = fixture::running_automaton();
  CHECK(accepts(y, word_of({{"", "Act1"}, {"", "Act2"}, {"e/u2", "Act4"}})));
  CHECK_FALSE(accepts(y, Word{}));  // q0 is not final
  // Oracle: the explicit walk q0 q1 q2 q0 q1 q2 q3.
  CHECK(accepts(y, word_of({{"", "Act1"},
                            {"", "Act2"},
                            {"e/u1", "Act3"},
                            {"", "Act1"},
                            {"", "Act2"},
                            {"e/u2", "Act4"}})));
  CHECK_FALSE(accepts(y, word_of({{"", "Act1"}, {"", "Act2"}, {"e/u1", "Act3"}})));
  CHECK_FALSE(accepts(y, word_of({{"", "Act2"}})));
}

TEST_CASE("repeated decision paths concatenate to accepted words") {
  IOAutomaton y = fixture::running_automaton();
  for (const std::vector<std::string>& script :
       {std::vector<std::string>{"u2"}, {"u1", "u2"}, {"u1", "u1", "u1", "u2"}}) {
    Word w;
    std::string state = y.initial();
    auto path = next_decision_path(y, state, std::nullopt);
    REQUIRE(path);
    for (const auto& t : path->transitions) w.emplace_back(t.input, t.output);
    state = path->last_state();
    for (const auto& u : script) {
      auto next = next_decision_path(y, state, EventOutcome{"e", u});
      REQUIRE(next);
      for (const auto& t : next->transitions) w.emplace_back(t.input, t.output);
      state = next->last_state();
    }
    CHECK(accepts(y, w) == y.is_final(state));
    CHECK(accepts(y, w));  // every script above ends in u2
  }
}

#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace aee {

/// Identifies which rule a validation finding belongs to. Activity
/// constraints keep their roman-numeral names; the remaining codes name
/// the checked property directly.
enum class Check {
  Structure,       // dangling ids, malformed input
  Acyclic,         // dependency cycle
  C_I, C_II, C_III, C_IV, C_V, C_VI, C_VII, C_VIII, C_IX, C_X, C_XI,
  Deterministic,   // single initial state, final states closed, outcome-only branching
  Complete,        // every outcome of the processed event covered exactly once
  Nonblocking,     // every state reaches a final state
  Consistent,      // events processed only after emission, none left pending
  CrossRef,        // reference to an undeclared identifier
  DurationBound,   // specified duration must cover worst case + delay bound
  EventDelayBound, // specified delay must cover resolution + processing + delay bound
  DelayBound,      // plant delays must fit the declared bound
  TimingRelation,  // executed times outside the specified window
  DeadlineMiss,    // completion after specified completion + psi
  BehaviorMismatch,
  IncompleteBehavior,
  Criticality,
};

inline const char* check_name(Check c) {
  switch (c) {
    case Check::Structure: return "structure";
    case Check::Acyclic: return "acyclic";
    case Check::C_I: return "I";
    case Check::C_II: return "II";
    case Check::C_III: return "III";
    case Check::C_IV: return "IV";
    case Check::C_V: return "V";
    case Check::C_VI: return "VI";
    case Check::C_VII: return "VII";
    case Check::C_VIII: return "VIII";
    case Check::C_IX: return "IX";
    case Check::C_X: return "X";
    case Check::C_XI: return "XI";
    case Check::Deterministic: return "deterministic";
    case Check::Complete: return "complete";
    case Check::Nonblocking: return "nonblocking";
    case Check::Consistent: return "consistent";
    case Check::CrossRef: return "cross-reference";
    case Check::DurationBound: return "duration-bound";
    case Check::EventDelayBound: return "event-delay-bound";
    case Check::DelayBound: return "delay-bound";
    case Check::TimingRelation: return "timing-relation";
    case Check::DeadlineMiss: return "deadline";
    case Check::BehaviorMismatch: return "behavior";
    case Check::IncompleteBehavior: return "incomplete-behavior";
    case Check::Criticality: return "criticality";
  }
  return "?";
}

struct Finding {
  Check check;
  std::vector<std::string> subjects;  // node ids, state names, resources...
  std::string detail;

  friend bool operator==(const Finding& a, const Finding& b) {
    return a.check == b.check && a.subjects == b.subjects && a.detail == b.detail;
  }
};

/// Result of any validator or conformance checker; empty means the input
/// passed. Findings are kept sorted so reports are deterministic.
struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }

  void add(Check check, std::vector<std::string> subjects, std::string detail) {
    std::sort(subjects.begin(), subjects.end());
    findings.push_back({check, std::move(subjects), std::move(detail)});
  }

  void merge(const ValidationReport& other) {
    findings.insert(findings.end(), other.findings.begin(), other.findings.end());
  }

  void normalize() {
    std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
      if (a.check != b.check) return a.check < b.check;
      if (a.subjects != b.subjects) return a.subjects < b.subjects;
      return a.detail < b.detail;
    });
    findings.erase(std::unique(findings.begin(), findings.end()), findings.end());
  }

  bool has(Check c) const {
    return std::any_of(findings.begin(), findings.end(),
                       [&](const Finding& f) { return f.check == c; });
  }

  std::string to_text() const {
    if (findings.empty()) return "ok\n";
    std::string out;
    for (const auto& f : findings) {
      out += check_name(f.check);
      out += ":";
      for (const auto& s : f.subjects) { out += " "; out += s; }
      if (!f.detail.empty()) { out += " -- "; out += f.detail; }
      out += "\n";
    }
    return out;
  }
};

}  // namespace aee

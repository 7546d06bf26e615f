// Command-line front end: validate specifications, run simulated or
// realtime executions against the bounded plant, verify recorded traces,
// export Gantt data, and measure engine processing bounds.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aee/aee.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitError = 2;

json report_json(const aee::ValidationReport& report) {
  json out;
  out["ok"] = report.ok();
  out["findings"] = json::array();
  for (const auto& f : report.findings)
    out["findings"].push_back(json{{"check", aee::check_name(f.check)},
                                   {"subjects", f.subjects},
                                   {"detail", f.detail}});
  return out;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw aee::SpecError("cannot open " + path);
  return json::parse(in);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw aee::SpecError("cannot write " + path.string());
  out << content;
}

struct LoadedSpec {
  aee::ActivitySpec spec;
  json document;
};

LoadedSpec load_spec(const std::string& path, bool validate = true) {
  json doc = load_json(path);
  return {aee::parse_spec(doc, validate), doc};
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& spec_path, bool as_json) {
  try {
    LoadedSpec loaded = load_spec(spec_path, false);
    aee::ValidationReport report = aee::validate_spec(loaded.spec);
    if (as_json) std::cout << report_json(report).dump(2) << "\n";
    else std::cout << report.to_text();
    return report.ok() ? kExitOk : kExitFindings;
  } catch (const aee::ValidationError& e) {
    if (as_json) std::cout << report_json(e.report).dump(2) << "\n";
    else std::cout << e.what() << "\n" << e.report.to_text();
    return kExitFindings;
  }
}

struct RunOptions {
  std::string spec_path;
  std::string plant_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int reps = 1;
  std::optional<std::string> psi;
  std::optional<std::string> clock;
  std::optional<std::string> script;
  std::optional<std::string> bound;  // criticality bound
  bool as_json = false;
};

aee::PlantConfig resolve_plant(const RunOptions& opt, const LoadedSpec& loaded,
                               const aee::EngineConfig& cfg) {
  json section = loaded.document.value("plant", json::object());
  if (!opt.plant_path.empty()) {
    json overrides = load_json(opt.plant_path);
    section.update(overrides);  // separate file overrides by key
  }
  aee::PlantConfig plant;
  if (section.empty()) {
    plant = aee::PlantConfig::conforming(loaded.spec, cfg);
  } else {
    plant = aee::parse_plant(section, loaded.spec);
  }
  if (opt.script) {
    if (loaded.spec.universe.events.size() != 1)
      throw aee::SpecError("--script needs a specification with exactly one event");
    const std::string& event = *loaded.spec.universe.events.begin();
    aee::OutcomeSource source;
    std::string item;
    std::istringstream in(*opt.script);
    while (std::getline(in, item, ',')) source.script.push_back(item);
    plant.events.at(event).source = source;
  }
  return plant;
}

int cmd_run(const RunOptions& opt) {
  LoadedSpec loaded = load_spec(opt.spec_path);  // throws with findings if invalid

  aee::EngineConfig cfg =
      aee::parse_engine_config(loaded.document.value("run", json::object()));
  if (opt.psi) cfg.psi = aee::parse_time(*opt.psi);
  if (opt.clock) {
    if (*opt.clock == "simulated") cfg.clock = aee::ClockMode::Simulated;
    else if (*opt.clock == "realtime") cfg.clock = aee::ClockMode::Realtime;
    else throw aee::SpecError("--clock must be simulated or realtime");
  }

  aee::PlantConfig plant = resolve_plant(opt, loaded, cfg);
  aee::ValidationReport plant_report =
      aee::check_plant_against_spec(plant, loaded.spec, cfg);
  if (!plant_report.ok())
    std::cerr << "plant bounds vs specification:\n" << plant_report.to_text();

  fs::create_directories(opt.out_dir);
  json summary;
  summary["spec"] = opt.spec_path;
  summary["plantCheck"] = report_json(plant_report);
  summary["runs"] = json::array();

  bool findings = !plant_report.ok();
  aee::Time max_delta(0);
  for (int rep = 0; rep < opt.reps; ++rep) {
    aee::PlantConfig seeded = plant;
    seeded.seed = opt.seed + static_cast<std::uint64_t>(rep);
    aee::ExecutionTrace trace = aee::run_engine(loaded.spec, seeded, cfg);

    fs::path trace_path = fs::path(opt.out_dir) / ("trace_" + std::to_string(rep) + ".jsonl");
    aee::write_trace(trace, trace_path.string());

    aee::ValidationReport verify;
    verify.merge(aee::check_timing_relation(trace));
    verify.merge(aee::check_behavior_preservation(trace, loaded.spec));
    verify.merge(aee::check_path_readiness(trace));
    if (opt.bound)
      verify.merge(aee::check_criticality(trace, aee::parse_time(*opt.bound)));
    verify.normalize();

    fs::path report_path = fs::path(opt.out_dir) / ("report_" + std::to_string(rep));
    write_file(report_path.string() + ".txt", verify.to_text());
    write_file(report_path.string() + ".json", report_json(verify).dump(2) + "\n");

    aee::DeltaSummary ds = aee::delta_summary(trace);
    json run;
    run["rep"] = rep;
    run["seed"] = seeded.seed;
    run["trace"] = trace_path.string();
    run["completed"] = trace.completed;
    run["conforming"] = trace.conforming;
    run["abortReason"] = trace.abort_reason;
    run["findings"] = static_cast<int>(verify.findings.size());
    run["nodes"] = trace.records.size();
    run["maxDelta"] = ds.count ? ds.max.to_string() : "0";
    if (!trace.paths.empty()) {
      const auto& costs = trace.paths.back().measured;
      run["components"] = json{{"dEvent", costs.route.to_string()},
                               {"dLC", costs.logistics.to_string()},
                               {"dAC", costs.sequencing.to_string()},
                               {"daC", costs.preparation.to_string()}};
    }
    summary["runs"].push_back(run);

    findings |= !verify.ok() || !trace.completed || !trace.conforming;
    if (ds.count) max_delta = aee::Time::max(max_delta, ds.max);
  }
  summary["maxDelta"] = max_delta.to_string();
  summary["ok"] = !findings;
  write_file(fs::path(opt.out_dir) / "summary.json", summary.dump(2) + "\n");
  if (opt.as_json) std::cout << summary.dump(2) << "\n";
  else
    std::cout << (findings ? "findings recorded" : "ok") << "; max delta " +
                     max_delta.to_string() + "; outputs in " << opt.out_dir << "\n";
  return findings ? kExitFindings : kExitOk;
}

int cmd_gantt(const std::string& trace_path, const std::string& spec_path,
              const std::string& out_dir, bool svg) {
  LoadedSpec loaded = load_spec(spec_path);
  aee::ExecutionTrace trace = aee::read_trace(trace_path);
  json gantt = aee::export_gantt(trace, loaded.spec);
  fs::create_directories(out_dir);
  fs::path base = fs::path(out_dir) / fs::path(trace_path).stem();
  write_file(base.string() + ".gantt.json", gantt.dump(2) + "\n");
  if (svg) write_file(base.string() + ".gantt.svg", aee::gantt_svg(gantt));
  std::cout << base.string() + ".gantt.json" << "\n";
  return kExitOk;
}

int cmd_measure(const std::string& spec_path, double margin,
                const std::optional<std::string>& clock, bool as_json) {
  LoadedSpec loaded = load_spec(spec_path);
  aee::EngineConfig cfg =
      aee::parse_engine_config(loaded.document.value("run", json::object()));
  if (clock) {
    if (*clock == "simulated") cfg.clock = aee::ClockMode::Simulated;
    else if (*clock == "realtime") cfg.clock = aee::ClockMode::Realtime;
    else throw aee::SpecError("--clock must be simulated or realtime");
  }
  aee::MeasuredBounds m = aee::measure_bounds(loaded.spec, cfg, margin);
  if (as_json) {
    json out;
    out["largestPathNodes"] = m.largest_path_nodes;
    out["largestPathLength"] = m.largest_path_length;
    out["components"] = json{{"dEvent", m.components.route.to_string()},
                             {"dLC", m.components.logistics.to_string()},
                             {"dAC", m.components.sequencing.to_string()},
                             {"daC", m.components.preparation.to_string()}};
    out["suggestedDE"] = m.suggested_event_bound.to_string();
    out["configuredDE"] = cfg.event_bound.to_string();
    out["withinConfigured"] = m.within_configured;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "largest decision path: " << m.largest_path_nodes << " nodes over "
              << m.largest_path_length << " transitions\n"
              << "dEvent " << m.components.route.to_string() << "  dLC "
              << m.components.logistics.to_string() << "  dAC "
              << m.components.sequencing.to_string() << "  daC "
              << m.components.preparation.to_string() << "\n"
              << "suggested dE " << m.suggested_event_bound.to_string()
              << " (configured " << cfg.event_bound.to_string() << ")\n";
  }
  return m.within_configured ? kExitOk : kExitFindings;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"activity execution engine"};
  app.require_subcommand(1);

  std::string spec_path, trace_path, out_dir = "out";
  bool as_json = false, svg = false;
  double margin = 0.0;

  auto* validate = app.add_subcommand("validate", "check a specification file");
  validate->add_option("--spec", spec_path, "specification file")->required();
  validate->add_flag("--json", as_json, "machine-readable output");

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "execute a specification against the plant");
  run->add_option("--spec", run_opt.spec_path, "specification file")->required();
  run->add_option("--plant", run_opt.plant_path, "plant file overriding embedded keys");
  run->add_option("--out", run_opt.out_dir, "output directory");
  run->add_option("--seed", run_opt.seed, "base seed; repetition i uses seed+i");
  run->add_option("--reps", run_opt.reps, "number of repetitions")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--psi", [&](const std::vector<std::string>& v) {
        run_opt.psi = v.front(); return true; }, "execution start time");
  run->add_option("--clock", [&](const std::vector<std::string>& v) {
        run_opt.clock = v.front(); return true; }, "simulated or realtime");
  run->add_option("--script", [&](const std::vector<std::string>& v) {
        run_opt.script = v.front(); return true; },
      "comma-separated outcome script for the single event");
  run->add_option("--bound", [&](const std::vector<std::string>& v) {
        run_opt.bound = v.front(); return true; }, "criticality bound on delta");
  run->add_flag("--json", run_opt.as_json, "machine-readable output");

  auto* gantt = app.add_subcommand("gantt", "export resource rows from a trace");
  gantt->add_option("--trace", trace_path, "trace file")->required();
  gantt->add_option("--spec", spec_path, "specification file")->required();
  gantt->add_option("--out", out_dir, "output directory");
  gantt->add_flag("--svg", svg, "also write a vector drawing");

  std::optional<std::string> measure_clock;
  auto* measure = app.add_subcommand("measure", "measure engine processing bounds");
  measure->add_option("--spec", spec_path, "specification file")->required();
  measure->add_option("--margin", margin, "safety margin factor on the suggestion");
  measure->add_option("--clock", [&](const std::vector<std::string>& v) {
        measure_clock = v.front(); return true; }, "simulated or realtime");
  measure->add_flag("--json", as_json, "machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(spec_path, as_json);
    if (run->parsed()) return cmd_run(run_opt);
    if (gantt->parsed()) return cmd_gantt(trace_path, spec_path, out_dir, svg);
    if (measure->parsed()) return cmd_measure(spec_path, margin, measure_clock, as_json);
  } catch (const aee::ValidationError& e) {
    std::cerr << e.what() << "\n" << e.report.to_text();
    return kExitFindings;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

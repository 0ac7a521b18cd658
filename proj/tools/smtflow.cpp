// smtflow: benchmark generation and the leakage-reduction flow from the
// command line.
//
// Exit codes: 0 success, 2 invalid input, 3 timing not met, 4 switch
// clustering infeasible, 5 file I/O error.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "smt/benchgen.hpp"
#include "smt/design_io.hpp"
#include "smt/errors.hpp"
#include "smt/flow.hpp"
#include "smt/report.hpp"
#include "smt/validate.hpp"

namespace {

struct RunArgs {
  std::string design;
  std::string mode = "improved";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string report;
  std::string table;
  std::string svg;
  std::string clusters;
  std::string out_design;
  bool stage_timings = false;
  double max_detour = smt::kDefaultMaxDetour;
};

smt::Design load_design(const RunArgs& a) {
  smt::Design d = smt::read_design_file(a.design);
  if (!a.config.empty()) {
    const std::string text = smt::read_text_file(a.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw smt::Error(smt::ErrorKind::Syntax, "config '" + a.config + "': " + e.what());
    }
    if (!j.is_object()) throw smt::Error(smt::ErrorKind::Syntax, "config '" + a.config + "' must be an object");
    smt::apply_constraints_json(d.constraints, j.contains("constraints") ? j.at("constraints") : j);
  }
  if (a.seed) d.constraints.seed = *a.seed;
  return d;
}

smt::FlowOptions options_of(const RunArgs& a) {
  smt::FlowOptions o;
  o.max_detour = a.max_detour;
  o.record_stage_timings = a.stage_timings;
  return o;
}

int emit(const RunArgs& a, const std::vector<smt::FlowResult>& results, const smt::Constraints& c,
         bool table_to_stdout) {
  const smt::FlowReport report = smt::make_report(results, c);
  const std::string table = smt::format_table(report);
  if (!a.report.empty()) smt::write_text_file(a.report, smt::write_report_json(report));
  if (!a.table.empty()) smt::write_text_file(a.table, table);
  if (table_to_stdout) std::cout << table;
  bool met = true;
  for (const auto& r : results) {
    if (!r.timing_met) {
      std::cerr << "error: " << smt::to_string(r.mode) << " flow misses setup timing (worst slack "
                << r.timing.worst_setup_slack << " ps)\n";
      met = false;
    }
  }
  return met ? 0 : smt::exit_code(smt::ErrorKind::InfeasibleTiming);
}

int cmd_run(const RunArgs& a) {
  const auto mode = smt::parse_mode(a.mode);
  if (!mode) throw smt::Error(smt::ErrorKind::Validation, "unknown mode '" + a.mode + "'");
  const smt::Design d = load_design(a);
  smt::FlowOptions o = options_of(a);
  o.mode = *mode;
  const smt::FlowResult r = smt::run_flow(d, o);
  if (!a.svg.empty()) smt::write_text_file(a.svg, smt::render_svg(r.design, r.structure));
  if (!a.clusters.empty()) {
    smt::write_text_file(a.clusters, smt::cluster_dump(r.design, r.structure).dump(2) + "\n");
  }
  if (!a.out_design.empty()) smt::write_text_file(a.out_design, smt::write_design(r.design));
  return emit(a, {r}, d.constraints, a.table.empty() && a.report.empty());
}

int cmd_compare(const RunArgs& a) {
  const smt::Design d = load_design(a);
  return emit(a, smt::compare(d, options_of(a)), d.constraints, true);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-threshold leakage-reduction flow"};
  app.require_subcommand(1);

  smt::BenchParams bench;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a seeded benchmark design");
  gen->add_option("--cells", bench.n_cells, "Number of logic cells")->required();
  gen->add_option("--layers", bench.n_layers, "Number of logic layers")->required();
  gen->add_option("--seed", bench.seed, "Random seed");
  gen->add_option("--tightness", bench.tightness, "Critical delay / clock period, in (0, 1]");
  gen->add_option("-o,--out", gen_out, "Output design file (stdout if omitted)");

  RunArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--design", args.design, "Input design file")->required();
    sub->add_option("--config", args.config, "JSON file overriding constraint fields");
    sub->add_option("--seed", args.seed, "Seed for routing detours (overrides the design's)");
    sub->add_option("--report", args.report, "JSON report output");
    sub->add_option("--table", args.table, "Normalized text table output");
    sub->add_option("--max-detour", args.max_detour, "Upper bound of the routing detour")
        ->check(CLI::Range(0.0, 10.0));
    sub->add_flag("--stage-timings", args.stage_timings, "Include wall-clock stage timings in the report");
  };
  auto* run = app.add_subcommand("run", "Run the flow in one mode");
  add_common(run);
  run->add_option("--mode", args.mode, "dualvth | conventional | improved")
      ->check(CLI::IsMember({"dualvth", "conventional", "improved"}));
  run->add_option("--svg", args.svg, "SVG floorplan output");
  run->add_option("--clusters", args.clusters, "Switch cluster dump (JSON)");
  run->add_option("--out-design", args.out_design, "Final design output");

  auto* cmp = app.add_subcommand("compare", "Run all three modes and print the normalized table");
  add_common(cmp);

  std::string check_path;
  auto* check = app.add_subcommand("validate", "Parse and validate a design file");
  check->add_option("--design", check_path, "Design file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : smt::exit_code(smt::ErrorKind::Validation);
  }

  try {
    if (gen->parsed()) {
      const std::string text = smt::write_design(smt::generate_benchmark(bench));
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        smt::write_text_file(gen_out, text);
      }
      return 0;
    }
    if (run->parsed()) return cmd_run(args);
    if (cmp->parsed()) return cmd_compare(args);
    if (check->parsed()) {
      smt::read_design_file(check_path);
      std::cout << "ok\n";
      return 0;
    }
  } catch (const smt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return smt::exit_code(e.kind());
  }
  return 1;
}

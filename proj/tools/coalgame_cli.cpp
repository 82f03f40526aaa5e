// coalgame: stability analysis of coalitions in an atomic congestion game.
//
//   coalgame analyze  instance.json [--out report.json] [--csv bars.csv]
//   coalgame sweep    instance.json [--out report.json] [--csv bars.csv]
//   coalgame check    instance.json
//   coalgame cycles   instance.json [--beta 0 --beta 0.05]
//
// Exit status: 0 clean, 2 degenerate instance (non-unique grand-coalition
// optimizer or a partition without pure equilibria), 1 error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coalgame/coalgame.hpp"

namespace {

struct CommonArgs {
  std::string instance;
  std::string out;
  std::string csv;
  std::string beta_grid;
  double epsilon = 0.0;
  bool detail = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("instance", args.instance, "Instance file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "Write the JSON report here instead of stdout");
  cmd->add_option("--beta-grid", args.beta_grid,
                  "start:stop:step, or 'symbolic' for intervals only");
  cmd->add_option("--epsilon", args.epsilon, "Tolerance for strict comparisons")
      ->check(CLI::PositiveNumber);
}

coalgame::BetaGrid parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
  if (parts.size() != 3 || parts[0] < 0 || parts[1] < parts[0] || !(parts[2] > 0))
    throw coalgame::InstanceError("--beta-grid expects start:stop:step");
  return {parts[0], parts[1], parts[2]};
}

coalgame::InstanceConfig load(const CommonArgs& args) {
  auto config = coalgame::load_instance(args.instance);
  if (args.beta_grid == "symbolic")
    config.beta_grid.reset();
  else if (!args.beta_grid.empty())
    config.beta_grid = parse_grid(args.beta_grid);
  if (args.epsilon > 0) config.epsilon = args.epsilon;
  if (args.detail) config.candidate_detail = true;
  for (const auto& w : config.warnings) std::cerr << "warning: " << w << '\n';
  return config;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int finish(const coalgame::StabilityReport& report) {
  for (const auto& inst : report.instances)
    for (const auto& w : inst.warnings) std::cerr << "warning: " << w << '\n';
  return report.degenerate() ? 2 : 0;
}

void print_verdicts(const coalgame::StabilityReport& report) {
  for (const auto& inst : report.instances) {
    std::cout << "instance mu1=" << inst.mu1() << " (mu1/2 - mu_bar = "
              << inst.mu1_half_minus_mubar() << ")\n";
    const auto line = [](const char* name, const coalgame::Verdict& v) {
      std::cout << "  " << name << ": " << coalgame::to_string(v.status) << " ("
                << v.checks << " checks)\n";
      for (const auto& c : v.counterexamples) std::cout << "    counterexample: " << c << '\n';
      for (const auto& n : v.notes) std::cout << "    note: " << n << '\n';
    };
    if (inst.theorem3) line("severe congestion", *inst.theorem3);
    if (inst.theorem4) line("equi-divisible", *inst.theorem4);
    if (inst.bully && inst.bully->applicable)
      std::cout << std::boolalpha << "  bully equilibrium: hypothesis=" << inst.bully->hypothesis
                << " is_ne=" << inst.bully->is_ne << " witness="
                << coalgame::profile_label(inst.bully->partition, inst.bully->witness)
                << '\n';
    for (const auto& ps : inst.analysis.partitions) {
      std::cout << "  " << ps.partition.label() << ": ";
      if (ps.status == coalgame::PartitionStatus::no_pure_ne) {
        std::cout << "no pure equilibrium\n";
        continue;
      }
      if (ps.stable_set.empty()) std::cout << "never stable";
      for (const auto& iv : ps.stable_set) {
        std::cout << '[' << iv.lo << ", ";
        if (iv.bounded())
          std::cout << iv.hi;
        else
          std::cout << "inf";
        std::cout << "] ";
      }
      std::cout << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coalition stability in atomic congestion games"};
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<double> cycle_betas;

  auto* analyze = app.add_subcommand("analyze", "Analyze a single instance");
  add_common(analyze, args);
  analyze->add_option("--csv", args.csv, "Also write bar-chart rows (CSV)");
  analyze->add_flag("--detail", args.detail, "Include per-candidate blocking statistics");

  auto* sweep = app.add_subcommand("sweep", "Scan the top link's reward");
  add_common(sweep, args);
  sweep->add_option("--csv", args.csv, "Also write bar-chart rows (CSV)");
  sweep->add_flag("--detail", args.detail, "Include per-candidate blocking statistics");

  auto* check = app.add_subcommand("check", "Verify the closed-form stability results");
  add_common(check, args);

  auto* cycles = app.add_subcommand("cycles", "Find cycles of the blocking relation");
  add_common(cycles, args);
  cycles->add_option("--beta", cycle_betas, "Communication cost(s) to build the graph at");

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = load(args);
    coalgame::AnalysisOptions opt;

    if (analyze->parsed()) {
      opt.sweep = false;
      if (!config.mu1_sweep.empty())
        std::cerr << "warning: sweep ignored by 'analyze'; use 'sweep'\n";
    } else if (sweep->parsed()) {
      if (config.mu1_sweep.empty())
        throw coalgame::InstanceError(args.instance + ": no mu1 sweep given");
    } else if (check->parsed()) {
      config.theory_checks = true;
      opt.cycles = false;
    } else if (cycles->parsed()) {
      config.cycle_detection = true;
      if (!cycle_betas.empty()) config.cycle_betas = cycle_betas;
      opt.theory = false;
    }

    const auto report = coalgame::run_analysis(config, opt);

    if (check->parsed()) {
      print_verdicts(report);
      if (!args.out.empty()) write_text(args.out, coalgame::emit_report(report));
    } else if (cycles->parsed()) {
      for (const auto& inst : report.instances)
        for (const auto& cr : inst.cycles) {
          std::cout << "beta=" << cr.beta << ": " << cr.nodes << " nodes, " << cr.edges
                    << " edges, " << cr.cycles.size() << " cycle(s)\n";
          for (const auto& cyc : cr.cycles) {
            std::cout << "  ";
            for (const auto& label : cyc) std::cout << label << " -> ";
            std::cout << cyc.front() << '\n';
          }
        }
      if (!args.out.empty()) write_text(args.out, coalgame::emit_report(report));
    } else {
      write_text(args.out, coalgame::emit_report(report));
      if (!args.csv.empty()) write_text(args.csv, coalgame::emit_figure_data(report));
    }
    return finish(report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

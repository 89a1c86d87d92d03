#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "kernelforge/errors.hpp"
#include "kernelforge/io.hpp"

namespace {

void add_common_options(CLI::App& cmd, kernelforge::RunConfig& config, bool wants_data) {
  auto* data = cmd.add_option("--data", config.data_path, "Input file path");
  if (wants_data) data->required();
  cmd.add_option("--format", config.format, "Dataset layout: dense or sparse");
  cmd.add_option("--kernel", config.kernels,
                 "Kernel, repeatable: linear, poly:DEGREE:OFFSET, gauss:SIGMA");
  cmd.add_option("--margin", config.margin, "Margin: hard, l1:C, or l2:C");
  cmd.add_option("--mode", config.mode, "Weight solver: qcqp, sdp, or tune-tau");
  cmd.add_option("--trace-budget", config.trace_budget,
                 "Trace budget for the combined kernel; nonpositive means n");
  cmd.add_option("--tol", config.tol, "Solver tolerance");
  cmd.add_option("--seed", config.seed, "Seed echoed into the report");
  cmd.add_option("--out", config.out_path, "Report path; stdout when omitted");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel combination and transduction toolkit"};
  app.require_subcommand(1);

  kernelforge::RunConfig config;
  add_common_options(*app.add_subcommand("train-svm", "Fit one fixed-kernel dual"), config,
                     true);
  add_common_options(
      *app.add_subcommand("learn-kernel", "Learn mixture weights over a kernel family"),
      config, true);
  add_common_options(
      *app.add_subcommand("transduce", "Learn weights and label the unlabeled tail"), config,
      true);
  add_common_options(*app.add_subcommand("tune-tau", "Learn weights and a ridge term"),
                     config, true);
  add_common_options(*app.add_subcommand("solve-sdp", "Solve a block problem file"), config,
                     true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  config.command = app.get_subcommands().front()->get_name();

  try {
    const std::string report = kernelforge::run(config);
    if (config.out_path.empty()) {
      std::fputs(report.c_str(), stdout);
    } else {
      kernelforge::write_text_file(config.out_path, report);
    }
    return 0;
  } catch (const kernelforge::InputError& e) {
    std::fprintf(stderr, "kernelforge: %s\n", e.what());
    return 3;
  } catch (const kernelforge::SolverError& e) {
    std::fprintf(stderr, "kernelforge: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "kernelforge: %s\n", e.what());
    return 2;
  }
}

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kernelforge/kernels.hpp"
#include "kernelforge/qp_dual.hpp"
#include "kernelforge/sdp.hpp"

namespace kernelforge {

// CSV with a mandatory `label,...` header row. Labels are +1, -1, or ? for
// unlabeled points, which must form a trailing block. Throws MalformedRow,
// BadLabel, InconsistentDimension, or UnlabeledBeforeLabeled with the
// 1-based line number.
LabeledDataset parse_dataset_dense(std::string_view text);

// Rows `label idx:val idx:val ...` with 1-based strictly increasing indices
// per row and no header. Points densify to the largest index seen anywhere;
// missing coordinates are zero. Throws MalformedRow, BadLabel,
// NonMonotoneIndex, or UnlabeledBeforeLabeled.
LabeledDataset parse_dataset_sparse(std::string_view text);

// `linear`, `poly:DEGREE:OFFSET`, or `gauss:SIGMA`. Throws BadConfig.
KernelSpec parse_kernel_spec(const std::string& text);

// `hard`, `l1:C`, or `l2:C` with C > 0. Throws BadConfig.
MarginParams parse_margin(const std::string& text);

// Line-oriented block-problem text with # comments and blank lines allowed:
//   line 1: q n_blocks n_eq
//   line 2: q objective coefficients
//   per block: a line holding the dimension, then q+1 lines of dim*dim
//   row-major entries, constant matrix first;
//   per equality: q coefficients followed by the right-hand side.
// dump uses enough digits that parse(dump(p)) reproduces p exactly.
SdpProblem parse_sdp_problem(std::string_view text);
std::string dump_sdp_problem(const SdpProblem& p);

// Run settings as assembled by the command line. Kernel, margin, and mode
// stay as strings here so a config can be echoed back verbatim.
struct RunConfig {
  std::string command;               // train-svm | learn-kernel | transduce | tune-tau | solve-sdp
  std::string data_path;
  std::string format = "dense";      // dense | sparse
  std::vector<std::string> kernels;  // defaults to {"linear"} when empty
  std::string margin = "l1:1.0";
  std::string mode = "qcqp";         // qcqp | sdp | tune-tau
  double trace_budget = 0.0;         // <= 0 selects n, the point count
  double tol = 1e-8;
  long long seed = 0;
  std::string out_path;              // empty writes to stdout
};

// Executes the configured command and renders the JSON report: fixed key
// order (command, omega, mu, tau, alpha, bias, gap, predicted_labels,
// accuracy, confusion, iterations, seed), reals printed with twelve fixed
// decimals and -0 normalized, null for fields the command does not produce.
// Identical configs therefore render byte-identical reports. The env var
// KERNELFORGE_LOG={quiet|info|debug} controls diagnostics on stderr.
std::string run(const RunConfig& config);

// Whole-file text IO. Throws IoFailure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace kernelforge

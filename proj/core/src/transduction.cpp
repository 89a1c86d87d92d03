#include "kernelforge/transduction.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "kernelforge/errors.hpp"

namespace kernelforge {

KernelFamily build_family(const std::vector<KernelSpec>& kernels,
                          const LabeledDataset& data, double budget) {
  if (kernels.empty()) throw EmptyFamily();
  std::vector<KernelMatrix> candidates;
  candidates.reserve(kernels.size());
  for (const auto& spec : kernels) candidates.push_back(gram(spec, data));
  return make_family(std::move(candidates), budget);
}

TransduceResult transduce(const LabeledDataset& data, const TransduceConfig& config) {
  const double budget = config.trace_budget > 0.0 ? config.trace_budget
                                                  : static_cast<double>(data.n());
  const KernelFamily family = build_family(config.kernels, data, budget);
  const std::vector<int>& y = data.labels();

  TransduceResult out;
  switch (config.mode) {
    case LearnMode::kCuttingPlane:
      out.learned = solve_mkl_qcqp(family, y, config.margin, config.tol);
      break;
    case LearnMode::kSemidefinite:
      out.learned = solve_mkl_sdp(family, y, config.margin, config.tol);
      break;
    case LearnMode::kTuneRidge:
      if (config.margin.tau != 0.0) {
        throw BadConfig("ridge tuning learns tau; configure the box only");
      }
      out.learned = tune_tau_qcqp(family, y, config.margin.c, config.tol);
      break;
  }

  const KernelBlocks blocks = partition_blocks(out.learned.combined);
  out.decision = decision_values(out.learned.dual, y, blocks.cross);
  out.predicted.reserve(out.decision.size());
  for (double f : out.decision) out.predicted.push_back(predict_label(f));
  return out;
}

Evaluation evaluate_labels(const std::vector<int>& predicted,
                           const std::vector<int>& reference) {
  if (predicted.size() != reference.size()) {
    throw DimensionMismatch("prediction and reference lengths differ");
  }
  Evaluation ev;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] != 1 && predicted[i] != -1) {
      throw LabelOutOfRange("predicted labels must be +1 or -1");
    }
    if (reference[i] != 1 && reference[i] != -1) {
      throw LabelOutOfRange("reference labels must be +1 or -1");
    }
    if (reference[i] > 0) {
      ++(predicted[i] > 0 ? ev.tp : ev.fn);
    } else {
      ++(predicted[i] > 0 ? ev.fp : ev.tn);
    }
  }
  if (!predicted.empty()) {
    ev.accuracy = static_cast<double>(ev.tp + ev.tn) /
                  static_cast<double>(predicted.size());
  }
  return ev;
}

}  // namespace kernelforge

#include "kernelforge/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "kernelforge/errors.hpp"
#include "kernelforge/mkl.hpp"
#include "kernelforge/transduction.hpp"

namespace kernelforge {
namespace {

struct NumberedLine {
  std::size_t number;  // 1-based position in the source text
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Non-blank lines with their original numbering kept for error reports.
std::vector<NumberedLine> content_lines(std::string_view text, bool skip_comments) {
  std::vector<NumberedLine> lines;
  std::size_t number = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::string_view raw = end == std::string_view::npos
                                     ? text.substr(start)
                                     : text.substr(start, end - start);
    const std::string_view line = trim(raw);
    if (!line.empty() && !(skip_comments && line.front() == '#')) {
      lines.push_back({number, line});
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
    ++number;
  }
  return lines;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool to_real(std::string_view tok, double& out) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool to_count(std::string_view tok, std::size_t& out) {
  tok = trim(tok);
  if (tok.empty()) return false;
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), last, out);
  return res.ec == std::errc() && res.ptr == last;
}

// +1 / -1 / ? only; 0 stands for the unlabeled marker.
int parse_label_token(std::string_view tok, std::size_t line) {
  if (tok == "+1") return 1;
  if (tok == "-1") return -1;
  if (tok == "?") return 0;
  throw BadLabel(line, std::string(tok));
}

}  // namespace

LabeledDataset parse_dataset_dense(std::string_view text) {
  const auto lines = content_lines(text, false);
  if (lines.empty()) throw MalformedRow(1, "missing label,... header");
  const auto header = split_on(lines.front().text, ',');
  if (trim(header.front()) != "label") {
    throw MalformedRow(lines.front().number, "first header column must be 'label'");
  }
  if (header.size() < 2) {
    throw MalformedRow(lines.front().number, "header needs at least one feature column");
  }
  const std::size_t dim = header.size() - 1;

  std::vector<std::vector<double>> points;
  std::vector<int> labels;
  bool tail_started = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& ln = lines[li];
    const auto fields = split_on(ln.text, ',');
    const int label = parse_label_token(trim(fields.front()), ln.number);
    if (fields.size() - 1 != dim) {
      throw InconsistentDimension(ln.number, dim, fields.size() - 1);
    }
    if (label == 0) {
      tail_started = true;
    } else if (tail_started) {
      throw UnlabeledBeforeLabeled(ln.number);
    }
    std::vector<double> pt(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!to_real(fields[j + 1], pt[j])) {
        throw MalformedRow(ln.number,
                           "bad feature value '" + std::string(trim(fields[j + 1])) + "'");
      }
    }
    points.push_back(std::move(pt));
    if (label != 0) labels.push_back(label);
  }
  return LabeledDataset(std::move(points), std::move(labels));
}

LabeledDataset parse_dataset_sparse(std::string_view text) {
  struct Row {
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<Row> rows;
  std::vector<int> labels;
  bool tail_started = false;
  std::size_t dim = 0;
  for (const auto& ln : content_lines(text, false)) {
    const auto toks = split_ws(ln.text);
    const int label = parse_label_token(toks.front(), ln.number);
    if (label == 0) {
      tail_started = true;
    } else if (tail_started) {
      throw UnlabeledBeforeLabeled(ln.number);
    }
    Row row;
    std::size_t prev = 0;
    for (std::size_t t = 1; t < toks.size(); ++t) {
      const std::string_view tok = toks[t];
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 >= tok.size()) {
        throw MalformedRow(ln.number, "expected idx:val, got '" + std::string(tok) + "'");
      }
      std::size_t idx = 0;
      double val = 0.0;
      if (!to_count(tok.substr(0, colon), idx) || idx == 0) {
        throw MalformedRow(ln.number, "bad feature index in '" + std::string(tok) + "'");
      }
      if (idx <= prev) {
        throw NonMonotoneIndex(ln.number, "index " + std::to_string(idx) + " follows " +
                                              std::to_string(prev));
      }
      if (!to_real(tok.substr(colon + 1), val)) {
        throw MalformedRow(ln.number, "bad feature value in '" + std::string(tok) + "'");
      }
      row.entries.emplace_back(idx, val);
      prev = idx;
    }
    dim = std::max(dim, prev);
    rows.push_back(std::move(row));
    if (label != 0) labels.push_back(label);
  }

  std::vector<std::vector<double>> points(rows.size(), std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [idx, val] : rows[i].entries) points[i][idx - 1] = val;
  }
  return LabeledDataset(std::move(points), std::move(labels));
}

KernelSpec parse_kernel_spec(const std::string& text) {
  const auto parts = split_on(text, ':');
  const std::string kind(trim(parts.front()));
  if (kind == "linear") {
    if (parts.size() != 1) throw BadConfig("linear kernel takes no parameters");
    return KernelSpec::linear();
  }
  if (kind == "poly") {
    double degree = 0.0;
    double offset = 0.0;
    if (parts.size() != 3 || !to_real(parts[1], degree) || !to_real(parts[2], offset) ||
        degree != std::floor(degree) || degree < 1.0 || degree > 1e6) {
      throw BadConfig("polynomial kernel syntax is poly:DEGREE:OFFSET, got '" + text + "'");
    }
    return KernelSpec::polynomial(static_cast<int>(degree), offset);
  }
  if (kind == "gauss") {
    double sigma = 0.0;
    if (parts.size() != 2 || !to_real(parts[1], sigma)) {
      throw BadConfig("gaussian kernel syntax is gauss:SIGMA, got '" + text + "'");
    }
    return KernelSpec::gaussian(sigma);
  }
  throw BadConfig("unknown kernel '" + text + "'");
}

MarginParams parse_margin(const std::string& text) {
  const auto parts = split_on(text, ':');
  const std::string kind(trim(parts.front()));
  if (kind == "hard") {
    if (parts.size() != 1) throw BadConfig("hard margin takes no parameters");
    return MarginParams::hard();
  }
  double c = 0.0;
  if ((kind != "l1" && kind != "l2") || parts.size() != 2 || !to_real(parts[1], c)) {
    throw BadConfig("margin syntax is hard, l1:C, or l2:C, got '" + text + "'");
  }
  return kind == "l1" ? MarginParams::soft_l1(c) : MarginParams::soft_l2(c);
}

SdpProblem parse_sdp_problem(std::string_view text) {
  const auto lines = content_lines(text, true);
  std::size_t cursor = 0;
  auto next = [&]() -> const NumberedLine& {
    if (cursor >= lines.size()) {
      throw MalformedRow(lines.empty() ? 1 : lines.back().number,
                         "unexpected end of problem text");
    }
    return lines[cursor++];
  };
  auto reals_of = [&](const NumberedLine& ln, std::size_t count) {
    const auto toks = split_ws(ln.text);
    if (toks.size() != count) {
      throw MalformedRow(ln.number, "expected " + std::to_string(count) + " values, got " +
                                        std::to_string(toks.size()));
    }
    std::vector<double> vals(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (!to_real(toks[i], vals[i])) {
        throw MalformedRow(ln.number, "bad value '" + std::string(toks[i]) + "'");
      }
    }
    return vals;
  };

  const auto& head = next();
  const auto counts = split_ws(head.text);
  std::size_t q = 0;
  std::size_t n_blocks = 0;
  std::size_t n_eq = 0;
  if (counts.size() != 3 || !to_count(counts[0], q) || !to_count(counts[1], n_blocks) ||
      !to_count(counts[2], n_eq) || q == 0 || n_blocks == 0) {
    throw MalformedRow(head.number, "expected header 'q n_blocks n_eq' with q, n_blocks >= 1");
  }

  SdpProblem p;
  p.q = q;
  p.objective = reals_of(next(), q);
  p.blocks.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const auto& dim_line = next();
    const auto dim_tok = split_ws(dim_line.text);
    std::size_t dim = 0;
    if (dim_tok.size() != 1 || !to_count(dim_tok[0], dim) || dim == 0) {
      throw MalformedRow(dim_line.number, "expected a positive block dimension");
    }
    LmiBlock blk;
    blk.f.reserve(q + 1);
    for (std::size_t k = 0; k <= q; ++k) {
      blk.f.emplace_back(dim, reals_of(next(), dim * dim));
    }
    p.blocks.push_back(std::move(blk));
  }
  if (n_eq > 0) {
    p.eq_a = Matrix(n_eq, q);
    p.eq_b.resize(n_eq);
    for (std::size_t r = 0; r < n_eq; ++r) {
      const auto vals = reals_of(next(), q + 1);
      for (std::size_t j = 0; j < q; ++j) p.eq_a(r, j) = vals[j];
      p.eq_b[r] = vals[q];
    }
  }
  if (cursor != lines.size()) {
    throw MalformedRow(lines[cursor].number, "unexpected trailing content");
  }
  return p;
}

std::string dump_sdp_problem(const SdpProblem& p) {
  auto g17 = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::string out = "# block problem: q n_blocks n_eq\n";
  const std::size_t n_eq = p.eq_b.size();
  out += std::to_string(p.q) + " " + std::to_string(p.blocks.size()) + " " +
         std::to_string(n_eq) + "\n";
  if (p.objective.size() != p.q) {
    throw DimensionMismatch("objective length does not match the variable count");
  }
  for (std::size_t i = 0; i < p.q; ++i) {
    out += (i ? " " : "") + g17(p.objective[i]);
  }
  out += "\n";
  for (const auto& blk : p.blocks) {
    if (blk.f.size() != p.q + 1) {
      throw DimensionMismatch("block does not carry q+1 coefficient matrices");
    }
    const std::size_t dim = blk.dim();
    out += std::to_string(dim) + "\n";
    for (const auto& f : blk.f) {
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
          out += (i == 0 && j == 0 ? "" : " ") + g17(f(i, j));
        }
      }
      out += "\n";
    }
  }
  for (std::size_t r = 0; r < n_eq; ++r) {
    for (std::size_t j = 0; j < p.q; ++j) out += (j ? " " : "") + g17(p.eq_a(r, j));
    out += " " + g17(p.eq_b[r]) + "\n";
  }
  return out;
}

namespace {

int log_verbosity() {
  const char* v = std::getenv("KERNELFORGE_LOG");
  if (v == nullptr) return 0;
  const std::string_view s(v);
  if (s == "debug") return 2;
  if (s == "info") return 1;
  return 0;
}

void note(int verbosity, int level, const std::string& msg) {
  if (verbosity >= level) std::fprintf(stderr, "kernelforge: %s\n", msg.c_str());
}

std::string real12(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  if (!std::isfinite(v)) return "null";
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return std::string(buf);
}

std::string real_array(const std::vector<double>& vals) {
  std::string s = "[";
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) s += ", ";
    s += real12(vals[i]);
  }
  s += "]";
  return s;
}

std::string int_array(const std::vector<int>& vals) {
  std::string s = "[";
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(vals[i]);
  }
  s += "]";
  return s;
}

struct Report {
  std::string command;
  std::optional<double> omega;
  std::optional<std::vector<double>> mu;
  std::optional<double> tau;
  std::optional<std::vector<double>> alpha;
  std::optional<double> bias;
  std::optional<double> gap;
  std::optional<std::vector<int>> predicted;
  std::optional<double> accuracy;
  std::optional<Evaluation> confusion;
  std::optional<std::size_t> iterations;
  long long seed = 0;
};

std::string render_report(const Report& r) {
  std::string s = "{\n";
  auto field = [&s](const char* key, const std::string& value, bool last = false) {
    s += "  \"";
    s += key;
    s += "\": ";
    s += value;
    s += last ? "\n" : ",\n";
  };
  field("command", "\"" + r.command + "\"");
  field("omega", r.omega ? real12(*r.omega) : "null");
  field("mu", r.mu ? real_array(*r.mu) : "null");
  field("tau", r.tau ? real12(*r.tau) : "null");
  field("alpha", r.alpha ? real_array(*r.alpha) : "null");
  field("bias", r.bias ? real12(*r.bias) : "null");
  field("gap", r.gap ? real12(*r.gap) : "null");
  field("predicted_labels", r.predicted ? int_array(*r.predicted) : "null");
  field("accuracy", r.accuracy ? real12(*r.accuracy) : "null");
  if (r.confusion) {
    const Evaluation& ev = *r.confusion;
    field("confusion", "{\"tp\": " + std::to_string(ev.tp) + ", \"fp\": " +
                           std::to_string(ev.fp) + ", \"tn\": " + std::to_string(ev.tn) +
                           ", \"fn\": " + std::to_string(ev.fn) + "}");
  } else {
    field("confusion", "null");
  }
  field("iterations", r.iterations ? std::to_string(*r.iterations) : "null");
  field("seed", std::to_string(r.seed), true);
  s += "}\n";
  return s;
}

LabeledDataset load_dataset(const RunConfig& config) {
  const std::string text = read_text_file(config.data_path);
  if (config.format == "dense") return parse_dataset_dense(text);
  if (config.format == "sparse") return parse_dataset_sparse(text);
  throw BadConfig("unknown format '" + config.format + "'");
}

std::vector<KernelSpec> kernel_list(const RunConfig& config) {
  if (config.kernels.empty()) return {KernelSpec::linear()};
  std::vector<KernelSpec> out;
  out.reserve(config.kernels.size());
  for (const auto& s : config.kernels) out.push_back(parse_kernel_spec(s));
  return out;
}

LearnMode mode_of(const std::string& mode) {
  if (mode == "qcqp") return LearnMode::kCuttingPlane;
  if (mode == "sdp") return LearnMode::kSemidefinite;
  if (mode == "tune-tau") return LearnMode::kTuneRidge;
  throw BadConfig("unknown mode '" + mode + "'");
}

Evaluation training_eval(const DualSolution& sol, const SymMatrix& k_tr,
                         const std::vector<int>& y) {
  const auto f = decision_values(sol, y, k_tr.to_dense());
  std::vector<int> predicted;
  predicted.reserve(f.size());
  for (double v : f) predicted.push_back(predict_label(v));
  return evaluate_labels(predicted, y);
}

Report train_svm_report(const RunConfig& config, int verbosity) {
  const LabeledDataset data = load_dataset(config);
  note(verbosity, 1, "loaded " + std::to_string(data.n()) + " points (" +
                         std::to_string(data.n_tr()) + " labeled)");
  const auto kernels = kernel_list(config);
  if (kernels.size() != 1) throw BadConfig("train-svm uses exactly one kernel");
  const MarginParams margin = parse_margin(config.margin);

  const KernelMatrix k = gram(kernels.front(), data);
  const KernelBlocks blocks = partition_blocks(k);
  const SymMatrix g = label_gram(blocks.train, data.labels());
  DualSolution sol = solve_generalized_measure(g, data.labels(), margin, config.tol);
  sol.bias = recover_bias(sol, blocks.train, data.labels(), margin);

  Report r;
  r.omega = sol.objective;
  r.alpha = sol.alpha;
  r.bias = sol.bias;
  r.gap = sol.gap;
  r.iterations = sol.iterations;
  const Evaluation ev = training_eval(sol, blocks.train, data.labels());
  r.accuracy = ev.accuracy;
  r.confusion = ev;
  note(verbosity, 2, "measure " + real12(sol.objective) + ", gap " + real12(sol.gap));
  return r;
}

Report learn_report(const RunConfig& config, bool predict_tail, int verbosity) {
  const LabeledDataset data = load_dataset(config);
  note(verbosity, 1, "loaded " + std::to_string(data.n()) + " points (" +
                         std::to_string(data.n_tr()) + " labeled)");
  TransduceConfig tc;
  tc.kernels = kernel_list(config);
  tc.trace_budget = config.trace_budget;
  tc.margin = parse_margin(config.margin);
  tc.mode = mode_of(config.command == "tune-tau" ? std::string("tune-tau") : config.mode);
  tc.tol = config.tol;

  const TransduceResult result = transduce(data, tc);
  Report r;
  r.omega = result.learned.omega;
  r.mu = result.learned.mu;
  if (tc.mode == LearnMode::kTuneRidge) r.tau = result.learned.tau;
  r.alpha = result.learned.dual.alpha;
  r.bias = result.learned.dual.bias;
  r.gap = result.learned.gap;
  r.iterations = result.learned.iterations;
  if (predict_tail) {
    r.predicted = result.predicted;
  } else {
    const KernelBlocks blocks = partition_blocks(result.learned.combined);
    const Evaluation ev = training_eval(result.learned.dual, blocks.train, data.labels());
    r.accuracy = ev.accuracy;
    r.confusion = ev;
  }
  note(verbosity, 2, "measure " + real12(result.learned.omega) + ", gap " +
                         real12(result.learned.gap) + ", rounds " +
                         std::to_string(result.learned.cuts));
  return r;
}

Report solve_sdp_report(const RunConfig& config, int verbosity) {
  const SdpProblem problem = parse_sdp_problem(read_text_file(config.data_path));
  note(verbosity, 1, "problem with " + std::to_string(problem.q) + " variables, " +
                         std::to_string(problem.blocks.size()) + " blocks");
  SdpOptions opts;
  opts.gap_tol = config.tol;
  const SdpSolution sol = solve_sdp(problem, opts);

  Report r;
  r.omega = sol.p_star;
  r.mu = sol.u_opt;
  r.gap = sol.gap;
  r.iterations = sol.iterations;
  note(verbosity, 2, "value " + real12(sol.p_star) + ", gap " + real12(sol.gap));
  return r;
}

}  // namespace

std::string run(const RunConfig& config) {
  const int verbosity = log_verbosity();
  Report r;
  if (config.command == "train-svm") {
    r = train_svm_report(config, verbosity);
  } else if (config.command == "learn-kernel" || config.command == "tune-tau") {
    r = learn_report(config, false, verbosity);
  } else if (config.command == "transduce") {
    r = learn_report(config, true, verbosity);
  } else if (config.command == "solve-sdp") {
    r = solve_sdp_report(config, verbosity);
  } else {
    throw BadConfig("unknown command '" + config.command + "'");
  }
  r.command = config.command;
  r.seed = config.seed;
  return render_report(r);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoFailure("read failed for '" + path + "'");
  return std::move(ss).str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoFailure("write failed for '" + path + "'");
}

}  // namespace kernelforge

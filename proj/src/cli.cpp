#include "gnbp/cli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "gnbp/errors.hpp"

namespace gnbp {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(std::string_view v, std::size_t line, std::string_view key) {
  double out = 0.0;
  std::string_view s = v;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(line, "bad number '" + std::string(v) + "' for " + std::string(key));
  return out;
}

template <typename Int>
Int to_int(std::string_view v, std::size_t line, std::string_view key) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(line, "bad integer '" + std::string(v) + "' for " + std::string(key));
  return out;
}

bool to_bool(std::string_view v, std::size_t line, std::string_view key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(line, "bad boolean '" + std::string(v) + "' for " + std::string(key));
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view p) {
  std::filesystem::path path{std::string(p)};
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t transfers_line = 0;
  bool have_transfers = false;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key=value");
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(line_no, "duplicate key " + key);
    if (value.empty()) throw ConfigError(line_no, "empty value for " + key);

    TrainConfig& t = cfg.train;
    if (key == "dataset_path") {
      cfg.dataset_path = resolve(base_dir, value);
    } else if (key == "label_column") {
      if (value == "last")
        cfg.label_column = LabelColumn::last();
      else if (value == "first")
        cfg.label_column = LabelColumn::first();
      else
        cfg.label_column = {to_int<int>(value, line_no, key)};
    } else if (key == "layers") {
      for (auto item : split_list(value)) {
        const auto units = to_int<std::size_t>(item, line_no, key);
        if (units == 0) throw ConfigError(line_no, "layer with zero units");
        cfg.layers.push_back(units);
      }
    } else if (key == "transfers") {
      try {
        for (auto item : split_list(value)) cfg.transfers.push_back(transfer_from_string(item));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line_no, e.what());
      }
      have_transfers = true;
      transfers_line = line_no;
    } else if (key == "algo") {
      try {
        t.algorithm = algorithm_from_string(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line_no, e.what());
      }
    } else if (key == "alpha") {
      t.alpha = to_double(value, line_no, key);
    } else if (key == "max_iters") {
      t.max_iterations = to_int<std::size_t>(value, line_no, key);
    } else if (key == "mse_threshold") {
      t.mse_threshold = to_double(value, line_no, key);
    } else if (key == "class_threshold") {
      t.classification_threshold = to_double(value, line_no, key);
    } else if (key == "ridge_initial") {
      t.ridge_initial = to_double(value, line_no, key);
    } else if (key == "ridge_growth") {
      t.ridge_growth = to_double(value, line_no, key);
    } else if (key == "ridge_max") {
      t.ridge_max = to_double(value, line_no, key);
    } else if (key == "pre_adjust") {
      t.pre_adjust_enabled = to_bool(value, line_no, key);
    } else if (key == "test_fraction") {
      cfg.test_fraction = to_double(value, line_no, key);
      if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
        throw ConfigError(line_no, "test_fraction must lie in (0, 1)");
    } else if (key == "seed") {
      t.seed = to_int<std::uint64_t>(value, line_no, key);
    } else if (key == "output_path") {
      cfg.output_path = resolve(base_dir, value);
    } else {
      throw ConfigError(line_no, "unknown key " + key);
    }
  }

  if (!seen.contains("dataset_path")) throw ConfigError(0, "missing required key dataset_path");
  if (!seen.contains("layers")) throw ConfigError(0, "missing required key layers");
  if (!have_transfers) {
    cfg.transfers.assign(cfg.layers.size(), Transfer::logsig);
  } else if (cfg.transfers.size() != cfg.layers.size()) {
    throw ConfigError(transfers_line, "transfers must list one function per layer");
  }
  try {
    cfg.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

RunConfig preset(std::string_view name, Algorithm algorithm,
                 const std::filesystem::path& data_dir) {
  RunConfig cfg;
  cfg.train.algorithm = algorithm;
  cfg.train.alpha = 0.01;
  cfg.train.max_iterations = 100;
  cfg.transfers = {Transfer::logsig, Transfer::logsig};
  if (name == "iris") {
    cfg.dataset_path = data_dir / "iris.data";
    cfg.label_column = LabelColumn::last();
    cfg.layers = {5, 3};
    cfg.train.mse_threshold = 2.47e-5;
    cfg.train.classification_threshold = 97.78;
  } else if (name == "wine") {
    cfg.dataset_path = data_dir / "wine.data";
    cfg.label_column = LabelColumn::first();
    cfg.layers = {5, 3};
    cfg.train.mse_threshold = 1.824e-5;
    cfg.train.classification_threshold = 95.0;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  return cfg;
}

RunOutcome execute(const RunConfig& config) {
  config.train.validate();
  if (config.layers.empty()) throw ConfigError(0, "no layers configured");
  if (config.transfers.size() != config.layers.size())
    throw ConfigError(0, "transfers must list one function per layer");

  const RawTable table = load_csv(config.dataset_path, config.label_column);
  EncodedDataset enc = encode_targets(table);
  if (config.layers.back() != enc.class_names.size()) {
    throw ConfigError(0, "output layer has " + std::to_string(config.layers.back()) +
                             " units but the dataset has " +
                             std::to_string(enc.class_names.size()) + " classes");
  }

  auto [train_set, test_set] =
      split(enc.data, {config.test_fraction, config.train.seed, config.stratified});
  const MinMaxTransform scale = MinMaxTransform::fit(train_set.patterns);
  scale.apply_in_place(train_set);
  scale.apply_in_place(test_set);

  std::vector<LayerSpec> specs;
  for (std::size_t i = 0; i < config.layers.size(); ++i)
    specs.push_back({config.layers[i], config.transfers[i]});
  const Mlp mlp =
      init_mlp(train_set.input_size(), specs, config.train.seed, config.init_half_range);

  RunOutcome outcome{train(mlp, train_set, config.train, classify, &test_set),
                     std::move(enc.class_names), train_set.size(), test_set.size()};
  outcome.final_test_pct = outcome.report.records.back().holdout_correct_pct.value_or(0.0);
  outcome.test_iterations_to_stable = outcome.report.holdout_iterations_to_stable.value_or(1);
  return outcome;
}

void write_trace(std::ostream& out, const TrainReport& report) {
  out << "iter,M,mse,correct_pct,ridge,accepted,workspace_scalars\n";
  for (const auto& r : report.records) {
    out << r.index << ',' << fmt("%.17g", r.performance_index) << ',' << fmt("%.17g", r.mse)
        << ',' << (r.correct_pct ? fmt("%.17g", *r.correct_pct) : std::string{}) << ','
        << fmt("%.17g", r.ridge_used) << ',' << (r.step_accepted ? 1 : 0) << ','
        << r.workspace_scalars << '\n';
  }
}

std::string summary_line(const RunOutcome& o) {
  const auto& last = o.report.records.back();
  std::ostringstream s;
  s << "stop_reason=" << to_string(o.report.stop_reason)
    << " iterations=" << last.index
    << " iterations_to_stable=" << o.report.iterations_to_stable
    << " test_iterations_to_stable=" << o.test_iterations_to_stable
    << " final_mse=" << fmt("%.6e", last.mse)
    << " train_correct_pct=" << fmt("%.2f", last.correct_pct.value_or(0.0))
    << " test_correct_pct=" << fmt("%.2f", o.final_test_pct)
    << " peak_workspace_scalars=" << o.report.peak_workspace_scalars();
  return s.str();
}

namespace {

void emit_trace(const RunConfig& config, const TrainReport& report, std::ostream& out) {
  if (!config.output_path) {
    write_trace(out, report);
    return;
  }
  std::ofstream file(*config.output_path, std::ios::binary);
  if (!file) throw FileNotFound("cannot write '" + config.output_path->string() + "'");
  write_trace(file, report);
}

void diagnose(std::ostream& err, const std::exception& e) {
  if (dynamic_cast<const FileNotFound*>(&e))
    err << "error: file not found: " << e.what() << '\n';
  else
    err << "error: " << e.what() << '\n';
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const RunOutcome outcome = execute(config);
    emit_trace(config, outcome.report, out);
    out << summary_line(outcome) << '\n';
    return outcome.report.stop_reason == StopReason::stalled ? 2 : 0;
  } catch (const std::exception& e) {
    diagnose(err, e);
    return 1;
  }
}

void check_same_experiment(const RunConfig& a, const RunConfig& b) {
  std::vector<std::string> diffs;
  if (a.dataset_path.lexically_normal() != b.dataset_path.lexically_normal())
    diffs.push_back("dataset_path");
  if (a.label_column.position != b.label_column.position) diffs.push_back("label_column");
  if (a.layers != b.layers) diffs.push_back("layers");
  if (a.transfers != b.transfers) diffs.push_back("transfers");
  if (a.train.seed != b.train.seed) diffs.push_back("seed");
  if (a.test_fraction != b.test_fraction || a.stratified != b.stratified)
    diffs.push_back("test_fraction");
  if (a.init_half_range != b.init_half_range) diffs.push_back("init_half_range");
  if (diffs.empty()) return;
  std::string msg = "configs describe different experiments:";
  for (const auto& d : diffs) msg += " " + d;
  throw MismatchedExperiment(msg);
}

int compare(const RunConfig& a, const RunConfig& b, std::ostream& out, std::ostream& err) {
  try {
    check_same_experiment(a, b);
    const RunOutcome ra = execute(a);
    const RunOutcome rb = execute(b);
    if (a.output_path) emit_trace(a, ra.report, out);
    if (b.output_path) emit_trace(b, rb.report, out);

    const auto row = [&](const char* name, const std::string& va, const std::string& vb) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-36s %-16s %-16s\n", name, va.c_str(), vb.c_str());
      out << buf;
    };
    row("Convergence parameter", std::string(to_string(a.train.algorithm)),
        std::string(to_string(b.train.algorithm)));
    row("Mean of Squared Error (MSE)", fmt("%.4e", ra.report.records.back().mse),
        fmt("%.4e", rb.report.records.back().mse));
    row("Correct Classification (%)", fmt("%.2f", ra.final_test_pct),
        fmt("%.2f", rb.final_test_pct));
    row("Peak workspace (scalars)", std::to_string(ra.report.peak_workspace_scalars()),
        std::to_string(rb.report.peak_workspace_scalars()));
    row("Iterations to stable classification", std::to_string(ra.test_iterations_to_stable),
        std::to_string(rb.test_iterations_to_stable));

    const bool stalled = ra.report.stop_reason == StopReason::stalled ||
                         rb.report.stop_reason == StopReason::stalled;
    return stalled ? 2 : 0;
  } catch (const std::exception& e) {
    diagnose(err, e);
    return 1;
  }
}

}  // namespace gnbp

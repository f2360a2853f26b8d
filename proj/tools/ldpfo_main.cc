// Copyright 2026 The ldpfo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ldpfo: command-line front end for the frequency-oracle experiments.
//
//   ldpfo gen-data --zipf 1024,1000000,1.5 --out zipf.csv
//   ldpfo run --zipf 1024,1000000,1.5 --epsilon 1 --methods all --reps 30
//   ldpfo set-query --data counts.csv --rho 10,50,90
//   ldpfo top-k --data counts.csv --k 2,8,32
//   ldpfo bias-var | equiv-n | select-method ...
//
// Exit status: 0 on success, 1 on runtime failure, 2 on usage errors.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ldpfo/ldpfo.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Bad invocation. The message starts with the offending flag.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A failing library call.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string zipf;
  std::string data;
  double epsilon = 1.0;
  std::string oracle = "olh";
  std::string methods = "all";
  std::optional<int> reps;  // unset picks the subcommand default
  uint64_t seed = 0;
  std::string rho;
  int set_samples = 100;
  std::string sets;
  std::string k;
  double alpha = 2.0;
  size_t grid = 0;
  std::string out;
  std::string format = "csv";
  int threads = 0;  // 0 uses every hardware thread
  std::string config;
  std::string consistency = "norm-sub";
  bool quiet = false;
};

void Check(ldpfo_status status) {
  if (status != LDPFO_OK) throw RuntimeError(ldpfo_last_error());
}

// Like Check, but a rejected argument is the user's fault.
void CheckFlag(ldpfo_status status, const std::string& flag) {
  if (status == LDPFO_INVALID_ARGUMENT || status == LDPFO_OUT_OF_RANGE) {
    throw UsageError(flag + ": " + ldpfo_last_error());
  }
  Check(status);
}

struct DatasetDeleter {
  void operator()(ldpfo_dataset* d) const { ldpfo_dataset_free(d); }
};
struct ExperimentDeleter {
  void operator()(ldpfo_experiment* e) const { ldpfo_experiment_free(e); }
};
struct ResultDeleter {
  void operator()(ldpfo_result* r) const { ldpfo_result_free(r); }
};
using DatasetPtr = std::unique_ptr<ldpfo_dataset, DatasetDeleter>;
using ExperimentPtr = std::unique_ptr<ldpfo_experiment, ExperimentDeleter>;
using ResultPtr = std::unique_ptr<ldpfo_result, ResultDeleter>;

std::vector<std::string> SplitCommas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) parts.push_back(part);
  if (!text.empty() && text.back() == ',') parts.emplace_back();
  return parts;
}

double ParseDouble(const std::string& text, const std::string& flag) {
  size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw UsageError(flag + ": '" + text + "' is not a number");
  }
  return value;
}

int64_t ParseInt(const std::string& text, const std::string& flag) {
  size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw UsageError(flag + ": '" + text + "' is not an integer");
  }
  return value;
}

DatasetPtr ZipfDataset(const std::string& spec) {
  const std::vector<std::string> parts = SplitCommas(spec);
  if (parts.size() != 3) {
    throw UsageError("--zipf: expected d,n,s, got '" + spec + "'");
  }
  const int64_t d = ParseInt(parts[0], "--zipf");
  const int64_t n = ParseInt(parts[1], "--zipf");
  const double s = ParseDouble(parts[2], "--zipf");
  ldpfo_dataset* raw = nullptr;
  CheckFlag(ldpfo_dataset_zipf(d, n, s, &raw), "--zipf");
  return DatasetPtr(raw);
}

DatasetPtr LoadDataset(const Options& opt, std::string* label) {
  if (opt.zipf.empty() == opt.data.empty()) {
    throw UsageError("--zipf/--data: give exactly one dataset source");
  }
  if (!opt.zipf.empty()) {
    *label = "zipf(" + opt.zipf + ")";
    return ZipfDataset(opt.zipf);
  }
  *label = opt.data;
  ldpfo_dataset* raw = nullptr;
  Check(ldpfo_dataset_load(opt.data.c_str(), &raw));
  return DatasetPtr(raw);
}

void WriteOutput(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw RuntimeError("cannot write to standard output");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!(out << text) || !out.flush()) {
    throw RuntimeError("cannot write '" + path + "'");
  }
}

void Progress(int done, int total, void* user_data) {
  const char* label = static_cast<const char*>(user_data);
  std::fprintf(stderr, "%s: repetition %d/%d\n", label, done, total);
}

// Where a subcommand takes its queries from.
enum class QueryMode {
  kFull,       // always the full domain
  kRun,        // full domain plus any --rho/--k/--sets
  kSet,        // --rho and/or --sets, at least one
  kTopK,       // --k required
  kSelect,     // at most one of --rho/--k/--sets, else full domain
};

struct Subcommand {
  CLI::App* app = nullptr;
  QueryMode mode = QueryMode::kFull;
  int default_reps = 30;
  const char* name = "";
};

void AddQueries(ldpfo_experiment* e, const Options& opt, QueryMode mode,
                int64_t d) {
  std::vector<double> rhos;
  if (!opt.rho.empty()) {
    for (const std::string& part : SplitCommas(opt.rho)) {
      const double rho = ParseDouble(part, "--rho");
      if (!(rho > 0.0 && rho < 100.0)) {
        throw UsageError("--rho: must lie in (0, 100), got " + part);
      }
      rhos.push_back(rho);
    }
  }
  std::vector<int64_t> ks;
  if (!opt.k.empty()) {
    for (const std::string& part : SplitCommas(opt.k)) {
      const int64_t k = ParseInt(part, "--k");
      if (k < 1) throw UsageError("--k: must be at least 1, got " + part);
      if (k > d) {
        throw UsageError("--k: must not exceed the domain size " +
                         std::to_string(d) + ", got " + part);
      }
      ks.push_back(k);
    }
  }
  const bool has_sets = !opt.sets.empty();
  const size_t given = rhos.size() + ks.size() + (has_sets ? 1 : 0);

  switch (mode) {
    case QueryMode::kFull:
      if (given > 0) {
        throw UsageError("--rho/--k/--sets: not used by this subcommand");
      }
      Check(ldpfo_experiment_add_full_query(e));
      return;
    case QueryMode::kRun:
      Check(ldpfo_experiment_add_full_query(e));
      break;
    case QueryMode::kSet:
      if (!ks.empty()) throw UsageError("--k: use the top-k subcommand");
      if (rhos.empty() && !has_sets) {
        throw UsageError("--rho/--sets: set-query needs at least one");
      }
      break;
    case QueryMode::kTopK:
      if (!rhos.empty() || has_sets) {
        throw UsageError("--rho/--sets: use the set-query subcommand");
      }
      if (ks.empty()) throw UsageError("--k: top-k needs at least one k");
      break;
    case QueryMode::kSelect:
      if (given > 1) {
        throw UsageError("--rho/--k/--sets: select-method takes one query");
      }
      if (given == 0) {
        Check(ldpfo_experiment_add_full_query(e));
        return;
      }
      break;
  }
  for (double rho : rhos) CheckFlag(ldpfo_experiment_add_set_query(e, rho), "--rho");
  for (int64_t k : ks) CheckFlag(ldpfo_experiment_add_topk_query(e, k), "--k");
  if (has_sets) {
    const ldpfo_status s =
        ldpfo_experiment_add_fixed_sets_query(e, opt.sets.c_str());
    if (s == LDPFO_INVALID_ARGUMENT) {
      throw RuntimeError(ldpfo_last_error());  // malformed file contents
    }
    Check(s);
  }
}

ExperimentPtr BuildExperiment(const Options& opt, const Subcommand& sub) {
  if (!(opt.epsilon > 0.0) || !std::isfinite(opt.epsilon)) {
    std::ostringstream msg;
    msg << "--epsilon: must be positive and finite, got " << opt.epsilon;
    throw UsageError(msg.str());
  }
  if (opt.reps && *opt.reps < 1) throw UsageError("--reps: must be at least 1");
  if (opt.set_samples < 1) throw UsageError("--set-samples: must be at least 1");
  if (opt.threads < 0) throw UsageError("--threads: must not be negative");
  if (!(opt.alpha > 0.0)) throw UsageError("--alpha: must be positive");

  std::string label;
  DatasetPtr dataset = LoadDataset(opt, &label);
  const int64_t d = static_cast<int64_t>(ldpfo_dataset_size(dataset.get()));

  ldpfo_experiment* raw = nullptr;
  Check(ldpfo_experiment_create(dataset.get(), &raw));
  ExperimentPtr e(raw);
  Check(ldpfo_experiment_set_label(e.get(), label.c_str()));
  ldpfo_oracle oracle = LDPFO_ORACLE_OLH;
  CheckFlag(ldpfo_oracle_parse(opt.oracle.c_str(), &oracle), "--oracle");
  Check(ldpfo_experiment_set_oracle(e.get(), oracle));
  Check(ldpfo_experiment_set_epsilon(e.get(), opt.epsilon));
  CheckFlag(ldpfo_experiment_set_methods(e.get(), opt.methods.c_str()),
            "--methods");
  Check(ldpfo_experiment_set_repetitions(
      e.get(), opt.reps.value_or(sub.default_reps)));
  Check(ldpfo_experiment_set_seed(e.get(), opt.seed));
  CheckFlag(ldpfo_experiment_set_alpha(e.get(), opt.alpha), "--alpha");
  Check(ldpfo_experiment_set_grid(e.get(), opt.grid));
  const int threads =
      opt.threads > 0
          ? opt.threads
          : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  Check(ldpfo_experiment_set_threads(e.get(), threads));
  Check(ldpfo_experiment_set_set_samples(e.get(), opt.set_samples));
  if (!opt.quiet) {
    Check(ldpfo_experiment_set_progress(e.get(), &Progress,
                                        const_cast<char*>(sub.name)));
  }
  AddQueries(e.get(), opt, sub.mode, d);
  return e;
}

void AddDatasetOptions(CLI::App* app, Options& opt) {
  auto* zipf = app->add_option("--zipf", opt.zipf,
                               "Zipf dataset as d,n,s (domain, users, exponent)");
  app->add_option("--data", opt.data, "Dataset file of label,count lines")
      ->excludes(zipf);
}

void AddExperimentOptions(CLI::App* app, Options& opt, QueryMode mode) {
  AddDatasetOptions(app, opt);
  app->add_option("--epsilon", opt.epsilon, "Privacy budget (> 0)");
  app->add_option("--oracle", opt.oracle, "Frequency oracle: grr or olh");
  app->add_option("--methods", opt.methods,
                  "Comma-separated method list, or 'all'");
  app->add_option("--reps", opt.reps, "Repetitions");
  app->add_option("--seed", opt.seed, "Base random seed");
  app->add_option("--alpha", opt.alpha,
                  "Expected false positives for base-cut (default 2)");
  app->add_option("--grid", opt.grid,
                  "Power posterior grid size (default ceil(sqrt(n)))");
  app->add_option("--out", opt.out, "Output file (default standard output)");
  app->add_option("--format", opt.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--threads", opt.threads,
                  "Worker threads (default: all hardware threads)");
  app->add_option("--config", opt.config,
                  "File of 'key = value' lines mirroring the flags");
  app->add_flag("--quiet", opt.quiet, "No progress output");
  if (mode != QueryMode::kFull) {
    if (mode != QueryMode::kTopK) {
      app->add_option("--rho", opt.rho,
                      "Set size in percent of the domain; comma list allowed");
      app->add_option("--set-samples", opt.set_samples,
                      "Random subsets per repetition (default 100)");
      app->add_option("--sets", opt.sets, "File of set_id,member_index lines");
    }
    if (mode != QueryMode::kSet) {
      app->add_option("--k", opt.k, "Top-k size; comma list allowed");
    }
  }
}

// Reads `key = value` lines. Blank lines and lines starting with '#' are
// skipped. Each entry becomes `--key value` placed ahead of the real
// arguments, so flags given on the command line win.
std::vector<std::string> ConfigArgs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot open '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int line_number = 0;
  auto trim = [](std::string s) {
    const char* space = " \t\r";
    s.erase(0, s.find_first_not_of(space));
    s.erase(s.find_last_not_of(space) + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++line_number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--config: line " + std::to_string(line_number) +
                       ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty() || key == "config") {
      throw UsageError("--config: line " + std::to_string(line_number) +
                       ": bad key");
    }
    if (key == "quiet") {
      if (value == "true" || value == "1") args.push_back("--quiet");
      continue;
    }
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

// argv with the config file entries spliced in after the subcommand name.
std::vector<std::string> ExpandArgs(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string config;
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty() || args.size() < 2) return args;
  std::vector<std::string> extra = ConfigArgs(config);
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

int Dispatch(const Options& opt, const Subcommand& sub) {
  const ldpfo_format format =
      opt.format == "json" ? LDPFO_FORMAT_JSON : LDPFO_FORMAT_CSV;
  ExperimentPtr e = BuildExperiment(opt, sub);
  ldpfo_result* raw = nullptr;
  const std::string name = sub.name;
  if (name == "bias-var") {
    Check(ldpfo_experiment_bias_variance(e.get(), &raw));
  } else if (name == "equiv-n") {
    Check(ldpfo_experiment_equivalent_n(e.get(), &raw));
  } else if (name == "select-method") {
    if (opt.consistency != "norm-sub" && opt.consistency != "power-ns") {
      throw UsageError("--consistency: must be norm-sub or power-ns");
    }
    Check(ldpfo_experiment_select_method(e.get(), opt.consistency.c_str(),
                                         &raw));
  } else {
    Check(ldpfo_experiment_run(e.get(), &raw));
  }
  ResultPtr result(raw);
  char* text = nullptr;
  Check(ldpfo_result_serialize(result.get(), format, &text));
  std::string body(text);
  ldpfo_string_free(text);
  WriteOutput(body, opt.out);
  if (const char* selected = ldpfo_result_selected_method(result.get())) {
    std::fprintf(stderr, "selected method: %s\n", selected);
  }
  return 0;
}

int GenerateData(const Options& opt) {
  if (opt.zipf.empty()) throw UsageError("--zipf: required for gen-data");
  DatasetPtr dataset = ZipfDataset(opt.zipf);
  char* text = nullptr;
  Check(ldpfo_dataset_format(dataset.get(), &text));
  std::string body(text);
  ldpfo_string_free(text);
  WriteOutput(body, opt.out);
  return 0;
}

int Main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Locally differentially private frequency estimation with "
               "consistency post-processing"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", ldpfo_version());

  CLI::App* gen = app.add_subcommand("gen-data", "Write a Zipf dataset file");
  gen->add_option("--zipf", opt.zipf, "d,n,s")->required();
  gen->add_option("--out", opt.out, "Output file (default standard output)");

  std::vector<Subcommand> subs = {
      {app.add_subcommand("run", "Full-domain MSE (plus optional queries)"),
       QueryMode::kRun, 30, "run"},
      {app.add_subcommand("bias-var", "Per-value bias and variance"),
       QueryMode::kFull, 500, "bias-var"},
      {app.add_subcommand("set-query", "Set-value query MSE"), QueryMode::kSet,
       30, "set-query"},
      {app.add_subcommand("top-k", "MSE over the top-k true values"),
       QueryMode::kTopK, 30, "top-k"},
      {app.add_subcommand("equiv-n", "Equivalent population size n'"),
       QueryMode::kFull, 30, "equiv-n"},
      {app.add_subcommand("select-method",
                          "Pick a method using a synthetic population"),
       QueryMode::kSelect, 30, "select-method"},
  };
  for (Subcommand& sub : subs) AddExperimentOptions(sub.app, opt, sub.mode);
  subs.back().app->add_option("--consistency", opt.consistency,
                              "Synthetic fit: norm-sub or power-ns");

  const std::vector<std::string> args = ExpandArgs(argc, argv);
  std::vector<const char*> cargs;
  for (const std::string& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n"
              << "run with --help for usage\n";
    return kExitUsage;
  }

  if (gen->parsed()) return GenerateData(opt);
  for (const Subcommand& sub : subs) {
    if (sub.app->parsed()) return Dispatch(opt, sub);
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RuntimeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

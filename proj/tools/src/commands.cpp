#include "seedscope_cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include "seedscope/alpha_estimator.hpp"
#include "seedscope/bounds.hpp"
#include "seedscope/ecdf.hpp"
#include "seedscope/model_pool.hpp"
#include "seedscope/perf_metrics.hpp"
#include "seedscope/synth.hpp"
#include "seedscope/trimming.hpp"
#include "seedscope/version.hpp"

namespace seedscope::cli {
namespace fs = std::filesystem;
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(std::string text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw UsageError(what + ": '" + text + "' is not a number");
  return value;
}

/// "lo:hi:step" or a comma list.
std::vector<double> parse_alpha_grid(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ':')) parts.push_back(trim(part));
    if (parts.size() != 3) throw UsageError("--alpha-grid range must be lo:hi:step");
    const double lo = parse_double(parts[0], "--alpha-grid");
    const double hi = parse_double(parts[1], "--alpha-grid");
    const double step = parse_double(parts[2], "--alpha-grid");
    if (!(step > 0.0) || !(hi >= lo)) throw UsageError("--alpha-grid needs lo <= hi and step > 0");
    const double steps = std::round((hi - lo) / step);
    if (std::abs(lo + steps * step - hi) > 1e-9 * std::max(1.0, std::abs(hi))) {
      throw UsageError("--alpha-grid step does not divide hi - lo");
    }
    return alpha_grid_range(lo, hi, static_cast<std::size_t>(steps) + 1);
  }
  std::vector<double> grid;
  for (const auto& item : split_list(text)) grid.push_back(parse_double(item, "--alpha-grid"));
  if (grid.empty()) throw UsageError("--alpha-grid is empty");
  return grid;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  for (const auto& item : split_list(text)) {
    std::size_t value = 0;
    const char* end = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(item.data(), end, value);
    if (ec != std::errc() || ptr != end || value == 0) {
      throw UsageError("--sizes: '" + item + "' is not a positive integer");
    }
    sizes.push_back(value);
  }
  if (sizes.empty()) throw UsageError("--sizes is empty");
  return sizes;
}

SplitMode parse_split(const std::string& text) {
  const auto mode = parse_split_mode(text);
  if (!mode) throw UsageError("--split must be disjoint, bootstrap or shared");
  return *mode;
}

EvaluationGrid parse_grid(const std::string& text) {
  if (text == "pooled") return EvaluationGrid::pooled_points;
  if (text == "pooled-with-left-limits") return EvaluationGrid::pooled_with_left_limits;
  throw UsageError("--grid must be pooled or pooled-with-left-limits");
}

std::string format_double(double value) {
  char buffer[32];
  const int written = std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return std::string(buffer, static_cast<std::size_t>(written));
}

struct PoolOptions {
  std::string path;
  std::string labels;
  double s_max = 0.0;
  CLI::Option* s_max_option = nullptr;

  void add(CLI::App* app) {
    app->add_option("--pool", path, "Pool file (.csv, or .jsonl with a labels file)")->required();
    app->add_option("--labels", labels, "Labels file for a JSONL pool (default: labels.json beside it)");
    s_max_option = app->add_option("--s-max", s_max, "Clip every gap to [-s_max, s_max]")
                       ->check(CLI::PositiveNumber);
  }

  ModelPool load(RunManifest& manifest) const {
    const fs::path pool_path(path);
    const PoolFormat format = format_from_path(pool_path);
    std::optional<fs::path> labels_path;
    if (!labels.empty()) labels_path = fs::path(labels);
    ModelPool pool = load_pool(pool_path, format, labels_path);
    manifest.add_input(pool_path);
    if (format == PoolFormat::jsonl) {
      manifest.add_input(labels_path ? *labels_path : pool_path.parent_path() / "labels.json");
    }
    if (s_max_option->count() > 0) pool = clip_pool(pool, s_max);
    manifest.parameters["pool"] = path;
    manifest.parameters["s_max"] = pool.support_halfwidth();
    manifest.parameters["clipped"] = pool.clipped();
    return pool;
  }
};

struct ReferenceOptions {
  std::string ids;
  std::string file;

  void add(CLI::App* app) {
    auto* by_id = app->add_option("--reference-ids", ids, "Comma-separated reference model ids");
    auto* by_file =
        app->add_option("--reference-file", file, "File with one reference id per line");
    by_id->excludes(by_file);
  }

  /// Defaults to every pool model except `exclude`.
  std::vector<std::string> resolve(const ModelPool& pool, const std::string& exclude,
                                   RunManifest& manifest) const {
    std::vector<std::string> out;
    if (!ids.empty()) {
      out = split_list(ids);
    } else if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw DataError("cannot open reference file '" + file + "'");
      std::string line;
      while (std::getline(in, line)) {
        line = trim(line.substr(0, line.find('#')));
        if (!line.empty()) out.push_back(line);
      }
      manifest.add_input(file);
    } else {
      for (const auto& id : pool.ids()) {
        if (id != exclude) out.push_back(id);
      }
    }
    if (out.empty()) throw UsageError("the reference set is empty");
    for (const auto& id : out) pool.at(id);
    manifest.parameters["reference_ids"] = out;
    return out;
  }
};

struct AlphaOptions {
  std::string grid = "0:0.25:0.005";
  std::size_t bootstrap = 100;
  double eps_a = 0.05;
  std::uint64_t seed = 0;
  std::size_t resample_size = 0;
  std::string split = "bootstrap";
  std::string evaluation = "pooled";
  bool allow_candidate = false;

  void add(CLI::App* app) {
    app->add_option("--alpha-grid", grid, "Trimming levels: lo:hi:step or a comma list")
        ->capture_default_str();
    app->add_option("--bootstrap", bootstrap, "Bootstrap replicates B")->capture_default_str();
    app->add_option("--eps-a", eps_a, "Test level epsilon_a")->capture_default_str();
    app->add_option("--seed", seed, "RNG seed")->capture_default_str();
    app->add_option("--resample-size", resample_size,
                    "Indices drawn per side and replicate (0: half the test set)")
        ->capture_default_str();
    app->add_option("--split", split, "disjoint, bootstrap or shared")->capture_default_str();
    app->add_option("--grid", evaluation, "pooled or pooled-with-left-limits")
        ->capture_default_str();
    app->add_flag("--allow-candidate-in-reference", allow_candidate,
                  "Permit the candidate to be a reference member");
  }

  AlphaConfig config(RunManifest& manifest) const {
    AlphaConfig cfg;
    cfg.alpha_grid = parse_alpha_grid(grid);
    cfg.n_bootstrap = bootstrap;
    cfg.epsilon_a = eps_a;
    cfg.rng_seed = seed;
    cfg.resample_size = resample_size;
    cfg.split = parse_split(split);
    cfg.grid = parse_grid(evaluation);
    cfg.allow_candidate_in_reference = allow_candidate;
    cfg.validate();
    manifest.parameters["alpha"] = to_json(cfg);
    return cfg;
  }
};

struct Outputs {
  Json result;
  std::vector<std::pair<std::string, std::string>> files;
  int exit_code = kOk;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

int finish(const RunManifest& manifest, Outputs outputs, const std::string& out_dir,
           std::ostream& out) {
  Json doc;
  doc["manifest"] = manifest.to_json();
  doc["result"] = std::move(outputs.result);
  const std::string text = dump_json(doc);
  out << text;
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create '" + out_dir + "': " + ec.message());
    write_text(dir / (manifest.command + ".json"), text);
    write_text(dir / "manifest.json", dump_json(manifest.to_json()));
    for (const auto& [name, content] : outputs.files) write_text(dir / name, content);
  }
  return outputs.exit_code;
}

// ---------------------------------------------------------------- ks

struct KsOptions {
  PoolOptions pool;
  ReferenceOptions reference;
  std::string candidate;
  double eps_a = 0.05;
  double alpha = 0.0;
  std::string split = "bootstrap";
  std::uint64_t seed = 0;
  std::size_t resample_size = 0;
  std::string evaluation = "pooled";
  bool allow_candidate = false;
  std::string out_dir;
};

CLI::App* add_ks(CLI::App& app, KsOptions& o) {
  auto* sub = app.add_subcommand("ks", "Robust two-sample KS test of one candidate");
  o.pool.add(sub);
  o.reference.add(sub);
  sub->add_option("--candidate", o.candidate, "Candidate model id")->required();
  sub->add_option("--eps-a", o.eps_a, "Test level epsilon_a")->capture_default_str();
  sub->add_option("--alpha", o.alpha, "Trimming level")->capture_default_str();
  sub->add_option("--split", o.split, "disjoint, bootstrap or shared")->capture_default_str();
  sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  sub->add_option("--resample-size", o.resample_size, "Indices per side (0: half the test set)")
      ->capture_default_str();
  sub->add_option("--grid", o.evaluation, "pooled or pooled-with-left-limits")
      ->capture_default_str();
  sub->add_flag("--allow-candidate-in-reference", o.allow_candidate,
                "Permit the candidate to be a reference member");
  sub->add_option("--out", o.out_dir, "Directory for JSON and CSV outputs");
  return sub;
}

int run_ks(const KsOptions& o, RunManifest& manifest, std::ostream& out) {
  const ModelPool pool = o.pool.load(manifest);
  const ScoreVector& candidate = pool.at(o.candidate);
  const auto reference_ids = o.reference.resolve(pool, o.candidate, manifest);
  Json warnings = Json::array();
  if (std::find(reference_ids.begin(), reference_ids.end(), o.candidate) != reference_ids.end()) {
    if (!o.allow_candidate) throw UsageError("candidate '" + o.candidate + "' is a reference member");
    warnings.push_back("candidate is also a reference member");
  }
  const SplitMode mode = parse_split(o.split);
  const EvaluationGrid grid = parse_grid(o.evaluation);
  manifest.parameters["candidate"] = o.candidate;
  manifest.parameters["eps_a"] = o.eps_a;
  manifest.parameters["alpha"] = o.alpha;
  manifest.parameters["split"] = std::string(to_string(mode));
  manifest.parameters["seed"] = o.seed;
  manifest.parameters["resample_size"] = o.resample_size;
  manifest.parameters["evaluation_grid"] = std::string(to_string(grid));

  const SplitPlan plan = make_split(pool.n_test(), mode, o.seed, 0, o.resample_size);
  const Ecdf reference = reference_of(pool, reference_ids, plan.reference_indices);
  const Ecdf sample = ecdf_of(gather(candidate.gaps, plan.candidate_indices));
  const std::size_t n = plan.candidate_indices.size();
  const RobustTestResult test = robust_test(sample, reference, o.alpha, o.eps_a, n, grid);
  if (test.degenerate_reference) warnings.push_back("reference collapsed to a single value");

  Outputs outputs;
  outputs.result = to_json(test);
  outputs.result["candidate"] = o.candidate;
  outputs.result["N"] = n;
  outputs.result["delta_a"] = bounds::two_sample_threshold(n, o.eps_a);
  outputs.result["reference_values"] = reference.sample_count();
  outputs.result["warnings"] = std::move(warnings);
  outputs.exit_code = test.accept ? kOk : kReject;
  if (!o.out_dir.empty()) {
    std::ostringstream envelope, ref_csv, cand_csv;
    write_envelope_csv(build_envelope(sample, interpolate(reference), o.alpha, grid), envelope);
    write_cdf_csv(reference, ref_csv);
    write_cdf_csv(sample, cand_csv);
    outputs.files = {{"envelope.csv", envelope.str()},
                     {"reference_cdf.csv", ref_csv.str()},
                     {"candidate_cdf.csv", cand_csv.str()}};
  }
  return finish(manifest, std::move(outputs), o.out_dir, out);
}

// ---------------------------------------------------------------- alpha

struct AlphaCommandOptions {
  PoolOptions pool;
  ReferenceOptions reference;
  AlphaOptions alpha;
  std::string candidate;
  bool pairwise = false;
  bool leave_one_out = false;
  std::string ids;
  std::string out_dir;
};

CLI::App* add_alpha(CLI::App& app, AlphaCommandOptions& o) {
  auto* sub = app.add_subcommand("alpha", "Bootstrap estimate of the trimming level alpha-hat");
  o.pool.add(sub);
  o.reference.add(sub);
  o.alpha.add(sub);
  sub->add_option("--candidate", o.candidate, "Candidate model id");
  sub->add_flag("--pairwise", o.pairwise, "Matrix with reference {i} and candidate j");
  sub->add_flag("--leave-one-out", o.leave_one_out, "Each model against all the others");
  sub->add_option("--ids", o.ids, "Models for --pairwise / --leave-one-out (default: all)");
  sub->add_option("--out", o.out_dir, "Directory for JSON and CSV outputs");
  return sub;
}

std::string replicate_csv(const std::vector<AlphaEstimate>& estimates) {
  std::ostringstream csv;
  csv << "candidate,replicate,alpha,accepted,statistic\n";
  for (const auto& e : estimates) {
    for (std::size_t b = 0; b < e.per_replicate.size(); ++b) {
      const auto& r = e.per_replicate[b];
      csv << e.candidate << ',' << b << ',' << format_double(r.alpha) << ','
          << (r.accepted ? 1 : 0) << ',' << format_double(r.statistic) << '\n';
    }
  }
  return csv.str();
}

int run_alpha(const AlphaCommandOptions& o, RunManifest& manifest, std::ostream& out) {
  const int modes = (o.candidate.empty() ? 0 : 1) + (o.pairwise ? 1 : 0) + (o.leave_one_out ? 1 : 0);
  if (modes != 1) throw UsageError("give exactly one of --candidate, --pairwise, --leave-one-out");
  const ModelPool pool = o.pool.load(manifest);
  const AlphaConfig cfg = o.alpha.config(manifest);
  Outputs outputs;

  if (!o.candidate.empty()) {
    pool.at(o.candidate);
    const auto reference_ids = o.reference.resolve(pool, o.candidate, manifest);
    manifest.parameters["mode"] = "single";
    manifest.parameters["candidate"] = o.candidate;
    const AlphaEstimate estimate = estimate_alpha(pool, reference_ids, o.candidate, cfg);
    outputs.result = to_json(estimate, cfg);
    if (!o.out_dir.empty()) outputs.files = {{"alpha_replicates.csv", replicate_csv({estimate})}};
    return finish(manifest, std::move(outputs), o.out_dir, out);
  }

  const std::vector<std::string> ids = o.ids.empty() ? pool.ids() : split_list(o.ids);
  manifest.parameters["ids"] = ids;
  if (o.pairwise) {
    manifest.parameters["mode"] = "pairwise";
    const AlphaMatrix matrix = pairwise_alpha(pool, ids, cfg);
    outputs.result = to_json(matrix);
    outputs.result["B"] = cfg.n_bootstrap;
    outputs.result["grid"] = cfg.alpha_grid;
    if (!o.out_dir.empty()) {
      std::ostringstream csv;
      csv << "reference,candidate,alpha_hat,saturated\n";
      for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j < ids.size(); ++j) {
          csv << ids[i] << ',' << ids[j] << ',' << format_double(matrix.at(i, j)) << ','
              << matrix.saturated[i * ids.size() + j] << '\n';
        }
      }
      outputs.files = {{"alpha_matrix.csv", csv.str()}};
    }
  } else {
    manifest.parameters["mode"] = "leave-one-out";
    const auto estimates = leave_one_out_alpha(pool, ids, cfg);
    outputs.result = Json::array();
    for (const auto& e : estimates) outputs.result.push_back(to_json(e, cfg));
    if (!o.out_dir.empty()) outputs.files = {{"alpha_replicates.csv", replicate_csv(estimates)}};
  }
  return finish(manifest, std::move(outputs), o.out_dir, out);
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
  std::string pool_path;
  std::string labels;
  std::string preset;
  std::uint64_t synth_seed = 0;
  std::string sizes = "3,5,10,30";
  std::size_t reps = 100;
  AlphaOptions alpha;
  bool with_replacement = false;
  std::size_t bins = kDefaultEceBins;
  double alpha_cut = 0.05;
  std::string out_dir;
};

CLI::App* add_sweep(CLI::App& app, SweepOptions& o) {
  auto* sub = app.add_subcommand("sweep", "Ensemble-size sweep against a half-pool reference");
  auto* pool = sub->add_option("--pool", o.pool_path, "Pool file");
  sub->add_option("--labels", o.labels, "Labels file for a JSONL pool");
  auto* preset = sub->add_option("--preset", o.preset, "Generate the pool from a synth preset");
  pool->excludes(preset);
  sub->add_option("--synth-seed", o.synth_seed, "Seed for --preset")->capture_default_str();
  sub->add_option("--sizes", o.sizes, "Ensemble sizes")->capture_default_str();
  sub->add_option("--reps", o.reps, "Repetitions per size")->capture_default_str();
  o.alpha.add(sub);
  sub->add_flag("--with-replacement", o.with_replacement, "Draw members with replacement");
  sub->add_option("--bins", o.bins, "ECE bins R")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--alpha-cut", o.alpha_cut, "Cut for the alpha-hat percentage column")
      ->capture_default_str();
  sub->add_option("--out", o.out_dir, "Directory for JSON and CSV outputs");
  return sub;
}

int run_sweep(const SweepOptions& o, RunManifest& manifest, std::ostream& out) {
  std::optional<ModelPool> pool;
  if (!o.pool_path.empty()) {
    PoolOptions po;
    po.path = o.pool_path;
    po.labels = o.labels;
    CLI::App dummy;
    po.s_max_option = dummy.add_option("--s-max", po.s_max);
    pool = po.load(manifest);
  } else {
    const std::string name = o.preset.empty() ? "paper-cnn-analogue" : o.preset;
    auto spec = synth_preset(name);
    if (!spec) throw UsageError("unknown preset '" + name + "'");
    spec->rng_seed = o.synth_seed;
    manifest.parameters["preset"] = name;
    manifest.parameters["synth"] = to_json(*spec);
    pool = generate_pool(*spec);
  }
  SweepConfig cfg;
  cfg.sizes = parse_sizes(o.sizes);
  cfg.repetitions = o.reps;
  cfg.alpha = o.alpha.config(manifest);
  cfg.seed = o.alpha.seed;
  cfg.members_with_replacement = o.with_replacement;
  cfg.ece_bins = o.bins;
  manifest.parameters["sizes"] = cfg.sizes;
  manifest.parameters["reps"] = cfg.repetitions;
  manifest.parameters["members_with_replacement"] = cfg.members_with_replacement;
  manifest.parameters["bins"] = cfg.ece_bins;
  manifest.parameters["alpha_cut"] = o.alpha_cut;

  const SweepResult result = ensemble_sweep(*pool, cfg);
  Outputs outputs;
  outputs.result = to_json(result, o.alpha_cut);
  if (!o.out_dir.empty()) {
    std::ostringstream csv;
    write_sweep_csv(result, csv);
    outputs.files = {{"sweep.csv", csv.str()}};
  }
  return finish(manifest, std::move(outputs), o.out_dir, out);
}

// ---------------------------------------------------------------- metrics

struct MetricsOptions {
  PoolOptions pool;
  std::string ensemble_ids;
  std::size_t bins = kDefaultEceBins;
  bool calibration = false;
  std::string out_dir;
};

CLI::App* add_metrics(CLI::App& app, MetricsOptions& o) {
  auto* sub = app.add_subcommand("metrics", "Accuracy, churn and ECE per model");
  o.pool.add(sub);
  sub->add_option("--ensemble-ids", o.ensemble_ids, "Ensemble members (default: all models)");
  sub->add_option("--bins", o.bins, "ECE bins R")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_flag("--calibration", o.calibration, "Include per-bin statistics");
  sub->add_option("--out", o.out_dir, "Directory for JSON and CSV outputs");
  return sub;
}

int run_metrics(const MetricsOptions& o, RunManifest& manifest, std::ostream& out) {
  const ModelPool pool = o.pool.load(manifest);
  const std::vector<std::string> ensemble = o.ensemble_ids.empty() ? pool.ids() : split_list(o.ensemble_ids);
  manifest.parameters["ensemble_ids"] = ensemble;
  manifest.parameters["bins"] = o.bins;
  manifest.parameters["calibration"] = o.calibration;

  const auto records = metrics_report(pool, ensemble, o.bins);
  const ScoreVector ensemble_model = ensemble_gaps(pool, ensemble);
  Outputs outputs;
  Json models = Json::array();
  for (const auto& record : records) {
    Json j = to_json(record);
    if (o.calibration) {
      Json bins = Json::array();
      for (const auto& bin : calibration_bins(pool.at(record.model_id).gaps, pool.labels(), o.bins)) {
        bins.push_back(to_json(bin));
      }
      j["calibration"] = std::move(bins);
    }
    models.push_back(std::move(j));
  }
  outputs.result["n_test"] = pool.n_test();
  outputs.result["bins"] = o.bins;
  outputs.result["models"] = std::move(models);
  outputs.result["ensemble"] = {{"members", ensemble},
                                {"accuracy", accuracy(ensemble_model, pool.labels())},
                                {"ece", ece(ensemble_model, pool.labels(), o.bins)}};
  if (!o.out_dir.empty()) {
    std::ostringstream csv;
    csv << "model_id,accuracy,churn_vs_ensemble,churn_vs_ensemble_fraction,avg_pairwise_churn,"
           "avg_pairwise_churn_fraction,ece\n";
    for (const auto& r : records) {
      csv << r.model_id << ',' << format_double(r.accuracy) << ',' << r.churn_vs_ensemble << ','
          << format_double(r.churn_vs_ensemble_fraction) << ','
          << format_double(r.avg_pairwise_churn) << ','
          << format_double(r.avg_pairwise_churn_fraction) << ',' << format_double(r.ece) << '\n';
    }
    outputs.files = {{"metrics.csv", csv.str()}};
  }
  return finish(manifest, std::move(outputs), o.out_dir, out);
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::string preset = "paper-cnn-analogue";
  std::string family;
  std::string format = "csv";
  std::string out_dir;
  SynthSpec overrides;
  std::vector<std::pair<CLI::Option*, std::function<void(SynthSpec&)>>> setters;
};

CLI::App* add_synth(CLI::App& app, SynthOptions& o) {
  auto* sub = app.add_subcommand("synth", "Generate a synthetic pool");
  sub->add_option("--preset", o.preset, "paper-cnn-analogue, identical or logistic")
      ->capture_default_str();
  sub->add_option("--family", o.family, "gaussian-mixture or logistic-teacher");
  sub->add_option("--format", o.format, "csv or jsonl")->capture_default_str();
  sub->add_option("--out", o.out_dir, "Output directory")->required();

  auto bind = [&](const char* flag, auto member, const char* help) {
    auto* option = sub->add_option(flag, o.overrides.*member, help);
    o.setters.emplace_back(option, [&o, member](SynthSpec& s) { s.*member = o.overrides.*member; });
  };
  bind("--n-models", &SynthSpec::n_models, "Number of models");
  bind("--n-test", &SynthSpec::n_test, "Number of test points");
  bind("--seed", &SynthSpec::rng_seed, "RNG seed");
  bind("--s-max", &SynthSpec::s_max, "Clip level");
  bind("--positive-fraction", &SynthSpec::positive_fraction, "P(y = +1)");
  bind("--separation", &SynthSpec::separation, "Class separation");
  bind("--spread", &SynthSpec::spread, "Within-class spread");
  bind("--label-noise", &SynthSpec::label_noise, "Label flip probability");
  bind("--features", &SynthSpec::features, "Teacher dimension");
  bind("--teacher-scale", &SynthSpec::teacher_scale, "Teacher weight norm");
  bind("--weight-jitter", &SynthSpec::weight_jitter, "Per-model teacher perturbation");
  bind("--mean-jitter", &SynthSpec::mean_jitter, "Per-model relative separation jitter");
  bind("--scale-jitter", &SynthSpec::scale_jitter, "Per-model log-scale jitter");
  bind("--shift-jitter", &SynthSpec::shift_jitter, "Per-model additive shift jitter");
  bind("--point-jitter", &SynthSpec::point_jitter, "Per-point, per-model noise");
  return sub;
}

int run_synth(const SynthOptions& o, RunManifest& manifest, std::ostream& out) {
  auto spec = synth_preset(o.preset);
  if (!spec) throw UsageError("unknown preset '" + o.preset + "'");
  if (!o.family.empty()) {
    const auto family = parse_family(o.family);
    if (!family) throw UsageError("--family must be gaussian-mixture or logistic-teacher");
    spec->family = *family;
  }
  for (const auto& [option, apply] : o.setters) {
    if (option->count() > 0) apply(*spec);
  }
  if (o.format != "csv" && o.format != "jsonl") throw UsageError("--format must be csv or jsonl");
  manifest.parameters["preset"] = o.preset;
  manifest.parameters["spec"] = to_json(*spec);
  manifest.parameters["format"] = o.format;

  const ModelPool pool = generate_pool(*spec);
  Outputs outputs;
  outputs.result["spec"] = to_json(*spec);
  outputs.result["pool"] = Json::parse(pool_manifest_json(pool));
  if (o.format == "csv") {
    std::ostringstream csv;
    write_pool_csv(pool, csv);
    outputs.files = {{"pool.csv", csv.str()}};
    outputs.result["files"] = {"pool.csv"};
  } else {
    std::ostringstream models, labels;
    write_pool_jsonl(pool, models, labels);
    outputs.files = {{"pool.jsonl", models.str()}, {"labels.json", labels.str()}};
    outputs.result["files"] = {"pool.jsonl", "labels.json"};
  }
  return finish(manifest, std::move(outputs), o.out_dir, out);
}

// ---------------------------------------------------------------- bounds

struct BoundsOptions {
  bool two_sample = false;
  bool one_sample = false;
  bool reference = false;
  bool confidence = false;
  bool l1 = false;
  std::size_t n = 0;
  std::size_t m = 1;
  double eps = 0.05;
  double delta_a = 0.0;
  double delta_b = 0.0;
  double delta_c = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double support_length = 2.0 * ModelPool::kDefaultSupportHalfwidth;
  std::string out_dir;
};

CLI::App* add_bounds(CLI::App& app, BoundsOptions& o) {
  auto* sub = app.add_subcommand("bounds", "Closed-form DKW thresholds and bounds");
  sub->add_flag("--two-sample", o.two_sample, "delta_a = sqrt(ln(C/eps)/N)");
  sub->add_flag("--one-sample", o.one_sample, "sqrt(ln(2/eps)/(2N))");
  sub->add_flag("--reference", o.reference, "eps_b = 2 M exp(-2 N delta_b^2)");
  sub->add_flag("--confidence", o.confidence, "1 - eps_b - 2 exp(-N delta_a^2)");
  sub->add_flag("--l1", o.l1, "nu = alpha + |S| (gamma + delta_b + delta_c)");
  sub->add_option("-N,--n-samples", o.n, "Sample size N")->required();
  sub->add_option("-M,--n-models", o.m, "Reference models M")->capture_default_str();
  sub->add_option("--eps", o.eps, "Probability level")->capture_default_str();
  sub->add_option("--delta-a", o.delta_a, "delta_a");
  sub->add_option("--delta-b", o.delta_b, "delta_b");
  sub->add_option("--delta-c", o.delta_c, "delta_c");
  sub->add_option("--alpha", o.alpha, "Trimming level");
  sub->add_option("--gamma", o.gamma, "Observed trimmed distance");
  sub->add_option("--support-length", o.support_length, "|S|")->capture_default_str();
  sub->add_option("--out", o.out_dir, "Directory for the JSON output");
  return sub;
}

Json probability_json(const bounds::Probability& p) {
  return {{"raw", p.raw}, {"reported", p.reported}};
}

int run_bounds(const BoundsOptions& o, RunManifest& manifest, std::ostream& out) {
  if (!(o.two_sample || o.one_sample || o.reference || o.confidence || o.l1)) {
    throw UsageError("choose at least one of --two-sample, --one-sample, --reference, "
                     "--confidence, --l1");
  }
  manifest.parameters = {{"N", o.n},          {"M", o.m},
                         {"eps", o.eps},      {"delta_a", o.delta_a},
                         {"delta_b", o.delta_b}, {"delta_c", o.delta_c},
                         {"alpha", o.alpha},  {"gamma", o.gamma},
                         {"support_length", o.support_length}};
  Outputs outputs;
  outputs.result = Json::object();
  if (o.two_sample) {
    outputs.result["two_sample"] = {{"N", o.n},
                                    {"eps", o.eps},
                                    {"C", bounds::two_sample_constant(o.n)},
                                    {"delta_a", bounds::two_sample_threshold(o.n, o.eps)}};
  }
  if (o.one_sample) {
    outputs.result["one_sample"] = {{"N", o.n},
                                    {"eps", o.eps},
                                    {"radius", bounds::one_sample_radius(o.n, o.eps)}};
  }
  if (o.reference) {
    outputs.result["reference"] = {
        {"M", o.m},
        {"N", o.n},
        {"delta_b", o.delta_b},
        {"eps_b", probability_json(bounds::reference_deviation_epsilon(o.m, o.n, o.delta_b))}};
  }
  if (o.confidence) {
    outputs.result["confidence"] = {
        {"M", o.m},
        {"N", o.n},
        {"delta_a", o.delta_a},
        {"delta_b", o.delta_b},
        {"probability",
         probability_json(bounds::candidate_deviation_confidence(o.m, o.n, o.delta_a, o.delta_b))}};
  }
  if (o.l1) {
    const bounds::L1Bound bound = bounds::l1_bound(
        {o.alpha, o.gamma, o.delta_b, o.delta_c, o.support_length}, o.n, o.m);
    outputs.result["l1"] = {{"nu", bound.nu}, {"failure", probability_json(bound.failure)}};
  }
  return finish(manifest, std::move(outputs), o.out_dir, out);
}

bool is_usage_kind(PoolError::Kind kind) {
  return kind == PoolError::Kind::unknown_id || kind == PoolError::Kind::invalid_argument;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Run-to-run variability of trained classifiers via trimmed KS tests", "seedscope"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  KsOptions ks;
  AlphaCommandOptions alpha;
  SweepOptions sweep;
  MetricsOptions metrics;
  SynthOptions synth;
  BoundsOptions bounds_options;
  std::string manifest_path;

  auto* ks_cmd = add_ks(app, ks);
  auto* alpha_cmd = add_alpha(app, alpha);
  auto* sweep_cmd = add_sweep(app, sweep);
  auto* metrics_cmd = add_metrics(app, metrics);
  auto* synth_cmd = add_synth(app, synth);
  auto* bounds_cmd = add_bounds(app, bounds_options);
  auto* replay_cmd = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_path, "manifest.json or any command output")
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (e.get_name() == "CallForVersion" ? std::string(kVersion) + "\n" : app.help());
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  RunManifest manifest;
  manifest.argv = args;
  try {
    if (replay_cmd->parsed()) {
      const auto replay_args = manifest_argv(manifest_path);
      if (!replay_args.empty() && replay_args.front() == "replay") {
        throw UsageError("a manifest cannot replay another replay");
      }
      return run(replay_args, out, err);
    }
    if (ks_cmd->parsed()) {
      manifest.command = "ks";
      return run_ks(ks, manifest, out);
    }
    if (alpha_cmd->parsed()) {
      manifest.command = "alpha";
      return run_alpha(alpha, manifest, out);
    }
    if (sweep_cmd->parsed()) {
      manifest.command = "sweep";
      return run_sweep(sweep, manifest, out);
    }
    if (metrics_cmd->parsed()) {
      manifest.command = "metrics";
      return run_metrics(metrics, manifest, out);
    }
    if (synth_cmd->parsed()) {
      manifest.command = "synth";
      return run_synth(synth, manifest, out);
    }
    if (bounds_cmd->parsed()) {
      manifest.command = "bounds";
      return run_bounds(bounds_options, manifest, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PoolError& e) {
    err << "error: " << e.what() << "\n";
    return is_usage_kind(e.kind()) ? kUsage : kData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  err << "error: no command given\n";
  return kUsage;
}

}  // namespace seedscope::cli

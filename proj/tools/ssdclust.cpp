// ssdclust: distance computation, spectral clustering/segmentation and
// benchmarking for variable-length multivariate sequences.
//
// Every run writes machine-readable outputs plus a metadata.json with the
// parameters, derived seeds and operation counters needed to reproduce it.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssd/ssd.hpp"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct SourceOptions {
  std::string input;
  bool mohmm = false;
  bool surrogate = false;
  int n = 100;
  int mean_length = 200;
  int per_class = 10;
  int length = 60;
};

void add_source_flags(CLI::App* cmd, SourceOptions& src) {
  cmd->add_option("--input", src.input, "sequence CSV (seq_id,t[,label],f0,...)");
  cmd->add_flag("--mohmm", src.mohmm, "generate the two-class benchmark corpus");
  cmd->add_flag("--surrogate", src.surrogate,
                "generate the six-class control-chart corpus");
  cmd->add_option("--n", src.n, "sequence count for --mohmm")->check(CLI::PositiveNumber);
  cmd->add_option("--mean-length", src.mean_length, "mean sequence length for --mohmm")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--per-class", src.per_class, "sequences per class for --surrogate")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--length", src.length, "sequence length for --surrogate")
      ->check(CLI::PositiveNumber);
}

ssd::LabeledDataset make_dataset(const SourceOptions& src, std::uint64_t data_seed) {
  const int picked = (!src.input.empty() ? 1 : 0) + (src.mohmm ? 1 : 0) +
                     (src.surrogate ? 1 : 0);
  ssd::require(picked == 1, "pick exactly one of --input, --mohmm, --surrogate");
  if (!src.input.empty()) return ssd::load_sequences(src.input);
  if (src.mohmm) {
    ssd::MohmmConfig config;
    config.num_sequences = src.n;
    config.mean_length = src.mean_length;
    config.seed = data_seed;
    return ssd::generate_mohmm(config);
  }
  ssd::ControlChartConfig config;
  config.per_class = src.per_class;
  config.length = static_cast<Eigen::Index>(src.length);
  config.seed = data_seed;
  return ssd::generate_control_chart(config);
}

json source_json(const SourceOptions& src) {
  if (!src.input.empty()) return {{"kind", "file"}, {"path", src.input}};
  if (src.mohmm)
    return {{"kind", "mohmm"}, {"n", src.n}, {"mean_length", src.mean_length}};
  return {{"kind", "surrogate"}, {"per_class", src.per_class}, {"length", src.length}};
}

struct MethodOptions {
  std::string method = "ssd";
  int states = 4;        // global model size for ssd
  int model_states = 2;  // per-sequence model size for the baselines
  bool strip_self = false;
  int power = 1;
  double epsilon = 1e-6;
  int kl_subset = 0;  // 0 = use every model column entry
};

void add_method_flags(CLI::App* cmd, MethodOptions& m) {
  cmd->add_option("--method", m.method, "distance: ssd, sym, bp, yy or kl")
      ->check(CLI::IsMember({"ssd", "sym", "bp", "yy", "kl"}));
  cmd->add_option("--states", m.states, "states K of the shared model (ssd)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--model-states", m.model_states,
                  "states Km of each per-sequence model (baselines)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--strip-self", m.strip_self,
                "drop self-transitions from induced matrices (ssd)");
  cmd->add_option("--power", m.power, "diffusion power on induced matrices (ssd)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", m.epsilon, "row smoothing for induced matrices (ssd)");
  cmd->add_option("--kl-subset", m.kl_subset,
                  "compare only this many model columns (kl; 0 = all)");
}

struct TrainOptions {
  int max_iters = 200;
  double tol = 1e-6;
  int restarts = 5;
  double variance_floor = 1e-6;
};

void add_train_flags(CLI::App* cmd, TrainOptions& t) {
  cmd->add_option("--max-iters", t.max_iters, "EM iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", t.tol, "relative log-likelihood convergence tolerance");
  cmd->add_option("--restarts", t.restarts, "EM restarts")->check(CLI::PositiveNumber);
  cmd->add_option("--variance-floor", t.variance_floor,
                  "variance floor relative to the pooled variance");
}

ssd::TrainConfig train_config(const TrainOptions& t, std::uint64_t seed) {
  ssd::TrainConfig config;
  config.max_iters = t.max_iters;
  config.log_lik_rel_tol = t.tol;
  config.restarts = t.restarts;
  config.variance_floor = t.variance_floor;
  config.seed = seed;
  return config;
}

// ---------------------------------------------------------------------------
// Distance computation shared by the subcommands
// ---------------------------------------------------------------------------

struct DistanceOutcome {
  ssd::DistanceMatrix distances;
  std::optional<ssd::HmmModel> model;  // the shared model, ssd only
  json counters;
};

DistanceOutcome compute_distances(const std::vector<ssd::Sequence>& sequences,
                                  const MethodOptions& m, const TrainOptions& t,
                                  std::uint64_t train_seed) {
  DistanceOutcome out;
  if (m.method == "ssd") {
    ssd::SsdOptions options;
    options.strip_self_transitions = m.strip_self;
    options.diffusion_power = m.power;
    options.row_smoothing_epsilon = m.epsilon;
    ssd::SsdDistanceResult result = ssd::ssd_distance_matrix(
        sequences, m.states, train_config(t, train_seed), options);
    out.distances = std::move(result.distances);
    out.model = std::move(result.model);
    out.counters = {{"fb_count", result.forward_backward_calls}};
    return out;
  }

  const std::vector<ssd::HmmModel> models = ssd::train_per_sequence_models(
      sequences, m.model_states, train_config(t, train_seed));
  const std::uint64_t before = ssd::instrument::likelihood_evaluations().load();
  const ssd::LikelihoodMatrix l = ssd::likelihood_matrix(sequences, models);
  out.counters = {
      {"likelihood_count", ssd::instrument::likelihood_evaluations().load() - before}};

  if (m.method == "sym")
    out.distances = ssd::sym_distance(l);
  else if (m.method == "bp")
    out.distances = ssd::bp_distance(l);
  else if (m.method == "yy")
    out.distances = ssd::yy_distance(l);
  else
    out.distances = ssd::kl_distance(l, m.kl_subset, train_seed);
  return out;
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

std::string prepare_out_dir(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw ssd::IoError("cannot create output directory " + out + ": " + ec.message());
  return out;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw ssd::IoError("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
  if (!f.flush()) throw ssd::IoError("write failed: " + path);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

json train_json(const TrainOptions& t) {
  return {{"max_iters", t.max_iters},
          {"tol", t.tol},
          {"restarts", t.restarts},
          {"variance_floor", t.variance_floor}};
}

json method_json(const MethodOptions& m) {
  json j{{"method", m.method}};
  if (m.method == "ssd") {
    j["states"] = m.states;
    j["ssd_options"] = {{"strip_self_transitions", m.strip_self},
                        {"diffusion_power", m.power},
                        {"row_smoothing_epsilon", m.epsilon}};
  } else {
    j["model_states"] = m.model_states;
    if (m.method == "kl") j["kl_subset"] = m.kl_subset;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct DistancesArgs {
  SourceOptions src;
  MethodOptions method;
  TrainOptions train;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
};

void run_distances(const DistancesArgs& args) {
  ssd::parallel::set_max_threads(args.threads);
  const Stopwatch watch;
  const std::string dir = prepare_out_dir(args.out);

  const std::uint64_t data_seed = ssd::derive_seed(args.seed, "rep-data", 0);
  const std::uint64_t train_seed = ssd::derive_seed(args.seed, "rep-train", 0);
  const ssd::LabeledDataset data = make_dataset(args.src, data_seed);
  const DistanceOutcome outcome =
      compute_distances(data.sequences, args.method, args.train, train_seed);

  ssd::save_matrix_csv(dir + "/distances.csv", outcome.distances);
  if (data.labeled()) ssd::save_labels_csv(dir + "/true_labels.csv", data.labels);
  if (outcome.model) ssd::save_model(*outcome.model, dir + "/model.json");

  json meta{{"command", "distances"},
            {"source", source_json(args.src)},
            {"num_sequences", data.sequences.size()},
            {"seed", args.seed},
            {"seeds", {{"data", data_seed}, {"train", train_seed}}},
            {"train", train_json(args.train)},
            {"counters", outcome.counters},
            {"model_format_version", ssd::kModelFormatVersion},
            {"wall_time_seconds", watch.seconds()}};
  meta.update(method_json(args.method));
  write_json(dir + "/metadata.json", meta);
}

struct ClusterArgs {
  SourceOptions src;
  MethodOptions method;
  TrainOptions train;
  std::string distances_in;
  int clusters = 0;
  int kmeans_runs = 10;
  int repetitions = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
};

void run_cluster(const ClusterArgs& args) {
  ssd::parallel::set_max_threads(args.threads);
  const Stopwatch watch;
  ssd::require(args.clusters >= 2, "clustering needs --clusters >= 2");
  ssd::require(args.repetitions >= 1, "--repetitions must be >= 1");
  const bool from_file = !args.distances_in.empty();
  if (from_file)
    ssd::require(args.src.input.empty() && !args.src.mohmm && !args.src.surrogate,
                 "--distances-in replaces the data source flags");
  const std::string dir = prepare_out_dir(args.out);

  json reps = json::array();
  std::vector<double> accuracies;
  json counters;
  ssd::DistanceMatrix file_distances;
  if (from_file) {
    file_distances = ssd::load_matrix_csv(args.distances_in);
    ssd::validate_distance_matrix(file_distances);
  }

  for (int rep = 0; rep < args.repetitions; ++rep) {
    const std::uint64_t data_seed =
        ssd::derive_seed(args.seed, "rep-data", static_cast<std::uint64_t>(rep));
    const std::uint64_t train_seed =
        ssd::derive_seed(args.seed, "rep-train", static_cast<std::uint64_t>(rep));
    const std::uint64_t kmeans_seed =
        ssd::derive_seed(args.seed, "rep-kmeans", static_cast<std::uint64_t>(rep));

    ssd::LabeledDataset data;
    ssd::DistanceMatrix distances;
    if (from_file) {
      distances = file_distances;
    } else {
      data = make_dataset(args.src, data_seed);
      DistanceOutcome outcome =
          compute_distances(data.sequences, args.method, args.train, train_seed);
      distances = std::move(outcome.distances);
      counters = outcome.counters;  // per-repetition stage counts are identical
    }

    const ssd::SpectralClusterResult clusters =
        ssd::spectral_cluster(distances, args.clusters, args.kmeans_runs, kmeans_seed);
    ssd::save_labels_csv(dir + "/labels_rep" + std::to_string(rep) + ".csv",
                         clusters.labels);

    json rep_json{{"rep", rep},
                  {"sigma", clusters.sigma},
                  {"eigengap", clusters.eigengap},
                  {"distortion", clusters.distortion},
                  {"seeds",
                   {{"data", data_seed}, {"train", train_seed}, {"kmeans", kmeans_seed}}}};
    if (data.labeled()) {
      const ssd::AccuracyReport report =
          ssd::clustering_accuracy(data.labels, clusters.labels);
      rep_json["accuracy"] = report.accuracy;
      accuracies.push_back(report.accuracy);
    }
    reps.push_back(std::move(rep_json));
  }

  json report{{"repetitions", reps}};
  if (!accuracies.empty()) {
    report["mean_accuracy"] = mean_of(accuracies);
    report["std_accuracy"] = sample_std(accuracies);
    report["mean_error"] = 100.0 - mean_of(accuracies);
  }
  write_json(dir + "/report.json", report);

  json meta{{"command", "cluster"},
            {"clusters", args.clusters},
            {"kmeans_runs", args.kmeans_runs},
            {"repetitions", args.repetitions},
            {"seed", args.seed},
            {"train", train_json(args.train)},
            {"wall_time_seconds", watch.seconds()}};
  if (from_file)
    meta["source"] = {{"kind", "distance_matrix"}, {"path", args.distances_in}};
  else {
    meta["source"] = source_json(args.src);
    meta["counters"] = counters;
    meta.update(method_json(args.method));
  }
  write_json(dir + "/metadata.json", meta);
}

struct SegmentArgs {
  SourceOptions src;
  MethodOptions method;
  TrainOptions train;
  int window = 0;
  int segments = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
};

void run_segment(const SegmentArgs& args) {
  ssd::parallel::set_max_threads(args.threads);
  const Stopwatch watch;
  ssd::require(args.window >= 2, "segmentation needs --window >= 2");
  ssd::require(args.segments >= 2, "segmentation needs --segments >= 2");
  const std::string dir = prepare_out_dir(args.out);

  const std::uint64_t data_seed = ssd::derive_seed(args.seed, "rep-data", 0);
  const std::uint64_t train_seed = ssd::derive_seed(args.seed, "rep-train", 0);
  const ssd::LabeledDataset data = make_dataset(args.src, data_seed);

  // Concatenate the sources in order, then cut into fixed-width windows.
  Eigen::Index total = 0;
  for (const auto& seq : data.sequences) total += seq.rows();
  Eigen::MatrixXd concatenated(total, ssd::dataset_dim(data));
  std::vector<Eigen::Index> offsets;
  Eigen::Index at = 0;
  for (const auto& seq : data.sequences) {
    offsets.push_back(at);
    concatenated.middleRows(at, seq.rows()) = seq;
    at += seq.rows();
  }
  const std::vector<ssd::Sequence> windows =
      ssd::window_subsequences(concatenated, static_cast<Eigen::Index>(args.window));
  ssd::require(static_cast<int>(windows.size()) >= args.segments,
               "fewer windows than requested segments");

  const DistanceOutcome outcome =
      compute_distances(windows, args.method, args.train, train_seed);
  const ssd::SpectralSegmentResult result =
      ssd::spectral_segment(outcome.distances, args.segments);

  ssd::save_labels_csv(dir + "/segmentation.csv", result.segmentation.labels());
  ssd::save_matrix_csv(dir + "/distances.csv", outcome.distances);

  json report{{"num_windows", windows.size()},
              {"window", args.window},
              {"segments", args.segments},
              {"sigma", result.sigma},
              {"cost", result.cost},
              {"starts", result.segmentation.starts}};

  // With one labeled source per segment, the source boundaries give the true
  // segmentation: each window belongs to the source holding its first row.
  if (static_cast<int>(data.sequences.size()) == args.segments) {
    std::vector<Eigen::Index> truth_starts;
    for (const Eigen::Index off : offsets)
      truth_starts.push_back((off + args.window - 1) / args.window);
    const bool increasing = [&] {
      for (std::size_t i = 1; i < truth_starts.size(); ++i)
        if (truth_starts[i] <= truth_starts[i - 1] ||
            truth_starts[i] >= static_cast<Eigen::Index>(windows.size()))
          return false;
      return true;
    }();
    if (increasing) {
      ssd::Segmentation truth;
      truth.n = static_cast<Eigen::Index>(windows.size());
      truth.starts = truth_starts;
      report["truth_starts"] = truth.starts;
      report["error_percent"] = ssd::segmentation_error(truth, result.segmentation);
    }
  }
  write_json(dir + "/report.json", report);

  json meta{{"command", "segment"},
            {"source", source_json(args.src)},
            {"seed", args.seed},
            {"seeds", {{"data", data_seed}, {"train", train_seed}}},
            {"train", train_json(args.train)},
            {"counters", outcome.counters},
            {"wall_time_seconds", watch.seconds()}};
  meta.update(method_json(args.method));
  write_json(dir + "/metadata.json", meta);
}

struct BenchmarkArgs {
  MethodOptions method;  // states / model_states reused; method list below
  TrainOptions train;
  std::vector<int> lengths{25, 50, 100, 200, 400};
  std::vector<std::string> methods{"ssd", "sym", "bp", "yy", "kl"};
  int n = 100;
  int kmeans_runs = 10;
  int repetitions = 10;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
};

void run_benchmark(const BenchmarkArgs& args) {
  ssd::parallel::set_max_threads(args.threads);
  const Stopwatch watch;
  ssd::require(!args.lengths.empty(), "benchmark needs at least one --lengths value");
  ssd::require(args.repetitions >= 1, "--repetitions must be >= 1");
  for (const auto& m : args.methods)
    ssd::require(m == "ssd" || m == "sym" || m == "bp" || m == "yy" || m == "kl",
                 "unknown method in --methods: " + m);
  const std::string dir = prepare_out_dir(args.out);

  std::ofstream errors(dir + "/errors.csv");
  if (!errors) throw ssd::IoError("cannot open for writing: " + dir + "/errors.csv");
  errors << "mu_length,method,rep,error\n";

  json table = json::array();
  std::ofstream summary(dir + "/benchmark.csv");
  if (!summary) throw ssd::IoError("cannot open for writing: " + dir + "/benchmark.csv");
  summary << "mu_length,method,mean_error,std_error,repetitions\n";

  for (const int mu : args.lengths) {
    ssd::require(mu >= 5, "--lengths entries must be >= 5");
    const std::string tag = std::to_string(mu);

    // One dataset per (length, repetition), shared across every method so
    // the comparison is paired.
    std::vector<ssd::LabeledDataset> datasets;
    for (int rep = 0; rep < args.repetitions; ++rep) {
      ssd::MohmmConfig config;
      config.num_sequences = args.n;
      config.mean_length = mu;
      config.seed = ssd::derive_seed(args.seed, "bench-data-" + tag,
                                     static_cast<std::uint64_t>(rep));
      datasets.push_back(ssd::generate_mohmm(config));
    }

    for (const std::string& method : args.methods) {
      MethodOptions m = args.method;
      m.method = method;
      std::vector<double> errs;
      for (int rep = 0; rep < args.repetitions; ++rep) {
        const ssd::LabeledDataset& data = datasets[static_cast<std::size_t>(rep)];
        const std::uint64_t train_seed = ssd::derive_seed(
            args.seed, "bench-train-" + tag + "-" + method, static_cast<std::uint64_t>(rep));
        const std::uint64_t kmeans_seed = ssd::derive_seed(
            args.seed, "bench-kmeans-" + tag + "-" + method, static_cast<std::uint64_t>(rep));
        const DistanceOutcome outcome =
            compute_distances(data.sequences, m, args.train, train_seed);
        const ssd::SpectralClusterResult result =
            ssd::spectral_cluster(outcome.distances, 2, args.kmeans_runs, kmeans_seed);
        const double err =
            100.0 - ssd::clustering_accuracy(data.labels, result.labels).accuracy;
        errs.push_back(err);
        errors << mu << ',' << method << ',' << rep << ','
               << ssd::detail::format_double(err) << '\n';
      }
      summary << mu << ',' << method << ',' << ssd::detail::format_double(mean_of(errs))
              << ',' << ssd::detail::format_double(sample_std(errs)) << ','
              << args.repetitions << '\n';
      table.push_back({{"mu_length", mu},
                       {"method", method},
                       {"mean_error", mean_of(errs)},
                       {"std_error", sample_std(errs)}});
    }
  }
  if (!summary.flush() || !errors.flush())
    throw ssd::IoError("write failed in " + dir);

  json meta{{"command", "benchmark-mohmm"},
            {"n", args.n},
            {"lengths", args.lengths},
            {"methods", args.methods},
            {"repetitions", args.repetitions},
            {"kmeans_runs", args.kmeans_runs},
            {"clusters", 2},
            {"states", args.method.states},
            {"model_states", args.method.model_states},
            {"seed", args.seed},
            {"train", train_json(args.train)},
            {"table", table},
            {"wall_time_seconds", watch.seconds()}};
  write_json(dir + "/metadata.json", meta);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"state-space dynamics distances for sequence clustering"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; command-line flags win");

  // configurable(): let INI [section]s address each subcommand; fallthrough():
  // accept --config after the subcommand name.
  const auto subcommand = [&](const std::string& name, const std::string& what) {
    CLI::App* cmd = app.add_subcommand(name, what);
    cmd->configurable();
    cmd->fallthrough();
    return cmd;
  };

  DistancesArgs dist;
  CLI::App* cmd_distances = subcommand("distances", "compute a pairwise distance matrix");
  add_source_flags(cmd_distances, dist.src);
  add_method_flags(cmd_distances, dist.method);
  add_train_flags(cmd_distances, dist.train);
  cmd_distances->add_option("--seed", dist.seed, "root seed");
  cmd_distances->add_option("--threads", dist.threads, "worker threads");
  cmd_distances->add_option("--out", dist.out, "output directory")->required();
  cmd_distances->callback([&] { run_distances(dist); });

  ClusterArgs clus;
  CLI::App* cmd_cluster = subcommand("cluster", "cluster sequences via spectral clustering");
  add_source_flags(cmd_cluster, clus.src);
  add_method_flags(cmd_cluster, clus.method);
  add_train_flags(cmd_cluster, clus.train);
  cmd_cluster->add_option("--distances-in", clus.distances_in,
                          "use a precomputed distance matrix CSV");
  cmd_cluster->add_option("--clusters", clus.clusters, "number of clusters C")->required();
  cmd_cluster->add_option("--kmeans-runs", clus.kmeans_runs, "k-means restarts");
  cmd_cluster->add_option("--repetitions", clus.repetitions, "seeded end-to-end repetitions");
  cmd_cluster->add_option("--seed", clus.seed, "root seed");
  cmd_cluster->add_option("--threads", clus.threads, "worker threads");
  cmd_cluster->add_option("--out", clus.out, "output directory")->required();
  cmd_cluster->callback([&] { run_cluster(clus); });

  SegmentArgs seg;
  CLI::App* cmd_segment = subcommand(
      "segment", "segment a windowed concatenated sequence into contiguous parts");
  add_source_flags(cmd_segment, seg.src);
  add_method_flags(cmd_segment, seg.method);
  add_train_flags(cmd_segment, seg.train);
  cmd_segment->add_option("--window", seg.window, "window width W")->required();
  cmd_segment->add_option("--segments", seg.segments, "number of segments C")->required();
  cmd_segment->add_option("--seed", seg.seed, "root seed");
  cmd_segment->add_option("--threads", seg.threads, "worker threads");
  cmd_segment->add_option("--out", seg.out, "output directory")->required();
  cmd_segment->callback([&] { run_segment(seg); });

  BenchmarkArgs bench;
  CLI::App* cmd_benchmark =
      subcommand("benchmark-mohmm", "clustering-error-versus-length benchmark table");
  add_train_flags(cmd_benchmark, bench.train);
  cmd_benchmark->add_option("--lengths", bench.lengths, "mean sequence lengths")
      ->delimiter(',');
  cmd_benchmark->add_option("--methods", bench.methods, "distance methods to compare")
      ->delimiter(',');
  cmd_benchmark->add_option("--n", bench.n, "sequences per dataset");
  cmd_benchmark->add_option("--states", bench.method.states, "states K (ssd)");
  cmd_benchmark->add_option("--model-states", bench.method.model_states,
                            "states Km (baselines)");
  cmd_benchmark->add_option("--kl-subset", bench.method.kl_subset,
                            "model-column subset for kl (0 = all)");
  cmd_benchmark->add_option("--kmeans-runs", bench.kmeans_runs, "k-means restarts");
  cmd_benchmark->add_option("--repetitions", bench.repetitions, "repetitions per cell");
  cmd_benchmark->add_option("--seed", bench.seed, "root seed");
  cmd_benchmark->add_option("--threads", bench.threads, "worker threads");
  cmd_benchmark->add_option("--out", bench.out, "output directory")->required();
  cmd_benchmark->callback([&] { run_benchmark(bench); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ssd::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ssd::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const ssd::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// Command-line experiment runner: factorization methods, clustering and
// classification evaluation, weight-matrix comparison, convergence traces.
// Every run writes a single JSON results document embedding the resolved
// configuration; identical config + seed reproduces the file byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "rs2acf/baselines.hpp"
#include "rs2acf/data.hpp"
#include "rs2acf/eval.hpp"
#include "rs2acf/graphs.hpp"
#include "rs2acf/rng.hpp"
#include "rs2acf/solver.hpp"
#include "rs2acf/types.hpp"

using json = nlohmann::ordered_json;
using namespace rs2acf;

namespace {

struct RunConfig {
  std::string method = "rs2acf";
  std::string data_csv;
  std::string blobs;  // "c=3,n=30,d=20,sep=6,std=1", n may be a ':' list

  double alpha = 1e4;
  double beta = 1e-4;
  double gamma = 1e4;
  int rank = 0;  // 0 -> num_classes + 1
  double tol = 1e-4;
  int max_iter = 200;
  double labeled_ratio = 0.3;
  std::uint64_t seed = 0;

  int restarts = 20;
  int splits = 15;
  int clusters = 0;  // 0 -> num_classes
  int neighbors = 7;
  double lambda = 100.0;
  double noise = 0.0;
  double train_fraction = 0.5;
  std::string sweep;                        // classify: comma list of labeled ratios
  std::string percentages = "20,40,60,80";  // trace

  std::string out = "results.json";
  bool timings = false;
};

std::vector<double> parse_number_list(const std::string& text, char sep) {
  std::vector<double> out;
  std::string cur;
  for (char ch : text + sep) {
    if (ch == sep) {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return out;
}

data::BlobSpec parse_blobs(const std::string& text, double labeled_fraction,
                           std::uint64_t seed) {
  data::BlobSpec spec;
  spec.labeled_fraction = labeled_fraction;
  spec.seed = seed;
  std::map<std::string, std::string> kv;
  std::string cur;
  for (char ch : text + ',') {
    if (ch == ',') {
      auto eq = cur.find('=');
      if (eq == std::string::npos) throw std::runtime_error("blobs: expected key=value in " + cur);
      kv[cur.substr(0, eq)] = cur.substr(eq + 1);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  for (auto& [k, v] : kv) {
    if (k == "c")
      spec.num_classes = std::stoi(v);
    else if (k == "n") {
      for (double x : parse_number_list(v, ':'))
        spec.samples_per_class.push_back(static_cast<int>(x));
    } else if (k == "d")
      spec.dim = std::stoi(v);
    else if (k == "sep")
      spec.separation = std::stod(v);
    else if (k == "std")
      spec.stddev = std::stod(v);
    else
      throw std::runtime_error("blobs: unknown key '" + k + "'");
  }
  if (spec.samples_per_class.empty()) spec.samples_per_class.assign(spec.num_classes, 30);
  if (static_cast<int>(spec.samples_per_class.size()) == 1)
    spec.samples_per_class.assign(spec.num_classes, spec.samples_per_class[0]);
  return spec;
}

// Fully labeled source data plus per-column ground truth.
struct SourceData {
  Dataset full;            // num_labeled == size
  std::vector<int> truth;  // class per column of full.x
};

SourceData load_source(const RunConfig& cfg) {
  SourceData src;
  if (!cfg.data_csv.empty()) {
    data::LoadedCsv lc = data::load_csv(cfg.data_csv);
    if (lc.ds.num_labeled != lc.ds.size())
      throw std::runtime_error("evaluation needs ground truth: CSV must label every sample");
    src.full = std::move(lc.ds);
    src.truth = src.full.labels;
  } else if (!cfg.blobs.empty()) {
    data::BlobSpec spec = parse_blobs(cfg.blobs, 1.0, mix_seed(cfg.seed, 1));
    src.full = data::make_blobs(spec);
    src.truth = data::blob_truth(spec);
  } else {
    throw std::runtime_error("no data source: pass --data <csv> or --blobs <spec>");
  }
  return src;
}

HyperParams hyperparams(const RunConfig& cfg) {
  HyperParams hp;
  hp.alpha = cfg.alpha;
  hp.beta = cfg.beta;
  hp.gamma = cfg.gamma;
  hp.rank = cfg.rank;
  hp.tol = cfg.tol;
  hp.max_iter = cfg.max_iter;
  hp.seed = mix_seed(cfg.seed, 2);
  hp.validate();
  return hp;
}

struct Fitted {
  Matrix representation;          // one row per sample, solver column order
  std::vector<double> objective;  // per-iteration objective of the method
};

Matrix make_kernel(const Matrix& x) {
  Matrix k = x.transpose() * x;
  k = ((k + k.transpose()) / 2).eval();
  return k;
}

Fitted fit_method(const RunConfig& cfg, const Dataset& ds) {
  Fitted out;
  const int rank = cfg.rank > 0 ? cfg.rank : ds.num_classes + 1;
  if (cfg.method == "rs2acf") {
    solver::FitResult res = solver::fit(ds, hyperparams(cfg));
    out.representation = res.representation;
    out.objective = res.trace.objective_values;
  } else if (cfg.method == "cf") {
    const Matrix k = make_kernel(ds.x);
    auto f = baselines::cf_fit(k, rank, cfg.max_iter, mix_seed(cfg.seed, 2), 1e-12,
                               [&](int, const Matrix& w, const Matrix& v) {
                                 out.objective.push_back(baselines::cf_objective(k, {w, v}));
                               });
    out.representation = f.v;
  } else if (cfg.method == "lccf") {
    const Matrix k = make_kernel(ds.x);
    const Matrix s = baselines::lccf_weights(ds.x, cfg.neighbors);
    auto f = baselines::lccf_fit(
        k, s, cfg.lambda, rank, cfg.max_iter, mix_seed(cfg.seed, 2), 1e-12,
        [&](int, const Matrix& w, const Matrix& v) {
          out.objective.push_back(baselines::lccf_objective(k, s, cfg.lambda, {w, v}));
        });
    out.representation = f.v;
  } else if (cfg.method == "ccf") {
    const Matrix k = make_kernel(ds.x);
    const Matrix a = baselines::ccf_constraint(ds);
    auto f = baselines::ccf_fit(k, a, rank, cfg.max_iter, mix_seed(cfg.seed, 2), 1e-12,
                                [&](int, const Matrix& w, const Matrix& z) {
                                  out.objective.push_back(baselines::ccf_objective(k, {w, z, a}));
                                });
    out.representation = f.a * f.z;
  } else if (cfg.method == "nmf") {
    auto f = baselines::nmf_fit(ds.x, rank, cfg.max_iter, mix_seed(cfg.seed, 2), 1e-12,
                                [&](int, const Matrix& u, const Matrix& v) {
                                  out.objective.push_back(baselines::nmf_objective(ds.x, {u, v}));
                                });
    out.representation = f.v;
  } else {
    throw std::runtime_error("unknown method '" + cfg.method + "'");
  }
  return out;
}

json summary_json(const eval::EvalResult& r) {
  return json{{"mean", r.mean}, {"std", r.stddev}, {"per_run", r.per_run}};
}

json config_json(const RunConfig& cfg, const std::string& command) {
  json j;
  j["command"] = command;
  j["method"] = cfg.method;
  j["data"] = cfg.data_csv;
  j["blobs"] = cfg.blobs;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["gamma"] = cfg.gamma;
  j["rank"] = cfg.rank;
  j["tol"] = cfg.tol;
  j["max_iter"] = cfg.max_iter;
  j["labeled_ratio"] = cfg.labeled_ratio;
  j["seed"] = cfg.seed;
  j["restarts"] = cfg.restarts;
  j["splits"] = cfg.splits;
  j["clusters"] = cfg.clusters;
  j["neighbors"] = cfg.neighbors;
  j["lambda"] = cfg.lambda;
  j["noise"] = cfg.noise;
  j["train_fraction"] = cfg.train_fraction;
  j["sweep"] = cfg.sweep;
  j["percentages"] = cfg.percentages;
  j["out"] = cfg.out;
  return j;
}

class StageTimer {
 public:
  explicit StageTimer(bool enabled) : enabled_(enabled) {}
  void start() { t0_ = std::chrono::steady_clock::now(); }
  void stop(const std::string& stage) {
    if (!enabled_) return;
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
    times_[stage] = times_.count(stage) ? times_[stage] + ms : ms;
  }
  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : times_) j[k] = v;
    return j;
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point t0_;
  std::map<std::string, double> times_;
};

void write_document(const RunConfig& cfg, const std::string& command, const json& trace,
                    const json& metrics, const json& details, const StageTimer& timer) {
  json doc;
  doc["run_config"] = config_json(cfg, command);
  doc["seed"] = cfg.seed;
  doc["objective_trace"] = trace;
  doc["metrics"] = metrics;
  doc["details"] = details;
  doc["timings_ms"] = timer.to_json();
  data::save_results(cfg.out, doc);
}

// ---------------------------------------------------------------------------
// cluster: fit once, score `restarts` independent K-means runs
// ---------------------------------------------------------------------------

int cmd_cluster(const RunConfig& cfg) {
  StageTimer timer(cfg.timings);
  const SourceData src = load_source(cfg);
  const data::MaskedDataset masked =
      data::mask_labels(src.full, cfg.labeled_ratio, mix_seed(cfg.seed, 3));
  std::vector<int> truth(masked.ds.size());
  for (int i = 0; i < masked.ds.size(); ++i) truth[i] = src.truth[masked.column_order[i]];

  timer.start();
  const Fitted fitted = fit_method(cfg, masked.ds);
  timer.stop("fit");

  // Each scored run is a best-of-10 Lloyd fit; the run-to-run spread then
  // reflects K-means seeding rather than degenerate single inits.
  const int k = cfg.clusters > 0 ? cfg.clusters : masked.ds.num_classes;
  std::vector<double> acs, nmis;
  timer.start();
  for (int run = 0; run < cfg.restarts; ++run) {
    const auto assign =
        eval::kmeans(fitted.representation, k, 10, 100, mix_seed(cfg.seed, 1000 + run));
    acs.push_back(eval::clustering_accuracy(assign, truth));
    nmis.push_back(eval::nmi(assign, truth));
  }
  timer.stop("evaluate");

  json metrics;
  metrics["ac"] = summary_json(eval::summarize(acs));
  metrics["nmi"] = summary_json(eval::summarize(nmis));
  metrics["accuracy"] = nullptr;
  write_document(cfg, "cluster", fitted.objective, metrics, json::object(), timer);
  return 0;
}

// ---------------------------------------------------------------------------
// classify: transductive 1-NN protocol over random train/test splits
// ---------------------------------------------------------------------------

double classify_split(const RunConfig& cfg, const SourceData& src, double labeled_ratio,
                      int split_index, std::vector<double>* trace_out) {
  const int n = src.full.size();
  const int c = src.full.num_classes;
  Rng rng(mix_seed(cfg.seed, 500 + split_index));

  // stratified train/test split
  std::vector<std::vector<int>> members(c);
  for (int i = 0; i < n; ++i) members[src.truth[i]].push_back(i);
  std::vector<bool> in_train(n, false);
  for (int k = 0; k < c; ++k) {
    auto& m = members[k];
    const int take = std::clamp<int>(static_cast<int>(std::lround(cfg.train_fraction * m.size())),
                                     1, static_cast<int>(m.size()) - 1);
    for (int i = 0; i < take; ++i) {
      const int j = i + static_cast<int>(rng.next_below(m.size() - i));
      std::swap(m[i], m[j]);
    }
    for (int i = 0; i < take; ++i) in_train[m[i]] = true;
  }

  // labeled subset of the training half, stratified
  std::vector<std::vector<int>> train_members(c);
  for (int i = 0; i < n; ++i)
    if (in_train[i]) train_members[src.truth[i]].push_back(i);
  std::vector<bool> labeled(n, false);
  for (int k = 0; k < c; ++k) {
    auto& m = train_members[k];
    const int take = std::clamp<int>(static_cast<int>(std::lround(labeled_ratio * m.size())), 1,
                                     static_cast<int>(m.size()));
    for (int i = 0; i < take; ++i) {
      const int j = i + static_cast<int>(rng.next_below(m.size() - i));
      std::swap(m[i], m[j]);
    }
    for (int i = 0; i < take; ++i) labeled[m[i]] = true;
  }

  // column order: labeled train, unlabeled train, test
  std::vector<int> order;
  for (int i = 0; i < n; ++i)
    if (labeled[i]) order.push_back(i);
  const int l = static_cast<int>(order.size());
  for (int i = 0; i < n; ++i)
    if (!labeled[i] && in_train[i]) order.push_back(i);
  for (int i = 0; i < n; ++i)
    if (!in_train[i]) order.push_back(i);

  Dataset ds;
  ds.x.resize(src.full.dim(), n);
  for (int i = 0; i < n; ++i) ds.x.col(i) = src.full.x.col(order[i]);
  ds.num_labeled = l;
  ds.labels.resize(l);
  for (int i = 0; i < l; ++i) ds.labels[i] = src.truth[order[i]];
  ds.num_classes = c;
  ds.validate();

  const Fitted fitted = fit_method(cfg, ds);
  if (trace_out && trace_out->empty()) *trace_out = fitted.objective;

  // 1-NN from all training rows (true labels) to the test rows
  std::vector<int> train_rows, test_rows;
  for (int i = 0; i < n; ++i) (in_train[order[i]] ? train_rows : test_rows).push_back(i);
  Matrix train(train_rows.size(), fitted.representation.cols());
  Matrix test(test_rows.size(), fitted.representation.cols());
  std::vector<int> train_labels(train_rows.size());
  for (size_t i = 0; i < train_rows.size(); ++i) {
    train.row(i) = fitted.representation.row(train_rows[i]);
    train_labels[i] = src.truth[order[train_rows[i]]];
  }
  for (size_t i = 0; i < test_rows.size(); ++i)
    test.row(i) = fitted.representation.row(test_rows[i]);

  const auto pred = eval::knn1_classify(train, train_labels, test);
  int agree = 0;
  for (size_t i = 0; i < test_rows.size(); ++i)
    if (pred[i] == src.truth[order[test_rows[i]]]) ++agree;
  return test_rows.empty() ? 0.0 : static_cast<double>(agree) / test_rows.size();
}

int cmd_classify(const RunConfig& cfg) {
  StageTimer timer(cfg.timings);
  const SourceData src = load_source(cfg);

  std::vector<double> ratios;
  if (!cfg.sweep.empty())
    ratios = parse_number_list(cfg.sweep, ',');
  else
    ratios = {cfg.labeled_ratio};

  json sweep_rows = json::array();
  std::vector<double> trace;
  json accuracy = nullptr;
  timer.start();
  for (double ratio : ratios) {
    std::vector<double> accs;
    for (int s = 0; s < cfg.splits; ++s)
      accs.push_back(classify_split(cfg, src, ratio, s, trace.empty() ? &trace : nullptr));
    const auto summary = eval::summarize(accs);
    sweep_rows.push_back({{"labeled_ratio", ratio}, {"accuracy", summary_json(summary)}});
    if (ratios.size() == 1) accuracy = summary_json(summary);
  }
  timer.stop("fit_and_evaluate");

  json metrics;
  metrics["ac"] = nullptr;
  metrics["nmi"] = nullptr;
  metrics["accuracy"] = accuracy;
  json details;
  details["sweep"] = sweep_rows;
  write_document(cfg, "classify", trace, metrics, details, timer);
  return 0;
}

// ---------------------------------------------------------------------------
// weights: compare heat-kernel, reconstruction and adaptive weight matrices
// ---------------------------------------------------------------------------

int count_cross_edges(const Matrix& w, const std::vector<int>& truth, double threshold) {
  int count = 0;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      if (i != j && w(i, j) > threshold && truth[i] != truth[j]) ++count;
  return count;
}

json weights_block(const RunConfig& cfg, const Dataset& full, const std::vector<int>& truth) {
  // connections counted above 5% of each matrix's own strongest weight
  auto cutoff = [](const Matrix& w) { return 0.05 * std::max(w.maxCoeff(), 1e-300); };
  json block;
  {
    const Matrix g = graphs::gaussian_weights(full.x, cfg.neighbors);
    block["gaussian"] = {{"epsilon", graphs::reconstruction_error(full.x, g)},
                         {"cross_class_edges", count_cross_edges(g, truth, cutoff(g))}};
  }
  {
    const Matrix w = graphs::lle_weights(full.x, cfg.neighbors);
    const Matrix q = w.transpose();  // column orientation for X ~ X Q
    block["lle"] = {{"epsilon", graphs::reconstruction_error(full.x, q)},
                    {"cross_class_edges", count_cross_edges(q, truth, cutoff(q))}};
  }
  {
    const data::MaskedDataset masked =
        data::mask_labels(full, cfg.labeled_ratio, mix_seed(cfg.seed, 3));
    std::vector<int> permuted(masked.ds.size());
    for (int i = 0; i < masked.ds.size(); ++i) permuted[i] = truth[masked.column_order[i]];
    const solver::FitResult res = solver::fit(masked.ds, hyperparams(cfg));
    block["adaptive"] = {
        {"epsilon", graphs::reconstruction_error(masked.ds.x, res.state.q)},
        {"cross_class_edges", count_cross_edges(res.state.q, permuted, cutoff(res.state.q))}};
  }
  return block;
}

int cmd_weights(const RunConfig& cfg) {
  StageTimer timer(cfg.timings);
  const SourceData src = load_source(cfg);

  timer.start();
  json details;
  details["clean"] = weights_block(cfg, src.full, src.truth);
  if (cfg.noise > 0) {
    const Dataset noisy = data::add_noise(src.full, cfg.noise, mix_seed(cfg.seed, 4));
    details["noisy"] = weights_block(cfg, noisy, src.truth);
  }
  timer.stop("weights");

  json metrics;
  metrics["ac"] = nullptr;
  metrics["nmi"] = nullptr;
  metrics["accuracy"] = nullptr;
  write_document(cfg, "weights", json::array(), metrics, details, timer);
  return 0;
}

// ---------------------------------------------------------------------------
// trace: per-iteration objective across labeled percentages
// ---------------------------------------------------------------------------

int cmd_trace(const RunConfig& cfg) {
  StageTimer timer(cfg.timings);
  const SourceData src = load_source(cfg);
  const auto percents = parse_number_list(cfg.percentages, ',');
  if (percents.empty()) throw std::runtime_error("trace: empty percentage list");

  json traces;
  timer.start();
  for (double p : percents) {
    const data::MaskedDataset masked =
        data::mask_labels(src.full, p / 100.0, mix_seed(cfg.seed, 3));
    const solver::FitResult res = solver::fit(masked.ds, hyperparams(cfg));
    const auto& tr = res.trace.objective_values;
    for (size_t t = 1; t < tr.size(); ++t)
      if (tr[t] > tr[t - 1] + 1e-8)
        throw std::runtime_error("trace: objective increased at percentage " +
                                 std::to_string(static_cast<int>(p)) + ", iteration " +
                                 std::to_string(t));
    char key[32];
    std::snprintf(key, sizeof key, "%g", p);
    traces[key] = tr;
  }
  timer.stop("fit");

  json metrics;
  metrics["ac"] = nullptr;
  metrics["nmi"] = nullptr;
  metrics["accuracy"] = nullptr;
  write_document(cfg, "trace", traces, metrics, json::object(), timer);
  return 0;
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j = json::parse(in);
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("method", cfg.method);
  get("data", cfg.data_csv);
  get("blobs", cfg.blobs);
  get("alpha", cfg.alpha);
  get("beta", cfg.beta);
  get("gamma", cfg.gamma);
  get("rank", cfg.rank);
  get("tol", cfg.tol);
  get("max_iter", cfg.max_iter);
  get("labeled_ratio", cfg.labeled_ratio);
  get("seed", cfg.seed);
  get("restarts", cfg.restarts);
  get("splits", cfg.splits);
  get("clusters", cfg.clusters);
  get("neighbors", cfg.neighbors);
  get("lambda", cfg.lambda);
  get("noise", cfg.noise);
  get("train_fraction", cfg.train_fraction);
  get("sweep", cfg.sweep);
  get("percentages", cfg.percentages);
  get("out", cfg.out);
  get("timings", cfg.timings);
}

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config; flags override its values");
  cmd->add_option("--method", cfg.method, "rs2acf|cf|lccf|ccf|nmf");
  cmd->add_option("--data", cfg.data_csv, "CSV dataset (fully labeled)");
  cmd->add_option("--blobs", cfg.blobs, "synthetic spec c=..,n=..,d=..,sep=..,std=..");
  cmd->add_option("--alpha", cfg.alpha);
  cmd->add_option("--beta", cfg.beta);
  cmd->add_option("--gamma", cfg.gamma);
  cmd->add_option("--rank", cfg.rank, "factorization rank, 0 = classes + 1");
  cmd->add_option("--tol", cfg.tol);
  cmd->add_option("--max-iter", cfg.max_iter);
  cmd->add_option("--labeled-ratio", cfg.labeled_ratio);
  cmd->add_option("--seed", cfg.seed);
  cmd->add_option("--restarts", cfg.restarts, "independent K-means runs to average");
  cmd->add_option("--splits", cfg.splits, "random train/test splits to average");
  cmd->add_option("--clusters", cfg.clusters, "K for K-means, 0 = classes");
  cmd->add_option("--neighbors", cfg.neighbors, "k for the fixed-k graphs");
  cmd->add_option("--lambda", cfg.lambda, "graph weight for lccf");
  cmd->add_option("--noise", cfg.noise, "noise scale for the weights command");
  cmd->add_option("--train-fraction", cfg.train_fraction);
  cmd->add_option("--sweep", cfg.sweep, "comma list of labeled ratios (classify)");
  cmd->add_option("--percentages", cfg.percentages, "comma list for trace");
  cmd->add_option("--out", cfg.out, "results JSON path");
  cmd->add_flag("--timings", cfg.timings, "record wall-clock stage timings");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-supervised adaptive concept factorization toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  CLI::App* cluster = app.add_subcommand("cluster", "fit and score K-means clustering");
  CLI::App* classify = app.add_subcommand("classify", "fit and score 1-NN classification");
  CLI::App* weights = app.add_subcommand("weights", "compare weight constructions");
  CLI::App* trace = app.add_subcommand("trace", "objective traces per labeled percentage");
  for (CLI::App* cmd : {cluster, classify, weights, trace})
    add_common_options(cmd, cfg, config_path);

  // two-phase parse so that flags override config-file values
  try {
    app.parse(argc, argv);
    if (!config_path.empty()) {
      apply_config_file(config_path, cfg);
      app.clear();
      app.parse(argc, argv);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (cluster->parsed()) return cmd_cluster(cfg);
    if (classify->parsed()) return cmd_classify(cfg);
    if (weights->parsed()) return cmd_weights(cfg);
    if (trace->parsed()) return cmd_trace(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

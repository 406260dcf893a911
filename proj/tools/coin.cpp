// Command-line entry point: prep, train, sweep, verify-pde, graph-build.
//
// Exit codes: 0 success, 1 failed check, 2 usage or input error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coin/coin.hpp"
#include "json.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace coin::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

/// Usage errors detected after CLI parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

fs::path cache_dir() {
  const char* env = std::getenv("COIN_CACHE_DIR");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("coin_cache");
}

/// A dataset argument is either a bundle path or a name under the cache directory.
fs::path resolve_bundle(const std::string& dataset) {
  const fs::path direct(dataset);
  if (fs::is_regular_file(direct)) return direct;
  const fs::path cached = cache_dir() / (dataset + ".bundle");
  if (fs::is_regular_file(cached)) return cached;
  throw InputError("dataset '" + dataset + "' not found: no file " + direct.string() + " or " + cached.string() +
                   " (run `coin prep` first)");
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw InputError("input file not found: " + p.string());
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Run configuration: defaults, then the flat JSON config file, then flags.

struct RunOptions {
  model::CoinConfig cfg;
  std::size_t splits = 10;
  std::size_t inits = 3;
  std::uint64_t seed = 0;
  std::string dataset;
};

struct ConfigKey {
  std::string name;
  std::function<void(RunOptions&, const ordered_json&)> set;
  std::function<ordered_json(const RunOptions&)> get;
};

template <typename T>
T json_as(const ordered_json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw InputError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        throw InputError("");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw InputError("");
    } else {
      if (!v.is_string()) throw InputError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw InputError("config key '" + key + "' has a value of the wrong type: " + v.dump());
  }
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    const auto add = [&](std::string name, auto member_of) {
      using T = std::remove_reference_t<decltype(member_of(std::declval<RunOptions&>()))>;
      k.push_back({name, [member_of, name](RunOptions& o, const ordered_json& v) { member_of(o) = json_as<T>(v, name); },
                   [member_of](const RunOptions& o) {
                     return ordered_json(member_of(const_cast<RunOptions&>(o)));
                   }});
    };
    add("K", [](RunOptions& o) -> std::size_t& { return o.cfg.K; });
    add("sigma2", [](RunOptions& o) -> double& { return o.cfg.sigma2; });
    add("hidden_dim", [](RunOptions& o) -> std::size_t& { return o.cfg.hidden_dim; });
    add("lr", [](RunOptions& o) -> double& { return o.cfg.lr; });
    add("weight_decay", [](RunOptions& o) -> double& { return o.cfg.weight_decay; });
    add("max_epochs", [](RunOptions& o) -> std::size_t& { return o.cfg.max_epochs; });
    add("patience", [](RunOptions& o) -> std::size_t& { return o.cfg.patience; });
    add("dropout_rate", [](RunOptions& o) -> double& { return o.cfg.dropout_rate; });
    add("residual", [](RunOptions& o) -> bool& { return o.cfg.residual; });
    add("n_splits", [](RunOptions& o) -> std::size_t& { return o.splits; });
    add("n_inits", [](RunOptions& o) -> std::size_t& { return o.inits; });
    add("master_seed", [](RunOptions& o) -> std::uint64_t& { return o.seed; });
    add("dataset", [](RunOptions& o) -> std::string& { return o.dataset; });
    k.push_back({"optimizer",
                 [](RunOptions& o, const ordered_json& v) {
                   o.cfg.optimizer = nn::parse_optimizer_kind(json_as<std::string>(v, "optimizer"));
                 },
                 [](const RunOptions& o) { return ordered_json(nn::to_string(o.cfg.optimizer)); }});
    return k;
  }();
  return keys;
}

std::string valid_keys() {
  std::string out;
  for (const auto& k : config_keys()) out += (out.empty() ? "" : ", ") + k.name;
  return out;
}

void apply_config_file(RunOptions& o, const fs::path& path) {
  const std::string text = binio::read_file(path);
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw InputError(path.string() + ": config must be a flat JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object() || value.is_array()) {
      throw UsageError(path.string() + ": nested value for key '" + key + "'; the config must be flat");
    }
    const auto& keys = config_keys();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == key; });
    if (it == keys.end()) {
      throw UsageError(path.string() + ": invalid config key '" + key + "'; valid keys: " + valid_keys());
    }
    it->set(o, value);
  }
}

ordered_json config_snapshot(const RunOptions& o) {
  ordered_json j = ordered_json::object();
  for (const auto& k : config_keys()) j[k.name] = k.get(o);
  return j;
}

/// Registers training flags on `cmd`; `finish` applies file then explicit flags.
struct TrainFlags {
  std::string config_path;
  RunOptions flag_values;
  std::string optimizer = "adam";
  std::vector<std::pair<CLI::Option*, std::string>> options;  // option, config key

  void add_to(CLI::App* cmd, bool with_grid_keys) {
    cmd->add_option("--config", config_path, "Flat JSON config file (flags override it)");
    auto& c = flag_values.cfg;
    options.emplace_back(cmd->add_option("--dataset", flag_values.dataset, "Bundle path or cache name"), "dataset");
    if (!with_grid_keys) {
      options.emplace_back(cmd->add_option("--K", c.K, "Diffusion layers"), "K");
      options.emplace_back(cmd->add_option("--sigma2", c.sigma2, "Diffusion strength per layer"), "sigma2");
    }
    options.emplace_back(cmd->add_option("--hidden-dim", c.hidden_dim, "Hidden width"), "hidden_dim");
    options.emplace_back(cmd->add_option("--lr", c.lr, "Learning rate"), "lr");
    options.emplace_back(cmd->add_option("--weight-decay", c.weight_decay, "L2 weight decay"), "weight_decay");
    options.emplace_back(cmd->add_option("--max-epochs", c.max_epochs, "Epoch cap"), "max_epochs");
    options.emplace_back(cmd->add_option("--patience", c.patience, "Early-stopping patience"), "patience");
    options.emplace_back(cmd->add_option("--dropout", c.dropout_rate, "Dropout after each diffusion layer"),
                         "dropout_rate");
    options.emplace_back(cmd->add_option("--residual", c.residual, "Residual connection (false: MLP ablation)"),
                         "residual");
    options.emplace_back(cmd->add_option("--optimizer", optimizer, "adam | sgd")->check(CLI::IsMember({"adam", "sgd"})),
                         "optimizer");
    options.emplace_back(cmd->add_option("--splits", flag_values.splits, "Random splits"), "n_splits");
    options.emplace_back(cmd->add_option("--inits", flag_values.inits, "Initializations per split"), "n_inits");
    options.emplace_back(cmd->add_option("--seed", flag_values.seed, "Master seed"), "master_seed");
  }

  RunOptions finish() const {
    RunOptions o;
    if (!config_path.empty()) {
      require_file(config_path);
      apply_config_file(o, config_path);
    }
    RunOptions flags = flag_values;
    flags.cfg.optimizer = nn::parse_optimizer_kind(optimizer);
    for (const auto& [opt, key] : options) {
      if (opt->count() == 0) continue;
      const auto& keys = config_keys();
      const auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == key; });
      it->set(o, it->get(flags));
    }
    o.cfg.validate();
    if (o.splits < 1 || o.inits < 1) throw UsageError("--splits and --inits must be >= 1");
    if (o.dataset.empty()) throw UsageError("no dataset: pass --dataset or set \"dataset\" in the config");
    return o;
  }
};

void print_warnings(const std::vector<model::RunRecord>& runs) {
  std::set<std::string> seen;
  for (const auto& r : runs) {
    for (const auto& w : r.warnings) {
      if (seen.insert(w).second) std::cerr << "warning: " << w << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Subcommands.

struct PrepArgs {
  std::string format;
  std::string content, cites;
  std::string features, labels, edges;
  bool row_normalize = false;
  std::string name;
};

int cmd_prep(const PrepArgs& a) {
  data::DatasetBundle bundle;
  Manifest manifest("prep");
  std::string stem;
  if (a.format == "linqs") {
    if (a.content.empty() || a.cites.empty()) throw UsageError("prep --format linqs needs --content and --cites");
    require_file(a.content);
    require_file(a.cites);
    manifest.input(a.content);
    manifest.input(a.cites);
    bundle = data::load_linqs(a.content, a.cites);
    stem = fs::path(a.content).stem().string();
  } else {
    if (a.features.empty() || a.labels.empty()) throw UsageError("prep --format csv needs --features and --labels");
    require_file(a.features);
    require_file(a.labels);
    manifest.input(a.features);
    manifest.input(a.labels);
    std::optional<fs::path> edges;
    if (!a.edges.empty()) {
      require_file(a.edges);
      manifest.input(a.edges);
      edges = a.edges;
    }
    bundle = data::load_csv(a.features, a.labels, edges, data::CsvOptions{a.row_normalize});
    stem = fs::path(a.features).stem().string();
  }
  const std::string name = a.name.empty() ? stem : a.name;
  const fs::path out = cache_dir() / (name + ".bundle");
  fs::create_directories(out.parent_path());
  const std::string blob = data::encode_bundle(bundle);
  binio::write_file_atomic(out, blob);

  manifest.config({{"format", a.format}, {"name", name}, {"row_normalize", a.row_normalize}});
  manifest.output(out);
  manifest.write_next_to(out);
  std::cout << bundle.stats_line() << "\n";
  std::cout << "cache=" << out.string() << " sha1=" << git_blob_hash(blob) << "\n";
  if (bundle.provenance.dangling_edges + bundle.provenance.self_loops + bundle.provenance.zero_feature_rows > 0) {
    std::cerr << "note: dropped " << bundle.provenance.dangling_edges << " dangling and "
              << bundle.provenance.self_loops << " self-loop edges; " << bundle.provenance.zero_feature_rows
              << " all-zero feature rows\n";
  }
  return kExitOk;
}

struct TrainArgs {
  std::string out = "results.csv";
  bool record_wall_time = false;
  std::size_t jobs = 1;
  TrainFlags flags;
};

int cmd_train(const TrainArgs& a) {
  const RunOptions o = a.flags.finish();
  const fs::path bundle_path = resolve_bundle(o.dataset);
  Manifest manifest("train");
  manifest.input(bundle_path);
  if (!a.flags.config_path.empty()) manifest.input(a.flags.config_path);
  const auto bundle = data::load_bundle(bundle_path);
  if (bundle.provenance.graph_kind == "none") {
    throw InputError(bundle_path.string() + " has no graph; rebuild it with an edge file or `coin graph-build`");
  }
  const auto summary = model::run_protocol(bundle, o.splits, o.inits, o.cfg, o.seed, a.jobs);
  print_warnings(summary.runs);

  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  binio::write_file_atomic(out, model::results_csv(summary, a.record_wall_time));
  manifest.config(config_snapshot(o));
  manifest.seed(o.seed);
  manifest.output(out);
  manifest.write_next_to(out);
  std::cout << "mean=" << fmt("%.2f", 100.0 * summary.mean) << " std=" << fmt("%.2f", 100.0 * summary.std)
            << " runs=" << summary.runs.size() << "\n";
  return kExitOk;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  for (auto field : coin::text::split(text, ',')) {
    field = coin::text::trim(field);
    if (field.empty()) continue;
    T v{};
    if (!coin::text::parse_number(field, v)) throw UsageError(flag + ": cannot parse '" + std::string(field) + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + ": empty grid");
  return out;
}

struct SweepArgs {
  std::string k_list;
  std::string sigma2_list;
  std::string out = "sweep.csv";
  std::size_t jobs = 1;
  TrainFlags flags;
};

int cmd_sweep(const SweepArgs& a) {
  const auto ks = parse_list<std::size_t>(a.k_list, "--K-list");
  const auto s2 = parse_list<double>(a.sigma2_list, "--sigma2-list");
  for (double s : s2) {
    if (!(s >= 0.0)) throw UsageError("--sigma2-list: values must be >= 0");
  }
  const RunOptions o = a.flags.finish();
  const fs::path bundle_path = resolve_bundle(o.dataset);
  Manifest manifest("sweep");
  manifest.input(bundle_path);
  if (!a.flags.config_path.empty()) manifest.input(a.flags.config_path);
  const auto bundle = data::load_bundle(bundle_path);
  const auto rows = model::sweep(bundle, ks, s2, o.splits, o.inits, o.cfg, o.seed, a.jobs);

  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  binio::write_file_atomic(out, model::sweep_csv(rows));
  ordered_json cfg = config_snapshot(o);
  cfg.erase("K");
  cfg.erase("sigma2");
  cfg["K_list"] = a.k_list;
  cfg["sigma2_list"] = a.sigma2_list;
  manifest.config(cfg);
  manifest.seed(o.seed);
  manifest.output(out);
  manifest.write_next_to(out);
  for (std::size_t k : ks) {
    for (double s : s2) {
      std::cout << "K=" << k << " sigma2=" << fmt("%g", s) << " mean=" << fmt("%.2f", 100.0 * model::cell_mean(rows, k, s))
                << "\n";
    }
  }
  std::cout << "rows=" << rows.size() << "\n";
  return kExitOk;
}

struct VerifyArgs {
  std::size_t seeds = 20;
  std::size_t paths = 4000;
  std::uint64_t seed = 0;
  bool break_cfl = false;
  std::string out;
};

int cmd_verify_pde(const VerifyArgs& a) {
  if (a.break_cfl) {
    const pde::Grid1D grid(0.0, 1.0, 64);
    const auto f = pde::Field1D::constant(grid, 1.0);
    const double dt = 0.6 * grid.dx() * grid.dx();
    try {
      pde::step_diffusion(f, 1.0, dt);
    } catch (const CflError& e) {
      std::cerr << "CFL rejected: " << e.what() << " (ratio=" << fmt("%.3f", e.ratio())
                << " limit=" << fmt("%.3f", e.limit()) << ")\n";
      return kExitUsage;
    }
    std::cerr << "CFL guard did not trigger\n";
    return kExitCheckFailed;
  }
  if (a.seeds < 1) throw UsageError("--seeds must be >= 1");
  if (a.paths < 100) throw UsageError("--paths must be >= 100");
  pde::SuiteOptions opt;
  opt.fk_seeds = a.seeds;
  opt.fk_paths = a.paths;
  opt.seed = a.seed;
  const auto rows = pde::run_pde_suite(opt);
  std::string csv = "axiom,residual,threshold,pass\n";
  std::vector<std::string> failing;
  for (const auto& r : rows) {
    std::cout << r.name << " " << (r.pass ? "PASS" : "FAIL") << " residual=" << fmt("%.3e", r.residual)
              << " threshold=" << fmt("%.3e", r.threshold) << "\n";
    csv += r.name + "," + fmt("%.6e", r.residual) + "," + fmt("%.6e", r.threshold) + "," + (r.pass ? "1" : "0") + "\n";
    if (!r.pass) failing.push_back(r.name);
  }
  if (!a.out.empty()) {
    const fs::path out(a.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    binio::write_file_atomic(out, csv);
    Manifest manifest("verify-pde");
    manifest.config({{"seeds", a.seeds}, {"paths", a.paths}});
    manifest.seed(a.seed);
    manifest.output(out);
    manifest.write_next_to(out);
  }
  if (!failing.empty()) {
    std::string names;
    for (const auto& n : failing) names += (names.empty() ? "" : ", ") + n;
    std::cerr << "failing checks: " << names << "\n";
    return kExitCheckFailed;
  }
  std::cout << "all " << rows.size() << " checks passed\n";
  return kExitOk;
}

struct GraphBuildArgs {
  std::string features;
  std::string labels;
  std::size_t n_top = 8;
  std::size_t sigma_k = 4;
  std::string name;
  bool row_normalize = false;
};

int cmd_graph_build(const GraphBuildArgs& a) {
  require_file(a.features);
  Manifest manifest("graph-build");
  manifest.input(a.features);
  const auto table = data::parse_csv(binio::read_file(a.features), a.features);
  nn::Tensor x = data::parse_feature_table(table, a.features);
  if (a.row_normalize) x = data::row_normalize(x);
  if (x.rows() <= a.n_top) {
    throw InputError("graph-build: " + std::to_string(x.rows()) + " points but --n-top " + std::to_string(a.n_top) +
                     "; need more points than neighbours");
  }
  const auto knn = graph::build_knn_gaussian(x, a.n_top, a.sigma_k);
  const std::string name = a.name.empty() ? fs::path(a.features).stem().string() : a.name;
  const fs::path out = cache_dir() / (name + ".graph");
  fs::create_directories(out.parent_path());
  graph::save_graph(out, knn.graph);
  manifest.output(out);

  const auto reloaded = graph::load_graph(out);
  if (!reloaded.is_symmetric()) {
    std::cerr << "graph-build: cached graph is not symmetric\n";
    return kExitCheckFailed;
  }
  if (!a.labels.empty()) {
    require_file(a.labels);
    manifest.input(a.labels);
    auto bundle = data::load_csv(a.features, a.labels, std::nullopt, data::CsvOptions{a.row_normalize});
    bundle.graph = reloaded;
    bundle.provenance.graph_kind = "knn";
    const fs::path bundle_out = cache_dir() / (name + ".bundle");
    data::save_bundle(bundle_out, bundle);
    manifest.output(bundle_out);
  }
  manifest.config({{"n_top", a.n_top}, {"sigma_k", a.sigma_k}, {"row_normalize", a.row_normalize}});
  manifest.write_next_to(out);
  std::cout << "nodes=" << reloaded.n_nodes() << " edges=" << reloaded.undirected_edge_count()
            << " n_top=" << a.n_top << " sigma_k=" << a.sigma_k << " degenerate_bandwidths=" << knn.degenerate_bandwidths
            << "\n";
  std::cout << "cache=" << out.string() << "\n";
  return kExitOk;
}

}  // namespace
}  // namespace coin::cli

int main(int argc, char** argv) {
  using namespace coin::cli;
  CLI::App app{"COIN graph diffusion classifier and PDE verification bench"};
  app.require_subcommand(1);

  PrepArgs prep;
  auto* p = app.add_subcommand("prep", "Parse a dataset into a bundle cache");
  p->add_option("--format", prep.format, "linqs | csv")->required()->check(CLI::IsMember({"linqs", "csv"}));
  p->add_option("--content", prep.content, "LINQS node file");
  p->add_option("--cites", prep.cites, "LINQS citation file");
  p->add_option("--features", prep.features, "Feature CSV");
  p->add_option("--labels", prep.labels, "Label CSV");
  p->add_option("--edges", prep.edges, "Optional tab-separated edge list");
  p->add_flag("--row-normalize", prep.row_normalize, "Row-normalize CSV features");
  p->add_option("--name", prep.name, "Cache name (default: input file stem)");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Repeated-split training protocol");
  t->add_option("--out", train.out, "Per-run results CSV");
  t->add_flag("--record-wall-time", train.record_wall_time, "Fill the wall_s column (breaks byte-identical reruns)");
  t->add_option("--jobs", train.jobs, "Worker threads")->check(CLI::PositiveNumber);
  train.flags.add_to(t, false);

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "(K, sigma2) grid sweep");
  s->add_option("--K-list", sweep.k_list, "Comma-separated K values")->required();
  s->add_option("--sigma2-list", sweep.sigma2_list, "Comma-separated sigma2 values")->required();
  s->add_option("--out", sweep.out, "Sweep CSV");
  s->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep.flags.add_to(s, true);

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify-pde", "Run the PDE verification suite");
  v->add_option("--seeds", verify.seeds, "Feynman-Kac trials");
  v->add_option("--paths", verify.paths, "Monte Carlo paths per trial");
  v->add_option("--seed", verify.seed, "Master seed");
  v->add_option("--out", verify.out, "Optional report CSV");
  v->add_flag("--break-cfl", verify.break_cfl, "Demonstrate the CFL guard with an unstable step");

  GraphBuildArgs gb;
  auto* g = app.add_subcommand("graph-build", "Gaussian k-NN graph over feature rows");
  g->add_option("--features", gb.features, "Feature CSV")->required();
  g->add_option("--labels", gb.labels, "Label CSV; also writes a trainable bundle");
  g->add_option("--n-top", gb.n_top, "Neighbours per point")->check(CLI::PositiveNumber);
  g->add_option("--sigma-k", gb.sigma_k, "Bandwidth neighbour rank")->check(CLI::PositiveNumber);
  g->add_option("--name", gb.name, "Cache name (default: feature file stem)");
  g->add_flag("--row-normalize", gb.row_normalize, "Row-normalize features first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*p) return cmd_prep(prep);
    if (*t) return cmd_train(train);
    if (*s) return cmd_sweep(sweep);
    if (*v) return cmd_verify_pde(verify);
    if (*g) return cmd_graph_build(gb);
  } catch (const coin::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const coin::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}

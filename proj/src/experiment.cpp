#include "defrost/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <vector>

#include "defrost/autoencoder.hpp"
#include "defrost/datagen.hpp"
#include "defrost/io.hpp"
#include "defrost/log.hpp"
#include "defrost/protocols.hpp"
#include "defrost/rng.hpp"
#include "defrost/simmetrics.hpp"
#include "defrost/svg.hpp"

namespace defrost {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;

const json& require(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config missing required key '" + key + "'");
  return j.at(key);
}

/// Execution context for one run: resolved directories, manifest state.
struct RunContext {
  fs::path config_dir;
  fs::path out_dir;
  std::size_t jobs = 1;
  std::vector<std::string> artifacts;
  std::map<std::string, double> stage_seconds;

  std::string out_path(const std::string& name) {
    artifacts.push_back(name);
    return (out_dir / name).string();
  }

  /// Inputs resolve against the config file's directory unless absolute.
  std::string in_path(const std::string& ref) const {
    fs::path p(ref);
    if (p.is_absolute()) return p.string();
    return (config_dir / p).string();
  }
};

class StageTimer {
 public:
  StageTimer(RunContext& ctx, std::string name)
      : ctx_(ctx), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    ctx_.stage_seconds[name_] += std::chrono::duration<double>(elapsed).count();
  }

 private:
  RunContext& ctx_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

std::string checked_input(const RunContext& ctx, const json& j, const std::string& key) {
  const std::string path = ctx.in_path(require(j, key).get<std::string>());
  if (!fs::exists(path)) throw ConfigError("config key '" + key + "' points to missing file " + path);
  return path;
}

LabeledDataset load_dataset(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return read_dataset_csv(path);
  return read_dataset_dfl1(path);
}

std::vector<std::uint64_t> seeds_from_json(const json& j, const std::string& key) {
  std::vector<std::uint64_t> seeds;
  for (const auto& s : require(j, key)) seeds.push_back(s.get<std::uint64_t>());
  if (seeds.empty()) throw ConfigError("config key '" + key + "' must be a nonempty array");
  return seeds;
}

// ---------------------------------------------------------------------------
// gen: reference dataset plus requested clones
// ---------------------------------------------------------------------------

void run_gen(const json& cfg, RunContext& ctx) {
  const std::uint64_t seed = require(cfg, "seed").get<std::uint64_t>();
  const json& ref = require(cfg, "reference");
  ReferenceConfig rc;
  rc.dim = require(ref, "dim").get<std::size_t>();
  rc.num_classes = require(ref, "classes").get<int>();
  rc.latent_dim = require(ref, "latent").get<std::size_t>();
  rc.higher_order_strength = ref.value("alpha", 0.0);
  rc.structure_seed = require(ref, "structure_seed").get<std::uint64_t>();
  const auto n_train = require(cfg, "n_train_per_class").get<std::size_t>();
  const auto n_test = require(cfg, "n_test_per_class").get<std::size_t>();
  const bool emit_csv = cfg.value("csv", false);

  LabeledDataset train_set, test_set;
  FeatureStats stats;
  {
    StageTimer timer(ctx, "reference");
    train_set = make_reference(rc, n_train, mix_seed(seed, 101));
    test_set = make_reference(rc, n_test, mix_seed(seed, 102));
    auto [std_train, train_stats] = standardize(train_set);
    train_set = std::move(std_train);
    stats = std::move(train_stats);
    test_set = apply_standardization(test_set, stats);
    write_dataset_dfl1(train_set, ctx.out_path("reference_train.dfl1"));
    write_dataset_dfl1(test_set, ctx.out_path("reference_test.dfl1"));
    if (emit_csv) {
      write_dataset_csv(train_set, ctx.out_path("reference_train.csv"));
      write_dataset_csv(test_set, ctx.out_path("reference_test.csv"));
    }
  }

  if (!cfg.contains("clones")) return;
  std::size_t clone_index = 0;
  for (const auto& clone : cfg.at("clones")) {
    const std::string type = require(clone, "type").get<std::string>();
    const std::uint64_t clone_seed = mix_seed(seed, 200 + clone_index++);
    const auto n_clone = clone.value("n_per_class", n_train);
    if (type == "isogm") {
      StageTimer timer(ctx, "clone_isogm");
      LabeledDataset sample = sample_mixture(fit_isogm(train_set), n_clone, clone_seed);
      write_dataset_dfl1(standardize(sample).first, ctx.out_path("clone_isogm.dfl1"));
    } else if (type == "gm") {
      StageTimer timer(ctx, "clone_gm");
      LabeledDataset sample = sample_mixture(fit_gm(train_set), n_clone, clone_seed);
      write_dataset_dfl1(standardize(sample).first, ctx.out_path("clone_gm.dfl1"));
    } else if (type == "ae") {
      StageTimer timer(ctx, "clone_ae");
      AutoencoderConfig ac;
      ac.hidden = clone.value("hidden", std::vector<std::size_t>{2 * rc.dim});
      ac.epochs = clone.value("epochs", 200);
      ac.batch_size = clone.value("batch_size", 256);
      ac.peak_lr = clone.value("peak_lr", 1e-3);
      ac.floor_lr = clone.value("floor_lr", 1e-5);
      ac.warmup_fraction = clone.value("warmup_fraction", 0.2);
      const auto bottleneck = require(clone, "bottleneck").get<std::size_t>();
      AutoencoderResult ae = train_autoencoder(train_set, bottleneck, ac, clone_seed);
      log_info("autoencoder bottleneck " + std::to_string(ae.model.bottleneck) +
               " reconstruction error " + format_double(ae.final_train_error));
      const std::string tag = "ae" + std::to_string(ae.model.bottleneck);
      write_dataset_dfl1(clone_via_autoencoder(ae.model, train_set),
                         ctx.out_path("clone_" + tag + ".dfl1"));
      write_params_dfw1(ae.model.encoder_params, ctx.out_path("clone_" + tag + "_encoder.dfw1"));
      write_params_dfw1(ae.model.decoder_params, ctx.out_path("clone_" + tag + "_decoder.dfw1"));
    } else {
      throw ConfigError("unknown clone type '" + type + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// train: one network on one dataset
// ---------------------------------------------------------------------------

void run_train(const json& cfg, RunContext& ctx) {
  const std::uint64_t seed = require(cfg, "seed").get<std::uint64_t>();
  const NetworkSpec spec = spec_from_json(require(cfg, "spec"));
  TrainConfig tc = train_config_from_json(require(cfg, "train"));
  tc.seed = mix_seed(seed, kShuffleStream);

  const LabeledDataset train_set = load_dataset(checked_input(ctx, cfg, "train_data"));
  ParamSet init;
  if (cfg.contains("init_checkpoint"))
    init = read_params_dfw1(checked_input(ctx, cfg, "init_checkpoint"));
  else
    init = he_init(spec, mix_seed(seed, kInitStream));

  TrainResult result;
  {
    StageTimer timer(ctx, "train");
    result = train(spec, init, train_set, tc, FreezeMask::none(spec.num_layers()));
  }
  write_params_dfw1(result.params, ctx.out_path("checkpoint.dfw1"));
  write_history_csv(result.history, ctx.out_path("history.csv"));

  if (cfg.contains("test_data")) {
    StageTimer timer(ctx, "evaluate");
    const LabeledDataset test_set = load_dataset(checked_input(ctx, cfg, "test_data"));
    const double acc = evaluate(spec, result.params, test_set);
    json metrics{{"test_accuracy", acc}};
    std::ofstream out(ctx.out_path("metrics.json"));
    out << metrics.dump(2) << '\n';
    log_info("test accuracy " + format_double(acc));
  }
}

// ---------------------------------------------------------------------------
// defrost: full-grid profile or budget-limited probe
// ---------------------------------------------------------------------------

TransferTask load_task(const json& cfg, RunContext& ctx, const NetworkSpec& spec) {
  TransferTask task;
  task.spec = spec;
  task.source_params = read_params_dfw1(checked_input(ctx, cfg, "source_checkpoint"));
  task.target_train = load_dataset(checked_input(ctx, cfg, "target_train"));
  task.target_test = load_dataset(checked_input(ctx, cfg, "target_test"));
  return task;
}

json profile_to_json(const DefrostingProfile& profile) {
  json entries = json::array();
  for (const auto& e : profile.entries)
    entries.push_back({{"cut", e.cut},
                       {"mean_acc", e.mean_accuracy},
                       {"std_acc", e.std_accuracy},
                       {"n_seeds", e.seed_count}});
  return entries;
}

void run_defrost(const json& cfg, RunContext& ctx) {
  const NetworkSpec spec = spec_from_json(require(cfg, "spec"));
  require(cfg, "seed");
  TrainConfig tc = train_config_from_json(require(cfg, "train"));
  const TransferTask task = load_task(cfg, ctx, spec);
  const auto seeds = seeds_from_json(cfg, "seeds");
  const std::string mode = cfg.value("mode", "grid");

  ProfileCellCache cache;
  json extra;
  if (mode == "grid") {
    std::vector<std::size_t> cuts;
    for (const auto& c : require(cfg, "cuts")) cuts.push_back(c.get<std::size_t>());
    DefrostingProfile profile;
    {
      StageTimer timer(ctx, "profile");
      profile = build_profile(task, cuts, seeds, tc, ctx.jobs, &cache);
    }
    write_profile_csv(profile, ctx.out_path("profile.csv"));
    emit_profile_svg(profile, ctx.out_path("profile.svg"));
    extra = {{"entries", profile_to_json(profile)}, {"optimal_depth", optimal_depth(profile)}};
    log_info("optimal transfer depth " + std::to_string(optimal_depth(profile)));
  } else if (mode == "probe") {
    const auto budget = require(cfg, "probe_budget").get<std::size_t>();
    ProbeResult probe;
    {
      StageTimer timer(ctx, "probe");
      probe = efficient_probe(task, budget, tc, seeds, ctx.jobs, &cache);
    }
    write_profile_csv(probe.probed, ctx.out_path("probe.csv"));
    extra = {{"entries", profile_to_json(probe.probed)}, {"estimated_depth", probe.best_cut}};
    log_info("estimated transfer depth " + std::to_string(probe.best_cut));
  } else {
    throw ConfigError("unknown defrost mode '" + mode + "' (expected grid or probe)");
  }

  json summary{{"spec", spec_to_json(spec)},
               {"train", train_config_to_json(tc)},
               {"seeds", require(cfg, "seeds")},
               {"mode", mode}};
  summary.update(extra);
  std::ofstream out(ctx.out_path("profile.json"));
  out << summary.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// compliant: elastic-coupling sweep
// ---------------------------------------------------------------------------

void run_compliant(const json& cfg, RunContext& ctx) {
  const NetworkSpec spec = spec_from_json(require(cfg, "spec"));
  require(cfg, "seed");
  TrainConfig tc = train_config_from_json(require(cfg, "train"));
  const TransferTask task = load_task(cfg, ctx, spec);
  const auto seeds = seeds_from_json(cfg, "seeds");
  std::vector<double> lambdas;
  for (const auto& l : require(cfg, "lambdas")) lambdas.push_back(l.get<double>());
  std::vector<std::size_t> coupled;
  for (const auto& l : require(cfg, "coupled_layers")) coupled.push_back(l.get<std::size_t>());

  CompliantSweepResult sweep;
  {
    StageTimer timer(ctx, "sweep");
    sweep = compliant_sweep(task, lambdas, coupled, tc, seeds, ctx.jobs);
  }
  write_compliant_csv(sweep, ctx.out_path("compliant.csv"));

  json points = json::array();
  for (const auto& p : sweep.points)
    points.push_back({{"lambda", p.lambda},
                      {"mean_acc", p.mean_accuracy},
                      {"std_acc", p.std_accuracy},
                      {"cos_dist", p.cosine_dist}});
  json summary{{"spec", spec_to_json(spec)},
               {"train", train_config_to_json(tc)},
               {"seeds", require(cfg, "seeds")},
               {"coupled_layers", require(cfg, "coupled_layers")},
               {"points", points}};
  std::ofstream out(ctx.out_path("compliant.json"));
  out << summary.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// similarity: layer-wise metric curves between two checkpoints
// ---------------------------------------------------------------------------

void run_similarity(const json& cfg, RunContext& ctx) {
  const NetworkSpec spec = spec_from_json(require(cfg, "spec"));
  require(cfg, "seed");
  const ParamSet params_a = read_params_dfw1(checked_input(ctx, cfg, "checkpoint_a"));
  const ParamSet params_b = read_params_dfw1(checked_input(ctx, cfg, "checkpoint_b"));
  const LabeledDataset probe = load_dataset(checked_input(ctx, cfg, "probe_data"));

  std::vector<SimilarityCurve> curves;
  {
    StageTimer timer(ctx, "curves");
    for (const auto& m : require(cfg, "metrics")) {
      MetricRequest request;
      request.name = require(m, "name").get<std::string>();
      request.k = m.value("k", 0);
      curves.push_back(layerwise_curve(spec, params_a, spec, params_b, probe.features, request));
    }
  }
  write_curves_csv(curves, ctx.out_path("similarity.csv"));

  json points = json::array();
  for (const auto& curve : curves)
    for (const auto& p : curve.points)
      points.push_back({{"layer", p.layer}, {"metric", p.metric}, {"value", p.value}});
  json summary{{"spec", spec_to_json(spec)}, {"points", points}};
  std::ofstream out(ctx.out_path("similarity.json"));
  out << summary.dump(2) << '\n';
}

}  // namespace

std::string config_hash(const json& config) {
  const std::string dump = config.dump();
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

NetworkSpec spec_from_json(const json& j) {
  NetworkSpec spec;
  for (const auto& layer : require(j, "layers")) {
    LayerSpec ls;
    ls.in = require(layer, "in").get<std::size_t>();
    ls.out = require(layer, "out").get<std::size_t>();
    ls.activation = activation_from_name(require(layer, "activation").get<std::string>());
    spec.layers.push_back(ls);
  }
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid network spec: ") + e.what());
  }
  return spec;
}

json spec_to_json(const NetworkSpec& spec) {
  json layers = json::array();
  for (const auto& l : spec.layers)
    layers.push_back({{"in", l.in}, {"out", l.out}, {"activation", activation_name(l.activation)}});
  return {{"layers", layers}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig tc;
  tc.epochs = j.value("epochs", tc.epochs);
  tc.batch_size = j.value("batch_size", tc.batch_size);
  tc.lr0 = j.value("lr0", tc.lr0);
  tc.momentum = j.value("momentum", tc.momentum);
  tc.weight_decay = j.value("weight_decay", tc.weight_decay);
  tc.warmup_epochs = j.value("warmup_epochs", tc.warmup_epochs);
  tc.lr_floor = j.value("lr_floor", tc.lr_floor);
  if (j.contains("schedule")) {
    const std::string s = j.at("schedule").get<std::string>();
    if (s == "cosine") tc.schedule = LrSchedule::Cosine;
    else if (s == "warmup_anneal") tc.schedule = LrSchedule::WarmupAnneal;
    else if (s == "constant") tc.schedule = LrSchedule::Constant;
    else throw ConfigError("unknown schedule '" + s + "'");
  }
  if (j.contains("loss")) {
    const std::string s = j.at("loss").get<std::string>();
    if (s == "cross_entropy") tc.loss = LossKind::CrossEntropy;
    else if (s == "mse") tc.loss = LossKind::MeanSquaredError;
    else throw ConfigError("unknown loss '" + s + "'");
  }
  if (j.contains("optimizer")) {
    const std::string s = j.at("optimizer").get<std::string>();
    if (s == "sgd") tc.optimizer = Optimizer::SgdMomentum;
    else if (s == "adam") tc.optimizer = Optimizer::Adam;
    else throw ConfigError("unknown optimizer '" + s + "'");
  }
  try {
    tc.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid train config: ") + e.what());
  }
  return tc;
}

json train_config_to_json(const TrainConfig& tc) {
  const char* schedule = tc.schedule == LrSchedule::Cosine ? "cosine"
                         : tc.schedule == LrSchedule::WarmupAnneal ? "warmup_anneal"
                                                                   : "constant";
  return {{"epochs", tc.epochs},
          {"batch_size", tc.batch_size},
          {"lr0", tc.lr0},
          {"momentum", tc.momentum},
          {"weight_decay", tc.weight_decay},
          {"schedule", schedule},
          {"loss", tc.loss == LossKind::CrossEntropy ? "cross_entropy" : "mse"},
          {"optimizer", tc.optimizer == Optimizer::SgdMomentum ? "sgd" : "adam"},
          {"warmup_epochs", tc.warmup_epochs},
          {"lr_floor", tc.lr_floor}};
}

int run_experiment(const std::string& config_path, const std::string& out_dir, std::size_t jobs,
                   const std::string& expected_kind) {
  json cfg;
  RunContext ctx;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    const std::string kind = require(cfg, "experiment").get<std::string>();
    if (kind != "gen" && kind != "train" && kind != "defrost" && kind != "compliant" &&
        kind != "similarity")
      throw ConfigError("unknown experiment kind '" + kind + "'");
    if (kind != expected_kind)
      throw ConfigError("config experiment kind '" + kind + "' does not match subcommand '" +
                        expected_kind + "'");
    require(cfg, "seed");

    ctx.config_dir = fs::absolute(fs::path(config_path)).parent_path();
    ctx.out_dir = out_dir;
    ctx.jobs = jobs;
    fs::create_directories(ctx.out_dir);

    if (kind == "gen") run_gen(cfg, ctx);
    else if (kind == "train") run_train(cfg, ctx);
    else if (kind == "defrost") run_defrost(cfg, ctx);
    else if (kind == "compliant") run_compliant(cfg, ctx);
    else run_similarity(cfg, ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }

  json manifest{{"config_hash", config_hash(cfg)},
                {"tool_version", kToolVersion},
                {"artifacts", ctx.artifacts},
                {"stage_seconds", ctx.stage_seconds}};
  manifest["artifacts"].push_back("manifest.json");
  try {
    std::ofstream out((ctx.out_dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest.json");
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace defrost

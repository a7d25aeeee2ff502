#include "defrost/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "defrost/parallel.hpp"
#include "defrost/rng.hpp"

namespace defrost {
namespace {

// Salts for the independent random streams a single cell seed fans into.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;

struct SeedStats {
  double mean = 0.0;
  double stddev = 0.0;
};

SeedStats mean_std(std::span<const double> values) {
  SeedStats s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  for (double v : values) s.stddev += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(s.stddev / static_cast<double>(values.size()));
  return s;
}

/// Cut just after the first width-reducing layer, or 1 when the widths
/// never shrink before the readout.
std::size_t first_reduction_cut(const NetworkSpec& spec) {
  for (std::size_t l = 0; l + 1 < spec.num_layers(); ++l)
    if (spec.layers[l].out < spec.layers[l].in) return l + 1;
  return 1;
}

}  // namespace

void TransferTask::validate() const {
  spec.validate();
  source_params.validate(spec);
  target_train.validate();
  target_test.validate();
  if (target_train.dim() != spec.input_width())
    throw std::invalid_argument("transfer task: target dimension does not match network input");
  if (target_test.dim() != spec.input_width())
    throw std::invalid_argument("transfer task: test dimension does not match network input");
  if (target_train.num_classes != target_test.num_classes)
    throw std::invalid_argument("transfer task: train/test class counts disagree");
  if (spec.output_width() != static_cast<std::size_t>(target_train.num_classes))
    throw std::invalid_argument("transfer task: readout width does not match class count");
}

double defrost_at(const TransferTask& task, std::size_t cut, const TrainConfig& config,
                  std::uint64_t rng_seed, bool use_prefix_cache) {
  task.validate();
  const std::size_t num_layers = task.spec.num_layers();
  if (cut + 1 > num_layers)
    throw std::invalid_argument("defrost_at: cut " + std::to_string(cut) + " out of range [0, " +
                                std::to_string(num_layers - 1) + "]");

  // One full draw regardless of the cut so the transferred-prefix overwrite
  // never shifts the suffix initialization stream.
  ParamSet params = he_init(task.spec, mix_seed(rng_seed, kInitStream));
  for (std::size_t l = 0; l < cut; ++l) params.layers[l] = task.source_params.layers[l];

  TrainConfig cell_config = config;
  cell_config.seed = mix_seed(rng_seed, kShuffleStream);

  if (!use_prefix_cache) {
    const FreezeMask mask = FreezeMask::prefix(num_layers, cut);
    TrainResult trained = train(task.spec, params, task.target_train, cell_config, mask);
    return evaluate(task.spec, trained.params, task.target_test);
  }

  // Apply the frozen prefix to train and test once, then train the suffix
  // as a standalone network on the transformed features.
  LabeledDataset train_view;
  train_view.features =
      extract_representation(task.spec, params, task.target_train.features, cut);
  train_view.labels = task.target_train.labels;
  train_view.num_classes = task.target_train.num_classes;

  LabeledDataset test_view;
  test_view.features = extract_representation(task.spec, params, task.target_test.features, cut);
  test_view.labels = task.target_test.labels;
  test_view.num_classes = task.target_test.num_classes;

  const NetworkSpec suffix_spec = task.spec.slice(cut, num_layers);
  const ParamSet suffix_init = params.slice(cut, num_layers);
  TrainResult trained = train(suffix_spec, suffix_init, train_view, cell_config,
                              FreezeMask::none(suffix_spec.num_layers()));
  return evaluate(suffix_spec, trained.params, test_view);
}

namespace {

double run_cell(const TransferTask& task, std::size_t cut, const TrainConfig& config,
                std::uint64_t cell_seed, ProfileCellCache* cache) {
  if (cache) {
    std::lock_guard<std::mutex> lock(cache->mu);
    auto it = cache->values.find({cut, cell_seed});
    if (it != cache->values.end()) return it->second;
  }
  const double acc = defrost_at(task, cut, config, cell_seed);
  if (cache) {
    std::lock_guard<std::mutex> lock(cache->mu);
    cache->values.emplace(std::make_pair(cut, cell_seed), acc);
  }
  return acc;
}

/// Evaluates one cut across all seeds (cells run serially here; callers
/// parallelize across cuts or probe steps).
ProfileEntry evaluate_cut(const TransferTask& task, std::size_t cut, const TrainConfig& config,
                          std::span<const std::uint64_t> seeds, std::size_t jobs,
                          ProfileCellCache* cache) {
  std::vector<double> values(seeds.size());
  parallel_cells(seeds.size(), jobs, [&](std::size_t s) {
    values[s] = run_cell(task, cut, config, mix_seed(seeds[s], 0x1000 + cut), cache);
  });
  SeedStats stats = mean_std(values);
  return {cut, stats.mean, stats.stddev, seeds.size()};
}

}  // namespace

DefrostingProfile build_profile(const TransferTask& task, std::span<const std::size_t> cuts,
                                std::span<const std::uint64_t> seeds, const TrainConfig& config,
                                std::size_t jobs, ProfileCellCache* cache) {
  if (cuts.empty() || seeds.empty())
    throw std::invalid_argument("build_profile: need at least one cut and one seed");
  task.validate();

  struct Cell {
    std::size_t cut_index;
    std::size_t seed_index;
  };
  std::vector<Cell> cells;
  cells.reserve(cuts.size() * seeds.size());
  for (std::size_t c = 0; c < cuts.size(); ++c)
    for (std::size_t s = 0; s < seeds.size(); ++s) cells.push_back({c, s});

  Matrix results(cuts.size(), seeds.size());
  parallel_cells(cells.size(), jobs, [&](std::size_t i) {
    const auto [c, s] = cells[i];
    results(c, s) = run_cell(task, cuts[c], config, mix_seed(seeds[s], 0x1000 + cuts[c]), cache);
  });

  DefrostingProfile profile;
  const auto counts = task.target_train.class_counts();
  profile.target_per_class = counts.empty() ? 0 : *std::min_element(counts.begin(), counts.end());
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    std::vector<double> row(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) row[s] = results(c, s);
    SeedStats stats = mean_std(row);
    profile.entries.push_back({cuts[c], stats.mean, stats.stddev, seeds.size()});
  }
  std::sort(profile.entries.begin(), profile.entries.end(),
            [](const ProfileEntry& a, const ProfileEntry& b) { return a.cut < b.cut; });
  for (std::size_t i = 1; i < profile.entries.size(); ++i)
    if (profile.entries[i].cut == profile.entries[i - 1].cut)
      throw std::invalid_argument("build_profile: duplicate cut " +
                                  std::to_string(profile.entries[i].cut));
  return profile;
}

std::size_t optimal_depth(const DefrostingProfile& profile) {
  if (profile.entries.empty()) throw std::invalid_argument("optimal_depth: empty profile");
  std::size_t best = 0;
  for (std::size_t i = 1; i < profile.entries.size(); ++i)
    if (profile.entries[i].mean_accuracy >= profile.entries[best].mean_accuracy) best = i;
  return profile.entries[best].cut;
}

ProbeResult efficient_probe(const TransferTask& task, std::size_t budget, const TrainConfig& config,
                            std::span<const std::uint64_t> seeds, std::size_t jobs,
                            ProfileCellCache* cache) {
  if (budget < 2) throw std::invalid_argument("efficient_probe: budget must be >= 2");
  if (seeds.empty()) throw std::invalid_argument("efficient_probe: need at least one seed");
  task.validate();
  const std::size_t num_cuts = task.spec.num_layers();  // cuts 0 .. L-1

  if (budget >= num_cuts) {
    std::vector<std::size_t> all(num_cuts);
    for (std::size_t c = 0; c < num_cuts; ++c) all[c] = c;
    DefrostingProfile profile = build_profile(task, all, seeds, config, jobs, cache);
    return {optimal_depth(profile), std::move(profile)};
  }

  std::map<std::size_t, ProfileEntry> probed;
  auto probe = [&](std::size_t cut) {
    probed.emplace(cut, evaluate_cut(task, cut, config, seeds, jobs, cache));
  };

  // Anchors, in priority order; the midpoint is skipped when the budget is 2.
  const std::size_t next_to_last = num_cuts - 1;
  const std::size_t after_reduction = first_reduction_cut(task.spec);
  std::vector<std::size_t> anchors{next_to_last, after_reduction,
                                   (next_to_last + after_reduction) / 2};
  for (std::size_t a : anchors) {
    if (probed.size() >= budget) break;
    if (!probed.count(a)) probe(a);
  }

  auto best_cut = [&]() {
    std::size_t best = probed.begin()->first;
    double best_acc = probed.begin()->second.mean_accuracy;
    for (const auto& [cut, entry] : probed) {  // ascending cuts: >= keeps the deeper tie
      if (entry.mean_accuracy >= best_acc) {
        best_acc = entry.mean_accuracy;
        best = cut;
      }
    }
    return best;
  };

  // Discrete ternary refinement: bisect the wider unprobed gap flanking the
  // current best; fall back to the nearest unprobed cut when both gaps close.
  while (probed.size() < budget && probed.size() < num_cuts) {
    const std::size_t best = best_cut();
    std::size_t lo_gap = 0, hi_gap = 0;
    long lo = -1;
    std::size_t hi = num_cuts;
    for (const auto& [cut, entry] : probed) {
      if (cut < best) lo = std::max(lo, static_cast<long>(cut));
      if (cut > best) hi = std::min(hi, cut);
    }
    lo_gap = static_cast<std::size_t>(static_cast<long>(best) - lo - 1);
    hi_gap = hi - best - 1;
    std::size_t target;
    if (lo_gap == 0 && hi_gap == 0) {
      // Nearest unprobed cut overall, preferring the deeper side on ties.
      long found = -1;
      for (std::size_t delta = 1; delta < num_cuts && found < 0; ++delta) {
        if (best + delta < num_cuts && !probed.count(best + delta)) found = static_cast<long>(best + delta);
        else if (delta <= best && !probed.count(best - delta)) found = static_cast<long>(best - delta);
      }
      if (found < 0) break;
      target = static_cast<std::size_t>(found);
    } else if (hi_gap >= lo_gap) {
      target = best + (hi - best) / 2;
    } else {
      target = static_cast<std::size_t>(lo + (static_cast<long>(best) - lo) / 2);
    }
    probe(target);
  }

  ProbeResult result;
  result.best_cut = best_cut();
  for (const auto& [cut, entry] : probed) result.probed.entries.push_back(entry);
  const auto counts = task.target_train.class_counts();
  result.probed.target_per_class = counts.empty() ? 0 : *std::min_element(counts.begin(), counts.end());
  return result;
}

CompliantSweepResult compliant_sweep(const TransferTask& task, std::span<const double> lambdas,
                                     std::span<const std::size_t> coupled_layers,
                                     const TrainConfig& config,
                                     std::span<const std::uint64_t> seeds, std::size_t jobs) {
  task.validate();
  if (lambdas.empty()) throw std::invalid_argument("compliant_sweep: need at least one lambda");
  if (coupled_layers.empty()) throw std::invalid_argument("compliant_sweep: need coupled layers");
  if (seeds.empty()) throw std::invalid_argument("compliant_sweep: need at least one seed");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] < 0.0) throw std::invalid_argument("compliant_sweep: lambda must be >= 0");
    if (i > 0 && lambdas[i] <= lambdas[i - 1])
      throw std::invalid_argument("compliant_sweep: lambdas must be strictly increasing");
  }
  const std::size_t first_coupled =
      *std::min_element(coupled_layers.begin(), coupled_layers.end());

  struct Cell {
    std::size_t lambda_index;
    std::size_t seed_index;
  };
  std::vector<Cell> cells;
  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (std::size_t s = 0; s < seeds.size(); ++s) cells.push_back({li, s});

  Matrix acc(lambdas.size(), seeds.size());
  Matrix dist(lambdas.size(), seeds.size());
  parallel_cells(cells.size(), jobs, [&](std::size_t i) {
    const auto [li, s] = cells[i];
    const std::uint64_t cell_seed = mix_seed(seeds[s], 0x2000 + li);
    ParamSet init = he_init(task.spec, mix_seed(cell_seed, kInitStream));
    TrainConfig cell_config = config;
    cell_config.seed = mix_seed(cell_seed, kShuffleStream);

    ElasticCoupling coupling;
    coupling.lambda = lambdas[li];
    coupling.layer_indices.assign(coupled_layers.begin(), coupled_layers.end());
    coupling.reference = task.source_params;
    // lambda = 0 must be arithmetically indistinguishable from no coupling.
    const ElasticCoupling* cp = lambdas[li] == 0.0 ? nullptr : &coupling;

    TrainResult trained = train(task.spec, init, task.target_train, cell_config,
                                FreezeMask::none(task.spec.num_layers()), cp);
    acc(li, s) = evaluate(task.spec, trained.params, task.target_test);
    dist(li, s) = cosine_distance(trained.params, task.source_params, first_coupled);
  });

  CompliantSweepResult result;
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    std::vector<double> accs(seeds.size()), dists(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      accs[s] = acc(li, s);
      dists[s] = dist(li, s);
    }
    SeedStats stats = mean_std(accs);
    SeedStats dstats = mean_std(dists);
    result.points.push_back({lambdas[li], stats.mean, stats.stddev, dstats.mean});
  }
  return result;
}

}  // namespace defrost

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "defrost/dataset.hpp"
#include "defrost/network.hpp"

namespace defrost {

/// A source network plus the target data it is transferred to.
struct TransferTask {
  NetworkSpec spec;          // shared architecture
  ParamSet source_params;    // trained on the source task
  LabeledDataset target_train;
  LabeledDataset target_test;

  void validate() const;
};

struct ProfileEntry {
  std::size_t cut = 0;       // number of leading layers kept frozen
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::size_t seed_count = 0;
};

/// Test accuracy as a function of the frozen-prefix length; its argmax is
/// the optimal transfer depth.
struct DefrostingProfile {
  std::vector<ProfileEntry> entries;  // sorted by cut
  std::string architecture_id;
  std::size_t target_per_class = 0;
};

struct CompliantPoint {
  double lambda = 0.0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double cosine_dist = 0.0;  // first coupled layer vs source, averaged over seeds
};

struct CompliantSweepResult {
  std::vector<CompliantPoint> points;
};

/// Memoizes (cut, seed) -> accuracy for one fixed (task, config); shared by
/// the profile builder and the budget-limited probe so repeated cells are
/// never retrained.
struct ProfileCellCache {
  std::mutex mu;
  std::map<std::pair<std::size_t, std::uint64_t>, double> values;
};

/// Copies layers [0, k) from the source and freezes them, reinitializes the
/// rest (He) and trains on the target train set; returns accuracy on the
/// target test set. rng_seed drives both reinitialization and shuffling.
/// With use_prefix_cache the frozen prefix is applied to the data once and
/// only the suffix network is trained; results are bit-identical either way.
double defrost_at(const TransferTask& task, std::size_t cut, const TrainConfig& config,
                  std::uint64_t rng_seed, bool use_prefix_cache = true);

/// Mean/std of defrost_at over the seed list for every cut, sorted by cut.
DefrostingProfile build_profile(const TransferTask& task, std::span<const std::size_t> cuts,
                                std::span<const std::uint64_t> seeds, const TrainConfig& config,
                                std::size_t jobs = 1, ProfileCellCache* cache = nullptr);

/// Argmax of mean accuracy; ties break toward the larger cut (cheaper training).
std::size_t optimal_depth(const DefrostingProfile& profile);

struct ProbeResult {
  std::size_t best_cut = 0;
  DefrostingProfile probed;  // the partial profile actually evaluated
};

/// Budget-limited search: probes the next-to-last cut, the cut just after
/// the first width-reducing layer and their midpoint, then spends the rest
/// of the budget on discrete ternary refinement around the running best.
/// With budget >= number of cuts this degenerates to the full profile.
ProbeResult efficient_probe(const TransferTask& task, std::size_t budget, const TrainConfig& config,
                            std::span<const std::uint64_t> seeds, std::size_t jobs = 1,
                            ProfileCellCache* cache = nullptr);

/// For each lambda, trains a fresh network from random init under an elastic
/// coupling toward the source weights on the given layers; records test
/// accuracy and the first coupled layer's cosine distance to the source.
CompliantSweepResult compliant_sweep(const TransferTask& task, std::span<const double> lambdas,
                                     std::span<const std::size_t> coupled_layers,
                                     const TrainConfig& config,
                                     std::span<const std::uint64_t> seeds, std::size_t jobs = 1);

}  // namespace defrost

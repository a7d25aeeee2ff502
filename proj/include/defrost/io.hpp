#pragma once

#include <string>
#include <vector>

#include "defrost/dataset.hpp"
#include "defrost/network.hpp"
#include "defrost/protocols.hpp"
#include "defrost/simmetrics.hpp"

namespace defrost {

// Binary dataset container "DFL1": magic, little-endian u32 N, u32 D, u32 C,
// N*D float64 features row-major, N u32 labels. Round-trips bit-identically.
void write_dataset_dfl1(const LabeledDataset& dataset, const std::string& path);
LabeledDataset read_dataset_dfl1(const std::string& path);

// CSV with header f0,...,f{D-1},label; floats printed with 17 significant
// digits so a read-back is value-identical.
void write_dataset_csv(const LabeledDataset& dataset, const std::string& path);
LabeledDataset read_dataset_csv(const std::string& path);

// Checkpoint container "DFW1": magic, u32 layer count, then per layer
// u32 rows, u32 cols, rows*cols float64 weights row-major, cols float64 biases.
void write_params_dfw1(const ParamSet& params, const std::string& path);
ParamSet read_params_dfw1(const std::string& path);

// Activation matrices reuse the DFL1 container with zero-filled labels.
void write_representation(const Matrix& rep, const std::string& path);
Matrix read_representation(const std::string& path);

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path);
void write_profile_csv(const DefrostingProfile& profile, const std::string& path);
void write_compliant_csv(const CompliantSweepResult& sweep, const std::string& path);
void write_curves_csv(const std::vector<SimilarityCurve>& curves, const std::string& path);

/// %.17g rendering used by every CSV writer.
std::string format_double(double value);

}  // namespace defrost

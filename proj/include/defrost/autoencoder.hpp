#pragma once

#include <cstdint>
#include <vector>

#include "defrost/dataset.hpp"
#include "defrost/network.hpp"

namespace defrost {

/// Mirror-symmetric dense autoencoder around a linear bottleneck.
struct AutoencoderModel {
  NetworkSpec encoder_spec;
  ParamSet encoder_params;
  NetworkSpec decoder_spec;
  ParamSet decoder_params;
  std::size_t bottleneck = 0;

  void validate() const;
};

struct AutoencoderConfig {
  std::vector<std::size_t> hidden;  // encoder hidden widths; decoder mirrors them
  Activation activation = Activation::GeLU;
  int epochs = 200;
  int batch_size = 256;
  double peak_lr = 1e-3;
  double floor_lr = 1e-5;
  double warmup_fraction = 0.2;  // fraction of epochs spent ramping up
};

struct AutoencoderResult {
  AutoencoderModel model;
  double final_train_error = 0.0;  // mean squared reconstruction error
};

/// Trains encoder+decoder jointly to minimize mean squared reconstruction
/// error with Adam and a warmup-then-anneal schedule. The requested
/// bottleneck is capped at the data dimension. Expects standardized data.
AutoencoderResult train_autoencoder(const LabeledDataset& dataset, std::size_t bottleneck,
                                    const AutoencoderConfig& config, std::uint64_t rng_seed);

/// decoder(encoder(x)) per row; labels untouched.
Matrix reconstruct(const AutoencoderModel& model, const Matrix& x);

/// Passes every sample through the autoencoder, keeps the labels verbatim
/// and re-standardizes the reconstructed features.
LabeledDataset clone_via_autoencoder(const AutoencoderModel& model, const LabeledDataset& dataset);

}  // namespace defrost

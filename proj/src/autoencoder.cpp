#include "defrost/autoencoder.hpp"

#include <algorithm>
#include <stdexcept>

namespace defrost {

void AutoencoderModel::validate() const {
  encoder_spec.validate();
  decoder_spec.validate();
  encoder_params.validate(encoder_spec);
  decoder_params.validate(decoder_spec);
  if (encoder_spec.output_width() != bottleneck || decoder_spec.input_width() != bottleneck)
    throw std::invalid_argument("autoencoder: bottleneck width mismatch");
  if (decoder_spec.output_width() != encoder_spec.input_width())
    throw std::invalid_argument("autoencoder: decoder output width must match data dimension");
}

AutoencoderResult train_autoencoder(const LabeledDataset& dataset, std::size_t bottleneck,
                                    const AutoencoderConfig& config, std::uint64_t rng_seed) {
  if (bottleneck < 1) throw std::invalid_argument("train_autoencoder: bottleneck must be >= 1");
  if (config.hidden.empty()) throw std::invalid_argument("train_autoencoder: need hidden widths");
  const std::size_t d = dataset.dim();
  const std::size_t b = std::min(bottleneck, d);  // a bottleneck wider than the data is no bottleneck

  NetworkSpec encoder;
  std::size_t width = d;
  for (std::size_t h : config.hidden) {
    encoder.layers.push_back({width, h, config.activation});
    width = h;
  }
  encoder.layers.push_back({width, b, Activation::Identity});

  NetworkSpec decoder;
  width = b;
  for (auto it = config.hidden.rbegin(); it != config.hidden.rend(); ++it) {
    decoder.layers.push_back({width, *it, config.activation});
    width = *it;
  }
  decoder.layers.push_back({width, d, Activation::Identity});

  NetworkSpec stacked;
  stacked.layers = encoder.layers;
  stacked.layers.insert(stacked.layers.end(), decoder.layers.begin(), decoder.layers.end());

  TrainConfig tc;
  tc.epochs = config.epochs;
  tc.batch_size = config.batch_size;
  tc.lr0 = config.peak_lr;
  tc.lr_floor = config.floor_lr;
  tc.warmup_epochs = static_cast<int>(config.warmup_fraction * config.epochs);
  tc.schedule = LrSchedule::WarmupAnneal;
  tc.loss = LossKind::MeanSquaredError;
  tc.optimizer = Optimizer::Adam;
  tc.momentum = 0.0;
  tc.weight_decay = 0.0;
  tc.seed = rng_seed;

  ParamSet init = he_init(stacked, rng_seed);
  TrainResult trained = train(stacked, init, dataset.features, dataset.features, tc,
                              FreezeMask::none(stacked.num_layers()));

  AutoencoderResult out;
  out.model.encoder_spec = encoder;
  out.model.decoder_spec = decoder;
  out.model.bottleneck = b;
  out.model.encoder_params = trained.params.slice(0, encoder.num_layers());
  out.model.decoder_params = trained.params.slice(encoder.num_layers(), stacked.num_layers());
  out.final_train_error =
      mean_squared_error(reconstruct(out.model, dataset.features), dataset.features);
  return out;
}

Matrix reconstruct(const AutoencoderModel& model, const Matrix& x) {
  if (x.cols() != model.encoder_spec.input_width())
    throw std::invalid_argument("reconstruct: input width " + std::to_string(x.cols()) +
                                " does not match encoder width " +
                                std::to_string(model.encoder_spec.input_width()));
  Matrix code = extract_representation(model.encoder_spec, model.encoder_params, x,
                                       model.encoder_spec.num_layers());
  return extract_representation(model.decoder_spec, model.decoder_params, code,
                                model.decoder_spec.num_layers());
}

LabeledDataset clone_via_autoencoder(const AutoencoderModel& model, const LabeledDataset& dataset) {
  LabeledDataset raw;
  raw.features = reconstruct(model, dataset.features);
  raw.labels = dataset.labels;
  raw.num_classes = dataset.num_classes;
  return standardize(raw).first;
}

}  // namespace defrost

#pragma once

// Under-complete denoising autoencoder: three tanh encoder layers, two tanh decoder
// layers and a linear output layer followed by a softmax within every feature's
// slot range. Trained with Adam on mean binary cross-entropy against the clean input.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aerial/forward_model.hpp"
#include "aerial/layout.hpp"

namespace aerial {

struct EncodedMatrix;

struct TrainingConfig {
  double learning_rate = 5e-3;
  std::size_t epochs = 5;
  double weight_decay = 2e-8;
  double noise_factor = 0.5;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainingConfig&) const = default;
};

struct NetworkShape {
  std::size_t input_dim = 0;
  std::array<std::size_t, 3> encoder_dims{};  // last entry is the code size
  std::array<std::size_t, 3> decoder_dims{};  // mirror, ending at input_dim
  Layout layout;

  /// Encoder ⌈d/2⌉, ⌈d/4⌉, max(2, ⌈d/8⌉).
  static NetworkShape for_layout(const Layout& layout);
  static NetworkShape with_encoder(const Layout& layout, std::array<std::size_t, 3> encoder_dims);

  /// [input, e1, e2, code, d1, d2, output]
  std::vector<std::size_t> widths() const;
  /// Throws Error(Data) unless under-complete and consistent with the layout.
  void validate() const;

  bool operator==(const NetworkShape&) const = default;
};

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;
};

/// One entry per layer, same dimensions as the network parameters.
using Gradients = std::vector<DenseLayer>;

constexpr double kProbabilityClamp = 1e-12;

/// Mean over slots of -(y log p + (1-y) log(1-p)), p clamped to [1e-12, 1-1e-12].
double bce_loss(std::span<const double> reconstruction, std::span<const double> clean_target);

/// Softmax applied independently to each feature's slots, in place.
void grouped_softmax(Eigen::Ref<Eigen::MatrixXd> logits, const Layout& layout);

class TrainedAutoencoder final : public ForwardModel {
 public:
  /// Parameters drawn uniformly in ±1/sqrt(fan_in) from `init_seed`.
  TrainedAutoencoder(NetworkShape shape, std::uint64_t init_seed);
  /// All weights and biases zero.
  static TrainedAutoencoder zeros(NetworkShape shape);

  const Layout& layout() const override { return shape_.layout; }
  std::vector<double> forward(std::span<const double> input) const override;
  std::vector<double> forward_many(std::span<const double> inputs,
                                   std::size_t count) const override;

  /// Columns are samples.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  /// Mean BCE of forward(inputs) against targets; fills exact gradients when requested.
  double loss_and_gradients(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                            Gradients* gradients) const;

  /// Mean BCE reconstructing each clean row from itself.
  double reconstruction_loss(const EncodedMatrix& matrix) const;

  const NetworkShape& shape() const noexcept { return shape_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

  const TrainingConfig& config() const noexcept { return config_; }
  const std::vector<double>& epoch_losses() const noexcept { return epoch_losses_; }
  double final_loss() const noexcept { return epoch_losses_.empty() ? 0.0 : epoch_losses_.back(); }
  bool parameters_finite() const;

  std::string to_json() const;
  static TrainedAutoencoder from_json(const std::string& text);
  void save(const std::string& path) const;
  static TrainedAutoencoder load(const std::string& path);

  friend TrainedAutoencoder train(const EncodedMatrix& matrix, const NetworkShape& shape,
                                  const TrainingConfig& config);

 private:
  explicit TrainedAutoencoder(NetworkShape shape);

  NetworkShape shape_;
  std::vector<DenseLayer> layers_;
  TrainingConfig config_;
  std::vector<double> epoch_losses_;
};

/// Denoising training: Gaussian corruption (sd = noise_factor) clamped to [0,1],
/// mean BCE against the clean batch, Adam (0.9, 0.999, 1e-8) with decoupled
/// weight decay on weights. Deterministic for a given config.seed.
TrainedAutoencoder train(const EncodedMatrix& matrix, const NetworkShape& shape,
                         const TrainingConfig& config);

}  // namespace aerial

#include "aerial/autonet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "aerial/error.hpp"
#include "aerial/transact.hpp"
#include "json.hpp"

namespace aerial {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

constexpr std::uint64_t kTrainingStream = 0x9E3779B97F4A7C15ull;

}  // namespace

void TrainingConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorKind::Usage, "learning rate must be positive");
  }
  if (epochs < 1) {
    fail(ErrorKind::Usage, "epochs must be at least 1");
  }
  if (!(noise_factor >= 0.0) || !std::isfinite(noise_factor)) {
    fail(ErrorKind::Usage, "noise factor must be non-negative");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    fail(ErrorKind::Usage, "weight decay must be non-negative");
  }
  if (batch_size < 1) {
    fail(ErrorKind::Usage, "batch size must be at least 1");
  }
}

NetworkShape NetworkShape::for_layout(const Layout& layout) {
  const auto d = layout_width(layout);
  return with_encoder(layout, {ceil_div(d, 2), ceil_div(d, 4), std::max<std::size_t>(2, ceil_div(d, 8))});
}

NetworkShape NetworkShape::with_encoder(const Layout& layout,
                                        std::array<std::size_t, 3> encoder_dims) {
  NetworkShape shape;
  shape.input_dim = layout_width(layout);
  shape.encoder_dims = encoder_dims;
  shape.decoder_dims = {encoder_dims[1], encoder_dims[0], shape.input_dim};
  shape.layout = layout;
  shape.validate();
  return shape;
}

std::vector<std::size_t> NetworkShape::widths() const {
  return {input_dim,       encoder_dims[0], encoder_dims[1], encoder_dims[2],
          decoder_dims[0], decoder_dims[1], decoder_dims[2]};
}

void NetworkShape::validate() const {
  if (layout.empty() || layout_width(layout) != input_dim) {
    fail(ErrorKind::Data, "network input width does not match the feature layout");
  }
  for (auto width : widths()) {
    if (width == 0) {
      fail(ErrorKind::Data, "network layers must have at least one unit");
    }
  }
  if (encoder_dims[2] >= input_dim) {
    fail(ErrorKind::Data, "autoencoder must be under-complete: code size " +
                              std::to_string(encoder_dims[2]) + " >= input width " +
                              std::to_string(input_dim));
  }
  if (decoder_dims[2] != input_dim) {
    fail(ErrorKind::Data, "decoder output width must equal the input width");
  }
}

double bce_loss(std::span<const double> reconstruction, std::span<const double> clean_target) {
  if (reconstruction.size() != clean_target.size()) {
    fail(ErrorKind::Data, "bce_loss: length mismatch");
  }
  if (reconstruction.empty()) {
    return 0.0;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < reconstruction.size(); ++i) {
    const double p = std::clamp(reconstruction[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    const double y = clean_target[i];
    total -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  return total / static_cast<double>(reconstruction.size());
}

void grouped_softmax(Eigen::Ref<MatrixXd> logits, const Layout& layout) {
  for (const auto& slots : layout) {
    auto block = logits.middleRows(static_cast<Eigen::Index>(slots.offset),
                                   static_cast<Eigen::Index>(slots.count));
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      auto column = block.col(c);
      const double peak = column.maxCoeff();
      column = (column.array() - peak).exp();
      column /= column.sum();
    }
  }
}

// --- TrainedAutoencoder -----------------------------------------------------

TrainedAutoencoder::TrainedAutoencoder(NetworkShape shape) : shape_(std::move(shape)) {
  shape_.validate();
  const auto widths = shape_.widths();
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(widths[l]);
    const auto out = static_cast<Eigen::Index>(widths[l + 1]);
    layers_.push_back({MatrixXd::Zero(out, in), VectorXd::Zero(out)});
  }
}

TrainedAutoencoder::TrainedAutoencoder(NetworkShape shape, std::uint64_t init_seed)
    : TrainedAutoencoder(std::move(shape)) {
  config_.seed = init_seed;
  std::mt19937_64 rng(init_seed);
  for (auto& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weights.cols()));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        layer.weights(r, c) = uniform(rng);
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      layer.bias(r) = uniform(rng);
    }
  }
}

TrainedAutoencoder TrainedAutoencoder::zeros(NetworkShape shape) {
  return TrainedAutoencoder(std::move(shape));
}

MatrixXd TrainedAutoencoder::forward_batch(const MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != shape_.input_dim) {
    fail(ErrorKind::Data, "forward: input width " + std::to_string(inputs.rows()) +
                              " does not match network width " +
                              std::to_string(shape_.input_dim));
  }
  if (!inputs.allFinite()) {
    fail(ErrorKind::Data, "forward: non-finite input");
  }
  MatrixXd activation = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    MatrixXd z = layers_[l].weights * activation;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) {
      activation = z.array().tanh().matrix();
    } else {
      grouped_softmax(z, shape_.layout);
      activation = std::move(z);
    }
  }
  return activation;
}

std::vector<double> TrainedAutoencoder::forward(std::span<const double> input) const {
  if (input.size() != shape_.input_dim) {
    fail(ErrorKind::Data, "forward: input length " + std::to_string(input.size()) +
                              " does not match network width " +
                              std::to_string(shape_.input_dim));
  }
  MatrixXd column(static_cast<Eigen::Index>(input.size()), 1);
  std::copy(input.begin(), input.end(), column.data());
  MatrixXd out = forward_batch(column);
  return std::vector<double>(out.data(), out.data() + out.size());
}

std::vector<double> TrainedAutoencoder::forward_many(std::span<const double> inputs,
                                                    std::size_t count) const {
  if (inputs.size() != count * shape_.input_dim) {
    fail(ErrorKind::Data, "forward: batch size does not match network width");
  }
  if (count == 0) {
    return {};
  }
  Eigen::Map<const MatrixXd> batch(inputs.data(), static_cast<Eigen::Index>(shape_.input_dim),
                                   static_cast<Eigen::Index>(count));
  MatrixXd out = forward_batch(batch);
  return std::vector<double>(out.data(), out.data() + out.size());
}

double TrainedAutoencoder::loss_and_gradients(const MatrixXd& inputs, const MatrixXd& targets,
                                              Gradients* gradients) const {
  if (inputs.rows() != targets.rows() || inputs.cols() != targets.cols()) {
    fail(ErrorKind::Data, "loss: input/target shape mismatch");
  }
  if (static_cast<std::size_t>(inputs.rows()) != shape_.input_dim) {
    fail(ErrorKind::Data, "loss: input width does not match the network");
  }
  std::vector<MatrixXd> activations;
  activations.reserve(layers_.size() + 1);
  activations.push_back(inputs);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    MatrixXd z = layers_[l].weights * activations.back();
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) {
      activations.push_back(z.array().tanh().matrix());
    } else {
      grouped_softmax(z, shape_.layout);
      activations.push_back(std::move(z));
    }
  }

  const MatrixXd& probs = activations.back();
  const double count = static_cast<double>(probs.size());
  double loss = 0.0;
  MatrixXd delta(probs.rows(), probs.cols());
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      const double raw = probs(r, c);
      const double p = std::clamp(raw, kProbabilityClamp, 1.0 - kProbabilityClamp);
      const double y = targets(r, c);
      loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
      // clamp has zero slope outside the interval
      delta(r, c) = (raw == p) ? (p - y) / (p * (1.0 - p)) / count : 0.0;
    }
  }
  loss /= count;
  if (gradients == nullptr) {
    return loss;
  }

  // Softmax Jacobian per feature group: dz_j = p_j (g_j - sum_k p_k g_k).
  for (const auto& slots : shape_.layout) {
    const auto offset = static_cast<Eigen::Index>(slots.offset);
    const auto size = static_cast<Eigen::Index>(slots.count);
    auto g = delta.middleRows(offset, size);
    auto p = probs.middleRows(offset, size);
    Eigen::RowVectorXd weighted = p.cwiseProduct(g).colwise().sum();
    g = p.cwiseProduct(g - weighted.replicate(size, 1));
  }

  gradients->resize(layers_.size());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const MatrixXd& below = activations[l];
    (*gradients)[l].weights = delta * below.transpose();
    (*gradients)[l].bias = delta.rowwise().sum();
    if (l > 0) {
      MatrixXd back = layers_[l].weights.transpose() * delta;
      delta = back.cwiseProduct((1.0 - below.array().square()).matrix());
    }
  }
  return loss;
}

double TrainedAutoencoder::reconstruction_loss(const EncodedMatrix& matrix) const {
  if (matrix.rows == 0) {
    return 0.0;
  }
  Eigen::Map<const MatrixXd> clean(matrix.data.data(), static_cast<Eigen::Index>(matrix.cols),
                                   static_cast<Eigen::Index>(matrix.rows));
  return loss_and_gradients(clean, clean, nullptr);
}

bool TrainedAutoencoder::parameters_finite() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const DenseLayer& layer) {
    return layer.weights.allFinite() && layer.bias.allFinite();
  });
}

// --- training -------------------------------------------------------------------

namespace {

struct AdamState {
  std::vector<DenseLayer> first;
  std::vector<DenseLayer> second;
  std::uint64_t step = 0;
};

void adam_update(std::vector<DenseLayer>& layers, const Gradients& grads, AdamState& state,
                 const TrainingConfig& config) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double epsilon = 1e-8;
  ++state.step;
  const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  const double lr = config.learning_rate;

  auto step = [&](auto& param, const auto& grad, auto& m, auto& v, bool decay) {
    if (decay) {
      param *= (1.0 - lr * config.weight_decay);
    }
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + epsilon);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    step(layers[l].weights, grads[l].weights, state.first[l].weights, state.second[l].weights,
         true);
    step(layers[l].bias, grads[l].bias, state.first[l].bias, state.second[l].bias, false);
  }
}

}  // namespace

TrainedAutoencoder train(const EncodedMatrix& matrix, const NetworkShape& shape,
                         const TrainingConfig& config) {
  config.validate();
  shape.validate();
  if (matrix.rows == 0) {
    fail(ErrorKind::Data, "cannot train on an empty matrix");
  }
  if (matrix.cols != shape.input_dim || matrix.layout != shape.layout) {
    fail(ErrorKind::Data, "training matrix layout does not match the network shape");
  }

  TrainedAutoencoder net(shape, config.seed);
  net.config_ = config;

  AdamState adam;
  for (const auto& layer : net.layers_) {
    DenseLayer zero{MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                    VectorXd::Zero(layer.bias.size())};
    adam.first.push_back(zero);
    adam.second.push_back(zero);
  }

  std::mt19937_64 rng(config.seed ^ kTrainingStream);
  std::normal_distribution<double> noise(0.0, config.noise_factor > 0 ? config.noise_factor : 1.0);
  std::vector<std::size_t> order(matrix.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto width = static_cast<Eigen::Index>(matrix.cols);

  Gradients grads;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < matrix.rows; start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, matrix.rows - start);
      MatrixXd clean(width, static_cast<Eigen::Index>(count));
      for (std::size_t i = 0; i < count; ++i) {
        auto row = matrix.row(order[start + i]);
        std::copy(row.begin(), row.end(), clean.col(static_cast<Eigen::Index>(i)).data());
      }
      MatrixXd noisy = clean;
      if (config.noise_factor > 0.0) {
        for (Eigen::Index i = 0; i < noisy.size(); ++i) {
          noisy.data()[i] = std::clamp(noisy.data()[i] + noise(rng), 0.0, 1.0);
        }
      }
      const double loss = net.loss_and_gradients(noisy, clean, &grads);
      if (!std::isfinite(loss)) {
        fail(ErrorKind::Internal, "training diverged: non-finite loss at epoch " +
                                      std::to_string(epoch + 1) + ", batch starting at row " +
                                      std::to_string(start));
      }
      epoch_total += loss * static_cast<double>(count);
      adam_update(net.layers_, grads, adam, config);
    }
    net.epoch_losses_.push_back(epoch_total / static_cast<double>(matrix.rows));
  }
  if (!net.parameters_finite()) {
    fail(ErrorKind::Internal, "training produced non-finite parameters");
  }
  return net;
}

// --- serialization ------------------------------------------------------------

namespace {

constexpr const char* kModelFormat = "aerial-autoencoder/1";

json layout_to_json(const Layout& layout) {
  json out = json::array();
  for (const auto& slots : layout) {
    out.push_back({slots.feature, slots.offset, slots.count});
  }
  return out;
}

Layout layout_from_json(const json& in) {
  Layout layout;
  for (const auto& entry : in) {
    layout.push_back({entry.at(0).get<std::size_t>(), entry.at(1).get<std::size_t>(),
                      entry.at(2).get<std::size_t>()});
  }
  return layout;
}

}  // namespace

std::string TrainedAutoencoder::to_json() const {
  json root;
  root["format"] = kModelFormat;
  root["shape"] = {{"input_dim", shape_.input_dim},
                   {"encoder_dims", shape_.encoder_dims},
                   {"decoder_dims", shape_.decoder_dims},
                   {"layout", layout_to_json(shape_.layout)}};
  root["config"] = {{"learning_rate", config_.learning_rate},
                    {"epochs", config_.epochs},
                    {"weight_decay", config_.weight_decay},
                    {"noise_factor", config_.noise_factor},
                    {"batch_size", config_.batch_size}};
  root["seed"] = config_.seed;
  root["epoch_losses"] = epoch_losses_;
  json layers = json::array();
  for (const auto& layer : layers_) {
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(layer.weights.size()));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        weights.push_back(layer.weights(r, c));
      }
    }
    layers.push_back({{"rows", layer.weights.rows()},
                      {"cols", layer.weights.cols()},
                      {"weights", std::move(weights)},
                      {"bias", std::vector<double>(layer.bias.data(),
                                                   layer.bias.data() + layer.bias.size())}});
  }
  root["layers"] = std::move(layers);
  return root.dump() + "\n";
}

TrainedAutoencoder TrainedAutoencoder::from_json(const std::string& text) {
  try {
    const json root = json::parse(text);
    if (root.at("format").get<std::string>() != kModelFormat) {
      fail(ErrorKind::Parse, "model: unsupported format '" + root.at("format").get<std::string>() + "'");
    }
    const auto& s = root.at("shape");
    NetworkShape shape;
    shape.input_dim = s.at("input_dim").get<std::size_t>();
    shape.encoder_dims = s.at("encoder_dims").get<std::array<std::size_t, 3>>();
    shape.decoder_dims = s.at("decoder_dims").get<std::array<std::size_t, 3>>();
    shape.layout = layout_from_json(s.at("layout"));

    TrainedAutoencoder net(shape);
    const auto& c = root.at("config");
    net.config_.learning_rate = c.at("learning_rate").get<double>();
    net.config_.epochs = c.at("epochs").get<std::size_t>();
    net.config_.weight_decay = c.at("weight_decay").get<double>();
    net.config_.noise_factor = c.at("noise_factor").get<double>();
    net.config_.batch_size = c.at("batch_size").get<std::size_t>();
    net.config_.seed = root.at("seed").get<std::uint64_t>();
    net.epoch_losses_ = root.at("epoch_losses").get<std::vector<double>>();

    const auto& layers = root.at("layers");
    if (layers.size() != net.layers_.size()) {
      fail(ErrorKind::Parse, "model: expected " + std::to_string(net.layers_.size()) + " layers");
    }
    for (std::size_t l = 0; l < net.layers_.size(); ++l) {
      auto& layer = net.layers_[l];
      const auto weights = layers[l].at("weights").get<std::vector<double>>();
      const auto bias = layers[l].at("bias").get<std::vector<double>>();
      if (layers[l].at("rows").get<Eigen::Index>() != layer.weights.rows() ||
          layers[l].at("cols").get<Eigen::Index>() != layer.weights.cols() ||
          weights.size() != static_cast<std::size_t>(layer.weights.size()) ||
          bias.size() != static_cast<std::size_t>(layer.bias.size())) {
        fail(ErrorKind::Parse, "model: layer " + std::to_string(l) + " has the wrong dimensions");
      }
      std::size_t i = 0;
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index col = 0; col < layer.weights.cols(); ++col) {
          layer.weights(r, col) = weights[i++];
        }
      }
      std::copy(bias.begin(), bias.end(), layer.bias.data());
    }
    if (!net.parameters_finite()) {
      fail(ErrorKind::Parse, "model: non-finite parameters");
    }
    return net;
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("model JSON: ") + e.what());
  }
}

void TrainedAutoencoder::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    fail(ErrorKind::Usage, "cannot write model file '" + path + "'");
  }
  out << to_json();
}

TrainedAutoencoder TrainedAutoencoder::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::Usage, "cannot open model file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

}  // namespace aerial

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "datared/dataset.hpp"
#include "datared/error.hpp"
#include "datared/rng.hpp"

namespace datared {

enum class Activation { Relu, Sigmoid, Softmax, Identity };
enum class LossKind { Bce, WeightedCce };
enum class OptimizerKind { Sgd, Adam };

struct MlpConfig {
  // layer_dims[0] is the input width; one activation per subsequent layer.
  std::vector<int> layer_dims;
  std::vector<Activation> activations;
  // One dropout probability per hidden layer; empty disables dropout.
  std::vector<double> dropout;
  LossKind loss = LossKind::WeightedCce;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  int epochs = 150;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  int layer_count() const { return static_cast<int>(layer_dims.size()) - 1; }

  void validate(Index feature_count, int class_count) const {
    if (layer_dims.size() < 2)
      throw ArgumentError("mlp: need at least input and output dims");
    for (int dim : layer_dims)
      if (dim < 1) throw ArgumentError("mlp: layer dims must be positive");
    if (static_cast<Index>(layer_dims.front()) != feature_count)
      throw ShapeError("mlp: input width " + std::to_string(layer_dims.front()) +
                       " does not match " + std::to_string(feature_count) +
                       " features");
    if (activations.size() != static_cast<std::size_t>(layer_count()))
      throw ArgumentError("mlp: need one activation per layer");
    if (!dropout.empty() &&
        dropout.size() != static_cast<std::size_t>(layer_count() - 1))
      throw ArgumentError("mlp: need one dropout rate per hidden layer");
    for (double rate : dropout)
      if (!(rate >= 0.0 && rate < 1.0))
        throw ArgumentError("mlp: dropout must lie in [0, 1)");
    if (!(learning_rate > 0.0))
      throw ArgumentError("mlp: learning rate must be positive");
    if (batch_size < 1) throw ArgumentError("mlp: batch size must be positive");
    if (epochs < 0) throw ArgumentError("mlp: epochs must be nonnegative");
    if (loss == LossKind::Bce) {
      if (class_count != 2)
        throw ArgumentError("mlp: binary cross-entropy needs exactly 2 classes");
      if (layer_dims.back() != 1 || activations.back() != Activation::Sigmoid)
        throw ArgumentError("mlp: BCE head must be a single sigmoid unit");
    } else {
      if (layer_dims.back() != class_count)
        throw ArgumentError("mlp: output width " +
                            std::to_string(layer_dims.back()) +
                            " does not match " + std::to_string(class_count) +
                            " classes");
      if (activations.back() != Activation::Softmax)
        throw ArgumentError("mlp: CCE head must be softmax");
    }
  }
};

// ReLU hidden stack with the loss-appropriate head: a single sigmoid unit
// with BCE for 2-class problems, softmax with weighted CCE otherwise.
inline MlpConfig make_classifier_config(Index feature_count,
                                        const std::vector<int>& hidden_dims,
                                        int class_count, double dropout_rate) {
  MlpConfig config;
  config.layer_dims.push_back(static_cast<int>(feature_count));
  for (int dim : hidden_dims) {
    config.layer_dims.push_back(dim);
    config.activations.push_back(Activation::Relu);
    config.dropout.push_back(dropout_rate);
  }
  if (class_count == 2) {
    config.layer_dims.push_back(1);
    config.activations.push_back(Activation::Sigmoid);
    config.loss = LossKind::Bce;
  } else {
    config.layer_dims.push_back(class_count);
    config.activations.push_back(Activation::Softmax);
    config.loss = LossKind::WeightedCce;
  }
  return config;
}

namespace detail {

inline Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z,
                                        Activation activation) {
  switch (activation) {
    case Activation::Relu:
      return z.cwiseMax(0.0);
    case Activation::Sigmoid:
      return ((-z.array()).exp() + 1.0).inverse().matrix();
    case Activation::Softmax: {
      Eigen::MatrixXd out(z.rows(), z.cols());
      for (Index i = 0; i < z.rows(); ++i) {
        const Eigen::ArrayXd shifted =
            (z.row(i).array() - z.row(i).maxCoeff()).exp();
        out.row(i) = (shifted / shifted.sum()).matrix();
      }
      return out;
    }
    case Activation::Identity:
      return z;
  }
  throw ArgumentError("mlp: unknown activation");
}

// Derivative expressed through the activated value (valid for the
// elementwise activations used outside the head).
inline Eigen::MatrixXd activation_derivative(const Eigen::MatrixXd& activated,
                                             Activation activation) {
  switch (activation) {
    case Activation::Relu:
      return (activated.array() > 0.0).cast<double>().matrix();
    case Activation::Sigmoid:
      return (activated.array() * (1.0 - activated.array())).matrix();
    case Activation::Identity:
      return Eigen::MatrixXd::Ones(activated.rows(), activated.cols());
    case Activation::Softmax:
      throw ArgumentError("mlp: softmax is only supported at the head");
  }
  throw ArgumentError("mlp: unknown activation");
}

}  // namespace detail

class Mlp {
 public:
  explicit Mlp(const MlpConfig& config) : config_(config) {
    if (config.layer_dims.size() < 2)
      throw ArgumentError("mlp: need at least input and output dims");
    for (int dim : config.layer_dims)
      if (dim < 1) throw ArgumentError("mlp: layer dims must be positive");
    if (config.activations.size() !=
        static_cast<std::size_t>(config.layer_count()))
      throw ArgumentError("mlp: need one activation per layer");
    const int layers = config.layer_count();
    weights_.reserve(static_cast<std::size_t>(layers));
    biases_.reserve(static_cast<std::size_t>(layers));
    for (int l = 0; l < layers; ++l) {
      const Index fan_in = config.layer_dims[static_cast<std::size_t>(l)];
      const Index fan_out = config.layer_dims[static_cast<std::size_t>(l) + 1];
      const double limit =
          std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      RngStream stream(
          derive_seed(config.seed, "init/layer/" + std::to_string(l)));
      Eigen::MatrixXd w(fan_in, fan_out);
      for (Index i = 0; i < fan_in; ++i)
        for (Index j = 0; j < fan_out; ++j)
          w(i, j) = limit * (2.0 * stream.next_real() - 1.0);
      weights_.push_back(std::move(w));
      biases_.push_back(Eigen::VectorXd::Zero(fan_out));
    }
  }

  const MlpConfig& config() const { return config_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }

  // Inference pass: dropout disabled.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const {
    if (x.cols() != weights_.front().rows())
      throw ShapeError("mlp: input width " + std::to_string(x.cols()) +
                       ", expected " + std::to_string(weights_.front().rows()));
    Eigen::MatrixXd h = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Eigen::MatrixXd z = h * weights_[l];
      z.rowwise() += biases_[l].transpose();
      h = detail::apply_activation(z, config_.activations[l]);
    }
    return h;
  }

  // BCE head: class 0 when the sigmoid output is below 0.5. CCE head:
  // argmax, ties to the lowest class id.
  std::vector<int> predict(const Eigen::MatrixXd& x) const {
    const Eigen::MatrixXd out = forward(x);
    std::vector<int> labels(static_cast<std::size_t>(out.rows()));
    if (config_.loss == LossKind::Bce) {
      for (Index i = 0; i < out.rows(); ++i)
        labels[static_cast<std::size_t>(i)] = out(i, 0) < 0.5 ? 0 : 1;
    } else {
      for (Index i = 0; i < out.rows(); ++i) {
        Index best = 0;
        for (Index j = 1; j < out.cols(); ++j)
          if (out(i, j) > out(i, best)) best = j;
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
      }
    }
    return labels;
  }

  Index parameter_count() const {
    Index count = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l)
      count += weights_[l].size() + biases_[l].size();
    return count;
  }

  // Flat layout: per layer, the weight matrix row-major, then the bias.
  Eigen::VectorXd parameters() const {
    Eigen::VectorXd flat(parameter_count());
    Index at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      const Eigen::MatrixXd& w = weights_[l];
      for (Index i = 0; i < w.rows(); ++i)
        for (Index j = 0; j < w.cols(); ++j) flat(at++) = w(i, j);
      for (Index j = 0; j < biases_[l].size(); ++j) flat(at++) = biases_[l](j);
    }
    return flat;
  }

  void set_parameters(const Eigen::VectorXd& flat) {
    if (flat.size() != parameter_count())
      throw ShapeError("mlp: parameter vector of size " +
                       std::to_string(flat.size()) + ", expected " +
                       std::to_string(parameter_count()));
    Index at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Eigen::MatrixXd& w = weights_[l];
      for (Index i = 0; i < w.rows(); ++i)
        for (Index j = 0; j < w.cols(); ++j) w(i, j) = flat(at++);
      for (Index j = 0; j < biases_[l].size(); ++j) biases_[l](j) = flat(at++);
    }
  }

 private:
  MlpConfig config_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

// w_k = N / N_k; absent classes get weight 0.
inline Eigen::VectorXd class_weights(const LabeledDataset& data) {
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(data.class_count);
  for (int k = 0; k < data.class_count; ++k) {
    const auto size = data.class_members[static_cast<std::size_t>(k)].size();
    if (size > 0)
      weights(k) = static_cast<double>(data.size()) / static_cast<double>(size);
  }
  return weights;
}

namespace detail {

struct ForwardTrace {
  std::vector<Eigen::MatrixXd> inputs;       // H_l fed into layer l
  std::vector<Eigen::MatrixXd> activations;  // pre-dropout act(Z_l)
  std::vector<Eigen::MatrixXd> masks;        // inverted-dropout factors, may be empty
  Eigen::MatrixXd output;                    // post-dropout of the last layer
};

// Training-mode forward pass. `dropout_stream` may be null for a
// deterministic (inference-equivalent) pass.
inline ForwardTrace forward_trace(const Mlp& model, const Eigen::MatrixXd& x,
                                  RngStream* dropout_stream) {
  const MlpConfig& config = model.config();
  ForwardTrace trace;
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < model.weights().size(); ++l) {
    trace.inputs.push_back(h);
    Eigen::MatrixXd z = h * model.weights()[l];
    z.rowwise() += model.biases()[l].transpose();
    Eigen::MatrixXd a = apply_activation(z, config.activations[l]);
    trace.activations.push_back(a);
    const bool hidden = l + 1 < model.weights().size();
    const double rate =
        hidden && !config.dropout.empty() ? config.dropout[l] : 0.0;
    if (dropout_stream && rate > 0.0) {
      Eigen::MatrixXd mask(a.rows(), a.cols());
      const double keep = 1.0 - rate;
      for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
          mask(i, j) = dropout_stream->next_real() < rate ? 0.0 : 1.0 / keep;
      trace.masks.push_back(mask);
      a.array() *= mask.array();
    } else {
      trace.masks.emplace_back();
    }
    h = std::move(a);
  }
  trace.output = h;
  return trace;
}

// Mean loss over the batch with the head gradient dL/dZ_last. Both losses
// fold their head's derivative into the classic (prediction - target) form.
inline double head_loss_and_delta(const MlpConfig& config,
                                  const Eigen::MatrixXd& output,
                                  const std::vector<int>& labels,
                                  const Eigen::VectorXd& weights,
                                  Eigen::MatrixXd& delta) {
  const Index batch = output.rows();
  const double inv_batch = 1.0 / static_cast<double>(batch);
  const auto safe_log = [](double v) { return std::log(std::max(v, 1e-12)); };
  double loss = 0.0;
  delta.resize(output.rows(), output.cols());
  if (config.loss == LossKind::Bce) {
    for (Index i = 0; i < batch; ++i) {
      const double y = static_cast<double>(labels[static_cast<std::size_t>(i)]);
      const double z = output(i, 0);
      loss -= y * safe_log(z) + (1.0 - y) * safe_log(1.0 - z);
      delta(i, 0) = (z - y) * inv_batch;
    }
  } else {
    for (Index i = 0; i < batch; ++i) {
      const int y = labels[static_cast<std::size_t>(i)];
      const double w = weights(y);
      loss -= w * safe_log(output(i, y));
      for (Index k = 0; k < output.cols(); ++k) {
        const double target = k == y ? 1.0 : 0.0;
        delta(i, k) = w * (output(i, k) - target) * inv_batch;
      }
    }
  }
  return loss * inv_batch;
}

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

inline Gradients backward(const Mlp& model, const ForwardTrace& trace,
                          Eigen::MatrixXd delta) {
  const MlpConfig& config = model.config();
  const int layers = config.layer_count();
  Gradients grads;
  grads.weights.resize(static_cast<std::size_t>(layers));
  grads.biases.resize(static_cast<std::size_t>(layers));
  for (int l = layers - 1; l >= 0; --l) {
    const std::size_t u = static_cast<std::size_t>(l);
    grads.weights[u] = trace.inputs[u].transpose() * delta;
    grads.biases[u] = delta.colwise().sum().transpose();
    if (l == 0) break;
    delta = delta * model.weights()[u].transpose();
    const std::size_t prev = u - 1;
    if (trace.masks[prev].size() > 0)
      delta.array() *= trace.masks[prev].array();
    delta.array() *=
        activation_derivative(trace.activations[prev],
                              config.activations[prev])
            .array();
  }
  return grads;
}

}  // namespace detail

// Mean loss and flat analytic gradient on a batch, inference-mode forward
// (no dropout). Exposed for gradient checking.
inline std::pair<double, Eigen::VectorXd> loss_and_gradient(
    const Mlp& model, const Eigen::MatrixXd& x, const std::vector<int>& labels,
    const Eigen::VectorXd& weights) {
  if (static_cast<Index>(labels.size()) != x.rows())
    throw ShapeError("loss_and_gradient: label count does not match rows");
  detail::ForwardTrace trace = detail::forward_trace(model, x, nullptr);
  Eigen::MatrixXd delta;
  const double loss = detail::head_loss_and_delta(model.config(), trace.output,
                                                  labels, weights, delta);
  const detail::Gradients grads = detail::backward(model, trace, std::move(delta));
  Eigen::VectorXd flat(model.parameter_count());
  Index at = 0;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    const Eigen::MatrixXd& w = grads.weights[l];
    for (Index i = 0; i < w.rows(); ++i)
      for (Index j = 0; j < w.cols(); ++j) flat(at++) = w(i, j);
    for (Index j = 0; j < grads.biases[l].size(); ++j)
      flat(at++) = grads.biases[l](j);
  }
  return {loss, std::move(flat)};
}

// Epoch-at-a-time training driver. Owns the model and optimizer state;
// run_epoch may be pointed at different datasets between calls (FES trains
// on the full set first, then on the reduced one).
class MlpTrainer {
 public:
  MlpTrainer(const MlpConfig& config, Index feature_count, int class_count)
      : config_(validated(config, feature_count, class_count)),
        model_(config_) {
    class_count_ = class_count;
    if (config_.optimizer == OptimizerKind::Adam) {
      for (std::size_t l = 0; l < model_.weights().size(); ++l) {
        adam_m_w_.push_back(Eigen::MatrixXd::Zero(model_.weights()[l].rows(),
                                                  model_.weights()[l].cols()));
        adam_v_w_.push_back(Eigen::MatrixXd::Zero(model_.weights()[l].rows(),
                                                  model_.weights()[l].cols()));
        adam_m_b_.push_back(Eigen::VectorXd::Zero(model_.biases()[l].size()));
        adam_v_b_.push_back(Eigen::VectorXd::Zero(model_.biases()[l].size()));
      }
    }
  }

  // One pass over `data` in reshuffled mini-batches; returns the mean
  // per-example training loss of the epoch.
  double run_epoch(const LabeledDataset& data) {
    if (data.feature_count() != static_cast<Index>(config_.layer_dims.front()))
      throw ShapeError("mlp: dataset width changed between epochs");
    if (data.class_count != class_count_)
      throw ShapeError("mlp: class count changed between epochs");
    const Index n = data.size();
    if (n == 0) throw ArgumentError("mlp: empty training set");
    const Eigen::VectorXd weights = class_weights(data);

    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    RngStream shuffle_stream(
        derive_seed(config_.seed, "epoch/" + std::to_string(epoch_)));
    shuffle_stream.shuffle(order);
    RngStream dropout_stream(
        derive_seed(config_.seed, "dropout/" + std::to_string(epoch_)));

    double loss_sum = 0.0;
    for (Index start = 0; start < n; start += config_.batch_size) {
      const Index size = std::min<Index>(config_.batch_size, n - start);
      Eigen::MatrixXd x(size, data.feature_count());
      std::vector<int> y(static_cast<std::size_t>(size));
      for (Index i = 0; i < size; ++i) {
        const Index row = order[static_cast<std::size_t>(start + i)];
        x.row(i) = data.examples.row(row);
        y[static_cast<std::size_t>(i)] = data.labels[static_cast<std::size_t>(row)];
      }
      detail::ForwardTrace trace =
          detail::forward_trace(model_, x, &dropout_stream);
      Eigen::MatrixXd delta;
      const double batch_loss = detail::head_loss_and_delta(
          config_, trace.output, y, weights, delta);
      if (!std::isfinite(batch_loss))
        throw DivergenceError("training loss diverged at epoch " +
                              std::to_string(epoch_ + 1));
      loss_sum += batch_loss * static_cast<double>(size);
      const detail::Gradients grads =
          detail::backward(model_, trace, std::move(delta));
      apply_update(grads);
    }
    ++epoch_;
    const double epoch_loss = loss_sum / static_cast<double>(n);
    history_.push_back(epoch_loss);
    return epoch_loss;
  }

  // Inference-mode correctness on every example of `data`.
  std::vector<std::uint8_t> correctness(const LabeledDataset& data) const {
    const std::vector<int> predicted = model_.predict(data.examples);
    std::vector<std::uint8_t> flags(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i)
      flags[i] = predicted[i] == data.labels[i] ? 1 : 0;
    return flags;
  }

  const Mlp& model() const { return model_; }
  const std::vector<double>& loss_history() const { return history_; }
  int epochs_run() const { return epoch_; }

 private:
  static const MlpConfig& validated(const MlpConfig& config,
                                    Index feature_count, int class_count) {
    config.validate(feature_count, class_count);
    return config;
  }

  void apply_update(const detail::Gradients& grads) {
    if (config_.optimizer == OptimizerKind::Sgd) {
      for (std::size_t l = 0; l < model_.weights().size(); ++l) {
        model_.weights()[l] -= config_.learning_rate * grads.weights[l];
        model_.biases()[l] -= config_.learning_rate * grads.biases[l];
      }
      return;
    }
    ++adam_step_;
    const double bias1 = 1.0 - std::pow(config_.adam_beta1, adam_step_);
    const double bias2 = 1.0 - std::pow(config_.adam_beta2, adam_step_);
    for (std::size_t l = 0; l < model_.weights().size(); ++l) {
      adam_m_w_[l] = config_.adam_beta1 * adam_m_w_[l] +
                     (1.0 - config_.adam_beta1) * grads.weights[l];
      adam_v_w_[l] = config_.adam_beta2 * adam_v_w_[l] +
                     (1.0 - config_.adam_beta2) *
                         grads.weights[l].array().square().matrix();
      adam_m_b_[l] = config_.adam_beta1 * adam_m_b_[l] +
                     (1.0 - config_.adam_beta1) * grads.biases[l];
      adam_v_b_[l] = config_.adam_beta2 * adam_v_b_[l] +
                     (1.0 - config_.adam_beta2) *
                         grads.biases[l].array().square().matrix();
      model_.weights()[l].array() -=
          config_.learning_rate * (adam_m_w_[l].array() / bias1) /
          ((adam_v_w_[l].array() / bias2).sqrt() + config_.adam_eps);
      model_.biases()[l].array() -=
          config_.learning_rate * (adam_m_b_[l].array() / bias1) /
          ((adam_v_b_[l].array() / bias2).sqrt() + config_.adam_eps);
    }
  }

  MlpConfig config_;
  Mlp model_;
  int class_count_ = 0;
  int epoch_ = 0;
  long adam_step_ = 0;
  std::vector<double> history_;
  std::vector<Eigen::MatrixXd> adam_m_w_, adam_v_w_;
  std::vector<Eigen::VectorXd> adam_m_b_, adam_v_b_;
};

struct TrainedModel {
  Mlp model;
  std::vector<double> loss_history;
};

inline TrainedModel train(const LabeledDataset& data, const MlpConfig& config) {
  MlpTrainer trainer(config, data.feature_count(), data.class_count);
  for (int epoch = 0; epoch < config.epochs; ++epoch) trainer.run_epoch(data);
  return {trainer.model(), trainer.loss_history()};
}

inline std::vector<int> predict(const TrainedModel& trained,
                                const Eigen::MatrixXd& examples) {
  return trained.model.predict(examples);
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace detail {

inline const char* activation_name(Activation activation) {
  switch (activation) {
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
    case Activation::Identity: return "identity";
  }
  throw ArgumentError("mlp: unknown activation");
}

inline Activation parse_activation(const std::string& name) {
  for (Activation activation : {Activation::Relu, Activation::Sigmoid,
                                Activation::Softmax, Activation::Identity})
    if (name == activation_name(activation)) return activation;
  throw ParseError("mlp: unknown activation '" + name + "'");
}

}  // namespace detail

inline void save_model(const TrainedModel& trained, const std::string& path) {
  const MlpConfig& config = trained.model.config();
  nlohmann::json doc;
  doc["layer_dims"] = config.layer_dims;
  std::vector<std::string> activation_names;
  for (Activation activation : config.activations)
    activation_names.push_back(detail::activation_name(activation));
  doc["activations"] = activation_names;
  doc["dropout"] = config.dropout;
  doc["loss"] = config.loss == LossKind::Bce ? "bce" : "weighted_cce";
  doc["optimizer"] = config.optimizer == OptimizerKind::Sgd ? "sgd" : "adam";
  doc["learning_rate"] = config.learning_rate;
  doc["epochs"] = config.epochs;
  doc["batch_size"] = config.batch_size;
  doc["seed"] = config.seed;
  doc["adam_beta1"] = config.adam_beta1;
  doc["adam_beta2"] = config.adam_beta2;
  doc["adam_eps"] = config.adam_eps;
  const Eigen::VectorXd flat = trained.model.parameters();
  doc["parameters"] = std::vector<double>(flat.data(), flat.data() + flat.size());
  doc["loss_history"] = trained.loss_history;
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open model file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model file '" + path + "': " + e.what());
  }
  try {
    MlpConfig config;
    config.layer_dims = doc.at("layer_dims").get<std::vector<int>>();
    for (const auto& name : doc.at("activations"))
      config.activations.push_back(
          detail::parse_activation(name.get<std::string>()));
    config.dropout = doc.at("dropout").get<std::vector<double>>();
    config.loss = doc.at("loss").get<std::string>() == "bce"
                      ? LossKind::Bce
                      : LossKind::WeightedCce;
    config.optimizer = doc.at("optimizer").get<std::string>() == "sgd"
                           ? OptimizerKind::Sgd
                           : OptimizerKind::Adam;
    config.learning_rate = doc.at("learning_rate").get<double>();
    config.epochs = doc.at("epochs").get<int>();
    config.batch_size = doc.at("batch_size").get<int>();
    config.seed = doc.at("seed").get<std::uint64_t>();
    config.adam_beta1 = doc.at("adam_beta1").get<double>();
    config.adam_beta2 = doc.at("adam_beta2").get<double>();
    config.adam_eps = doc.at("adam_eps").get<double>();
    TrainedModel trained{Mlp(config), {}};
    const auto params = doc.at("parameters").get<std::vector<double>>();
    trained.model.set_parameters(Eigen::Map<const Eigen::VectorXd>(
        params.data(), static_cast<Index>(params.size())));
    trained.loss_history = doc.at("loss_history").get<std::vector<double>>();
    return trained;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model file '" + path + "': " + e.what());
  }
}

}  // namespace datared

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "atlas/dsp.hpp"

namespace atlas {

struct ClassifierConfig {
  int input_dim = kMelBins;
  int hidden_dim = 256;
  int embed_dim = 64;
  int n_classes = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_epochs = 100;
  int batch_size = 8;
  /// Stop after this many epochs without a better (accuracy, train loss) pair.
  int patience = 5;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on non-positive dimensions or n_classes < 2.
  void Validate() const;
};

/// Flat view of one parameter tensor (column-major storage).
struct TensorView {
  std::string_view name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Index size() const { return rows * cols; }
};

/// Trainable tensors. LSTM gate blocks are stacked in the order
/// input, forget, cell, output.
struct Parameters {
  Eigen::MatrixXd lstm_input;   // 4H x I
  Eigen::MatrixXd lstm_hidden;  // 4H x H
  Eigen::VectorXd lstm_bias;    // 4H
  Eigen::MatrixXd fc1_weight;   // E x H
  Eigen::VectorXd fc1_bias;     // E
  Eigen::MatrixXd fc2_weight;   // C x E
  Eigen::VectorXd fc2_bias;     // C

  static Parameters Zeros(const ClassifierConfig& config);

  std::vector<TensorView> Views();
  std::vector<TensorView> Views() const { return const_cast<Parameters*>(this)->Views(); }
  Eigen::Index Count() const;
  bool AllFinite() const;
};

struct ClassifierState {
  ClassifierConfig config;
  /// Language id for each class index.
  std::vector<std::string> class_ids;
  /// Per-bin input standardisation, fixed from the training split.
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;
  Parameters params;
  Parameters adam_m;
  Parameters adam_v;
  std::int64_t step = 0;
};

/// Seeded uniform(+-1/sqrt(fan_in)) weights, zero biases except the forget
/// gate (+1); identity input standardisation.
ClassifierState InitializeClassifier(const ClassifierConfig& config, std::vector<std::string> class_ids);

struct ForwardTrace {
  Eigen::VectorXd pooled;         // H, max over frames of the hidden states
  Eigen::VectorXd pre_embedding;  // E, first fully connected layer output
  Eigen::VectorXd logits;         // C
};

ForwardTrace Forward(const ClassifierState& state, const MelSpectrogram& spec);

/// Index of the largest logit, lowest index on ties.
int Predict(const ClassifierState& state, const MelSpectrogram& spec);

struct LabeledExample {
  const MelSpectrogram* spec;
  int label;
};

struct LossAndGradient {
  double loss = 0.0;   // mean softmax cross-entropy
  Parameters gradient;
};

LossAndGradient ComputeLossAndGradient(const ClassifierState& state, std::span<const LabeledExample> batch);

/// One bias-corrected Adam update with the state's learning rate and betas.
void AdamStep(ClassifierState& state, const Parameters& gradient);

struct LabeledSet {
  std::vector<MelSpectrogram> features;
  std::vector<int> labels;
};

/// Fraction of examples whose predicted class equals the label.
double Evaluate(const ClassifierState& state, const LabeledSet& set);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
};

struct TrainResult {
  /// State of the epoch with the best test accuracy, lower train loss on ties.
  ClassifierState state;
  std::vector<EpochRecord> history;
  double test_accuracy = 0.0;
  int best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochRecord&, const ClassifierState&)>;

/// Length-bucketed, shuffled mini-batch Adam. Deterministic in config.seed.
TrainResult Train(const ClassifierConfig& config, std::vector<std::string> class_ids, const LabeledSet& train,
                  const LabeledSet& test, const EpochCallback& on_epoch = {});

// Checkpoints ---------------------------------------------------------------

inline constexpr std::string_view kCheckpointHeader = "lingua-atlas-ckpt v1";

/// Parameters, standardisation and Adam moments are stored as float32 LE.
std::string SerializeCheckpoint(const ClassifierState& state);
ClassifierState DeserializeCheckpoint(std::string_view bytes);
void WriteCheckpoint(const std::filesystem::path& path, const ClassifierState& state);
ClassifierState ReadCheckpoint(const std::filesystem::path& path);

}  // namespace atlas

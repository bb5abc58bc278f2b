#include "atlas/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "atlas/error.hpp"
#include "atlas/log.hpp"
#include "atlas/rng.hpp"
#include "atlas/text_io.hpp"

namespace atlas {

void ClassifierConfig::Validate() const {
  if (input_dim < 1 || hidden_dim < 1 || embed_dim < 1) throw InvalidArgument("classifier dimensions must be positive");
  if (n_classes < 2) throw InvalidArgument("classifier needs at least 2 classes, got " + std::to_string(n_classes));
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw InvalidArgument("Adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw InvalidArgument("Adam epsilon must be positive");
  if (max_epochs < 1) throw InvalidArgument("max_epochs must be positive");
  if (batch_size < 1) throw InvalidArgument("batch_size must be positive");
  if (patience < 1) throw InvalidArgument("patience must be positive");
}

Parameters Parameters::Zeros(const ClassifierConfig& c) {
  Parameters p;
  p.lstm_input = Eigen::MatrixXd::Zero(4 * c.hidden_dim, c.input_dim);
  p.lstm_hidden = Eigen::MatrixXd::Zero(4 * c.hidden_dim, c.hidden_dim);
  p.lstm_bias = Eigen::VectorXd::Zero(4 * c.hidden_dim);
  p.fc1_weight = Eigen::MatrixXd::Zero(c.embed_dim, c.hidden_dim);
  p.fc1_bias = Eigen::VectorXd::Zero(c.embed_dim);
  p.fc2_weight = Eigen::MatrixXd::Zero(c.n_classes, c.embed_dim);
  p.fc2_bias = Eigen::VectorXd::Zero(c.n_classes);
  return p;
}

std::vector<TensorView> Parameters::Views() {
  const auto view = [](std::string_view name, auto& t) {
    return TensorView{name, t.data(), t.rows(), t.cols()};
  };
  return {view("lstm.input", lstm_input),   view("lstm.hidden", lstm_hidden), view("lstm.bias", lstm_bias),
          view("fc1.weight", fc1_weight),   view("fc1.bias", fc1_bias),       view("fc2.weight", fc2_weight),
          view("fc2.bias", fc2_bias)};
}

Eigen::Index Parameters::Count() const {
  Eigen::Index n = 0;
  for (const auto& v : Views()) n += v.size();
  return n;
}

bool Parameters::AllFinite() const {
  for (const auto& v : Views()) {
    if (!Eigen::Map<const Eigen::VectorXd>(v.data, v.size()).allFinite()) return false;
  }
  return true;
}

ClassifierState InitializeClassifier(const ClassifierConfig& config, std::vector<std::string> class_ids) {
  config.Validate();
  if (static_cast<int>(class_ids.size()) != config.n_classes) {
    throw InvalidArgument("got " + std::to_string(class_ids.size()) + " class ids for " +
                          std::to_string(config.n_classes) + " classes");
  }
  ClassifierState s;
  s.config = config;
  s.class_ids = std::move(class_ids);
  s.input_mean = Eigen::VectorXd::Zero(config.input_dim);
  s.input_scale = Eigen::VectorXd::Ones(config.input_dim);
  s.params = Parameters::Zeros(config);
  s.adam_m = Parameters::Zeros(config);
  s.adam_v = Parameters::Zeros(config);
  Rng rng(MixSeed(config.seed, 0x1417));
  const auto fill = [&rng](Eigen::MatrixXd& w) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.Uniform(-bound, bound);
    }
  };
  fill(s.params.lstm_input);
  fill(s.params.lstm_hidden);
  fill(s.params.fc1_weight);
  fill(s.params.fc2_weight);
  s.params.lstm_bias.segment(config.hidden_dim, config.hidden_dim).setOnes();
  return s;
}

namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Everything the backward pass needs from one forward pass.
struct Activations {
  Eigen::MatrixXd x;       // I x T, standardised input
  Eigen::MatrixXd gates;   // 4H x T, post-nonlinearity i, f, g, o
  Eigen::MatrixXd cell;    // H x T
  Eigen::MatrixXd tanh_c;  // H x T
  Eigen::MatrixXd hidden;  // H x T
  std::vector<Eigen::Index> argmax;  // per hidden unit, first frame attaining the max
  Eigen::VectorXd pooled;
  Eigen::VectorXd pre_embedding;
  Eigen::VectorXd relu;
  Eigen::VectorXd logits;
};

void RunForward(const ClassifierState& s, const MelSpectrogram& spec, Activations& a) {
  const auto& c = s.config;
  const Eigen::Index h = c.hidden_dim;
  const Eigen::Index t_len = spec.frames.rows();
  if (spec.frames.cols() != c.input_dim) {
    throw InvalidArgument("input has " + std::to_string(spec.frames.cols()) + " bins, classifier expects " +
                          std::to_string(c.input_dim));
  }
  if (t_len < 1) throw InvalidArgument("input has no frames");
  const auto& p = s.params;
  a.x = ((spec.frames.transpose().colwise() - s.input_mean).array().colwise() * s.input_scale.array()).matrix();
  a.gates.noalias() = p.lstm_input * a.x;
  a.gates.colwise() += p.lstm_bias;
  a.cell.resize(h, t_len);
  a.tanh_c.resize(h, t_len);
  a.hidden.resize(h, t_len);
  Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd pre(4 * h);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    pre.noalias() = a.gates.col(t) + p.lstm_hidden * h_prev;
    auto g = a.gates.col(t);
    for (Eigen::Index j = 0; j < h; ++j) {
      g(j) = Sigmoid(pre(j));
      g(h + j) = Sigmoid(pre(h + j));
      g(2 * h + j) = std::tanh(pre(2 * h + j));
      g(3 * h + j) = Sigmoid(pre(3 * h + j));
      const double cell = g(h + j) * c_prev(j) + g(j) * g(2 * h + j);
      const double tc = std::tanh(cell);
      a.cell(j, t) = cell;
      a.tanh_c(j, t) = tc;
      a.hidden(j, t) = g(3 * h + j) * tc;
    }
    h_prev = a.hidden.col(t);
    c_prev = a.cell.col(t);
  }
  a.argmax.assign(static_cast<std::size_t>(h), 0);
  a.pooled.resize(h);
  for (Eigen::Index j = 0; j < h; ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index t = 1; t < t_len; ++t) {
      if (a.hidden(j, t) > a.hidden(j, best)) best = t;
    }
    a.argmax[static_cast<std::size_t>(j)] = best;
    a.pooled(j) = a.hidden(j, best);
  }
  a.pre_embedding.noalias() = p.fc1_weight * a.pooled + p.fc1_bias;
  a.relu = a.pre_embedding.cwiseMax(0.0);
  a.logits.noalias() = p.fc2_weight * a.relu + p.fc2_bias;
}

// Accumulates weight * d(cross-entropy)/d(params) into grad, returns the loss.
double RunBackward(const ClassifierState& s, const Activations& a, int label, double weight, Parameters& grad) {
  const auto& p = s.params;
  const Eigen::Index h = s.config.hidden_dim;
  const Eigen::Index t_len = a.hidden.cols();

  const double max_logit = a.logits.maxCoeff();
  const Eigen::VectorXd exps = (a.logits.array() - max_logit).exp().matrix();
  const double sum = exps.sum();
  const double loss = std::log(sum) + max_logit - a.logits(label);

  Eigen::VectorXd d_logits = exps / sum;
  d_logits(label) -= 1.0;
  d_logits *= weight;
  grad.fc2_weight.noalias() += d_logits * a.relu.transpose();
  grad.fc2_bias += d_logits;
  Eigen::VectorXd d_pre = p.fc2_weight.transpose() * d_logits;
  for (Eigen::Index e = 0; e < d_pre.size(); ++e) {
    if (!(a.pre_embedding(e) > 0.0)) d_pre(e) = 0.0;
  }
  grad.fc1_weight.noalias() += d_pre * a.pooled.transpose();
  grad.fc1_bias += d_pre;
  const Eigen::VectorXd d_pooled = p.fc1_weight.transpose() * d_pre;

  Eigen::MatrixXd d_gates(4 * h, t_len);
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(h);
  for (Eigen::Index t = t_len - 1; t >= 0; --t) {
    const auto g = a.gates.col(t);
    auto dg = d_gates.col(t);
    for (Eigen::Index j = 0; j < h; ++j) {
      double dh = dh_next(j);
      if (a.argmax[static_cast<std::size_t>(j)] == t) dh += d_pooled(j);
      const double i_g = g(j), f_g = g(h + j), c_g = g(2 * h + j), o_g = g(3 * h + j);
      const double tc = a.tanh_c(j, t);
      const double c_prev = t > 0 ? a.cell(j, t - 1) : 0.0;
      const double d_o = dh * tc;
      const double dc = dh * o_g * (1.0 - tc * tc) + dc_next(j);
      dg(j) = dc * c_g * i_g * (1.0 - i_g);
      dg(h + j) = dc * c_prev * f_g * (1.0 - f_g);
      dg(2 * h + j) = dc * i_g * (1.0 - c_g * c_g);
      dg(3 * h + j) = d_o * o_g * (1.0 - o_g);
      dc_next(j) = dc * f_g;
    }
    dh_next.noalias() = p.lstm_hidden.transpose() * dg;
  }
  grad.lstm_input.noalias() += d_gates * a.x.transpose();
  grad.lstm_bias += d_gates.rowwise().sum();
  if (t_len > 1) {
    grad.lstm_hidden.noalias() += d_gates.rightCols(t_len - 1) * a.hidden.leftCols(t_len - 1).transpose();
  }
  return loss;
}

}  // namespace

ForwardTrace Forward(const ClassifierState& state, const MelSpectrogram& spec) {
  Activations a;
  RunForward(state, spec, a);
  return ForwardTrace{std::move(a.pooled), std::move(a.pre_embedding), std::move(a.logits)};
}

int Predict(const ClassifierState& state, const MelSpectrogram& spec) {
  const ForwardTrace trace = Forward(state, spec);
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < trace.logits.size(); ++c) {
    if (trace.logits(c) > trace.logits(best)) best = c;
  }
  return static_cast<int>(best);
}

LossAndGradient ComputeLossAndGradient(const ClassifierState& state, std::span<const LabeledExample> batch) {
  if (batch.empty()) throw InvalidArgument("empty batch");
  LossAndGradient out;
  out.gradient = Parameters::Zeros(state.config);
  const double weight = 1.0 / static_cast<double>(batch.size());
  Activations a;
  for (const auto& ex : batch) {
    if (ex.label < 0 || ex.label >= state.config.n_classes) {
      throw RangeError("class index " + std::to_string(ex.label) + " outside [0, " +
                       std::to_string(state.config.n_classes) + ")");
    }
    RunForward(state, *ex.spec, a);
    out.loss += weight * RunBackward(state, a, ex.label, weight, out.gradient);
  }
  return out;
}

void AdamStep(ClassifierState& state, const Parameters& gradient) {
  const auto& c = state.config;
  ++state.step;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  auto params = state.params.Views();
  auto m = state.adam_m.Views();
  auto v = state.adam_v.Views();
  const auto grads = gradient.Views();
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads[k].size() != params[k].size()) throw InvalidArgument("gradient shape mismatch for " + std::string(params[k].name));
    for (Eigen::Index i = 0; i < params[k].size(); ++i) {
      const double g = grads[k].data[i];
      double& mi = m[k].data[i];
      double& vi = v[k].data[i];
      mi = c.beta1 * mi + (1.0 - c.beta1) * g;
      vi = c.beta2 * vi + (1.0 - c.beta2) * g * g;
      params[k].data[i] -= c.learning_rate * (mi / correction1) / (std::sqrt(vi / correction2) + c.epsilon);
    }
  }
}

double Evaluate(const ClassifierState& state, const LabeledSet& set) {
  if (set.features.empty()) throw InvalidArgument("cannot evaluate on an empty split");
  if (set.features.size() != set.labels.size()) throw InvalidArgument("features and labels differ in length");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < set.features.size(); ++i) {
    if (Predict(state, set.features[i]) == set.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.features.size());
}

namespace {

void FitStandardisation(ClassifierState& s, const LabeledSet& train) {
  const Eigen::Index dim = s.config.input_dim;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(dim);
  double frames = 0.0;
  for (const auto& f : train.features) {
    if (f.frames.cols() != dim) throw InvalidArgument("training features have the wrong number of bins");
    sum += f.frames.colwise().sum().transpose();
    sq += f.frames.array().square().colwise().sum().matrix().transpose();
    frames += static_cast<double>(f.frames.rows());
  }
  s.input_mean = sum / frames;
  const Eigen::VectorXd var = (sq / frames - s.input_mean.cwiseProduct(s.input_mean)).cwiseMax(0.0);
  s.input_scale = (var.array().sqrt().max(1e-3)).inverse().matrix();
}

}  // namespace

TrainResult Train(const ClassifierConfig& config, std::vector<std::string> class_ids, const LabeledSet& train,
                  const LabeledSet& test, const EpochCallback& on_epoch) {
  config.Validate();
  if (train.features.empty() || test.features.empty()) throw InvalidArgument("training needs non-empty train and test splits");
  if (train.features.size() != train.labels.size()) throw InvalidArgument("train features and labels differ in length");
  std::vector<int> per_class(static_cast<std::size_t>(config.n_classes), 0);
  for (int y : train.labels) {
    if (y < 0 || y >= config.n_classes) throw RangeError("train label " + std::to_string(y) + " out of range");
    ++per_class[static_cast<std::size_t>(y)];
  }
  for (int c = 0; c < config.n_classes; ++c) {
    if (per_class[static_cast<std::size_t>(c)] == 0) {
      const std::string id = static_cast<std::size_t>(c) < class_ids.size() ? class_ids[static_cast<std::size_t>(c)]
                                                                            : std::to_string(c);
      throw InvalidArgument("class " + id + " is absent from the train split");
    }
  }

  ClassifierState state = InitializeClassifier(config, std::move(class_ids));
  FitStandardisation(state, train);

  TrainResult result;
  result.test_accuracy = -1.0;
  double best_loss = 0.0;
  int since_best = 0;
  const std::size_t n = train.features.size();
  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    Rng rng(MixSeed(config.seed, static_cast<std::uint64_t>(epoch)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(order);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return train.features[a].frames.rows() < train.features[b].frames.rows();
    });
    std::vector<std::vector<LabeledExample>> batches;
    for (std::size_t start = 0; start < n; start += batch_size) {
      std::vector<LabeledExample> batch;
      for (std::size_t i = start; i < std::min(n, start + batch_size); ++i) {
        batch.push_back({&train.features[order[i]], train.labels[order[i]]});
      }
      batches.push_back(std::move(batch));
    }
    rng.Shuffle(batches);

    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const LossAndGradient lg = ComputeLossAndGradient(state, batches[b]);
      if (!std::isfinite(lg.loss)) {
        throw Error("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(b + 1));
      }
      AdamStep(state, lg.gradient);
      if (!state.params.AllFinite()) {
        throw Error("non-finite parameters after epoch " + std::to_string(epoch) + ", batch " + std::to_string(b + 1));
      }
      epoch_loss += lg.loss * static_cast<double>(batches[b].size());
    }
    EpochRecord record{epoch, epoch_loss / static_cast<double>(n), Evaluate(state, test)};
    result.history.push_back(record);
    log::Info("epoch " + std::to_string(epoch) + " loss " + text::FormatSig6(record.train_loss) + " test_acc " +
              text::FormatSig6(record.test_accuracy));
    if (on_epoch) on_epoch(record, state);
    // Equal accuracy with a lower training loss still counts as progress, so a
    // saturated test split does not freeze the model at its first epoch.
    const bool better = record.test_accuracy > result.test_accuracy ||
                        (record.test_accuracy == result.test_accuracy && record.train_loss < best_loss);
    if (better) {
      best_loss = record.train_loss;
      result.test_accuracy = record.test_accuracy;
      result.best_epoch = epoch;
      result.state = state;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

// Checkpoints ---------------------------------------------------------------

namespace {

void AppendTensor(std::string& out, const std::string& name, const double* data, Eigen::Index rows,
                  Eigen::Index cols) {
  out += "tensor " + name + " " + std::to_string(rows) + " " + std::to_string(cols) + "\n";
  for (Eigen::Index i = 0; i < rows * cols; ++i) text::AppendFloat32LE(out, static_cast<float>(data[i]));
  out += '\n';
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view Line() {
    const auto nl = bytes_.find('\n', pos_);
    if (nl == std::string_view::npos) throw ParseError("unexpected end of checkpoint", line_);
    const std::string_view out = bytes_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_;
    return out;
  }

  std::string_view Bytes(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw ParseError("truncated tensor payload", line_);
    const std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t line() const { return line_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const ClassifierState& s) {
  const auto& c = s.config;
  std::string out(kCheckpointHeader);
  out += "\ninput_dim " + std::to_string(c.input_dim);
  out += "\nhidden_dim " + std::to_string(c.hidden_dim);
  out += "\nembed_dim " + std::to_string(c.embed_dim);
  out += "\nn_classes " + std::to_string(c.n_classes);
  out += "\nlearning_rate " + text::FormatRoundTrip(c.learning_rate);
  out += "\nbeta1 " + text::FormatRoundTrip(c.beta1);
  out += "\nbeta2 " + text::FormatRoundTrip(c.beta2);
  out += "\nepsilon " + text::FormatRoundTrip(c.epsilon);
  out += "\nmax_epochs " + std::to_string(c.max_epochs);
  out += "\nbatch_size " + std::to_string(c.batch_size);
  out += "\npatience " + std::to_string(c.patience);
  out += "\nseed " + std::to_string(c.seed);
  out += "\nclasses";
  for (const auto& id : s.class_ids) out += " " + id;
  out += "\nstep " + std::to_string(s.step) + "\n";
  AppendTensor(out, "input.mean", s.input_mean.data(), s.input_mean.rows(), 1);
  AppendTensor(out, "input.scale", s.input_scale.data(), s.input_scale.rows(), 1);
  const auto emit = [&out](const std::string& prefix, const Parameters& p) {
    for (const auto& v : p.Views()) AppendTensor(out, prefix + std::string(v.name), v.data, v.rows, v.cols);
  };
  emit("", s.params);
  emit("adam_m.", s.adam_m);
  emit("adam_v.", s.adam_v);
  out += "end\n";
  return out;
}

ClassifierState DeserializeCheckpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.Line() != kCheckpointHeader) throw ParseError("not a checkpoint file", 1);
  ClassifierConfig c;
  const auto field = [&r](std::string_view key) {
    const std::string_view line = r.Line();
    const auto parts = text::Split(line, ' ');
    if (parts.size() != 2 || parts[0] != key) throw ParseError("expected '" + std::string(key) + " <value>'", r.line());
    return parts[1];
  };
  const auto int_field = [&](std::string_view key) {
    long long v = 0;
    if (!text::ParseInt(field(key), v)) throw ParseError("bad integer for " + std::string(key), r.line());
    return v;
  };
  const auto real_field = [&](std::string_view key) {
    double v = 0;
    if (!text::ParseDouble(field(key), v)) throw ParseError("bad number for " + std::string(key), r.line());
    return v;
  };
  c.input_dim = static_cast<int>(int_field("input_dim"));
  c.hidden_dim = static_cast<int>(int_field("hidden_dim"));
  c.embed_dim = static_cast<int>(int_field("embed_dim"));
  c.n_classes = static_cast<int>(int_field("n_classes"));
  c.learning_rate = real_field("learning_rate");
  c.beta1 = real_field("beta1");
  c.beta2 = real_field("beta2");
  c.epsilon = real_field("epsilon");
  c.max_epochs = static_cast<int>(int_field("max_epochs"));
  c.batch_size = static_cast<int>(int_field("batch_size"));
  c.patience = static_cast<int>(int_field("patience"));
  c.seed = static_cast<std::uint64_t>(int_field("seed"));
  try {
    c.Validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), r.line());
  }
  const auto classes = text::Split(r.Line(), ' ');
  if (classes.empty() || classes[0] != "classes") throw ParseError("expected class list", r.line());
  ClassifierState s;
  s.config = c;
  for (std::size_t i = 1; i < classes.size(); ++i) s.class_ids.emplace_back(classes[i]);
  if (static_cast<int>(s.class_ids.size()) != c.n_classes) throw ParseError("class list length differs from n_classes", r.line());
  s.step = int_field("step");
  s.input_mean = Eigen::VectorXd::Zero(c.input_dim);
  s.input_scale = Eigen::VectorXd::Zero(c.input_dim);
  s.params = Parameters::Zeros(c);
  s.adam_m = Parameters::Zeros(c);
  s.adam_v = Parameters::Zeros(c);
  const auto read_tensor = [&r](const std::string& name, double* data, Eigen::Index rows, Eigen::Index cols) {
    const std::string expected = "tensor " + name + " " + std::to_string(rows) + " " + std::to_string(cols);
    if (r.Line() != expected) throw ParseError("expected '" + expected + "'", r.line());
    const std::string_view payload = r.Bytes(static_cast<std::size_t>(rows * cols) * 4);
    const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
    for (Eigen::Index i = 0; i < rows * cols; ++i) data[i] = text::ReadFloat32LE(p + 4 * i);
    if (!r.Line().empty()) throw ParseError("missing newline after tensor " + name, r.line());
  };
  read_tensor("input.mean", s.input_mean.data(), c.input_dim, 1);
  read_tensor("input.scale", s.input_scale.data(), c.input_dim, 1);
  const auto load = [&](const std::string& prefix, Parameters& p) {
    for (auto& v : p.Views()) read_tensor(prefix + std::string(v.name), v.data, v.rows, v.cols);
  };
  load("", s.params);
  load("adam_m.", s.adam_m);
  load("adam_v.", s.adam_v);
  if (r.Line() != "end") throw ParseError("expected 'end'", r.line());
  return s;
}

void WriteCheckpoint(const std::filesystem::path& path, const ClassifierState& state) {
  text::WriteFile(path, SerializeCheckpoint(state));
}

ClassifierState ReadCheckpoint(const std::filesystem::path& path) {
  try {
    return DeserializeCheckpoint(text::ReadFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line(), e.column());
  }
}

}  // namespace atlas

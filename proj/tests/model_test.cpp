#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "atlas/corpus.hpp"
#include "atlas/dsp.hpp"
#include "atlas/error.hpp"
#include "atlas/model.hpp"
#include "support.hpp"

namespace atlas {
namespace {

ClassifierConfig Small(int hidden = 5, int embed = 4, int classes = 3, int input = 80) {
  ClassifierConfig c;
  c.input_dim = input;
  c.hidden_dim = hidden;
  c.embed_dim = embed;
  c.n_classes = classes;
  c.seed = 17;
  return c;
}

std::vector<std::string> ClassIds(int n) { return testing::Ids(n); }

MelSpectrogram RandomSpec(std::mt19937_64& rng, int frames, int bins = 80, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  MelSpectrogram s;
  s.frames.resize(frames, bins);
  for (int t = 0; t < frames; ++t) {
    for (int b = 0; b < bins; ++b) s.frames(t, b) = g(rng);
  }
  return s;
}

// Straight-line LSTM with gate order i, f, g, o, max-pool, FC, ReLU, FC.
struct OracleOut {
  std::vector<std::vector<double>> hidden;  // T x H
  std::vector<double> pooled, pre, logits;
};

OracleOut OracleForward(const ClassifierState& s, const MelSpectrogram& spec) {
  const auto& p = s.params;
  const int H = s.config.hidden_dim, I = s.config.input_dim, E = s.config.embed_dim, C = s.config.n_classes;
  const int T = static_cast<int>(spec.frames.rows());
  const auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  std::vector<double> h(H, 0.0), c(H, 0.0);
  OracleOut out;
  for (int t = 0; t < T; ++t) {
    std::vector<double> x(I);
    for (int k = 0; k < I; ++k) x[k] = (spec.frames(t, k) - s.input_mean(k)) * s.input_scale(k);
    std::vector<double> z(4 * H);
    for (int r = 0; r < 4 * H; ++r) {
      double acc = p.lstm_bias(r);
      for (int k = 0; k < I; ++k) acc += p.lstm_input(r, k) * x[k];
      for (int k = 0; k < H; ++k) acc += p.lstm_hidden(r, k) * h[k];
      z[r] = acc;
    }
    for (int j = 0; j < H; ++j) {
      const double ig = sig(z[j]), fg = sig(z[H + j]), gg = std::tanh(z[2 * H + j]), og = sig(z[3 * H + j]);
      c[j] = fg * c[j] + ig * gg;
      h[j] = og * std::tanh(c[j]);
    }
    out.hidden.push_back(h);
  }
  out.pooled.assign(H, -1e300);
  for (const auto& row : out.hidden) {
    for (int j = 0; j < H; ++j) out.pooled[j] = std::max(out.pooled[j], row[j]);
  }
  out.pre.assign(E, 0.0);
  for (int e = 0; e < E; ++e) {
    out.pre[e] = p.fc1_bias(e);
    for (int j = 0; j < H; ++j) out.pre[e] += p.fc1_weight(e, j) * out.pooled[j];
  }
  out.logits.assign(C, 0.0);
  for (int k = 0; k < C; ++k) {
    out.logits[k] = p.fc2_bias(k);
    for (int e = 0; e < E; ++e) out.logits[k] += p.fc2_weight(k, e) * std::max(0.0, out.pre[e]);
  }
  return out;
}

double OracleLoss(const ClassifierState& s, const std::vector<LabeledExample>& batch) {
  double total = 0.0;
  for (const auto& ex : batch) {
    const auto logits = OracleForward(s, *ex.spec).logits;
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l);
    total += std::log(sum) - logits[ex.label];
  }
  return total / static_cast<double>(batch.size());
}

TEST(Classifier, ConfigValidation) {
  auto c = Small();
  c.n_classes = 1;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  EXPECT_THROW(InitializeClassifier(c, ClassIds(1)), InvalidArgument);
  c = Small();
  c.hidden_dim = 0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = Small();
  EXPECT_THROW(InitializeClassifier(c, ClassIds(2)), InvalidArgument);
}

TEST(Classifier, InitialisationIsSeededAndBounded) {
  const auto c = Small(6, 4, 3);
  const ClassifierState a = InitializeClassifier(c, ClassIds(3));
  const ClassifierState b = InitializeClassifier(c, ClassIds(3));
  EXPECT_EQ(a.params.lstm_input, b.params.lstm_input);
  EXPECT_EQ(a.params.fc2_weight, b.params.fc2_weight);
  EXPECT_LE(a.params.lstm_input.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(80.0));
  EXPECT_LE(a.params.lstm_hidden.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(6.0));
  EXPECT_LE(a.params.fc1_weight.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(6.0));
  EXPECT_LE(a.params.fc2_weight.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(4.0));
  for (int r = 0; r < 24; ++r) EXPECT_EQ(a.params.lstm_bias(r), (r >= 6 && r < 12) ? 1.0 : 0.0);
  EXPECT_TRUE(a.params.fc1_bias.isZero());
  EXPECT_EQ(a.params.Count(), 24 * 80 + 24 * 6 + 24 + 4 * 6 + 4 + 3 * 4 + 3);
  auto other = c;
  other.seed = 18;
  EXPECT_NE(InitializeClassifier(other, ClassIds(3)).params.lstm_input, a.params.lstm_input);
}

TEST(Classifier, ForwardMatchesOracle) {
  std::mt19937_64 rng(1);
  ClassifierState s = InitializeClassifier(Small(7, 5, 4), ClassIds(4));
  for (int k = 0; k < 80; ++k) {
    s.input_mean(k) = 0.1 * k;
    s.input_scale(k) = 1.0 + 0.01 * k;
  }
  for (int frames : {1, 2, 9}) {
    const MelSpectrogram spec = RandomSpec(rng, frames);
    const ForwardTrace tr = Forward(s, spec);
    const OracleOut ref = OracleForward(s, spec);
    for (int j = 0; j < 7; ++j) EXPECT_NEAR(tr.pooled(j), ref.pooled[j], 1e-12);
    for (int e = 0; e < 5; ++e) EXPECT_NEAR(tr.pre_embedding(e), ref.pre[e], 1e-12);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(tr.logits(k), ref.logits[k], 1e-12);
    if (frames == 1) {
      for (int j = 0; j < 7; ++j) EXPECT_NEAR(tr.pooled(j), ref.hidden[0][j], 1e-12);
    }
  }
}

TEST(Classifier, ZeroParametersGiveBiasLogits) {
  std::mt19937_64 rng(2);
  ClassifierState s = InitializeClassifier(Small(), ClassIds(3));
  s.params = Parameters::Zeros(s.config);
  s.params.fc2_bias << 0.5, -1.0, 2.0;
  const ForwardTrace tr = Forward(s, RandomSpec(rng, 3));
  EXPECT_EQ(tr.logits, s.params.fc2_bias);
}

// With no recurrence and a closed forget gate every hidden state depends on
// its own frame only, which is where max-pool invariances become observable.
ClassifierState Memoryless() {
  ClassifierState s = InitializeClassifier(Small(6, 4, 3), ClassIds(3));
  s.params.lstm_hidden.setZero();
  s.params.lstm_input.middleRows(6, 6).setZero();
  s.params.lstm_bias.segment(6, 6).setConstant(-1e3);
  return s;
}

TEST(Classifier, PoolIgnoresFrameOrderWithoutMemory) {
  std::mt19937_64 rng(3);
  const ClassifierState s = Memoryless();
  MelSpectrogram spec = RandomSpec(rng, 8);
  const ForwardTrace a = Forward(s, spec);
  MelSpectrogram rev = spec;
  rev.frames = spec.frames.colwise().reverse();
  const ForwardTrace b = Forward(s, rev);
  EXPECT_EQ(a.pooled, b.pooled);
  EXPECT_EQ(a.logits, b.logits);
}

TEST(Classifier, RepeatingTheLoudestFrameKeepsThePool) {
  std::mt19937_64 rng(4);
  const ClassifierState s = Memoryless();
  MelSpectrogram spec = RandomSpec(rng, 6);
  const ForwardTrace a = Forward(s, spec);
  // The appended copy contains every frame that attains a pooled maximum.
  MelSpectrogram longer;
  longer.frames.resize(spec.frames.rows() * 2, 80);
  longer.frames << spec.frames, spec.frames;
  EXPECT_EQ(Forward(s, longer).pooled, a.pooled);
}

TEST(Classifier, PredictBreaksTiesTowardsLowestIndex) {
  std::mt19937_64 rng(5);
  ClassifierState s = InitializeClassifier(Small(), ClassIds(3));
  s.params = Parameters::Zeros(s.config);
  EXPECT_EQ(Predict(s, RandomSpec(rng, 2)), 0);
  s.params.fc2_bias << 0.0, 1.0, 1.0;
  EXPECT_EQ(Predict(s, RandomSpec(rng, 2)), 1);
}

TEST(Classifier, UniformLogitsGiveLogOfClassCount) {
  std::mt19937_64 rng(6);
  for (int classes : {2, 3, 7}) {
    ClassifierState s = InitializeClassifier(Small(4, 3, classes), ClassIds(classes));
    s.params = Parameters::Zeros(s.config);
    const MelSpectrogram x = RandomSpec(rng, 4);
    const std::vector<LabeledExample> batch{{&x, 0}, {&x, classes - 1}};
    EXPECT_NEAR(ComputeLossAndGradient(s, batch).loss, std::log(static_cast<double>(classes)), 1e-12);
  }
}

TEST(Classifier, LossMatchesOracle) {
  std::mt19937_64 rng(7);
  const ClassifierState s = InitializeClassifier(Small(), ClassIds(3));
  const MelSpectrogram a = RandomSpec(rng, 3), b = RandomSpec(rng, 5);
  const std::vector<LabeledExample> batch{{&a, 2}, {&b, 0}};
  EXPECT_NEAR(ComputeLossAndGradient(s, batch).loss, OracleLoss(s, batch), 1e-12);
}

TEST(Classifier, DuplicatedBatchHasSameMeanLossAndGradient) {
  std::mt19937_64 rng(8);
  const ClassifierState s = InitializeClassifier(Small(), ClassIds(3));
  const MelSpectrogram a = RandomSpec(rng, 3), b = RandomSpec(rng, 4);
  const std::vector<LabeledExample> once{{&a, 1}, {&b, 2}};
  const std::vector<LabeledExample> twice{{&a, 1}, {&b, 2}, {&a, 1}, {&b, 2}};
  const LossAndGradient x = ComputeLossAndGradient(s, once);
  const LossAndGradient y = ComputeLossAndGradient(s, twice);
  EXPECT_NEAR(x.loss, y.loss, 1e-12);
  const auto gx = x.gradient.Views();
  const auto gy = y.gradient.Views();
  for (std::size_t k = 0; k < gx.size(); ++k) {
    for (Eigen::Index i = 0; i < gx[k].size(); ++i) EXPECT_NEAR(gx[k].data[i], gy[k].data[i], 1e-12) << gx[k].name;
  }
}

TEST(Classifier, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(9);
  ClassifierConfig c = Small(5, 4, 3, 12);
  ClassifierState s = InitializeClassifier(c, ClassIds(3));
  // Non-zero biases so the ReLU sees both signs.
  std::normal_distribution<double> g(0.0, 0.3);
  for (int e = 0; e < 4; ++e) s.params.fc1_bias(e) = g(rng);
  const MelSpectrogram a = RandomSpec(rng, 4, 12), b = RandomSpec(rng, 6, 12);
  const std::vector<LabeledExample> batch{{&a, 0}, {&b, 2}};
  const LossAndGradient lg = ComputeLossAndGradient(s, batch);
  const double h = 1e-5;
  auto views = s.params.Views();
  const auto grads = lg.gradient.Views();
  int good = 0, total = 0;
  for (std::size_t k = 0; k < views.size(); ++k) {
    for (Eigen::Index i = 0; i < views[k].size(); ++i) {
      const double saved = views[k].data[i];
      views[k].data[i] = saved + h;
      const double up = OracleLoss(s, batch);
      views[k].data[i] = saved - h;
      const double down = OracleLoss(s, batch);
      views[k].data[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = grads[k].data[i];
      const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-7});
      good += rel <= 1e-4;
      ++total;
    }
  }
  EXPECT_GE(good, total * 99 / 100) << good << " of " << total;
}

TEST(Classifier, BatchErrors) {
  std::mt19937_64 rng(10);
  const ClassifierState s = InitializeClassifier(Small(), ClassIds(3));
  EXPECT_THROW(ComputeLossAndGradient(s, {}), InvalidArgument);
  const MelSpectrogram x = RandomSpec(rng, 2);
  const std::vector<LabeledExample> bad{{&x, 3}};
  EXPECT_THROW(ComputeLossAndGradient(s, bad), RangeError);
  const MelSpectrogram narrow = RandomSpec(rng, 2, 40);
  EXPECT_THROW(Forward(s, narrow), InvalidArgument);
}

TEST(Classifier, AdamFirstStepMovesByLearningRate) {
  ClassifierState s = InitializeClassifier(Small(), ClassIds(3));
  const ClassifierState before = s;
  Parameters grad = Parameters::Zeros(s.config);
  grad.fc2_bias << 3.0, -0.5, 0.0;
  AdamStep(s, grad);
  EXPECT_EQ(s.step, 1);
  // Bias correction makes the first update lr * g / (|g| + eps').
  EXPECT_NEAR(s.params.fc2_bias(0) - before.params.fc2_bias(0), -1e-3, 1e-10);
  EXPECT_NEAR(s.params.fc2_bias(1) - before.params.fc2_bias(1), 1e-3, 1e-10);
  EXPECT_EQ(s.params.fc2_bias(2), before.params.fc2_bias(2));
  EXPECT_EQ(s.params.lstm_input, before.params.lstm_input);
}

LabeledSet Balanced(std::mt19937_64& rng, int per_class) {
  LabeledSet set;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < per_class; ++i) {
      set.features.push_back(RandomSpec(rng, 3));
      set.labels.push_back(c);
    }
  }
  return set;
}

TEST(Classifier, ZeroStateScoresHalfOnBalancedPair) {
  std::mt19937_64 rng(11);
  ClassifierState s = InitializeClassifier(Small(4, 3, 2), ClassIds(2));
  s.params = Parameters::Zeros(s.config);
  EXPECT_DOUBLE_EQ(Evaluate(s, Balanced(rng, 5)), 0.5);
  s.params.fc2_bias << 0.0, 1.0;
  LabeledSet ones = Balanced(rng, 3);
  for (auto& y : ones.labels) y = 1;
  EXPECT_DOUBLE_EQ(Evaluate(s, ones), 1.0);
  EXPECT_THROW(Evaluate(s, LabeledSet{}), InvalidArgument);
}

LabeledSet SyntheticFeatures(const SyntheticCorpus& c, Split which) {
  LabeledSet set;
  const auto ids = c.manifest.SortedIds();
  for (std::size_t u = 0; u < c.manifest.utterances.size(); ++u) {
    const auto& e = c.manifest.utterances[u];
    if (e.split != which) continue;
    set.features.push_back(ComputeMelSpectrogram(c.audio[u], c.manifest.sample_rate));
    set.labels.push_back(static_cast<int>(std::find(ids.begin(), ids.end(), e.language_id) - ids.begin()));
  }
  return set;
}

TEST(Classifier, FitsTinyCorpusWithinFiveHundredSteps) {
  SyntheticOptions o;
  o.n_languages = 2;
  o.utterances_per_language = 4;
  o.seed = 3;
  o.utterance_seconds = 0.3;
  const SyntheticCorpus corpus = BuildSyntheticCorpus(o);
  LabeledSet all = SyntheticFeatures(corpus, Split::kTrain);
  const LabeledSet test = SyntheticFeatures(corpus, Split::kTest);
  all.features.insert(all.features.end(), test.features.begin(), test.features.end());
  all.labels.insert(all.labels.end(), test.labels.begin(), test.labels.end());
  ASSERT_EQ(all.features.size(), 8u);

  ClassifierConfig c = Small(32, 16, 2);
  ClassifierState s = InitializeClassifier(c, corpus.manifest.SortedIds());
  // Same per-bin standardisation the trainer fits.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(80), sq = Eigen::VectorXd::Zero(80);
  double frames = 0;
  for (const auto& f : all.features) {
    mean += f.frames.colwise().sum().transpose();
    sq += f.frames.array().square().colwise().sum().matrix().transpose();
    frames += static_cast<double>(f.frames.rows());
  }
  mean /= frames;
  s.input_mean = mean;
  s.input_scale = ((sq / frames - mean.cwiseProduct(mean)).cwiseMax(0.0).array().sqrt().max(1e-3)).inverse().matrix();

  std::vector<LabeledExample> batch;
  for (std::size_t i = 0; i < all.features.size(); ++i) batch.push_back({&all.features[i], all.labels[i]});
  double loss = 1e9;
  int step = 0;
  for (; step < 500 && loss >= 0.01; ++step) {
    const LossAndGradient lg = ComputeLossAndGradient(s, batch);
    loss = lg.loss;
    AdamStep(s, lg.gradient);
    ASSERT_TRUE(s.params.AllFinite()) << "step " << step;
  }
  EXPECT_LT(loss, 0.01) << "after " << step << " steps";
}

TEST(Classifier, TrainingIsDeterministicAndCheckpointsRoundTrip) {
  SyntheticOptions o;
  o.n_languages = 3;
  o.utterances_per_language = 5;
  o.seed = 4;
  o.utterance_seconds = 0.2;
  const SyntheticCorpus corpus = BuildSyntheticCorpus(o);
  const LabeledSet train = SyntheticFeatures(corpus, Split::kTrain);
  const LabeledSet test = SyntheticFeatures(corpus, Split::kTest);
  ClassifierConfig c = Small(8, 4, 3);
  c.max_epochs = 3;
  c.batch_size = 4;
  int calls = 0;
  const TrainResult a = Train(c, corpus.manifest.SortedIds(), train, test,
                              [&](const EpochRecord& r, const ClassifierState& s) {
                                ++calls;
                                EXPECT_EQ(r.epoch, calls);
                                EXPECT_TRUE(s.params.AllFinite());
                              });
  const TrainResult b = Train(c, corpus.manifest.SortedIds(), train, test);
  EXPECT_EQ(calls, static_cast<int>(a.history.size()));
  EXPECT_EQ(SerializeCheckpoint(a.state), SerializeCheckpoint(b.state));
  EXPECT_GE(a.best_epoch, 1);
  EXPECT_EQ(a.state.class_ids, corpus.manifest.SortedIds());

  const std::string bytes = SerializeCheckpoint(a.state);
  EXPECT_EQ(bytes.rfind("lingua-atlas-ckpt v1\n", 0), 0u);
  const ClassifierState r = DeserializeCheckpoint(bytes);
  EXPECT_EQ(SerializeCheckpoint(r), bytes);
  EXPECT_EQ(r.step, a.state.step);
  EXPECT_EQ(r.config.hidden_dim, 8);
  EXPECT_EQ(r.class_ids, a.state.class_ids);
  for (Eigen::Index i = 0; i < r.params.fc2_weight.size(); ++i) {
    EXPECT_EQ(r.params.fc2_weight.data()[i], static_cast<double>(static_cast<float>(a.state.params.fc2_weight.data()[i])));
  }
  EXPECT_THROW(DeserializeCheckpoint(bytes.substr(0, bytes.size() / 2)), ParseError);
  EXPECT_THROW(DeserializeCheckpoint("lingua-atlas-ckpt v2\n"), ParseError);
}

TEST(Classifier, TrainRejectsMissingClass) {
  std::mt19937_64 rng(12);
  LabeledSet train = Balanced(rng, 2);
  for (auto& y : train.labels) y = 0;
  ClassifierConfig c = Small(4, 3, 2);
  EXPECT_THROW(Train(c, ClassIds(2), train, Balanced(rng, 1)), InvalidArgument);
}

}  // namespace
}  // namespace atlas

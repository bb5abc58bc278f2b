#include "pipeline.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <map>
#include <thread>

#include "atlas/error.hpp"
#include "atlas/familytree.hpp"
#include "atlas/geodesy.hpp"
#include "atlas/log.hpp"
#include "atlas/report.hpp"
#include "atlas/similarity.hpp"
#include "atlas/text_io.hpp"
#include "atlas/wav.hpp"

namespace atlas::pipeline {

namespace fs = std::filesystem;

fs::path FeaturePath(const fs::path& features_dir, const UtteranceEntry& u) {
  fs::path rel(u.path);
  if (rel.is_absolute()) rel = rel.relative_path();
  rel.replace_extension(".mel");
  return features_dir / rel;
}

namespace {

MelSpectrogram FeaturizeOne(const CorpusManifest& manifest, const UtteranceEntry& u, const MelExtractor& extractor) {
  const fs::path wav = manifest.ResolveAudio(u);
  const Audio audio = ReadWav(wav);
  if (audio.sample_rate != manifest.sample_rate) {
    throw Error(wav.string() + ": sample rate " + std::to_string(audio.sample_rate) + " Hz differs from the corpus rate " +
                std::to_string(manifest.sample_rate) + " Hz");
  }
  MelSpectrogram spec = extractor.Compute(audio.samples);
  spec.language_id = u.language_id;
  return spec;
}

}  // namespace

void Featurize(const CorpusManifest& manifest, const fs::path& features_dir, const MelConfig& config, int threads) {
  const std::size_t n = manifest.utterances.size();
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(n, 1));
  // Validate the configuration once before spawning workers.
  { MelExtractor probe(manifest.sample_rate, config); }
  std::vector<std::exception_ptr> errors(workers);
  const auto work = [&](std::size_t w) {
    try {
      MelExtractor extractor(manifest.sample_rate, config);
      for (std::size_t i = w; i < n; i += workers) {
        const auto& u = manifest.utterances[i];
        WriteMelSpectrogram(FeaturePath(features_dir, u), FeaturizeOne(manifest, u, extractor));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  log::Info("featurized " + std::to_string(n) + " utterances into " + features_dir.string());
}

Splits LoadSplits(const CorpusManifest& manifest, const fs::path& features_dir) {
  Splits s;
  s.class_ids = manifest.SortedIds();
  std::map<std::string, int> label;
  for (std::size_t i = 0; i < s.class_ids.size(); ++i) label[s.class_ids[i]] = static_cast<int>(i);
  std::unique_ptr<MelExtractor> extractor;
  if (features_dir.empty()) extractor = std::make_unique<MelExtractor>(manifest.sample_rate);
  for (const auto& u : manifest.utterances) {
    MelSpectrogram spec = features_dir.empty() ? FeaturizeOne(manifest, u, *extractor)
                                               : ReadMelSpectrogram(FeaturePath(features_dir, u));
    spec.language_id = u.language_id;
    LabeledSet& set = u.split == Split::kTrain ? s.train : s.test;
    set.features.push_back(std::move(spec));
    set.labels.push_back(label.at(u.language_id));
    if (u.split == Split::kTest) s.test_language.push_back(u.language_id);
  }
  return s;
}

EmbeddingTable EmbedTestSplit(const ClassifierState& state, const Splits& splits, EmbeddingLayer layer,
                              std::string source_checkpoint) {
  std::vector<TestUtterance> test;
  for (std::size_t i = 0; i < splits.test.features.size(); ++i) {
    test.push_back({splits.test_language[i], &splits.test.features[i]});
  }
  EmbeddingTable table = ExtractEmbeddings(state, test, layer);
  table.source_checkpoint = std::move(source_checkpoint);
  return table;
}

PipelineConfig ParsePipelineConfig(std::string_view text, const fs::path& base_dir) {
  PipelineConfig c;
  const auto lines = text::Split(text, '\n');
  if (lines.empty() || text::Trim(lines[0]) != kPipelineHeader) {
    throw ParseError("expected header '" + std::string(kPipelineHeader) + "'", 1);
  }
  bool have_out = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string_view line = text::Trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::Split(line, '\t');
    if (f.size() != 2) throw ParseError("expected 'key<TAB>value'", lineno);
    const std::string_view key = f[0];
    const std::string_view value = text::Trim(f[1]);
    const auto as_int = [&](int lo) {
      long long v = 0;
      if (!text::ParseInt(value, v) || v < lo) throw ParseError(std::string(key) + " needs an integer >= " + std::to_string(lo), lineno);
      return static_cast<int>(v);
    };
    const auto as_real = [&]() {
      double v = 0;
      if (!text::ParseDouble(value, v) || !(v > 0)) throw ParseError(std::string(key) + " needs a positive number", lineno);
      return v;
    };
    if (key == "out") {
      const fs::path p{std::string(value)};
      c.out_dir = p.is_absolute() ? p : base_dir / p;
      have_out = true;
    } else if (key == "langs") {
      c.langs = as_int(2);
    } else if (key == "utts") {
      c.utts = as_int(4);
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(as_int(0));
    } else if (key == "train_frac") {
      c.train_frac = as_real();
      if (c.train_frac >= 1.0) throw ParseError("train_frac must be below 1", lineno);
    } else if (key == "hidden") {
      c.hidden = as_int(1);
    } else if (key == "embed") {
      c.embed = as_int(1);
    } else if (key == "lr") {
      c.lr = as_real();
    } else if (key == "epochs") {
      c.epochs = as_int(1);
    } else if (key == "batch_size") {
      c.batch_size = as_int(1);
    } else if (key == "patience") {
      c.patience = as_int(1);
    } else if (key == "radius_km") {
      c.radius_km = as_real();
    } else if (key == "source") {
      if (!IsTreeSource(value)) throw ParseError("unknown tree source '" + std::string(value) + "'", lineno);
      c.source = std::string(value);
    } else if (key == "k") {
      c.k_values.clear();
      for (auto part : text::Split(value, ',')) {
        long long k = 0;
        if (!text::ParseInt(text::Trim(part), k) || k < 1) throw ParseError("bad k value '" + std::string(part) + "'", lineno);
        c.k_values.push_back(static_cast<std::size_t>(k));
      }
    } else if (key == "top") {
      c.top = static_cast<std::size_t>(as_int(0));
    } else if (key == "threads") {
      c.threads = as_int(1);
    } else {
      throw ParseError("unknown key '" + std::string(key) + "'", lineno);
    }
  }
  if (!have_out) c.out_dir = base_dir / c.out_dir;
  return c;
}

namespace {

template <typename... Args>
void WriteReport(const fs::path& path, const Args&... args) {
  std::ostringstream ss;
  EmitReport(ss, args...);
  text::WriteFile(path, ss.str());
}

}  // namespace

PipelineSummary RunPipeline(const PipelineConfig& config, std::ostream& out) {
  const fs::path root = config.out_dir;
  const fs::path corpus_dir = root / "corpus";
  const fs::path features_dir = root / "features";
  const fs::path ckpt_path = root / "model.ckpt";
  const fs::path emb_path = root / "embeddings.emb";
  const fs::path reports = root / "reports";

  SyntheticOptions synth;
  synth.n_languages = config.langs;
  synth.utterances_per_language = config.utts;
  synth.seed = config.seed;
  synth.train_fraction = config.train_frac;
  const CorpusManifest manifest = GenerateSyntheticCorpus(synth, corpus_dir);
  log::Info("generated " + std::to_string(manifest.utterances.size()) + " utterances under " + corpus_dir.string());

  Featurize(manifest, features_dir, MelConfig{}, config.threads);
  const Splits splits = LoadSplits(manifest, features_dir);

  ClassifierConfig cc;
  cc.hidden_dim = config.hidden;
  cc.embed_dim = config.embed;
  cc.n_classes = static_cast<int>(splits.class_ids.size());
  cc.learning_rate = config.lr;
  cc.max_epochs = config.epochs;
  cc.batch_size = config.batch_size;
  cc.patience = config.patience;
  cc.seed = config.seed;
  const TrainResult trained = Train(cc, splits.class_ids, splits.train, splits.test,
                                    [&](const EpochRecord&, const ClassifierState& s) { WriteCheckpoint(ckpt_path, s); });
  WriteCheckpoint(ckpt_path, trained.state);
  {
    std::string history = "epoch\ttrain_loss\ttest_accuracy\n";
    for (const auto& r : trained.history) {
      history += std::to_string(r.epoch) + "\t" + text::FormatSig6(r.train_loss) + "\t" +
                 text::FormatSig6(r.test_accuracy) + "\n";
    }
    history += "best_epoch\t" + std::to_string(trained.best_epoch) + "\n";
    text::WriteFile(reports / "train.tsv", history);
  }

  const std::string ckpt_bytes = text::ReadFile(ckpt_path);
  const ClassifierState state = DeserializeCheckpoint(ckpt_bytes);
  const double accuracy = Evaluate(state, splits.test);
  const EmbeddingTable table = EmbedTestSplit(state, splits, EmbeddingLayer::kPreActivation, text::Fingerprint(ckpt_bytes));
  WriteEmbeddings(emb_path, table);

  const DistanceMatrix emb = EmbeddingDistances(table);
  const DistanceMatrix geo = GeoDistanceMatrix(manifest.languages);
  const CorrelationReport global = CorrelationMetric(emb, geo);
  const CorrelationReport local = CorrelationMetric(emb, geo, config.radius_km);
  WriteReport(reports / "geo_global.tsv", global);
  WriteReport(reports / "geo_local.tsv", local);

  const FamilyForest forest = BuildForest(manifest.languages, config.source);
  WriteReport(reports / "forest.tsv", config.source, ComputeForestStats(forest));
  std::vector<std::size_t> ks;
  for (std::size_t k : config.k_values) {
    if (k <= emb.size() - 1) {
      ks.push_back(k);
    } else {
      log::Info("skipping k = " + std::to_string(k) + " (only " + std::to_string(emb.size()) + " languages)");
    }
  }
  if (!ks.empty()) WriteReport(reports / "tree.tsv", TreeMetric(forest, emb, ks));
  const OutlierReport outliers = ComputeOutlierReport(emb, geo, forest, config.radius_km);
  WriteReport(reports / "outliers.tsv", outliers, config.top);

  PipelineSummary summary{accuracy, trained.best_epoch, global.mu, local.mu};
  out << "test_accuracy\t" << text::FormatSig6(accuracy) << '\n';
  out << "best_epoch\t" << trained.best_epoch << '\n';
  out << "global_correlation\t" << text::FormatSig6(global.mu) << '\t' << text::FormatSig6(global.sigma) << '\n';
  out << "local_correlation\t" << text::FormatSig6(local.mu) << '\t' << text::FormatSig6(local.sigma) << '\n';
  out << "checkpoint\t" << ckpt_path.string() << '\n';
  out << "embeddings\t" << emb_path.string() << '\n';
  out << "reports\t" << reports.string() << '\n';
  return summary;
}

}  // namespace atlas::pipeline

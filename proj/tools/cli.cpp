#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>

#include "atlas/corpus.hpp"
#include "atlas/embed.hpp"
#include "atlas/error.hpp"
#include "atlas/familytree.hpp"
#include "atlas/geodesy.hpp"
#include "atlas/log.hpp"
#include "atlas/model.hpp"
#include "atlas/report.hpp"
#include "atlas/similarity.hpp"
#include "atlas/text_io.hpp"
#include "pipeline.hpp"

namespace atlas::cli {
namespace {

namespace fs = std::filesystem;

// Raised by handlers for flag combinations CLI11 cannot check on its own.
struct UsageError : Error {
  using Error::Error;
};

std::string OneLine(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::vector<std::size_t> ParseKList(const std::string& s) {
  std::vector<std::size_t> out;
  for (auto part : text::Split(s, ',')) {
    long long k = 0;
    if (!text::ParseInt(text::Trim(part), k) || k < 1) throw UsageError("bad k value '" + std::string(part) + "'");
    out.push_back(static_cast<std::size_t>(k));
  }
  return out;
}

void RequireSource(const std::string& source) {
  if (!IsTreeSource(source)) throw UsageError("unknown tree source '" + source + "' (ethnologue, wikipedia or glottolog)");
}

struct Options {
  // gen-corpus
  int langs = 10;
  int utts = 20;
  std::uint64_t seed = 0;
  fs::path out;
  double seconds = 0.5;
  double train_frac = 0.9;
  int family_size = 3;
  // shared inputs
  fs::path manifest;
  fs::path features;
  fs::path ckpt;
  fs::path emb;
  fs::path phonemes;
  fs::path pairs;
  fs::path config;
  // featurize
  MelConfig mel;
  // train
  int hidden = 256;
  int embed = 64;
  double lr = 1e-3;
  int epochs = 100;
  int batch_size = 8;
  int patience = 5;
  // embed
  std::string layer = "pre";
  // queries
  std::string lang;
  std::size_t k = 1;
  std::string k_list = "2,4,8,16,32,64";
  std::optional<double> radius_km;
  std::string source = "ethnologue";
  std::size_t top = 5;
  std::string method = "emb";
  std::size_t count = 36;
  int order = kDefaultMcdOrder;
  std::size_t max_utts = 0;
  int threads = 1;
};

int GenCorpus(const Options& o, std::ostream& out) {
  SyntheticOptions s;
  s.n_languages = o.langs;
  s.utterances_per_language = o.utts;
  s.seed = o.seed;
  s.utterance_seconds = o.seconds;
  s.train_fraction = o.train_frac;
  s.family_size = o.family_size;
  const CorpusManifest m = GenerateSyntheticCorpus(s, o.out);
  out << "languages\t" << m.languages.size() << "\nutterances\t" << m.utterances.size() << "\nmanifest\t"
      << (o.out / "manifest.txt").string() << '\n';
  return kExitOk;
}

int SplitCmd(const Options& o, std::ostream& out) {
  const CorpusManifest m = SplitCorpus(LoadManifest(o.manifest), o.train_frac, o.seed);
  if (o.out.empty()) {
    out << FormatManifest(m);
  } else {
    if (fs::exists(o.out) && fs::equivalent(o.out, o.manifest)) throw UsageError("--out must differ from --manifest");
    WriteManifest(o.out, m);
    std::size_t train = 0;
    for (const auto& u : m.utterances) train += u.split == Split::kTrain;
    out << "train\t" << train << "\ntest\t" << m.utterances.size() - train << '\n';
  }
  return kExitOk;
}

int FeaturizeCmd(const Options& o, std::ostream& out) {
  const CorpusManifest m = LoadManifest(o.manifest);
  pipeline::Featurize(m, o.out, o.mel, o.threads);
  out << "featurized\t" << m.utterances.size() << '\n';
  return kExitOk;
}

int TrainCmd(const Options& o, std::ostream& out) {
  const CorpusManifest m = LoadManifest(o.manifest);
  const pipeline::Splits splits = pipeline::LoadSplits(m, o.features);
  ClassifierConfig c;
  c.hidden_dim = o.hidden;
  c.embed_dim = o.embed;
  c.n_classes = static_cast<int>(splits.class_ids.size());
  c.learning_rate = o.lr;
  c.max_epochs = o.epochs;
  c.batch_size = o.batch_size;
  c.patience = o.patience;
  c.seed = o.seed;
  c.Validate();
  out << "epoch\ttrain_loss\ttest_accuracy\n";
  const TrainResult r = Train(c, splits.class_ids, splits.train, splits.test,
                              [&](const EpochRecord& rec, const ClassifierState& s) {
                                WriteCheckpoint(o.out, s);
                                out << rec.epoch << '\t' << text::FormatSig6(rec.train_loss) << '\t'
                                    << text::FormatSig6(rec.test_accuracy) << '\n';
                              });
  WriteCheckpoint(o.out, r.state);
  out << "best_epoch\t" << r.best_epoch << "\ntest_accuracy\t" << text::FormatSig6(r.test_accuracy) << '\n';
  return kExitOk;
}

int EvalCmd(const Options& o, std::ostream& out) {
  const ClassifierState state = ReadCheckpoint(o.ckpt);
  const CorpusManifest m = LoadManifest(o.manifest);
  if (m.SortedIds() != state.class_ids) throw Error("manifest languages differ from the checkpoint's classes");
  const pipeline::Splits splits = pipeline::LoadSplits(m, o.features);
  out << "accuracy\t" << text::FormatSig6(Evaluate(state, splits.test)) << "\nn_test\t" << splits.test.features.size()
      << '\n';
  return kExitOk;
}

int EmbedCmd(const Options& o, std::ostream& out) {
  if (o.layer != "pre" && o.layer != "post") throw UsageError("--layer must be 'pre' or 'post'");
  const std::string bytes = text::ReadFile(o.ckpt);
  const ClassifierState state = DeserializeCheckpoint(bytes);
  const CorpusManifest m = LoadManifest(o.manifest);
  const pipeline::Splits splits = pipeline::LoadSplits(m, o.features);
  const EmbeddingTable table = pipeline::EmbedTestSplit(
      state, splits, o.layer == "pre" ? EmbeddingLayer::kPreActivation : EmbeddingLayer::kPostActivation,
      text::Fingerprint(bytes));
  WriteEmbeddings(o.out, table);
  out << "languages\t" << table.entries.size() << "\ndim\t" << table.embed_dim << "\nsource\t"
      << table.source_checkpoint << '\n';
  return kExitOk;
}

int KnnCmd(const Options& o, std::ostream& out) {
  const DistanceMatrix d = EmbeddingDistances(ReadEmbeddings(o.emb));
  const auto ids = NearestNeighbors(d, o.lang, o.k);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    out << r + 1 << '\t' << ids[r] << '\t' << text::FormatSig6(d.Between(o.lang, ids[r])) << '\n';
  }
  return kExitOk;
}

// Embedding and geographic matrices restricted to languages present in both.
std::pair<DistanceMatrix, DistanceMatrix> EmbeddingAndGeo(const EmbeddingTable& table, const CorpusManifest& m) {
  std::vector<LanguageRecord> languages;
  for (const auto& l : m.languages) {
    if (table.entries.count(l.id)) languages.push_back(l);
  }
  if (languages.size() != table.entries.size()) throw Error("embedding file holds languages missing from the manifest");
  return {EmbeddingDistances(table), GeoDistanceMatrix(languages)};
}

int MetricGeoCmd(const Options& o, std::ostream& out) {
  const auto [emb, geo] = EmbeddingAndGeo(ReadEmbeddings(o.emb), LoadManifest(o.manifest));
  EmitReport(out, CorrelationMetric(emb, geo, o.radius_km));
  return kExitOk;
}

int MetricTreeCmd(const Options& o, std::ostream& out) {
  RequireSource(o.source);
  const auto ks = ParseKList(o.k_list);
  const CorpusManifest m = LoadManifest(o.manifest);
  const DistanceMatrix emb = EmbeddingDistances(ReadEmbeddings(o.emb));
  EmitReport(out, TreeMetric(BuildForest(m.languages, o.source), emb, ks));
  return kExitOk;
}

int MetricForestCmd(const Options& o, std::ostream& out) {
  RequireSource(o.source);
  const CorpusManifest m = LoadManifest(o.manifest);
  EmitReport(out, o.source, ComputeForestStats(BuildForest(m.languages, o.source)));
  return kExitOk;
}

int OutliersCmd(const Options& o, std::ostream& out) {
  RequireSource(o.source);
  const CorpusManifest m = LoadManifest(o.manifest);
  const auto [emb, geo] = EmbeddingAndGeo(ReadEmbeddings(o.emb), m);
  const FamilyForest forest = BuildForest(m.languages, o.source);
  EmitReport(out, ComputeOutlierReport(emb, geo, forest, o.radius_km.value_or(kDefaultRadiusKm)), o.top);
  return kExitOk;
}

int NeighborCmd(const Options& o, std::ostream& out) {
  const NeighborMethod method = ParseNeighborMethod(o.method);
  std::optional<DistanceMatrix> matrix;
  switch (method) {
    case NeighborMethod::kEmbedding:
      if (o.emb.empty()) throw UsageError("--method emb needs --emb");
      matrix = EmbeddingDistances(ReadEmbeddings(o.emb));
      break;
    case NeighborMethod::kGeographic:
      if (o.manifest.empty()) throw UsageError("--method geo needs --manifest");
      matrix = GeoDistanceMatrix(LoadManifest(o.manifest).languages);
      break;
    case NeighborMethod::kPhoneme:
      if (o.phonemes.empty()) throw UsageError("--method ph needs --phonemes");
      matrix = PhonemeDistances(BuildPhonemeVectors(LoadPhonemeInventories(o.phonemes)));
      break;
  }
  const std::string neighbor = SelectNeighbor(method, *matrix, o.lang, o.k);
  out << ToString(method) << '\t' << o.lang << '\t' << o.k << '\t' << neighbor << '\t'
      << text::FormatSig6(matrix->Between(o.lang, neighbor)) << '\n';
  return kExitOk;
}

int McdReportCmd(const Options& o, std::ostream& out) {
  ZeroShotOptions z;
  z.order = o.order;
  z.max_utterances = o.max_utts;
  EmitReport(out, ScoreZeroShot(LoadScoringPairs(o.pairs), z));
  return kExitOk;
}

int TargetsCmd(const Options& o, std::ostream& out) {
  RequireSource(o.source);
  const FamilyForest forest = BuildForest(LoadManifest(o.manifest).languages, o.source);
  for (const auto& id : SelectTargets(forest, o.count)) {
    out << id << '\t' << forest.FamilyOf(id) << '\t' << forest.FamilySize(id) << '\n';
  }
  return kExitOk;
}

int PipelineCmd(const Options& o, std::ostream& out) {
  pipeline::PipelineConfig c = pipeline::ParsePipelineConfig(text::ReadFile(o.config), o.config.parent_path());
  if (o.threads > 1) c.threads = o.threads;
  pipeline::RunPipeline(c, out);
  return kExitOk;
}

}  // namespace

int Dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  log::InitFromEnvironment();
  Options o;
  CLI::App app{"Language similarity from speech: corpus tools, classifier training, embedding metrics", "atlas"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", o.threads, "Worker thread cap")->check(CLI::PositiveNumber);

  std::vector<std::pair<CLI::App*, std::function<int(const Options&, std::ostream&)>>> handlers;
  const auto cmd = [&](CLI::App* parent, const std::string& name, const std::string& help, auto fn) {
    CLI::App* sub = parent->add_subcommand(name, help);
    handlers.emplace_back(sub, fn);
    return sub;
  };

  auto* gen = cmd(&app, "gen-corpus", "Generate a synthetic multilingual corpus", GenCorpus);
  gen->add_option("--langs", o.langs, "Number of languages")->check(CLI::Range(2, 1000));
  gen->add_option("--utts", o.utts, "Utterances per language")->check(CLI::Range(4, 100000));
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("--out", o.out, "Output directory")->required();
  gen->add_option("--seconds", o.seconds, "Mean utterance duration")->check(CLI::Range(0.1, 60.0));
  gen->add_option("--train-frac", o.train_frac, "Train fraction per language")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--family-size", o.family_size, "Languages per synthetic family")->check(CLI::PositiveNumber);

  auto* split = cmd(&app, "split", "Re-split a manifest per language", SplitCmd);
  split->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  split->add_option("--train-frac", o.train_frac)->check(CLI::Range(0.0, 1.0));
  split->add_option("--seed", o.seed);
  split->add_option("--out", o.out, "Write the manifest here instead of standard output");

  auto* feat = cmd(&app, "featurize", "Compute 80-bin log-mel features", FeaturizeCmd);
  feat->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  feat->add_option("--out", o.out, "Feature directory")->required();
  feat->add_option("--window", o.mel.window_seconds)->check(CLI::PositiveNumber);
  feat->add_option("--hop", o.mel.hop_seconds)->check(CLI::PositiveNumber);
  feat->add_option("--fft-size", o.mel.fft_size)->check(CLI::PositiveNumber);
  feat->add_option("--fmin", o.mel.fmin_hz)->check(CLI::NonNegativeNumber);
  feat->add_option("--fmax", o.mel.fmax_hz)->check(CLI::PositiveNumber);

  auto* train = cmd(&app, "train", "Train the language classifier", TrainCmd);
  train->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  train->add_option("--features", o.features)->required()->check(CLI::ExistingDirectory);
  train->add_option("--out", o.out, "Checkpoint path")->required();
  train->add_option("--hidden", o.hidden)->check(CLI::PositiveNumber);
  train->add_option("--embed", o.embed)->check(CLI::PositiveNumber);
  train->add_option("--lr", o.lr)->check(CLI::PositiveNumber);
  train->add_option("--seed", o.seed);
  train->add_option("--epochs", o.epochs)->check(CLI::PositiveNumber);
  train->add_option("--batch-size", o.batch_size)->check(CLI::PositiveNumber);
  train->add_option("--patience", o.patience)->check(CLI::PositiveNumber);

  auto* eval = cmd(&app, "eval", "Test accuracy of a checkpoint", EvalCmd);
  eval->add_option("--ckpt", o.ckpt)->required()->check(CLI::ExistingFile);
  eval->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  eval->add_option("--features", o.features, "Cached features (computed from audio if omitted)")
      ->check(CLI::ExistingDirectory);

  auto* embed = cmd(&app, "embed", "Extract per-language embeddings", EmbedCmd);
  embed->add_option("--ckpt", o.ckpt)->required()->check(CLI::ExistingFile);
  embed->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  embed->add_option("--features", o.features)->check(CLI::ExistingDirectory);
  embed->add_option("--out", o.out, "Embedding file")->required();
  embed->add_option("--layer", o.layer, "pre or post (ReLU)");

  auto* knn = cmd(&app, "knn", "Nearest languages in embedding space", KnnCmd);
  knn->add_option("--emb", o.emb)->required()->check(CLI::ExistingFile);
  knn->add_option("--lang", o.lang)->required();
  knn->add_option("--k", o.k)->required()->check(CLI::PositiveNumber);

  CLI::App* metric = app.add_subcommand("metric", "Embedding evaluation metrics");
  metric->require_subcommand(1);
  auto* geo = cmd(metric, "geo", "Correlation with geographic distance", MetricGeoCmd);
  geo->add_option("--emb", o.emb)->required()->check(CLI::ExistingFile);
  geo->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  geo->add_option("--radius-km", o.radius_km, "Local variant radius")->check(CLI::PositiveNumber);
  auto* tree = cmd(metric, "tree", "Family member among k nearest neighbours", MetricTreeCmd);
  tree->add_option("--emb", o.emb)->required()->check(CLI::ExistingFile);
  tree->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  tree->add_option("--source", o.source);
  tree->add_option("--k", o.k_list, "Comma-separated k values");
  auto* forest = cmd(metric, "forest", "Family forest statistics", MetricForestCmd);
  forest->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  forest->add_option("--source", o.source);

  auto* outliers = cmd(&app, "outliers", "Languages far from their family", OutliersCmd);
  outliers->add_option("--emb", o.emb)->required()->check(CLI::ExistingFile);
  outliers->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  outliers->add_option("--source", o.source);
  outliers->add_option("--radius-km", o.radius_km)->check(CLI::PositiveNumber);
  outliers->add_option("--top", o.top, "Rows to print (0 = all)");

  auto* neighbor = cmd(&app, "neighbor", "k-th closest language by one distance method", NeighborCmd);
  neighbor->add_option("--method", o.method, "emb, geo or ph")->required();
  neighbor->add_option("--lang", o.lang)->required();
  neighbor->add_option("--k", o.k)->required()->check(CLI::PositiveNumber);
  neighbor->add_option("--emb", o.emb)->check(CLI::ExistingFile);
  neighbor->add_option("--manifest", o.manifest)->check(CLI::ExistingFile);
  neighbor->add_option("--phonemes", o.phonemes)->check(CLI::ExistingFile);

  auto* mcd = cmd(&app, "mcd-report", "Mean MCD per method and k over audio pairs", McdReportCmd);
  mcd->add_option("--pairs", o.pairs)->required()->check(CLI::ExistingFile);
  mcd->add_option("--order", o.order)->check(CLI::Range(1, kMelBins - 1));
  mcd->add_option("--max-utts", o.max_utts, "Utterances per directory (0 = all)");

  auto* targets = cmd(&app, "targets", "Languages with the most family members", TargetsCmd);
  targets->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  targets->add_option("--source", o.source);
  targets->add_option("--count", o.count)->check(CLI::PositiveNumber);

  auto* pipe = cmd(&app, "pipeline", "Run the whole chain from a config file", PipelineCmd);
  pipe->add_option("--config", o.config)->required()->check(CLI::ExistingFile);

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' && app.get_subcommand_no_throw(args[0]) == nullptr) {
    err << "atlas: usage error: unknown subcommand '" << args[0] << "'\n";
    return kExitUsage;
  }

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("atlas");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "atlas: usage error: " << OneLine(e.what()) << '\n';
    return kExitUsage;
  }

  for (const auto& [sub, fn] : handlers) {
    if (!sub->parsed()) continue;
    try {
      return fn(o, out);
    } catch (const UsageError& e) {
      err << "atlas: usage error: " << OneLine(e.what()) << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "atlas: error: " << OneLine(e.what()) << '\n';
      return kExitRuntime;
    }
  }
  err << "atlas: usage error: no subcommand given\n";
  return kExitUsage;
}

}  // namespace atlas::cli

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "atlas/corpus.hpp"
#include "atlas/dsp.hpp"
#include "atlas/embed.hpp"
#include "atlas/model.hpp"

namespace atlas::pipeline {

/// features_dir / <utterance path with a .mel extension>.
std::filesystem::path FeaturePath(const std::filesystem::path& features_dir, const UtteranceEntry& u);

/// Computes and caches log-mel features for every utterance, using up to
/// `threads` workers. Throws on a sample-rate mismatch.
void Featurize(const CorpusManifest& manifest, const std::filesystem::path& features_dir, const MelConfig& config,
               int threads = 1);

struct Splits {
  std::vector<std::string> class_ids;  // sorted language ids
  LabeledSet train;
  LabeledSet test;
  std::vector<std::string> test_language;  // parallel to test
};

/// Loads cached features, or computes them from audio with default settings
/// when `features_dir` is empty.
Splits LoadSplits(const CorpusManifest& manifest, const std::filesystem::path& features_dir);

/// Runs the classifier on every test utterance and averages per language.
EmbeddingTable EmbedTestSplit(const ClassifierState& state, const Splits& splits, EmbeddingLayer layer,
                              std::string source_checkpoint);

/// Declarative description of the whole chain, one `key<TAB>value` per line
/// after a `lingua-atlas-pipeline v1` header.
struct PipelineConfig {
  std::filesystem::path out_dir = "atlas-run";
  int langs = 10;
  int utts = 20;
  std::uint64_t seed = 7;
  double train_frac = 0.9;
  int hidden = 256;
  int embed = 64;
  double lr = 1e-3;
  int epochs = 30;
  int batch_size = 8;
  int patience = 5;
  double radius_km = 500.0;
  std::string source = "ethnologue";
  std::vector<std::size_t> k_values = {2, 4, 8, 16, 32, 64};
  std::size_t top = 5;
  int threads = 1;
};

inline constexpr std::string_view kPipelineHeader = "lingua-atlas-pipeline v1";

PipelineConfig ParsePipelineConfig(std::string_view text, const std::filesystem::path& base_dir = {});

struct PipelineSummary {
  double test_accuracy = 0.0;
  int best_epoch = 0;
  double global_mu = 0.0;
  double local_mu = 0.0;
};

/// gen-corpus, featurize, train, embed, metric geo (global and local),
/// metric tree, outliers. Artifacts and reports land under out_dir; a
/// summary goes to `out`.
PipelineSummary RunPipeline(const PipelineConfig& config, std::ostream& out);

}  // namespace atlas::pipeline

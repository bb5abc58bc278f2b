#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "atlas/distance.hpp"
#include "atlas/dsp.hpp"
#include "atlas/model.hpp"

namespace atlas {

inline constexpr std::string_view kEmbeddingHeader = "lingua-atlas-emb v1";

/// Which first-layer output becomes the language vector.
enum class EmbeddingLayer { kPreActivation, kPostActivation };

struct EmbeddingTable {
  std::map<std::string, Eigen::VectorXd> entries;
  int embed_dim = 0;
  std::string source_checkpoint;
  std::map<std::string, int> n_test_utterances;

  /// Throws InvalidArgument on a wrong dimension or a non-finite component.
  void Validate() const;
};

struct TestUtterance {
  std::string language_id;
  const MelSpectrogram* spec;
};

/// Mean first-layer output per language over its test utterances. Every
/// language in state.class_ids must have at least one utterance.
EmbeddingTable ExtractEmbeddings(const ClassifierState& state, std::span<const TestUtterance> test,
                                 EmbeddingLayer layer = EmbeddingLayer::kPreActivation);

/// Pairwise L2 distances, ids in lexicographic order.
DistanceMatrix EmbeddingDistances(const EmbeddingTable& table);

/// Pairwise L2 distances between arbitrary labelled vectors.
DistanceMatrix EuclideanDistanceMatrix(const std::map<std::string, Eigen::VectorXd>& vectors, DistanceKind kind);

/// Header, dim line, optional "#source" / "#n_test" metadata lines, then
/// `id<TAB>v1 v2 ...` with round-trip precision.
std::string FormatEmbeddings(const EmbeddingTable& table);
EmbeddingTable ParseEmbeddings(std::string_view text);
void WriteEmbeddings(const std::filesystem::path& path, const EmbeddingTable& table);
EmbeddingTable ReadEmbeddings(const std::filesystem::path& path);

}  // namespace atlas

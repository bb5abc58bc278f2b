#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/distance.hpp"
#include "atlas/dsp.hpp"
#include "atlas/familytree.hpp"

namespace atlas {

inline constexpr double kDefaultRadiusKm = 500.0;

// Outliers -------------------------------------------------------------------

struct OutlierRow {
  std::string id;
  std::size_t n_nearby_family = 0;
  std::size_t n_family = 0;
  std::size_t n_nearby = 0;
  double mean_family_distance = 0.0;
};

struct ColumnSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
};

struct OutlierReport {
  /// Descending mean_family_distance, ties by ascending id.
  std::vector<OutlierRow> rows;
  ColumnSummary nearby_family;
  ColumnSummary family;
  ColumnSummary nearby;
  ColumnSummary distance;
  double radius_km = kDefaultRadiusKm;
};

/// Non-single languages ranked by mean embedding distance to the rest of
/// their family. "Nearby" means geographic distance below radius_km.
OutlierReport ComputeOutlierReport(const DistanceMatrix& emb, const DistanceMatrix& geo, const FamilyForest& forest,
                                   double radius_km = kDefaultRadiusKm);

// Bag of phonemes ------------------------------------------------------------

struct PhonemeVector {
  std::string language_id;
  std::vector<std::uint8_t> bits;  // indexed by PhonemeSpace::alphabet
};

struct PhonemeSpace {
  std::vector<std::string> alphabet;  // sorted union of all inventories
  std::vector<PhonemeVector> vectors;  // sorted by language id
};

PhonemeSpace BuildPhonemeVectors(const std::map<std::string, std::set<std::string>>& inventories);

/// L2 distances between binary vectors (square root of the Hamming distance).
DistanceMatrix PhonemeDistances(const PhonemeSpace& space);

// Neighbour selection ----------------------------------------------------------

enum class NeighborMethod { kEmbedding, kGeographic, kPhoneme };

std::string_view ToString(NeighborMethod method);
/// Accepts "emb"/"embedding", "geo"/"geographic", "ph"/"phoneme".
NeighborMethod ParseNeighborMethod(std::string_view name);

/// k-th (1-based) closest other language under the method's matrix, whose
/// kind must match the method.
std::string SelectNeighbor(NeighborMethod method, const DistanceMatrix& matrix, std::string_view id, std::size_t k);

/// The `count` non-single languages with the largest families, ties by id.
std::vector<std::string> SelectTargets(const FamilyForest& forest, std::size_t count);

// Zero-shot scoring ------------------------------------------------------------

struct ScoringPair {
  std::string method;
  std::size_t k = 0;
  std::string target_id;
  std::string neighbor_id;
  std::filesystem::path target_dir;
  std::filesystem::path neighbor_dir;
};

/// `method<TAB>k<TAB>target<TAB>neighbor<TAB>target_dir<TAB>neighbor_dir`;
/// relative directories resolve against base_dir.
std::vector<ScoringPair> ParseScoringPairs(std::string_view text, const std::filesystem::path& base_dir = {});
std::vector<ScoringPair> LoadScoringPairs(const std::filesystem::path& path);

struct PairScore {
  ScoringPair pair;
  std::size_t n_utterances = 0;
  double mean_mcd = 0.0;
};

struct ZeroShotReport {
  std::vector<PairScore> pairs;
  std::vector<std::string> methods;  // in order of first appearance
  std::vector<std::size_t> k_values;  // ascending
  /// (method, k) -> mean over pairs of the per-pair mean MCD.
  std::map<std::pair<std::string, std::size_t>, double> cells;
};

struct ZeroShotOptions {
  int order = kDefaultMcdOrder;
  /// Use at most this many utterances per directory (sorted by file name); 0 = all.
  std::size_t max_utterances = 0;
  MelConfig mel;
};

/// MCD between each target utterance and its positional counterpart in the
/// neighbour directory, averaged per pair and then per (method, k).
ZeroShotReport ScoreZeroShot(const std::vector<ScoringPair>& pairs, const ZeroShotOptions& options = {});

/// Sorted *.wav files of a directory.
std::vector<std::filesystem::path> ListWavFiles(const std::filesystem::path& dir);

}  // namespace atlas

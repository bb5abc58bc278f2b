#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/corpus.hpp"
#include "atlas/distance.hpp"

namespace atlas {

/// Splits a classification string such as "Cariban, Guianan, Macro-Tupi" on
/// commas and trims each label. Throws ParseError (column = 1-based offset of
/// the offending label) on an empty string or an empty label.
ClassificationPath ParseClassification(std::string_view raw);

/// Inverse of ParseClassification, labels joined by ", ".
std::string JoinClassification(const ClassificationPath& path);

struct TreeNode {
  std::string label;  // group label, or the language id for a leaf
  bool leaf = false;
  std::vector<TreeNode> children;

  std::size_t LeafCount() const;
  void CollectLeaves(std::vector<std::string>& out) const;
};

/// Rooted trees from one classification source. Roots are families, inner
/// nodes are groups, leaves are the input languages.
class FamilyForest {
 public:
  const std::string& source() const { return source_; }
  const std::vector<TreeNode>& trees() const { return trees_; }

  bool Contains(std::string_view id) const;
  /// Root family label of a language.
  const std::string& FamilyOf(std::string_view id) const;
  const ClassificationPath& PathOf(std::string_view id) const;
  /// Languages in the same tree as `id`, excluding `id`, sorted.
  std::vector<std::string> FamilyMembers(std::string_view id) const;
  /// Size of the tree containing `id`.
  std::size_t FamilySize(std::string_view id) const;
  /// Languages whose tree has at least two leaves, sorted.
  std::vector<std::string> NonSingleLanguages() const;
  std::vector<std::string> Languages() const;

 private:
  friend FamilyForest BuildForest(const std::vector<LanguageRecord>&, std::string_view);

  std::string source_;
  std::vector<TreeNode> trees_;
  std::map<std::string, std::string, std::less<>> membership_;
  std::map<std::string, ClassificationPath, std::less<>> paths_;
  std::map<std::string, std::size_t, std::less<>> family_sizes_;
};

/// Throws InvalidArgument when a language lacks a classification for `source`.
FamilyForest BuildForest(const std::vector<LanguageRecord>& languages, std::string_view source);

struct ForestStats {
  std::size_t n_languages = 0;
  std::size_t n_non_single = 0;
  double non_single_percent = 0.0;
  /// Trees with at least two leaves.
  std::size_t n_families = 0;
  /// Singleton trees whose classification path is a single label.
  std::size_t n_isolates = 0;
};

ForestStats ComputeForestStats(const FamilyForest& forest);

struct TreeMetricReport {
  std::vector<std::size_t> k_values;  // ascending, unique
  std::vector<double> hit_rate;       // percent, parallel to k_values
  std::size_t n_eligible = 0;
};

/// Percentage of non-single languages with a same-family language among their
/// k nearest neighbours in `emb`.
TreeMetricReport TreeMetric(const FamilyForest& forest, const DistanceMatrix& emb,
                            std::vector<std::size_t> k_values);

}  // namespace atlas

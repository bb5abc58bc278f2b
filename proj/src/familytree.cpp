#include "atlas/familytree.hpp"

#include <algorithm>

#include "atlas/error.hpp"
#include "atlas/text_io.hpp"

namespace atlas {

ClassificationPath ParseClassification(std::string_view raw) {
  if (text::Trim(raw).empty()) throw ParseError("empty classification string", 0, 1);
  ClassificationPath path;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = raw.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? raw.size() : comma;
    const std::string_view label = text::Trim(raw.substr(start, end - start));
    if (label.empty()) {
      throw ParseError("empty label #" + std::to_string(path.size() + 1), 0, start + 1);
    }
    path.emplace_back(label);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return path;
}

std::string JoinClassification(const ClassificationPath& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ", ";
    out += path[i];
  }
  return out;
}

std::size_t TreeNode::LeafCount() const {
  if (leaf) return 1;
  std::size_t n = 0;
  for (const auto& c : children) n += c.LeafCount();
  return n;
}

void TreeNode::CollectLeaves(std::vector<std::string>& out) const {
  if (leaf) {
    out.push_back(label);
    return;
  }
  for (const auto& c : children) c.CollectLeaves(out);
}

namespace {

TreeNode& ChildGroup(std::vector<TreeNode>& siblings, const std::string& label) {
  for (auto& s : siblings) {
    if (!s.leaf && s.label == label) return s;
  }
  siblings.push_back(TreeNode{label, false, {}});
  return siblings.back();
}

}  // namespace

FamilyForest BuildForest(const std::vector<LanguageRecord>& languages, std::string_view source) {
  FamilyForest forest;
  forest.source_ = std::string(source);
  for (const auto& l : languages) {
    const auto it = l.classifications.find(std::string(source));
    if (it == l.classifications.end() || it->second.empty()) {
      throw InvalidArgument("language " + l.id + " has no " + std::string(source) + " classification");
    }
    if (forest.paths_.count(l.id)) throw InvalidArgument("duplicate language id " + l.id);
    const ClassificationPath& path = it->second;
    TreeNode* node = &ChildGroup(forest.trees_, path[0]);
    for (std::size_t d = 1; d < path.size(); ++d) node = &ChildGroup(node->children, path[d]);
    node->children.push_back(TreeNode{l.id, true, {}});
    forest.membership_.emplace(l.id, path[0]);
    forest.paths_.emplace(l.id, path);
  }
  for (const auto& tree : forest.trees_) {
    std::vector<std::string> leaves;
    tree.CollectLeaves(leaves);
    for (const auto& id : leaves) forest.family_sizes_[id] = leaves.size();
  }
  return forest;
}

bool FamilyForest::Contains(std::string_view id) const { return membership_.find(id) != membership_.end(); }

const std::string& FamilyForest::FamilyOf(std::string_view id) const {
  const auto it = membership_.find(id);
  if (it == membership_.end()) throw InvalidArgument("language " + std::string(id) + " is not in the forest");
  return it->second;
}

const ClassificationPath& FamilyForest::PathOf(std::string_view id) const {
  const auto it = paths_.find(id);
  if (it == paths_.end()) throw InvalidArgument("language " + std::string(id) + " is not in the forest");
  return it->second;
}

std::vector<std::string> FamilyForest::FamilyMembers(std::string_view id) const {
  const std::string& family = FamilyOf(id);
  std::vector<std::string> out;
  for (const auto& [other, fam] : membership_) {
    if (fam == family && other != id) out.push_back(other);
  }
  return out;
}

std::size_t FamilyForest::FamilySize(std::string_view id) const {
  const auto it = family_sizes_.find(id);
  if (it == family_sizes_.end()) throw InvalidArgument("language " + std::string(id) + " is not in the forest");
  return it->second;
}

std::vector<std::string> FamilyForest::NonSingleLanguages() const {
  std::vector<std::string> out;
  for (const auto& [id, size] : family_sizes_) {
    if (size >= 2) out.push_back(id);
  }
  return out;
}

std::vector<std::string> FamilyForest::Languages() const {
  std::vector<std::string> out;
  for (const auto& [id, fam] : membership_) out.push_back(id);
  return out;
}

ForestStats ComputeForestStats(const FamilyForest& forest) {
  if (forest.trees().empty()) throw InvalidArgument("forest is empty");
  ForestStats s;
  for (const auto& tree : forest.trees()) {
    const std::size_t leaves = tree.LeafCount();
    s.n_languages += leaves;
    if (leaves >= 2) {
      ++s.n_families;
      s.n_non_single += leaves;
    } else {
      std::vector<std::string> ids;
      tree.CollectLeaves(ids);
      if (forest.PathOf(ids.front()).size() == 1) ++s.n_isolates;
    }
  }
  s.non_single_percent = 100.0 * static_cast<double>(s.n_non_single) / static_cast<double>(s.n_languages);
  return s;
}

TreeMetricReport TreeMetric(const FamilyForest& forest, const DistanceMatrix& emb,
                            std::vector<std::size_t> k_values) {
  const std::size_t n = emb.size();
  if (n < 2) throw InvalidArgument("tree metric needs at least 2 languages");
  for (const auto& id : forest.Languages()) {
    if (!emb.Contains(id)) throw InvalidArgument("language " + id + " has no embedding");
  }
  if (k_values.empty()) throw InvalidArgument("no k values given");
  std::sort(k_values.begin(), k_values.end());
  k_values.erase(std::unique(k_values.begin(), k_values.end()), k_values.end());
  for (std::size_t k : k_values) {
    if (k < 1 || k > n - 1) {
      throw RangeError("k = " + std::to_string(k) + " outside [1, " + std::to_string(n - 1) + "]");
    }
  }
  const auto eligible = forest.NonSingleLanguages();
  if (eligible.empty()) throw InvalidArgument("no language in the forest has a family member");

  // Rank (1-based) of the closest family member in each eligible language's
  // full neighbour list; a hit at k means rank <= k.
  std::vector<std::size_t> first_member_rank;
  first_member_rank.reserve(eligible.size());
  for (const auto& id : eligible) {
    const auto neighbors = NearestNeighbors(emb, id, n - 1);
    const std::string& family = forest.FamilyOf(id);
    std::size_t rank = n;
    for (std::size_t r = 0; r < neighbors.size(); ++r) {
      if (forest.Contains(neighbors[r]) && forest.FamilyOf(neighbors[r]) == family) {
        rank = r + 1;
        break;
      }
    }
    first_member_rank.push_back(rank);
  }

  TreeMetricReport report;
  report.k_values = k_values;
  report.n_eligible = eligible.size();
  for (std::size_t k : k_values) {
    const auto hits = std::count_if(first_member_rank.begin(), first_member_rank.end(),
                                    [k](std::size_t r) { return r <= k; });
    report.hit_rate.push_back(100.0 * static_cast<double>(hits) / static_cast<double>(eligible.size()));
  }
  return report;
}

}  // namespace atlas

#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace atlas {

enum class DistanceKind { kEmbedding, kGeographic, kPhoneme };

std::string_view ToString(DistanceKind kind);

/// Symmetric, zero-diagonal, non-negative pairwise distances over a fixed id
/// order (lexicographic by convention).
class DistanceMatrix {
 public:
  DistanceMatrix(std::vector<std::string> ids, Eigen::MatrixXd values, DistanceKind kind);

  const std::vector<std::string>& ids() const { return ids_; }
  const Eigen::MatrixXd& values() const { return values_; }
  DistanceKind kind() const { return kind_; }
  std::size_t size() const { return ids_.size(); }

  bool Contains(std::string_view id) const;
  /// Throws InvalidArgument for an unknown id.
  std::size_t IndexOf(std::string_view id) const;
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  double Between(std::string_view a, std::string_view b) const;

  /// Same id set, regardless of order.
  bool SameIds(const DistanceMatrix& other) const;

 private:
  std::vector<std::string> ids_;
  Eigen::MatrixXd values_;
  DistanceKind kind_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// The k other languages closest to `id`, ascending, ties broken by id.
/// Requires 1 <= k <= n-1.
std::vector<std::string> NearestNeighbors(const DistanceMatrix& matrix, std::string_view id, std::size_t k);

}  // namespace atlas

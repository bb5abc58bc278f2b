#include "atlas/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "atlas/error.hpp"

namespace atlas {

std::string_view ToString(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::kEmbedding: return "embedding";
    case DistanceKind::kGeographic: return "geographic";
    case DistanceKind::kPhoneme: return "phoneme";
  }
  return "unknown";
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> ids, Eigen::MatrixXd values, DistanceKind kind)
    : ids_(std::move(ids)), values_(std::move(values)), kind_(kind) {
  const auto n = static_cast<Eigen::Index>(ids_.size());
  if (values_.rows() != n || values_.cols() != n) {
    throw InvalidArgument("distance matrix is " + std::to_string(values_.rows()) + "x" +
                          std::to_string(values_.cols()) + " for " + std::to_string(n) + " ids");
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) throw InvalidArgument("duplicate id " + ids_[i] + " in distance matrix");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values_(i, i) != 0.0) throw InvalidArgument("distance matrix diagonal must be zero");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = values_(i, j);
      if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("distances must be finite and non-negative");
      if (std::abs(v - values_(j, i)) > 1e-9 * std::max(1.0, std::abs(v))) {
        throw InvalidArgument("distance matrix is not symmetric");
      }
    }
  }
}

bool DistanceMatrix::Contains(std::string_view id) const { return index_.count(std::string(id)) > 0; }

std::size_t DistanceMatrix::IndexOf(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) throw InvalidArgument("unknown language id " + std::string(id));
  return it->second;
}

double DistanceMatrix::Between(std::string_view a, std::string_view b) const {
  return values_(static_cast<Eigen::Index>(IndexOf(a)), static_cast<Eigen::Index>(IndexOf(b)));
}

bool DistanceMatrix::SameIds(const DistanceMatrix& other) const {
  if (other.size() != size()) return false;
  return std::all_of(ids_.begin(), ids_.end(), [&](const std::string& id) { return other.Contains(id); });
}

std::vector<std::string> NearestNeighbors(const DistanceMatrix& matrix, std::string_view id, std::size_t k) {
  const std::size_t q = matrix.IndexOf(id);
  const std::size_t n = matrix.size();
  if (k < 1 || k > n - 1) {
    throw RangeError("k = " + std::to_string(k) + " outside [1, " + std::to_string(n - 1) + "]");
  }
  std::vector<std::size_t> order;
  order.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != q) order.push_back(j);
  }
  const auto& ids = matrix.ids();
  const auto closer = [&](std::size_t a, std::size_t b) {
    const double da = matrix(q, a);
    const double db = matrix(q, b);
    if (da != db) return da < db;
    return ids[a] < ids[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) out.push_back(ids[order[r]]);
  return out;
}

}  // namespace atlas

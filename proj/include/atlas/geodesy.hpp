#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "atlas/corpus.hpp"
#include "atlas/distance.hpp"

namespace atlas {

/// Mean Earth radius (IUGG), km.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Great-circle (haversine) distance in km.
double GeoDistanceKm(double lat1, double lon1, double lat2, double lon2);
double GeoDistanceKm(const LanguageRecord& a, const LanguageRecord& b);

/// Pairwise geo distances, ids in lexicographic order.
DistanceMatrix GeoDistanceMatrix(const std::vector<LanguageRecord>& languages);

/// Sample Pearson correlation. Empty when fewer than two points or either
/// sequence is constant. Throws InvalidArgument on a length mismatch.
std::optional<double> Pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationReport {
  /// Per language, in the embedding matrix's id order.
  std::vector<std::pair<std::string, std::optional<double>>> per_language;
  /// Mean and sample standard deviation over defined entries. NaN when no
  /// entry is defined; sigma is 0 for a single defined entry.
  double mu = 0.0;
  double sigma = 0.0;
  std::optional<double> radius_km;
  std::size_t n_excluded = 0;
};

/// For every language i, correlates e(i, j) with g(i, j) over j != i, or
/// over j with g(i, j) < radius_km for the local variant.
CorrelationReport CorrelationMetric(const DistanceMatrix& emb, const DistanceMatrix& geo,
                                    std::optional<double> radius_km = std::nullopt);

/// Mean and sample standard deviation (n - 1); sigma is 0 for n == 1.
std::pair<double, double> MeanAndSampleStd(std::span<const double> values);

}  // namespace atlas

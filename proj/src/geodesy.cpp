#include "atlas/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "atlas/error.hpp"

namespace atlas {

double GeoDistanceKm(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double phi1 = lat1 * kRad;
  const double phi2 = lat2 * kRad;
  const double dphi = (lat2 - lat1) * kRad;
  const double dlambda = (lon2 - lon1) * kRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double GeoDistanceKm(const LanguageRecord& a, const LanguageRecord& b) {
  return GeoDistanceKm(a.lat, a.lon, b.lat, b.lon);
}

DistanceMatrix GeoDistanceMatrix(const std::vector<LanguageRecord>& languages) {
  if (languages.size() < 2) throw InvalidArgument("geographic distance matrix needs at least 2 languages");
  std::vector<const LanguageRecord*> sorted;
  for (const auto& l : languages) sorted.push_back(&l);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
  const auto n = static_cast<Eigen::Index>(sorted.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < n; ++i) {
    ids.push_back(sorted[static_cast<std::size_t>(i)]->id);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = GeoDistanceKm(*sorted[static_cast<std::size_t>(i)], *sorted[static_cast<std::size_t>(j)]);
      values(i, j) = d;
      values(j, i) = d;
    }
  }
  return DistanceMatrix(std::move(ids), std::move(values), DistanceKind::kGeographic);
}

std::optional<double> Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidArgument("pearson: lengths differ (" + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  }
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  if (*xmin == *xmax || *ymin == *ymax) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

std::pair<double, double> MeanAndSampleStd(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  if (n == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

CorrelationReport CorrelationMetric(const DistanceMatrix& emb, const DistanceMatrix& geo,
                                    std::optional<double> radius_km) {
  if (!emb.SameIds(geo)) throw InvalidArgument("embedding and geographic matrices cover different languages");
  if (radius_km && !(*radius_km > 0.0)) throw RangeError("radius must be positive");
  CorrelationReport report;
  report.radius_km = radius_km;
  const std::size_t n = emb.size();
  std::vector<std::size_t> geo_index(n);
  for (std::size_t i = 0; i < n; ++i) geo_index[i] = geo.IndexOf(emb.ids()[i]);
  std::vector<double> defined;
  std::vector<double> e_row, g_row;
  for (std::size_t i = 0; i < n; ++i) {
    e_row.clear();
    g_row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double g = geo(geo_index[i], geo_index[j]);
      if (radius_km && !(g < *radius_km)) continue;
      e_row.push_back(emb(i, j));
      g_row.push_back(g);
    }
    const auto c = Pearson(e_row, g_row);
    report.per_language.emplace_back(emb.ids()[i], c);
    if (c) {
      defined.push_back(*c);
    } else {
      ++report.n_excluded;
    }
  }
  std::tie(report.mu, report.sigma) = MeanAndSampleStd(defined);
  return report;
}

}  // namespace atlas
